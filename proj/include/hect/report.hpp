#pragma once

#include <json.hpp>

#include "hect/classifier.hpp"
#include "hect/diagnostics.hpp"
#include "hect/preprocess.hpp"
#include "hect/synthgen.hpp"
#include "hect/testing.hpp"

namespace hect {

inline constexpr int kSchemaVersion = 1;

nlohmann::ordered_json to_json(const ClassifierSpec& spec);
nlohmann::ordered_json to_json(const TestReport& report);
nlohmann::ordered_json to_json(const DiagnosticsReport& report);
nlohmann::ordered_json to_json(const FilterMask& mask);
nlohmann::ordered_json to_json(const StandardizationParams& params);
nlohmann::ordered_json to_json(const StudyTable& table);

/// Pretty-printed with a trailing newline; byte-stable for equal inputs.
std::string dump(const nlohmann::ordered_json& j);

}  // namespace hect
