#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hect::cli {

// Exit codes: 0 pass/success, 1 fail verdict, 2 usage or parse error,
// 3 schema mismatch, 4 any other error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitSchema = 3;
inline constexpr int kExitError = 4;

/// args[0] is the program name.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hect::cli
