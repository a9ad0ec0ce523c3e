#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hect/diagnostics.hpp"
#include "hect/io.hpp"
#include "hect/pca_baseline.hpp"
#include "hect/preprocess.hpp"
#include "hect/report.hpp"
#include "hect/synthgen.hpp"
#include "hect/testing.hpp"

namespace hect::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct InputOptions {
  std::string trusted;
  std::string test;
  std::string format = "csv";
  std::string trusted_names;
  std::string test_names;
};

struct ClassifierOptions {
  std::string classifier = "logistic";
  int folds = 5;
  std::string class_weighting = "auto";
  LogisticParams logistic;
  BoostParams boost;
  KnnParams knn;
};

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out;
  double alpha = 0.05;
};

// ---------------------------------------------------------------------------
// Option registration

void add_common(CLI::App* sub, CommonOptions& o, bool needs_seed, bool needs_out = true) {
  auto* seed = sub->add_option("--seed", o.seed, "Master seed for every random stream");
  if (needs_seed) seed->required();
  sub->add_option("--jobs", o.jobs, "Concurrent replicates/trials (output does not depend on it)")
      ->check(CLI::Range(1u, 1024u));
  auto* out = sub->add_option("--out", o.out, "Output path ('-' for stdout where a file is written)");
  if (needs_out) out->required();
  sub->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
}

void add_input(CLI::App* sub, InputOptions& o, bool test_required) {
  sub->add_option("--trusted", o.trusted, "Trusted ensemble file")->required();
  auto* test = sub->add_option("--test", o.test, "Test ensemble file");
  if (test_required) test->required();
  sub->add_option("--format", o.format, "Input format")
      ->check(CLI::IsMember({"csv", "rawf64", "raw4d"}));
  sub->add_option("--trusted-names", o.trusted_names,
                  "Variable-name sidecar of a binary trusted file (default <file>.names.csv)");
  sub->add_option("--test-names", o.test_names,
                  "Variable-name sidecar of a binary test file (default <file>.names.csv)");
}

void add_classifier(CLI::App* sub, ClassifierOptions& o) {
  sub->add_option("--classifier", o.classifier, "Class-posterior estimator")
      ->check(CLI::IsMember({"constant", "logistic", "gbstumps", "knn"}));
  sub->add_option("--folds", o.folds, "Stratified cross-fitting folds");
  sub->add_option("--class-weighting", o.class_weighting, "Sample weighting")
      ->check(CLI::IsMember({"auto", "balanced", "none"}));
  sub->add_option("--l2-lambda", o.logistic.l2_lambda, "Logistic L2 penalty");
  sub->add_option("--max-iters", o.logistic.max_iters, "Logistic gradient-descent iterations");
  sub->add_option("--tol", o.logistic.tol, "Logistic gradient tolerance");
  sub->add_option("--n-rounds", o.boost.n_rounds, "Boosting rounds");
  sub->add_option("--learning-rate", o.boost.learning_rate, "Boosting shrinkage");
  sub->add_option("--l2-leaf", o.boost.l2_leaf, "Boosting leaf penalty");
  sub->add_option("--min-leaf", o.boost.min_leaf, "Boosting minimum samples per leaf");
  sub->add_option("--k", o.knn.k, "Neighbours for knn");
}

ClassifierSpec to_spec(const ClassifierOptions& o) {
  ClassifierSpec spec;
  spec.kind = parse_classifier_kind(o.classifier);
  spec.folds = o.folds;
  spec.weighting = parse_class_weighting(o.class_weighting);
  spec.logistic = o.logistic;
  spec.boost = o.boost;
  spec.knn = o.knn;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Helpers

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  auto to_index = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::InvalidConfig, "bad feature index '" + std::string(s) + "'");
    }
    return v;
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_index(item));
    } else {
      const auto lo = to_index(std::string_view(item).substr(0, dash));
      const auto hi = to_index(std::string_view(item).substr(dash + 1));
      if (hi < lo) throw Error(ErrorCode::InvalidConfig, "bad feature range '" + item + "'");
      for (std::size_t j = lo; j <= hi; ++j) out.push_back(j);
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::InvalidConfig, "bad number '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

fs::path names_for(const std::string& data, const std::string& names) {
  return names.empty() ? io::default_names_path(data) : fs::path(names);
}

std::vector<RawRun> load_raw(const std::string& path, const std::string& names, Role role) {
  return io::read_raw4d(path, names_for(path, names), role);
}

Ensemble average(const std::vector<RawRun>& raws, Role role, bool last_time_only) {
  std::vector<Run> runs;
  runs.reserve(raws.size());
  for (const auto& r : raws) runs.push_back(spatial_average(r, last_time_only));
  return Ensemble(runs, role);
}

Ensemble load(const std::string& path, const std::string& format, const std::string& names,
              Role role, bool last_time_only = true) {
  if (format == "csv") return io::read_csv(path, role);
  if (format == "rawf64") return io::read_rawf64(path, names_for(path, names), role);
  return average(load_raw(path, names, role), role, last_time_only);
}

json input_json(const InputOptions& in) {
  json j;
  j["trusted"] = fs::path(in.trusted).filename().string();
  if (!in.test.empty()) j["test"] = fs::path(in.test).filename().string();
  j["format"] = in.format;
  return j;
}

json envelope(std::string_view command, json config, std::optional<std::uint64_t> seed) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  if (seed) j["seed"] = *seed;
  j["config"] = std::move(config);
  return j;
}

void emit(const std::string& out_path, std::string_view text, std::ostream& out) {
  if (out_path == "-") {
    out << text;
  } else {
    io::write_text(out_path, text);
  }
}

int verdict(const TestReport& r) { return r.decision == Decision::Fail ? kExitFail : kExitPass; }

// ---------------------------------------------------------------------------
// Commands

struct PreprocessOptions {
  InputOptions input;
  CommonOptions common;
  double corr_threshold = 0.98;
  double cv_threshold = 0.0;
  bool all_time_steps = false;
  bool no_standardize = false;
};

int cmd_preprocess(const PreprocessOptions& o, std::ostream&) {
  const bool last_only = !o.all_time_steps;
  const Ensemble trusted = load(o.input.trusted, o.input.format, o.input.trusted_names,
                                Role::Trusted, last_only);
  std::optional<Ensemble> test;
  if (!o.input.test.empty()) {
    test = load(o.input.test, o.input.format, o.input.test_names, Role::Test, last_only);
    require_same_schema(trusted.variable_names(), test->variable_names(), "preprocess");
  }

  FilterOptions fopt;
  fopt.corr_threshold = o.corr_threshold;
  fopt.cv_threshold = o.cv_threshold;
  const FilterMask mask = fit_filter(trusted, fopt);
  Ensemble trusted_out = apply_filter(trusted, mask);
  std::optional<Ensemble> test_out;
  if (test) test_out = apply_filter(*test, mask);

  std::optional<StandardizationParams> params;
  if (!o.no_standardize) {
    params = fit_standardize(trusted_out);
    trusted_out = apply_standardize(trusted_out, *params);
    if (test_out) test_out = apply_standardize(*test_out, *params);
  }

  const fs::path dir(o.common.out);
  fs::create_directories(dir);
  io::write_csv(dir / "trusted.csv", trusted_out);
  if (test_out) io::write_csv(dir / "test.csv", *test_out);

  json config;
  config["input"] = input_json(o.input);
  config["corr_threshold"] = o.corr_threshold;
  config["cv_threshold"] = o.cv_threshold;
  config["last_time_only"] = last_only;
  config["standardize"] = !o.no_standardize;
  json doc = envelope("preprocess", std::move(config), std::nullopt);
  doc["filter"] = to_json(mask);
  if (params) doc["standardization"] = to_json(*params);
  io::write_text(dir / "mask.json", dump(doc));
  return kExitPass;
}

struct TestOptions {
  InputOptions input;
  CommonOptions common;
  ClassifierOptions classifier;
  int B = 1000;
  int E = 200;
  std::optional<std::size_t> m_e;
  int shuffles = 5;
};

int cmd_test2s(const TestOptions& o, std::ostream& out) {
  const Ensemble trusted = load(o.input.trusted, o.input.format, o.input.trusted_names, Role::Trusted);
  const Ensemble test = load(o.input.test, o.input.format, o.input.test_names, Role::Test);
  PermConfig cfg{o.B, o.common.alpha, *o.common.seed, o.common.jobs};
  const TestReport report = two_sample_test(trusted, test, to_spec(o.classifier), cfg);

  json config;
  config["input"] = input_json(o.input);
  config["B"] = o.B;
  config["alpha"] = o.common.alpha;
  config["classifier"] = to_json(report.classifier);
  json doc = envelope("test2s", std::move(config), o.common.seed);
  doc["report"] = to_json(report);
  emit(o.common.out, dump(doc), out);
  return verdict(report);
}

GofConfig gof_config(const TestOptions& o) {
  GofConfig cfg;
  cfg.E = o.E;
  cfg.m_e = o.m_e;
  cfg.alpha = o.common.alpha;
  cfg.seed = *o.common.seed;
  cfg.jobs = o.common.jobs;
  return cfg;
}

json gof_config_json(const TestOptions& o, const TestReport& report) {
  json config;
  config["input"] = input_json(o.input);
  config["E"] = o.E;
  config["m_e"] = report.m_e;
  config["alpha"] = o.common.alpha;
  config["classifier"] = to_json(report.classifier);
  return config;
}

int cmd_gof(const TestOptions& o, std::ostream& out) {
  const Ensemble trusted = load(o.input.trusted, o.input.format, o.input.trusted_names, Role::Trusted);
  const Ensemble test = load(o.input.test, o.input.format, o.input.test_names, Role::Test);
  const TestReport report = gof_test(trusted, test, to_spec(o.classifier), gof_config(o));
  json doc = envelope("gof", gof_config_json(o, report), o.common.seed);
  doc["report"] = to_json(report);
  emit(o.common.out, dump(doc), out);
  return verdict(report);
}

int cmd_diagnose(const TestOptions& o, std::ostream& out) {
  const Ensemble trusted = load(o.input.trusted, o.input.format, o.input.trusted_names, Role::Trusted);
  const Ensemble test = load(o.input.test, o.input.format, o.input.test_names, Role::Test);
  const GofDiagnostics result =
      gof_diagnose(trusted, test, to_spec(o.classifier), gof_config(o), o.shuffles);
  json config = gof_config_json(o, result.test);
  config["shuffles"] = o.shuffles;
  json doc = envelope("diagnose", std::move(config), o.common.seed);
  doc["report"] = to_json(result.test);
  doc["diagnostics"] = to_json(result.diagnostics);
  emit(o.common.out, dump(doc), out);
  return verdict(result.test);
}

struct BaselineOptions {
  InputOptions input;
  CommonOptions common;
  std::size_t n_pc = 50;
  double z_threshold = 2.0;
  std::size_t fail_count = 3;
};

int cmd_baseline(const BaselineOptions& o, std::ostream& out) {
  const Ensemble trusted = load(o.input.trusted, o.input.format, o.input.trusted_names, Role::Trusted);
  const Ensemble test = load(o.input.test, o.input.format, o.input.test_names, Role::Test);
  const PcaModel model = fit_pca(trusted, o.n_pc);
  PcaEctConfig cfg{o.z_threshold, o.fail_count, o.common.alpha};
  TestReport report = pca_ect(model, project(model, trusted), test, cfg);
  if (o.common.seed) report.seed = *o.common.seed;

  json config;
  config["input"] = input_json(o.input);
  config["n_pc_requested"] = o.n_pc;
  config["n_pc"] = model.n_pc;
  config["z_threshold"] = o.z_threshold;
  config["fail_count"] = o.fail_count;
  json doc = envelope("baseline", std::move(config), o.common.seed);
  doc["report"] = to_json(report);
  json ev = json::array();
  for (Eigen::Index k = 0; k < model.explained_variance.size(); ++k) ev.push_back(model.explained_variance[k]);
  doc["explained_variance"] = std::move(ev);
  emit(o.common.out, dump(doc), out);
  return verdict(report);
}

struct SynthOptions {
  std::size_t d = 20;
  std::size_t m = 100;
  std::size_t n = 20;
  std::string correlation = "independent";
  double rho = 0.0;
  std::size_t block_size = 1;
  std::string shift = "none";
  double delta = 0.0;
  double factor = 1.0;
  std::string features;
};

void add_synth(CLI::App* sub, SynthOptions& o) {
  sub->add_option("--d", o.d, "Feature count");
  sub->add_option("--m", o.m, "Trusted runs");
  sub->add_option("--n", o.n, "Test runs");
  sub->add_option("--correlation", o.correlation, "Correlation structure")
      ->check(CLI::IsMember({"independent", "ar1", "blocks"}));
  sub->add_option("--rho", o.rho, "Correlation parameter");
  sub->add_option("--block-size", o.block_size, "Block size for blocks correlation");
  sub->add_option("--shift", o.shift, "Shift applied to test runs")
      ->check(CLI::IsMember({"none", "mean", "variance", "corrbreak"}));
  sub->add_option("--delta", o.delta, "Mean shift");
  sub->add_option("--factor", o.factor, "Standard-deviation scale factor");
  sub->add_option("--features", o.features, "Shifted features, 0-based, e.g. 0-4,7");
}

SynthConfig to_synth(const SynthOptions& o, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.d = o.d;
  cfg.m = o.m;
  cfg.n = o.n;
  cfg.correlation = {parse_correlation_kind(o.correlation), o.rho, o.block_size};
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

ShiftSpec to_shift(const SynthOptions& o, double magnitude) {
  ShiftSpec s;
  s.kind = parse_shift_kind(o.shift);
  if (s.kind == ShiftKind::None) return s;
  s.features = parse_index_list(o.features);
  if (s.kind == ShiftKind::MeanShift) s.delta = magnitude;
  if (s.kind == ShiftKind::VarianceScale) s.factor = magnitude;
  return s;
}

json synth_json(const SynthOptions& o) {
  json j;
  j["d"] = o.d;
  j["m"] = o.m;
  j["n"] = o.n;
  j["correlation"] = o.correlation;
  j["rho"] = o.rho;
  j["block_size"] = o.block_size;
  j["shift"] = o.shift;
  j["delta"] = o.delta;
  j["factor"] = o.factor;
  j["features"] = o.features;
  return j;
}

struct SimulateOptions {
  CommonOptions common;
  SynthOptions synth;
  std::string format = "csv";
};

int cmd_simulate(const SimulateOptions& o, std::ostream&) {
  const SynthConfig cfg = to_synth(o.synth, *o.common.seed);
  const ShiftSpec shift =
      to_shift(o.synth, o.synth.shift == "variance" ? o.synth.factor : o.synth.delta);
  const Ensemble trusted = generate(cfg, shift, Role::Trusted);
  const Ensemble test = generate(cfg, shift, Role::Test);
  const fs::path dir(o.common.out);
  fs::create_directories(dir);
  if (o.format == "csv") {
    io::write_csv(dir / "trusted.csv", trusted);
    io::write_csv(dir / "test.csv", test);
  } else {
    io::write_rawf64(dir / "trusted.rawf64", io::default_names_path(dir / "trusted.rawf64"), trusted);
    io::write_rawf64(dir / "test.rawf64", io::default_names_path(dir / "test.rawf64"), test);
  }
  json config = synth_json(o.synth);
  config["format"] = o.format;
  io::write_text(dir / "simulate.json", dump(envelope("simulate", std::move(config), o.common.seed)));
  return kExitPass;
}

struct StudyOptions {
  CommonOptions common;
  SynthOptions synth;
  ClassifierOptions classifier;
  std::string type = "typei";
  std::size_t trials = 100;
  std::string method = "gof";
  std::string classifiers;  // comma list, overrides --classifier
  std::string magnitudes = "0,0.5,1,2,4";
  int B = 199;
  int E = 99;
  std::optional<std::size_t> m_e;
  std::size_t n_pc = 50;
};

int cmd_study(const StudyOptions& o, std::ostream& out) {
  StudyConfig cfg;
  cfg.type = parse_study_type(o.type);
  cfg.trials = o.trials;
  if (o.method == "gof") {
    cfg.method = TestMethod::GoodnessOfFit;
  } else if (o.method == "test2s") {
    cfg.method = TestMethod::TwoSamplePermutation;
  } else {
    cfg.method = TestMethod::PcaBaseline;
  }
  cfg.synth = to_synth(o.synth, 0);
  cfg.seed = *o.common.seed;
  cfg.jobs = o.common.jobs;
  cfg.perm = PermConfig{o.B, o.common.alpha, 0, 1};
  cfg.gof.E = o.E;
  cfg.gof.m_e = o.m_e;
  cfg.gof.alpha = o.common.alpha;
  cfg.pca.alpha = o.common.alpha;
  cfg.n_pc = o.n_pc;

  cfg.classifiers.clear();
  std::vector<std::string> kinds;
  if (o.classifiers.empty()) {
    kinds.push_back(o.classifier.classifier);
  } else {
    std::stringstream ss(o.classifiers);
    for (std::string k; std::getline(ss, k, ',');) {
      if (!k.empty()) kinds.push_back(k);
    }
  }
  for (const auto& k : kinds) {
    ClassifierOptions c = o.classifier;
    c.classifier = k;
    cfg.classifiers.push_back(to_spec(c));
  }
  if (cfg.type == StudyType::Power) {
    if (o.synth.shift == "none") {
      throw Error(ErrorCode::InvalidConfig, "a power study needs --shift other than none");
    }
    for (double mag : parse_double_list(o.magnitudes)) cfg.shifts.push_back(to_shift(o.synth, mag));
  }

  const StudyTable table = run_study(cfg);
  emit(o.common.out, to_csv(table), out);

  if (o.common.out != "-") {
    json config = synth_json(o.synth);
    config["type"] = o.type;
    config["trials"] = o.trials;
    config["method"] = o.method;
    config["magnitudes"] = o.magnitudes;
    config["B"] = o.B;
    config["E"] = o.E;
    if (o.m_e) config["m_e"] = *o.m_e;
    config["n_pc"] = o.n_pc;
    config["alpha"] = o.common.alpha;
    json specs = json::array();
    for (const auto& s : cfg.classifiers) specs.push_back(to_json(s));
    config["classifiers"] = std::move(specs);
    json doc = envelope("study", std::move(config), o.common.seed);
    doc["table"] = to_json(table);
    io::write_text(fs::path(o.common.out).replace_extension(".json"), dump(doc));
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// Config file: key=value lines; '#' starts a comment. Keys are long flag
// names without the leading dashes. Values are appended as flags unless the
// same flag already appears on the command line.

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::optional<std::string> path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (!path) return kept;

  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(kept.begin(), kept.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  const std::string text = io::read_text(*path);
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> extra;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string_view l = line;
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "config line without '='");
    std::string key(trim(l.substr(0, eq)));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    const std::string value(trim(l.substr(eq + 1)));
    if (key.empty()) throw ParseError(lineno, "config line without a key");
    if (!given(key)) extra.push_back("--" + key + "=" + value);
  }
  kept.insert(kept.end(), extra.begin(), extra.end());
  return kept;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError: return kExitParse;
    case ErrorCode::SchemaMismatch: return kExitSchema;
    default: return kExitError;
  }
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hect: classifier-based ensemble consistency testing"};
  app.require_subcommand(1);

  PreprocessOptions pre;
  auto* preprocess = app.add_subcommand("preprocess", "Average, filter and standardize ensembles");
  add_input(preprocess, pre.input, false);
  add_common(preprocess, pre.common, false);
  preprocess->add_option("--corr-threshold", pre.corr_threshold, "Redundancy |r| threshold");
  preprocess->add_option("--cv-threshold", pre.cv_threshold, "Temporal coefficient-of-variation floor");
  preprocess->add_flag("--all-time-steps", pre.all_time_steps, "Keep every time step of raw4d input");
  preprocess->add_flag("--no-standardize", pre.no_standardize, "Skip standardization");

  TestOptions t2;
  auto* test2s = app.add_subcommand("test2s", "Classifier two-sample permutation test");
  add_input(test2s, t2.input, true);
  add_common(test2s, t2.common, true);
  add_classifier(test2s, t2.classifier);
  test2s->add_option("--B", t2.B, "Permutations");

  TestOptions gf;
  auto* gof = app.add_subcommand("gof", "Goodness-of-fit test against trusted resamples");
  add_input(gof, gf.input, true);
  add_common(gof, gf.common, true);
  add_classifier(gof, gf.classifier);
  gof->add_option("--E", gf.E, "Null ensembles");
  gof->add_option("--m-e", gf.m_e, "Pseudo-test size per null ensemble (default: test size)");

  TestOptions dg;
  auto* diagnose = app.add_subcommand("diagnose", "Goodness-of-fit test with per-feature diagnostics");
  add_input(diagnose, dg.input, true);
  add_common(diagnose, dg.common, true);
  add_classifier(diagnose, dg.classifier);
  diagnose->add_option("--E", dg.E, "Null ensembles");
  diagnose->add_option("--m-e", dg.m_e, "Pseudo-test size per null ensemble");
  diagnose->add_option("--shuffles", dg.shuffles, "Column shuffles per feature");

  BaselineOptions bl;
  auto* baseline = app.add_subcommand("baseline", "PCA-score consistency baseline");
  add_input(baseline, bl.input, true);
  add_common(baseline, bl.common, false);
  baseline->add_option("--n-pc", bl.n_pc, "Principal components");
  baseline->add_option("--z-threshold", bl.z_threshold, "Extreme-score threshold in trusted sds");
  baseline->add_option("--fail-count", bl.fail_count, "Extreme scores that fail a run");

  SimulateOptions sm;
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic trusted/test ensemble pair");
  add_common(simulate, sm.common, true);
  add_synth(simulate, sm.synth);
  simulate->add_option("--format", sm.format, "Output format")->check(CLI::IsMember({"csv", "rawf64"}));

  StudyOptions st;
  auto* study = app.add_subcommand("study", "Monte Carlo type-I or power study");
  add_common(study, st.common, true);
  add_synth(study, st.synth);
  add_classifier(study, st.classifier);
  study->add_option("--type", st.type, "Study type")->check(CLI::IsMember({"typei", "power"}));
  study->add_option("--trials", st.trials, "Trials per table row");
  study->add_option("--method", st.method, "Test")->check(CLI::IsMember({"gof", "test2s", "baseline"}));
  study->add_option("--classifiers", st.classifiers, "Comma-separated classifiers (overrides --classifier)");
  study->add_option("--magnitudes", st.magnitudes, "Comma-separated shift magnitudes for power studies");
  study->add_option("--B", st.B, "Permutations");
  study->add_option("--E", st.E, "Null ensembles");
  study->add_option("--m-e", st.m_e, "Pseudo-test size");
  study->add_option("--n-pc", st.n_pc, "Principal components for the baseline");

  try {
    args = apply_config_file(std::move(args));
    std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitParse;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  try {
    if (*preprocess) return cmd_preprocess(pre, out);
    if (*test2s) return cmd_test2s(t2, out);
    if (*gof) return cmd_gof(gf, out);
    if (*diagnose) return cmd_diagnose(dg, out);
    if (*baseline) return cmd_baseline(bl, out);
    if (*simulate) return cmd_simulate(sm, out);
    if (*study) return cmd_study(st, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace hect::cli
