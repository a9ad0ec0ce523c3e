#include "hect/synthgen.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Cholesky>

#include "hect/io.hpp"
#include "hect/parallel.hpp"
#include "hect/rng.hpp"

namespace hect {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

std::string run_id(Role role, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%05zu", role == Role::Trusted ? "trusted" : "test", i);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (d < 1) invalid("d must be >= 1");
  if (m < 1 || n < 1) invalid("m and n must be >= 1");
  if (correlation.kind != CorrelationKind::Independent &&
      !(correlation.rho > -1.0 && correlation.rho < 1.0)) {
    invalid("rho must be in (-1, 1)");
  }
  if (correlation.kind == CorrelationKind::Blocks &&
      (correlation.block_size < 1 || d % correlation.block_size != 0)) {
    invalid("block_size must divide d");
  }
}

ShiftSpec ShiftSpec::mean_shift(double delta, std::vector<std::size_t> features) {
  return {ShiftKind::MeanShift, delta, 1.0, std::move(features)};
}

ShiftSpec ShiftSpec::variance_scale(double factor, std::vector<std::size_t> features) {
  return {ShiftKind::VarianceScale, 0.0, factor, std::move(features)};
}

ShiftSpec ShiftSpec::correlation_break(std::vector<std::size_t> features) {
  return {ShiftKind::CorrelationBreak, 0.0, 1.0, std::move(features)};
}

double ShiftSpec::magnitude() const noexcept {
  switch (kind) {
    case ShiftKind::None: return 0.0;
    case ShiftKind::MeanShift: return delta;
    case ShiftKind::VarianceScale: return factor;
    case ShiftKind::CorrelationBreak: return 1.0;
  }
  return 0.0;
}

void ShiftSpec::validate(std::size_t d) const {
  if (kind == ShiftKind::None) return;
  if (features.empty()) invalid("shift needs a nonempty feature subset");
  for (std::size_t j : features) {
    if (j >= d) invalid("shift feature index " + std::to_string(j) + " out of range");
  }
  if (kind == ShiftKind::VarianceScale && !(factor > 0.0)) invalid("factor must be > 0");
  if (kind == ShiftKind::MeanShift && !std::isfinite(delta)) invalid("delta must be finite");
}

std::string_view to_string(CorrelationKind kind) {
  switch (kind) {
    case CorrelationKind::Independent: return "independent";
    case CorrelationKind::AR1: return "ar1";
    case CorrelationKind::Blocks: return "blocks";
  }
  return "unknown";
}

std::string_view to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::None: return "none";
    case ShiftKind::MeanShift: return "mean";
    case ShiftKind::VarianceScale: return "variance";
    case ShiftKind::CorrelationBreak: return "corrbreak";
  }
  return "unknown";
}

CorrelationKind parse_correlation_kind(std::string_view name) {
  if (name == "independent") return CorrelationKind::Independent;
  if (name == "ar1") return CorrelationKind::AR1;
  if (name == "blocks") return CorrelationKind::Blocks;
  invalid("unknown correlation '" + std::string(name) + "'");
}

ShiftKind parse_shift_kind(std::string_view name) {
  if (name == "none") return ShiftKind::None;
  if (name == "mean") return ShiftKind::MeanShift;
  if (name == "variance") return ShiftKind::VarianceScale;
  if (name == "corrbreak") return ShiftKind::CorrelationBreak;
  invalid("unknown shift '" + std::string(name) + "'");
}

Ensemble generate(const SynthConfig& cfg, const ShiftSpec& shift, Role role) {
  cfg.validate();
  shift.validate(cfg.d);
  const std::size_t runs = role == Role::Trusted ? cfg.m : cfg.n;
  const Stream stream = role == Role::Trusted ? Stream::TrustedRuns : Stream::TestRuns;
  const auto& corr = cfg.correlation;

  Eigen::MatrixXd block_factor;
  if (corr.kind == CorrelationKind::Blocks) {
    const auto b = static_cast<Eigen::Index>(corr.block_size);
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(b, b, corr.rho);
    r.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success) invalid("block correlation matrix is not positive definite");
    block_factor = llt.matrixL();
  }

  Matrix data(static_cast<Eigen::Index>(runs), static_cast<Eigen::Index>(cfg.d));
  std::vector<std::string> ids;
  std::normal_distribution<double> normal;
  std::vector<double> z(cfg.d);
  for (std::size_t i = 0; i < runs; ++i) {
    Engine engine = make_engine(cfg.seed, stream, i);
    for (double& v : z) v = normal(engine);
    auto row = data.row(static_cast<Eigen::Index>(i));
    switch (corr.kind) {
      case CorrelationKind::Independent:
        for (std::size_t j = 0; j < cfg.d; ++j) row[static_cast<Eigen::Index>(j)] = z[j];
        break;
      case CorrelationKind::AR1: {
        const double innov = std::sqrt(1.0 - corr.rho * corr.rho);
        double prev = z[0];
        row[0] = prev;
        for (std::size_t j = 1; j < cfg.d; ++j) {
          prev = corr.rho * prev + innov * z[j];
          row[static_cast<Eigen::Index>(j)] = prev;
        }
        break;
      }
      case CorrelationKind::Blocks: {
        const auto b = static_cast<Eigen::Index>(corr.block_size);
        const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(cfg.d));
        for (Eigen::Index start = 0; start < zv.size(); start += b) {
          row.segment(start, b) = (block_factor * zv.segment(start, b)).transpose();
        }
        break;
      }
    }
    if (role == Role::Test) {
      for (std::size_t j : shift.features) {
        auto& v = row[static_cast<Eigen::Index>(j)];
        switch (shift.kind) {
          case ShiftKind::None: break;
          case ShiftKind::MeanShift: v += shift.delta; break;
          case ShiftKind::VarianceScale: v *= shift.factor; break;
          case ShiftKind::CorrelationBreak: v = normal(engine); break;
        }
      }
    }
    ids.push_back(run_id(role, i));
  }
  Names names;
  for (std::size_t j = 0; j < cfg.d; ++j) names.push_back("f" + std::to_string(j));
  return Ensemble(std::move(data), std::move(names), std::move(ids), role);
}

std::string_view to_string(StudyType type) {
  return type == StudyType::TypeI ? "typei" : "power";
}

StudyType parse_study_type(std::string_view name) {
  if (name == "typei") return StudyType::TypeI;
  if (name == "power") return StudyType::Power;
  invalid("unknown study type '" + std::string(name) + "'");
}

TestReport run_trial(const StudyConfig& cfg, const ClassifierSpec& spec, const ShiftSpec& shift,
                     std::size_t trial) {
  SynthConfig synth = cfg.synth;
  synth.seed = derive_seed(cfg.seed, Stream::StudyTrial, trial);
  const Ensemble trusted = generate(synth, ShiftSpec::none(), Role::Trusted);
  const Ensemble test = generate(synth, shift, Role::Test);
  const std::uint64_t test_seed = derive_seed(cfg.seed, Stream::StudyTest, trial);

  switch (cfg.method) {
    case TestMethod::TwoSamplePermutation: {
      PermConfig perm = cfg.perm;
      perm.seed = test_seed;
      perm.jobs = 1;
      return two_sample_test(trusted, test, spec, perm);
    }
    case TestMethod::GoodnessOfFit: {
      GofConfig gof = cfg.gof;
      gof.seed = test_seed;
      gof.jobs = 1;
      return gof_test(trusted, test, spec, gof);
    }
    case TestMethod::PcaBaseline: {
      const PcaModel model = fit_pca(trusted, cfg.n_pc);
      return pca_ect(model, project(model, trusted), test, cfg.pca);
    }
  }
  invalid("unknown test method");
}

StudyTable run_study(const StudyConfig& cfg) {
  if (cfg.trials < 1) invalid("trials must be >= 1");
  if (cfg.classifiers.empty()) invalid("study needs at least one classifier");
  cfg.synth.validate();
  std::vector<ShiftSpec> shifts = cfg.shifts;
  if (cfg.type == StudyType::TypeI || shifts.empty()) shifts = {ShiftSpec::none()};
  for (const auto& s : shifts) s.validate(cfg.synth.d);
  std::vector<ClassifierSpec> classifiers = cfg.classifiers;
  if (cfg.method == TestMethod::PcaBaseline) classifiers.resize(1);

  StudyTable table;
  for (const auto& shift : shifts) {
    for (const auto& spec : classifiers) {
      std::vector<double> p(cfg.trials);
      std::vector<char> failed(cfg.trials);
      parallel_for(cfg.trials, cfg.jobs, [&](std::size_t t) {
        const TestReport r = run_trial(cfg, spec, shift, t);
        p[t] = r.p_value;
        failed[t] = r.decision == Decision::Fail;
      });
      StudyRow row;
      row.shift = shift.magnitude();
      row.classifier = cfg.method == TestMethod::PcaBaseline ? "pca" : std::string(to_string(spec.kind));
      row.method = std::string(to_string(cfg.method));
      row.trials = cfg.trials;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        row.rejections += static_cast<std::size_t>(failed[t]);
        row.mean_p += p[t];
      }
      row.mean_p /= static_cast<double>(cfg.trials);
      row.rejection_rate = static_cast<double>(row.rejections) / static_cast<double>(cfg.trials);
      row.mc_se = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) /
                            static_cast<double>(cfg.trials));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string to_csv(const StudyTable& table) {
  std::ostringstream out;
  out << "shift,classifier,method,trials,rejections,rejection_rate,mc_se,mean_p\n";
  for (const auto& r : table.rows) {
    out << io::format_double(r.shift) << ',' << r.classifier << ',' << r.method << ','
        << r.trials << ',' << r.rejections << ',' << io::format_double(r.rejection_rate) << ','
        << io::format_double(r.mc_se) << ',' << io::format_double(r.mean_p) << '\n';
  }
  return out.str();
}

}  // namespace hect
