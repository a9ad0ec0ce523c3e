#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hect/classifier.hpp"
#include "hect/core.hpp"
#include "hect/diagnostics.hpp"
#include "hect/error.hpp"
#include "hect/pca_baseline.hpp"
#include "hect/synthgen.hpp"
#include "hect/testing.hpp"

namespace py = pybind11;
using namespace hect;

namespace {

ClassifierSpec make_spec(const std::string& kind, int folds, const std::string& weighting) {
  ClassifierSpec s;
  s.kind = parse_classifier_kind(kind);
  s.folds = folds;
  s.weighting = parse_class_weighting(weighting);
  s.validate();
  return s;
}

ShiftSpec make_shift(const std::string& kind, double magnitude, std::vector<std::size_t> features) {
  switch (parse_shift_kind(kind)) {
    case ShiftKind::None: return ShiftSpec::none();
    case ShiftKind::MeanShift: return ShiftSpec::mean_shift(magnitude, std::move(features));
    case ShiftKind::VarianceScale: return ShiftSpec::variance_scale(magnitude, std::move(features));
    case ShiftKind::CorrelationBreak: return ShiftSpec::correlation_break(std::move(features));
  }
  return ShiftSpec::none();
}

py::dict report_dict(const TestReport& r) {
  py::dict d;
  d["method"] = std::string(to_string(r.method));
  d["statistic"] = r.statistic_observed;
  d["null_statistics"] = r.null_statistics;
  d["p_value"] = r.p_value;
  d["alpha"] = r.alpha;
  d["decision"] = std::string(to_string(r.decision));
  d["class_prior_hat"] = r.class_prior_hat;
  d["n_trusted"] = r.n_trusted;
  d["n_test"] = r.n_test;
  d["replicates"] = r.replicates;
  d["m_e"] = r.m_e;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hect, m) {
  m.doc() = "Classifier-based ensemble consistency tests";

  // Messages start with the error code, e.g. "SchemaMismatch: ...".
  py::register_exception<Error>(m, "HectError");

  py::enum_<Role>(m, "Role").value("Trusted", Role::Trusted).value("Test", Role::Test);

  py::class_<Ensemble>(m, "Ensemble")
      .def(py::init([](const Matrix& data, Names names, std::vector<std::string> ids, Role role) {
             return Ensemble(data, std::move(names), std::move(ids), role);
           }),
           py::arg("data"), py::arg("variable_names"), py::arg("ids"), py::arg("role"))
      .def_property_readonly("data", &Ensemble::data)
      .def_property_readonly("variable_names", &Ensemble::variable_names)
      .def_property_readonly("ids", &Ensemble::ids)
      .def_property_readonly("role", &Ensemble::role)
      .def("__len__", &Ensemble::size);

  m.def("generate",
        [](std::size_t d, std::size_t m_runs, std::size_t n, std::uint64_t seed, Role role,
           const std::string& correlation, double rho, std::size_t block_size, const std::string& shift,
           double magnitude, std::vector<std::size_t> features) {
          SynthConfig cfg{.d = d,
                          .correlation = {parse_correlation_kind(correlation), rho, block_size},
                          .m = m_runs,
                          .n = n,
                          .seed = seed};
          return generate(cfg, make_shift(shift, magnitude, std::move(features)), role);
        },
        py::arg("d"), py::arg("m"), py::arg("n"), py::arg("seed"), py::arg("role"),
        py::arg("correlation") = "independent", py::arg("rho") = 0.0, py::arg("block_size") = 1,
        py::arg("shift") = "none", py::arg("magnitude") = 0.0,
        py::arg("features") = std::vector<std::size_t>{});

  m.def("test_statistic",
        [](std::vector<double> r, std::vector<int> y) { return test_statistic(r, y); },
        py::arg("r_hats"), py::arg("labels"));
  m.def("p_value", [](double obs, std::vector<double> nulls) { return p_value(obs, nulls); },
        py::arg("observed"), py::arg("nulls"));

  m.def("two_sample_test",
        [](const Ensemble& trusted, const Ensemble& test, const std::string& classifier, int B,
           double alpha, std::uint64_t seed, int folds, const std::string& weighting, unsigned jobs) {
          PermConfig cfg{.B = B, .alpha = alpha, .seed = seed, .jobs = jobs};
          return report_dict(two_sample_test(trusted, test, make_spec(classifier, folds, weighting), cfg));
        },
        py::arg("trusted"), py::arg("test"), py::arg("classifier") = "logistic", py::arg("B") = 1000,
        py::arg("alpha") = 0.05, py::arg("seed") = 0, py::arg("folds") = 5,
        py::arg("weighting") = "auto", py::arg("jobs") = 1);

  m.def("gof_test",
        [](const Ensemble& trusted, const Ensemble& test, const std::string& classifier, int E,
           std::optional<std::size_t> m_e, double alpha, std::uint64_t seed, int folds,
           const std::string& weighting, unsigned jobs) {
          GofConfig cfg{.E = E, .m_e = m_e, .alpha = alpha, .seed = seed, .jobs = jobs};
          return report_dict(gof_test(trusted, test, make_spec(classifier, folds, weighting), cfg));
        },
        py::arg("trusted"), py::arg("test"), py::arg("classifier") = "logistic", py::arg("E") = 200,
        py::arg("m_e") = py::none(), py::arg("alpha") = 0.05, py::arg("seed") = 0, py::arg("folds") = 5,
        py::arg("weighting") = "auto", py::arg("jobs") = 1);

  m.def("gof_diagnose",
        [](const Ensemble& trusted, const Ensemble& test, const std::string& classifier, int E,
           int shuffles, double alpha, std::uint64_t seed, int folds, unsigned jobs) {
          GofConfig cfg{.E = E, .alpha = alpha, .seed = seed, .jobs = jobs};
          auto g = gof_diagnose(trusted, test, make_spec(classifier, folds, "auto"), cfg, shuffles);
          py::dict d = report_dict(g.test);
          d["local_discrepancies"] = g.diagnostics.local_discrepancies;
          d["sample_ids"] = g.diagnostics.sample_ids;
          d["feature_importances"] = g.diagnostics.feature_importances;
          std::vector<std::string> flagged;
          for (const auto& f : g.diagnostics.significant_features()) flagged.push_back(f.name);
          d["flagged_features"] = flagged;
          return d;
        },
        py::arg("trusted"), py::arg("test"), py::arg("classifier") = "logistic", py::arg("E") = 200,
        py::arg("shuffles") = 5, py::arg("alpha") = 0.05, py::arg("seed") = 0, py::arg("folds") = 5,
        py::arg("jobs") = 1);

  py::class_<PcaModel>(m, "PcaModel")
      .def_readonly("components", &PcaModel::components)
      .def_readonly("explained_variance", &PcaModel::explained_variance)
      .def_readonly("n_pc", &PcaModel::n_pc);
  m.def("fit_pca", &fit_pca, py::arg("trusted"), py::arg("n_pc") = 50);
  m.def("project", py::overload_cast<const PcaModel&, const Ensemble&>(&project), py::arg("model"),
        py::arg("ensemble"));
  m.def("pca_ect",
        [](const Ensemble& trusted, const Ensemble& test, std::size_t n_pc, double z, std::size_t fail_count) {
          const auto model = fit_pca(trusted, n_pc);
          PcaEctConfig cfg{.z_threshold = z, .fail_count = fail_count};
          return report_dict(pca_ect(model, project(model, trusted), test, cfg));
        },
        py::arg("trusted"), py::arg("test"), py::arg("n_pc") = 50, py::arg("z_threshold") = 2.0,
        py::arg("fail_count") = 3);
}
