#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddcc/betting.hpp"
#include "ddcc/errors.hpp"
#include "ddcc/moments.hpp"
#include "ddcc/schedules.hpp"
#include "ddcc/support_sets.hpp"
#include "ddcc/surrogate.hpp"

namespace py = pybind11;
using namespace ddcc;

namespace {

py::dict schedule_dict(const ScheduleResult& s) {
  py::dict d;
  d["method"] = to_string(s.method);
  d["n"] = s.n;
  d["alpha"] = s.alpha;
  d["p"] = s.p;
  d["kappa"] = s.kappa;
  d["phi"] = s.phi;
  d["nu"] = s.nu;
  d["feasible"] = s.feasible;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ddcc, m) {
  m.doc() = "Data-driven distributionally robust chance constraints";

  py::register_exception<NotEnoughSamples>(m, "NotEnoughSamples", PyExc_RuntimeError);
  py::register_exception<EmptyState>(m, "EmptyState", PyExc_RuntimeError);
  // InvalidArgument derives from std::invalid_argument, which maps to ValueError.

  m.def("schedule_thm1", [](std::int64_t n, double a, double p) { return schedule_dict(schedule_thm1(n, a, p)); },
        py::arg("n"), py::arg("alpha"), py::arg("p"));
  m.def("schedule_cor1", [](std::int64_t n, double a) { return schedule_dict(schedule_cor1(n, a)); },
        py::arg("n"), py::arg("alpha"));
  m.def("schedule_prop2", [](std::int64_t n, double a, double p) { return schedule_dict(schedule_prop2(n, a, p)); },
        py::arg("n"), py::arg("alpha"), py::arg("p"));
  m.def("schedule_cor2", [](std::int64_t n, double a) { return schedule_dict(schedule_cor2(n, a)); },
        py::arg("n"), py::arg("alpha"));
  m.def("schedule_cor3", [](std::int64_t n, double a) { return schedule_dict(schedule_cor3(n, a)); },
        py::arg("n"), py::arg("alpha"));
  m.def("min_samples_cor1", &min_samples_cor1, py::arg("alpha"));
  m.def("cor1_auto_p", &cor1_auto_p, py::arg("n"), py::arg("alpha"));
  m.def("inverse_normal_cdf", &inverse_normal_cdf, py::arg("p"));
  m.def("comparison_constants", [](double a) {
    const auto c = comparison_constants(a);
    return py::make_tuple(c.general, c.independent, c.gaussian);
  }, py::arg("alpha"), "(general, independent, gaussian) constants at alpha");

  py::enum_<MomentMode>(m, "MomentMode")
      .value("Full", MomentMode::Full)
      .value("Diagonal", MomentMode::Diagonal);

  py::class_<MomentState>(m, "MomentState")
      .def(py::init<int, MomentMode>(), py::arg("dim"), py::arg("mode") = MomentMode::Full)
      .def("update", [](MomentState& s, const Eigen::VectorXd& a) { s.update(a); })
      .def("update_batch", [](MomentState& s, const Eigen::MatrixXd& rows) { s.update_batch(rows); })
      .def_property_readonly("count", &MomentState::count)
      .def_property_readonly("dim", &MomentState::dim)
      .def_property_readonly("mean", &MomentState::mean)
      .def("covariance", &MomentState::covariance)
      .def("variance", &MomentState::variance);
  m.def("merge", &merge);

  py::class_<SupportSet>(m, "SupportSet")
      .def_static("box", &SupportSet::box, py::arg("lower"), py::arg("upper"))
      .def_static("polytope", &SupportSet::polytope, py::arg("vertices"),
                  "vertices: dim x m array, one vertex per column")
      .def_static("ellipsoid", &SupportSet::ellipsoid, py::arg("center"), py::arg("shape"))
      .def_property_readonly("dim", &SupportSet::dim)
      .def("radius", [](const SupportSet& s, const Eigen::VectorXd& z) { return s.radius(z); })
      .def("contains", [](const SupportSet& s, const Eigen::VectorXd& a) { return s.contains(a); });

  py::module_ b = m.def_submodule("betting", "Correlated-wager benchmark");
  py::enum_<betting::ThresholdMode>(b, "ThresholdMode")
      .value("LossBeta", betting::ThresholdMode::LossBeta)
      .value("LiteralPaper", betting::ThresholdMode::LiteralPaper);
  py::class_<betting::BettingConfig>(b, "BettingConfig")
      .def(py::init<>())
      .def_readwrite("rho", &betting::BettingConfig::rho)
      .def_readwrite("abar", &betting::BettingConfig::abar)
      .def_readwrite("alpha", &betting::BettingConfig::alpha)
      .def_readwrite("beta", &betting::BettingConfig::beta)
      .def_readwrite("mode", &betting::BettingConfig::mode);
  b.def("wager_outcome", &betting::wager_outcome, py::arg("u"), py::arg("rho"), py::arg("abar"));
  b.def("sample_batch", &betting::sample_batch, py::arg("cfg"), py::arg("seed"), py::arg("count"));
  b.def("true_moments", [](const betting::BettingConfig& cfg) {
    const auto tm = betting::true_moments(cfg);
    return py::make_tuple(tm.mu, tm.sigma);
  });
  b.def("evaluate", [](const Eigen::VectorXd& x, const Eigen::MatrixXd& test,
                       const betting::BettingConfig& cfg) {
    const auto e = betting::evaluate(x, test, cfg);
    return py::make_tuple(e.reward, e.violation);
  }, py::arg("x"), py::arg("test_samples"), py::arg("cfg"), "(reward, violation probability)");
  b.def("solve", [](const betting::BettingConfig& cfg, const std::string& method,
                    const Eigen::MatrixXd& samples) {
    const auto m = betting::Method::parse(method);
    MomentState state(cfg.dim(), MomentMode::Full);
    if (samples.rows() > 0) state.update_batch(samples);
    const auto ms = betting::solve_method(cfg, m, state);
    py::dict d;
    d["status"] = ms.status;
    d["fallback"] = ms.fallback;
    d["x"] = ms.x;
    d["objective"] = ms.objective;
    return d;
  }, py::arg("cfg"), py::arg("method"), py::arg("samples"),
     "Solve the betting problem with one method; samples may be empty for 'oracle'.");
  b.def("run_experiment", [](const betting::BettingConfig& cfg, const std::vector<std::string>& methods,
                             const std::vector<std::int64_t>& n_grid, int trials, int test_size,
                             std::uint64_t seed) {
    betting::ExperimentConfig exp;
    for (const auto& t : methods) exp.methods.push_back(betting::Method::parse(t));
    exp.n_grid = n_grid;
    exp.trials_per_n = trials;
    exp.test_size = test_size;
    exp.master_seed = seed;
    betting::ExperimentResult res;
    {
      py::gil_scoped_release release;
      res = betting::run_experiment(cfg, exp);
    }
    py::list out;
    for (const auto& a : res.aggregates) {
      py::dict d;
      d["method"] = a.method;
      d["n"] = a.n;
      d["avg_reward"] = a.avg_reward;
      d["reward_se"] = a.reward_se;
      d["max_violation"] = a.max_violation;
      d["feasible_fraction"] = a.feasible_fraction;
      out.append(d);
    }
    return out;
  }, py::arg("cfg"), py::arg("methods"), py::arg("n_grid"), py::arg("trials") = 200,
     py::arg("test_size") = 100000, py::arg("seed") = 1, "Aggregate rows, one per (method, N).");
}
