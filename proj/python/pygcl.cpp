#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gcl/bench.hpp"
#include "gcl/chaining.hpp"
#include "gcl/function_class.hpp"
#include "gcl/generators.hpp"
#include "gcl/mean_estimators.hpp"
#include "gcl/tournament.hpp"

namespace py = pybind11;
using namespace gcl;

PYBIND11_MODULE(pygcl, m) {
    m.doc() = "gaussian-complexity regression learner";

    py::register_exception<gcl::error>(m, "GclError");

    py::class_<CovarianceStructure>(m, "CovarianceStructure")
        .def(py::init<>())
        .def_static("identity", &CovarianceStructure::identity)
        .def_readwrite("sigma_true", &CovarianceStructure::sigma_true)
        .def_readwrite("sigma_oracle", &CovarianceStructure::sigma_oracle)
        .def_readwrite("eta", &CovarianceStructure::eta);

    py::enum_<MetricKind>(m, "MetricKind")
        .value("Oracle", MetricKind::Oracle)
        .value("True_", MetricKind::True);

    py::class_<FunctionClass>(m, "FunctionClass")
        .def_static("from_points",
                    [](const Mat& pts, const CovarianceStructure& cov) {
                        return FunctionClass::from_points(pts, cov);
                    })
        .def_static("load_json", &FunctionClass::load_json)
        .def("save_json", &FunctionClass::save_json)
        .def("diameter", &FunctionClass::diameter,
             py::arg("kind") = MetricKind::True)
        .def_property_readonly("points",
                               [](const FunctionClass& f) { return f.points; })
        .def("size", &FunctionClass::size)
        .def("dim", &FunctionClass::dim);

    m.def("l1_ball_net", &l1_ball_net, py::arg("d"), py::arg("resolution"));
    m.def("difference_class", &difference_class, py::arg("F"),
          py::arg("tol") = 1e-9);

    m.def("median_of_means",
          [](const std::vector<double>& xs, double delta) {
              return median_of_means(xs, delta);
          },
          py::arg("samples"), py::arg("delta"));
    m.def("trimmed_mean",
          [](const std::vector<double>& xs, double delta) {
              return trimmed_mean(xs, delta);
          },
          py::arg("samples"), py::arg("delta"));

    py::class_<MonteCarloEstimate>(m, "MonteCarloEstimate")
        .def_readonly("value", &MonteCarloEstimate::value)
        .def_readonly("std_error", &MonteCarloEstimate::std_error);

    m.def("gaussian_sup_mc", &gaussian_sup_mc, py::arg("H"), py::arg("cov"),
          py::arg("n_mc"), py::arg("seed"));

    py::class_<FixedPointResult>(m, "FixedPointResult")
        .def_readonly("r", &FixedPointResult::r)
        .def_readonly("at_floor", &FixedPointResult::at_floor)
        .def_readonly("saturated", &FixedPointResult::saturated);

    py::class_<ComplexityReport>(m, "ComplexityReport")
        .def_readonly("gamma2_value", &ComplexityReport::gamma2_value)
        .def_readonly("d_F", &ComplexityReport::d_F)
        .def_readonly("gaussian_sup", &ComplexityReport::gaussian_sup)
        .def_readonly("r_Q", &ComplexityReport::r_Q)
        .def_readonly("r_M", &ComplexityReport::r_M)
        .def_readonly("r_star", &ComplexityReport::r_star)
        .def_readonly("lambda_star", &ComplexityReport::lambda_star)
        .def_readonly("r_tilde", &ComplexityReport::r_tilde);

    m.def("compute_complexity_report",
          [](const FunctionClass& F, double kappa, int N, double sigma, int n_mc,
             int points_per_decade, std::uint64_t seed) {
              ComplexityOptions opt;
              opt.kappa = kappa;
              opt.N = N;
              opt.sigma = sigma;
              opt.n_mc = n_mc;
              opt.points_per_decade = points_per_decade;
              opt.seed = seed;
              return compute_complexity_report(F, opt);
          },
          py::arg("F"), py::arg("kappa") = 0.25, py::arg("N") = 1000,
          py::arg("sigma") = 1.0, py::arg("n_mc") = 200,
          py::arg("points_per_decade") = 50, py::arg("seed") = 1);

    py::class_<TournamentOutcome>(m, "TournamentOutcome")
        .def_readonly("v_hat", &TournamentOutcome::v_hat)
        .def_readonly("v_star", &TournamentOutcome::v_star)
        .def_readonly("selected", &TournamentOutcome::selected)
        .def_readonly("failed", &TournamentOutcome::failed)
        .def_readonly("sigma_hat", &TournamentOutcome::sigma_hat)
        .def_readonly("sigma_star", &TournamentOutcome::sigma_star);

    m.def("learn",
          [](const FunctionClass& F, const Mat& X, const Vec& Y, double r,
             std::uint64_t seed) {
              LearnConfig lc;
              lc.shuffle_seed = seed;
              return learn(F, X, Y, r, lc);
          },
          py::arg("F"), py::arg("X"), py::arg("Y"), py::arg("r"),
          py::arg("seed") = 0);

    m.def("sample_regression",
          [](const std::string& design, const std::string& noise,
             double sigma_noise, const Vec& z0, int n, std::uint64_t seed) {
              RegressionModel model;
              model.design = DistributionSpec::parse(design);
              double scale = 1.0;
              model.noise = DistributionSpec::parse(noise, &scale);
              model.sigma_noise = sigma_noise * scale;
              model.z0 = z0;
              const LabeledSample s = gen_regression(model, n, seed);
              return py::make_tuple(s.X, s.Y);
          },
          py::arg("design"), py::arg("noise"), py::arg("sigma_noise"),
          py::arg("z0"), py::arg("n"), py::arg("seed"));
}
