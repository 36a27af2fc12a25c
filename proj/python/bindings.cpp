#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ozlasso/error.hpp"
#include "ozlasso/evaluation.hpp"
#include "ozlasso/expansion.hpp"
#include "ozlasso/features.hpp"
#include "ozlasso/selection.hpp"
#include "ozlasso/solvers.hpp"
#include "ozlasso/synth.hpp"

namespace py = pybind11;
using namespace ozlasso;

namespace {

py::dict fit_to_dict(const ModelFit& f) {
    py::dict d;
    d["method"] = std::string(method_name(f.method));
    d["lambda"] = f.lambda;
    d["intercept"] = f.beta0;
    d["beta"] = f.beta;
    d["active_set"] = f.active_set;
    d["sweeps"] = f.sweeps_used;
    d["converged"] = f.converged;
    d["condition_estimate"] = f.condition_estimate;
    d["warnings"] = f.warnings;
    return d;
}

SweepStrategy strategy_arg(const std::string& s) {
    const auto v = strategy_from_name(s);
    if (!v) throw ConfigError("strategy must be 'active-set' or 'full-sweep'");
    return *v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lasso, ridge and OLS solvers with cross-validation for next-day ozone forecasting";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    m.def("soft_threshold", &soft_threshold, py::arg("z"), py::arg("theta"));

    m.def(
        "fit_lasso",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda, double tol, int max_sweeps,
           const std::string& strategy) {
            LassoConfig c;
            c.lambda = lambda;
            c.tol = tol;
            c.max_sweeps = max_sweeps;
            c.strategy = strategy_arg(strategy);
            return fit_to_dict(fit_lasso(X, Y, c));
        },
        py::arg("X"), py::arg("Y"), py::arg("lam"), py::arg("tol") = 1e-7, py::arg("max_sweeps") = 10000,
        py::arg("strategy") = "active-set",
        "Minimize (1/n)||Y - X beta||^2 + lam ||beta||_1 by coordinate descent.");

    m.def("fit_ridge", [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda) {
        return fit_to_dict(fit_ridge(X, Y, lambda));
    }, py::arg("X"), py::arg("Y"), py::arg("lam"));

    m.def("fit_ols", [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) { return fit_to_dict(fit_ols(X, Y)); },
          py::arg("X"), py::arg("Y"));

    m.def("lambda_max", [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) { return lambda_max(DenseColumns(X), Y); },
          py::arg("X"), py::arg("Y"));

    m.def(
        "lambda_grid",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int n_points, double ratio) {
            return make_lambda_grid(DenseColumns(X), Y, n_points, ratio);
        },
        py::arg("X"), py::arg("Y"), py::arg("n_points") = kDefaultGridPoints, py::arg("ratio") = kDefaultGridRatio);

    m.def(
        "cross_validate",
        [](const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, int k, std::uint64_t seed, bool blocked,
           const std::string& solver) {
            const DenseColumns cols(X);
            const auto grid = make_lambda_grid(cols, Y);
            CvOptions o;
            o.k = k;
            o.seed = seed;
            o.mode = blocked ? FoldMode::Blocked : FoldMode::Random;
            if (solver == "ridge") o.solver = CvSolver::Ridge;
            else if (solver != "lasso") throw ConfigError("solver must be 'lasso' or 'ridge'");
            const auto cv = kfold_cv(cols, Y, grid, o);
            py::dict d;
            d["grid"] = cv.grid;
            d["cv_mean"] = cv.cv_mean;
            d["cv_se"] = cv.cv_se;
            d["nonzero"] = cv.nonzero;
            d["lambda_min"] = cv.lambda_min;
            d["lambda_1se"] = cv.lambda_1se;
            d["folds"] = cv.fold_assignment;
            return d;
        },
        py::arg("X"), py::arg("Y"), py::arg("k") = 5, py::arg("seed") = 0, py::arg("blocked") = false,
        py::arg("solver") = "lasso");

    m.def("rmse", [](const std::vector<double>& p, const std::vector<double>& o) { return rmse(p, o); });
    m.def("mae", [](const std::vector<double>& p, const std::vector<double>& o) { return mae(p, o); });

    m.def("base_feature_count", [](const std::string& variant) {
        const auto v = variant_from_name(variant);
        if (!v) throw ConfigError("variant must be 'max' or 'max8h'");
        return base_feature_count(*v);
    }, py::arg("variant") = "max");
    m.def("expanded_feature_count", &expanded_feature_count, py::arg("p0"));

    m.def(
        "synthetic_truth",
        [](int n_days, std::uint64_t seed, int sparsity, double snr) {
            SynthConfig c;
            c.n_days = n_days;
            c.seed = seed;
            c.sparsity = sparsity;
            c.snr = snr;
            return synth_truth_json(make_synthetic(c));
        },
        py::arg("n_days") = 60, py::arg("seed") = 0, py::arg("sparsity") = 5, py::arg("snr") = 20.0,
        "Ground-truth manifest (JSON text) of a synthetic dataset.");
}
