#include "ozlasso/solvers.hpp"

#include <cmath>
#include <sstream>

#include "ozlasso/error.hpp"

namespace ozlasso {

namespace {

constexpr double kSingularPivotRatio = 1e-13;
constexpr double kConditionWarning = 1e12;

std::vector<std::size_t> nonzero_indices(const Eigen::VectorXd& beta) {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) out.push_back(static_cast<std::size_t>(j));
    return out;
}

struct Factored {
    Eigen::VectorXd solution;
    double condition = 0.0;
};

Factored solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, std::string_view what) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    auto singular = [&](Eigen::Index k) {
        std::ostringstream msg;
        msg << what << ": normal matrix is numerically singular at pivot " << k
            << " (column " << k << " is a linear combination of earlier columns)";
        return SingularMatrixError(static_cast<std::size_t>(k), msg.str());
    };
    if (llt.info() != Eigen::Success) {
        Eigen::MatrixXd copy = A;
        const auto k = Eigen::internal::llt_inplace<double, Eigen::Lower>::unblocked(copy);
        throw singular(k < 0 ? 0 : k);
    }
    const Eigen::MatrixXd L = llt.matrixL();
    for (Eigen::Index k = 0; k < A.rows(); ++k) {
        const double akk = A(k, k);
        if (akk <= 0.0 || (L(k, k) * L(k, k)) / akk < kSingularPivotRatio) throw singular(k);
    }
    Factored out;
    out.solution = llt.solve(b);
    const double rc = llt.rcond();
    out.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    return out;
}

ModelFit closed_form(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda, Method method) {
    if (X.rows() != Y.size()) throw SchemaError("design and response lengths differ");
    if (X.rows() == 0 || X.cols() == 0) throw ConfigError("empty design");
    const auto n = static_cast<double>(X.rows());
    Eigen::MatrixXd A = X.transpose() * X;
    if (lambda > 0.0) A.diagonal().array() += n * lambda;
    const Eigen::VectorXd b = X.transpose() * Y;
    const auto solved = solve_spd(A, b, method_name(method));

    ModelFit fit;
    fit.method = method;
    fit.lambda = lambda;
    fit.beta = solved.solution;
    fit.beta0 = Y.mean();
    fit.active_set = nonzero_indices(fit.beta);
    fit.residuals = (Y - X * fit.beta).array() - fit.beta0;
    fit.condition_estimate = solved.condition;
    if (solved.condition > kConditionWarning) {
        std::ostringstream msg;
        msg << "condition estimate " << solved.condition << " exceeds " << kConditionWarning;
        fit.warnings.push_back(msg.str());
    }
    return fit;
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::Ols: return "ols";
        case Method::Ridge: return "ridge";
        case Method::Lasso: return "lasso";
    }
    return "unknown";
}

std::string_view strategy_name(SweepStrategy s) {
    return s == SweepStrategy::FullSweep ? "full-sweep" : "active-set";
}

std::optional<SweepStrategy> strategy_from_name(std::string_view s) {
    if (s == "full-sweep") return SweepStrategy::FullSweep;
    if (s == "active-set") return SweepStrategy::ActiveSet;
    return std::nullopt;
}

void LassoConfig::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lasso: lambda must be finite and >= 0");
    if (!(tol > 0.0)) throw ConfigError("lasso: tol must be > 0");
    if (max_sweeps < 1) throw ConfigError("lasso: max_sweeps must be >= 1");
}

double soft_threshold(double z, double theta) {
    const double m = std::abs(z) - theta;
    if (m <= 0.0) return 0.0;
    return z < 0.0 ? -m : m;
}

ModelFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
    return closed_form(X, Y, 0.0, Method::Ols);
}

ModelFit fit_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda) {
    if (!(lambda >= 0.0)) throw ConfigError("ridge: lambda must be >= 0");
    return closed_form(X, Y, lambda, Method::Ridge);
}

RidgePath::RidgePath(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) : X_(X), Y_(Y) {
    if (X.rows() != Y.size()) throw Error("ridge: X and Y row counts differ");
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    V_ = svd.matrixV();
    s_ = svd.singularValues();
    uty_ = svd.matrixU().transpose() * Y;
}

ModelFit RidgePath::fit(double lambda) const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("ridge path: lambda must be finite and > 0");
    const double nl = static_cast<double>(X_.rows()) * lambda;
    const Eigen::VectorXd w = (s_.array() / (s_.array().square() + nl)) * uty_.array();
    ModelFit fit;
    fit.method = Method::Ridge;
    fit.lambda = lambda;
    fit.beta = V_ * w;
    fit.beta0 = Y_.mean();
    fit.active_set = nonzero_indices(fit.beta);
    fit.residuals = (Y_ - X_ * fit.beta).array() - fit.beta0;
    // Exact 2-norm condition of XᵀX + n lambda I; directions beyond rank(X) see only n lambda.
    const double smax = s_.size() > 0 ? s_(0) : 0.0;
    const double smin = s_.size() == X_.cols() && s_.size() > 0 ? s_(s_.size() - 1) : 0.0;
    fit.condition_estimate = (smax * smax + nl) / (smin * smin + nl);
    return fit;
}

Eigen::VectorXd design_times(const ColumnSource& X, const Eigen::VectorXd& beta) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(X.rows()));
    std::vector<double> buf;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (beta(j) == 0.0) continue;
        axpy(beta(j), X.column(static_cast<std::size_t>(j), buf), {out.data(), X.rows()});
    }
    return out;
}

double lasso_objective(const ColumnSource& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& beta,
                       double lambda) {
    const Eigen::VectorXd r = Y - design_times(X, beta);
    return r.squaredNorm() / static_cast<double>(X.rows()) + lambda * beta.lpNorm<1>();
}

KktCertificate lasso_kkt(const ColumnSource& X, const Eigen::VectorXd& Y, const Eigen::VectorXd& beta,
                         double lambda, double tol) {
    const Eigen::VectorXd r = Y - design_times(X, beta);
    const auto n = static_cast<double>(X.rows());
    const std::span<const double> rs{r.data(), X.rows()};
    KktCertificate cert;
    cert.tol = tol;
    cert.max_inactive_excess = -lambda / 2.0;
    std::vector<double> buf;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const double g = dot(X.column(j, buf), rs) / n;
        const double b = beta(static_cast<Eigen::Index>(j));
        if (b == 0.0) {
            cert.max_inactive_excess = std::max(cert.max_inactive_excess, std::abs(g) - lambda / 2.0);
        } else {
            const double target = b > 0.0 ? lambda / 2.0 : -lambda / 2.0;
            cert.max_active_residual = std::max(cert.max_active_residual, std::abs(g - target));
        }
    }
    cert.satisfied = cert.max_inactive_excess <= tol && cert.max_active_residual <= tol;
    return cert;
}

double lambda_max(const ColumnSource& X, const Eigen::VectorXd& Y) {
    const auto n = static_cast<double>(X.rows());
    const std::span<const double> ys{Y.data(), X.rows()};
    std::vector<double> buf;
    double best = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) best = std::max(best, std::abs(dot(X.column(j, buf), ys) / n));
    return 2.0 * best;
}

}  // namespace ozlasso
