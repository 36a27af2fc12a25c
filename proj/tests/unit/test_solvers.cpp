#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ozlasso/error.hpp"
#include "ozlasso/expansion.hpp"
#include "ozlasso/model_io.hpp"
#include "ozlasso/solvers.hpp"
#include "ozlasso/standardize.hpp"

using namespace ozlasso;

namespace {

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Ridge oracle through a least-squares solve of the augmented system
// [X; sqrt(n lambda) I] beta = [Y; 0], independent of the normal equations.
Eigen::VectorXd ridge_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, double lambda) {
    const auto n = X.rows(), p = X.cols();
    Eigen::MatrixXd A(n + p, p);
    A << X, std::sqrt(static_cast<double>(n) * lambda) * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + p);
    b.head(n) = Y;
    return A.colPivHouseholderQr().solve(b);
}

// Design with X'X/n = I exactly up to rounding.
Eigen::MatrixXd orthonormal_design(int n, int p, std::uint64_t seed) {
    const Eigen::MatrixXd R = fixtures::random_matrix(n, p, seed);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    return std::sqrt(static_cast<double>(n)) * Q;
}

LassoConfig cfg(double lambda) {
    LassoConfig c;
    c.lambda = lambda;
    return c;
}

}  // namespace

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(0.4, 0.5) == 0.0);
    CHECK(soft_threshold(1.5, 0.5) == 1.0);
    CHECK(soft_threshold(-2.0, 0.5) == -1.5);
    CHECK(soft_threshold(0.5, 0.5) == 0.0);
    CHECK(soft_threshold(-0.5, 0.5) == 0.0);
}

TEST_CASE("ols on a column equal to the response") {
    const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(9, 1, 4));
    const Eigen::VectorXd Y = X.col(0);
    const auto fit = fit_ols(X, Y);
    CHECK(fit.beta(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ols slope matches the one-dimensional closed form") {
    const double sigma = std::sqrt(2.0 / 3.0);
    Eigen::MatrixXd X(3, 1);
    X << -1.0 / sigma, 0.0, 1.0 / sigma;
    Eigen::VectorXd Y(3);
    Y << 2, 4, 6;
    const double oracle = (X.col(0).array() * Y.array()).sum() / X.col(0).squaredNorm();
    const auto fit = fit_ols(X, Y);
    CHECK(fit.beta(0) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(fit.beta0 == 4.0);
}

TEST_CASE("duplicated column is reported as singular at its pivot") {
    Eigen::MatrixXd X = fixtures::random_matrix(20, 4, 9);
    X.col(2) = X.col(0);
    try {
        fit_ols(X, fixtures::random_vector(20, 1));
        FAIL("expected a singular-matrix error");
    } catch (const SingularMatrixError& e) {
        CHECK(e.pivot() == 2);
    }
    X.col(3) = X.col(1) - X.col(0);
    CHECK_THROWS_AS(fit_ols(X, fixtures::random_vector(20, 1)), SingularMatrixError);
}

TEST_CASE("ill-conditioned normal matrix triggers a warning") {
    Eigen::MatrixXd X = fixtures::random_matrix(30, 3, 2);
    X.col(2) = X.col(1) + 1e-6 * fixtures::random_vector(30, 77);
    const auto fit = fit_ols(X, fixtures::random_vector(30, 3));
    CHECK(fit.condition_estimate > 1e12);
    CHECK_FALSE(fit.warnings.empty());
    const auto ok = fit_ols(fixtures::random_matrix(30, 3, 2), fixtures::random_vector(30, 3));
    CHECK(ok.warnings.empty());
}

TEST_CASE("ridge with zero penalty equals ols") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto X = fixtures::random_matrix(40, 6, s);
        const auto Y = fixtures::random_vector(40, s + 50);
        CHECK(max_abs_diff(fit_ridge(X, Y, 0.0).beta, fit_ols(X, Y).beta) < 1e-10);
    }
}

TEST_CASE("ridge on the identity design") {
    const Eigen::MatrixXd X = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd Y(2);
    Y << 1, 1;
    const auto fit = fit_ridge(X, Y, 0.5);
    CHECK(fit.beta(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fit.beta(1) == doctest::Approx(0.5).epsilon(1e-15));
    for (double lam : {0.0, 0.01, 1.0, 7.0}) {
        const auto f = fit_ridge(X, Y, lam);
        CHECK(f.beta(0) == doctest::Approx(1.0 / (1.0 + 2.0 * lam)).epsilon(1e-14));
    }
}

TEST_CASE("ridge matches an augmented least-squares oracle") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto X = fixtures::random_matrix(30, 8, s);
        const auto Y = fixtures::random_vector(30, s + 9);
        for (double lam : {1e-3, 0.1, 2.0}) CHECK(max_abs_diff(fit_ridge(X, Y, lam).beta, ridge_oracle(X, Y, lam)) < 1e-8);
    }
}

TEST_CASE("ridge weights shrink monotonically as the penalty grows") {
    const auto X = fixtures::random_matrix(25, 5, 8);
    const auto Y = fixtures::random_vector(25, 18);
    double prev = INFINITY;
    for (double lam = 1e-4; lam <= 1e6; lam *= 3.0) {
        const double norm = fit_ridge(X, Y, lam).beta.norm();
        CHECK(norm <= prev);
        prev = norm;
    }
    CHECK(prev < 1e-5);
    CHECK_THROWS_AS(fit_ridge(X, Y, -1.0), ConfigError);
}

TEST_CASE("lasso above lambda_max is exactly zero") {
    const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(30, 7, 3));
    const Eigen::VectorXd Y = fixtures::centered(fixtures::random_vector(30, 4));
    const double lmax = lambda_max(DenseColumns(X), Y);
    double oracle = 0.0;
    for (int j = 0; j < 7; ++j) oracle = std::max(oracle, std::abs(X.col(j).dot(Y) / 30.0));
    CHECK(lmax == doctest::Approx(2.0 * oracle).epsilon(1e-14));
    for (double f : {1.0, 1.5, 100.0}) {
        const auto fit = fit_lasso(X, Y, cfg(f * lmax));
        CHECK(fit.beta.isZero(0.0));
        CHECK(fit.active_set.empty());
        CHECK(fit.converged);
    }
    CHECK(fit_lasso(X, Y, cfg(0.99 * lmax)).nonzero_count() == 1);
}

TEST_CASE("lasso at zero penalty reproduces ols") {
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const auto X = fixtures::random_matrix(50, 10, s);
        const auto Y = fixtures::random_vector(50, s + 30);
        const auto fit = fit_lasso(X, Y, cfg(0.0));
        CHECK(fit.converged);
        CHECK(max_abs_diff(fit.beta, fit_ols(X, Y).beta) < 1e-6);
    }
}

TEST_CASE("orthonormal design gives soft-thresholded least squares") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto X = orthonormal_design(8, 4, s);
        const auto Y = fixtures::random_vector(8, s + 3);
        const Eigen::VectorXd ols = X.transpose() * Y / 8.0;
        for (double lam : {0.05, 0.3, 1.0}) {
            const auto fit = fit_lasso(X, Y, cfg(lam));
            for (int j = 0; j < 4; ++j) CHECK(std::abs(fit.beta(j) - soft_threshold(ols(j), lam / 2.0)) < 1e-8);
        }
    }
}

TEST_CASE("objective never increases across coordinate updates") {
    const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(40, 12, 21));
    const Eigen::VectorXd Y = fixtures::centered(X.col(0) - 2.0 * X.col(5) + fixtures::random_vector(40, 1));
    auto c = cfg(0.05);
    c.trace_objective = true;
    for (auto strategy : {SweepStrategy::FullSweep, SweepStrategy::ActiveSet}) {
        c.strategy = strategy;
        const auto fit = fit_lasso(X, Y, c);
        REQUIRE(fit.objective_trace.size() > 10);
        for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
            CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-12);
        CHECK(fit.objective_trace.back() == doctest::Approx(lasso_objective(DenseColumns(X), Y, fit.beta, 0.05)));
    }
}

TEST_CASE("converged fits carry a valid optimality certificate") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(30, 40, s));
        const Eigen::VectorXd Y =
            fixtures::centered(X.col(1) + 0.5 * X.col(7) + 0.3 * fixtures::random_vector(30, s + 1));
        const double lmax = lambda_max(DenseColumns(X), Y);
        for (double f : {0.5, 0.1, 0.02}) {
            const auto fit = fit_lasso(X, Y, cfg(f * lmax));
            REQUIRE(fit.converged);
            CHECK(fit.kkt.satisfied);
            // Recompute the certificate from scratch with dense algebra.
            const Eigen::VectorXd g = X.transpose() * (Y - X * fit.beta) / 30.0;
            const double half = f * lmax / 2.0;
            for (int j = 0; j < 40; ++j) {
                if (fit.beta(j) == 0.0) CHECK(std::abs(g(j)) <= half + 1e-6);
                else CHECK(std::abs(g(j) - (fit.beta(j) > 0 ? half : -half)) <= 1e-6);
            }
            const auto kkt = lasso_kkt(DenseColumns(X), Y, fit.beta, f * lmax, 1e-6);
            CHECK(kkt.satisfied);
        }
    }
}

TEST_CASE("l1 norm is monotone along a decreasing penalty path") {
    const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(40, 25, 5));
    const Eigen::VectorXd Y = fixtures::centered(X.col(3) - X.col(9) + fixtures::random_vector(40, 6));
    const double lmax = lambda_max(DenseColumns(X), Y);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(25);
    double prev = 0.0;
    for (int i = 0; i < 30; ++i) {
        const double lam = lmax * std::pow(1e-3, i / 29.0);
        const auto fit = fit_lasso(DenseColumns(X), Y, cfg(lam), &warm);
        warm = fit.beta;
        const double l1 = fit.beta.lpNorm<1>();
        CHECK(l1 + 1e-8 >= prev);
        prev = l1;
    }
}

TEST_CASE("lasso is sparser than ridge on a mostly-noise design") {
    const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(60, 53, 12));
    const Eigen::VectorXd Y =
        fixtures::centered(2.0 * X.col(0) - 1.5 * X.col(1) + X.col(2) + 0.5 * fixtures::random_vector(60, 13));
    const double lmax = lambda_max(DenseColumns(X), Y);
    const auto lasso = fit_lasso(X, Y, cfg(0.1 * lmax));
    const auto ridge = fit_ridge(X, Y, 0.1 * lmax);
    CHECK(ridge.nonzero_count() == 53);
    CHECK(lasso.nonzero_count() < ridge.nonzero_count());
    for (std::size_t j : {0u, 1u, 2u}) CHECK(lasso.beta(static_cast<Eigen::Index>(j)) != 0.0);
}

TEST_CASE("active-set and full-sweep strategies agree") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(25, 15, s + 40));
        const Eigen::VectorXd Y = fixtures::centered(X.col(2) - 0.7 * X.col(11) + 0.4 * fixtures::random_vector(25, s));
        const double lmax = lambda_max(DenseColumns(X), Y);
        for (double f : {0.3, 0.05}) {
            auto a = cfg(f * lmax), b = cfg(f * lmax);
            a.strategy = SweepStrategy::ActiveSet;
            b.strategy = SweepStrategy::FullSweep;
            CHECK(max_abs_diff(fit_lasso(X, Y, a).beta, fit_lasso(X, Y, b).beta) < 1e-6);
        }
    }
}

TEST_CASE("streamed and materialized expansions give identical fits") {
    for (std::uint64_t s = 1; s <= 3; ++s) {
        const int p0 = 8 + static_cast<int>(s) * 4;
        const Eigen::MatrixXd Z = fixtures::standardized(fixtures::random_matrix(40, p0, s));
        std::vector<FeatureDescriptor> names;
        for (int j = 0; j < p0; ++j)
            names.push_back({static_cast<std::size_t>(j), "z" + std::to_string(j), FeatureCategory::MeteoHourly,
                             {static_cast<std::size_t>(j)}});
        const ExpandedDesign E(Z, names);
        const Eigen::MatrixXd M = materialize(E);
        const Eigen::VectorXd Y = fixtures::centered(Z.col(0).cwiseProduct(Z.col(1)) + 0.2 * fixtures::random_vector(40, s));
        const double lam = 0.05 * lambda_max(E, Y);
        const auto streamed = fit_lasso(E, Y, cfg(lam));
        const auto dense = fit_lasso(M, Y, cfg(lam));
        CHECK(streamed.beta == dense.beta);
        CHECK(streamed.sweeps_used == dense.sweeps_used);
    }
}

TEST_CASE("non-convergence is reported, not thrown") {
    const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(30, 20, 2));
    const Eigen::VectorXd Y = fixtures::centered(fixtures::random_vector(30, 3));
    auto c = cfg(1e-4);
    c.max_sweeps = 2;
    const auto fit = fit_lasso(X, Y, c);
    CHECK_FALSE(fit.converged);
    CHECK(fit.sweeps_used == 2);
    CHECK_FALSE(fit.warnings.empty());
    auto bad = cfg(-1.0);
    CHECK_THROWS_AS(fit_lasso(X, Y, bad), ConfigError);
    auto bad_tol = cfg(0.1);
    bad_tol.tol = 0.0;
    CHECK_THROWS_AS(fit_lasso(X, Y, bad_tol), ConfigError);
}

TEST_CASE("warm start from the solution converges immediately") {
    const Eigen::MatrixXd X = fixtures::standardized(fixtures::random_matrix(30, 10, 2));
    const Eigen::VectorXd Y = fixtures::centered(X.col(4) + 0.3 * fixtures::random_vector(30, 3));
    const auto cold = fit_lasso(X, Y, cfg(0.05));
    const auto warm = fit_lasso(DenseColumns(X), Y, cfg(0.05), &cold.beta);
    CHECK(warm.sweeps_used == 1);
    CHECK(max_abs_diff(warm.beta, cold.beta) < 1e-7);
}

TEST_CASE("design product matches a brute-force oracle") {
    const auto X = fixtures::random_matrix(5, 3, 8);
    Eigen::VectorXd beta(3);
    beta << 0.5, 0.0, -2.0;
    const auto got = design_times(DenseColumns(X), beta);
    for (int i = 0; i < 5; ++i) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += X(i, j) * beta(j);
        CHECK(got(i) == doctest::Approx(s).epsilon(1e-15));
    }
}

TEST_CASE("prediction from a fit: interpolation and the null model") {
    // Noiseless linear rows with two features.
    std::vector<DailyFeatureRow> rows;
    for (int i = 0; i < 12; ++i) {
        DailyFeatureRow r;
        r.date = Date(2016, 1, 1).plus_days(i);
        const double a = std::sin(i * 1.1), b = std::cos(i * 0.7);
        r.x = {a, b};
        r.current_anchor = 40.0 + i;
        r.target_raw = r.current_anchor + 3.0 + 2.0 * a - b;
        rows.push_back(r);
    }
    const auto params = fit_standardizer(rows, TargetMode::Delta);
    const auto data = apply_standardizer(params, rows, TargetMode::Delta);
    const auto fit = fit_lasso(data.X, data.Y, cfg(0.0));
    const auto pred = predict(fit, params, rows, TargetMode::Delta);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(std::abs(pred[i] - rows[i].target_raw) < 1e-8);

    // beta = 0 with a zero standardized intercept predicts the training mean change.
    ModelFit zero = fit;
    zero.beta.setZero();
    zero.beta0 = 0.0;
    zero.active_set.clear();
    const auto mean_pred = predict(zero, params, rows, TargetMode::Delta);
    double mean_delta = 0.0;
    for (const auto& r : rows) mean_delta += r.target_raw - r.current_anchor;
    mean_delta /= 12.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(mean_pred[i] == doctest::Approx(rows[i].current_anchor + mean_delta).epsilon(1e-14));

    // With an identity response scale the all-zero fit is pure persistence.
    auto identity = params;
    identity.y_mu = 0.0;
    identity.y_sigma = 1.0;
    const auto null_pred = predict(zero, identity, rows, TargetMode::Delta);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(null_pred[i] == rows[i].current_anchor);
}

TEST_CASE("ridge path from one SVD agrees with the normal equations") {
    for (const auto [n, p] : {std::pair{40, 12}, std::pair{25, 60}}) {
        const auto X = fixtures::standardized(fixtures::random_matrix(n, p, 31 + p));
        const auto Y = fixtures::centered(fixtures::random_vector(n, 32 + p));
        const RidgePath path(X, Y);
        for (double lambda : {1e-3, 0.05, 1.0, 20.0}) {
            const auto a = path.fit(lambda);
            const auto b = fit_ridge(X, Y, lambda);
            CHECK(max_abs_diff(a.beta, b.beta) < 1e-8);
            CHECK(max_abs_diff(a.residuals, b.residuals) < 1e-8);
            CHECK(a.beta0 == b.beta0);
        }
        CHECK_THROWS_AS(path.fit(0.0), ConfigError);
    }
}
