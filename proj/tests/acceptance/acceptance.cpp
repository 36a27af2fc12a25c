// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ozlasso/evaluation.hpp"
#include "ozlasso/expansion.hpp"
#include "ozlasso/features.hpp"
#include "ozlasso/pipeline.hpp"
#include "ozlasso/selection.hpp"
#include "ozlasso/solvers.hpp"

using namespace ozlasso;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd X(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = N(eng);
    return X;
}

Eigen::MatrixXd standardized(Eigen::MatrixXd X) {
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        X.col(j).array() -= X.col(j).mean();
        X.col(j) /= std::sqrt(X.col(j).squaredNorm() / n);
    }
    return X;
}

Eigen::VectorXd centered(Eigen::VectorXd y) {
    y.array() -= y.mean();
    return y;
}

std::string num(double v) {
    std::ostringstream o;
    o.precision(3);
    o << v;
    return o.str();
}

// Every converged lasso fit produced by the suite, for the certificate check.
struct KktRecord {
    std::string origin;
    Eigen::MatrixXd X;
    Eigen::VectorXd Y;
    Eigen::VectorXd beta;
    double lambda = 0.0;
};
std::vector<KktRecord> g_fits;
std::size_t g_unconverged = 0;

void record(const std::string& origin, const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const ModelFit& fit) {
    if (!fit.converged) {
        ++g_unconverged;
        return;
    }
    g_fits.push_back({origin, X, Y, fit.beta, fit.lambda});
}

Outcome feature_counts() {
    const auto max = base_schema(Variant::Max);
    const auto max8 = base_schema(Variant::Max8h);
    std::size_t pollutant = 0, meteo = 0;
    for (const auto& d : max) {
        const auto c = d.category;
        if (c == FeatureCategory::PollutantHourly || c == FeatureCategory::PollutantAggregate) ++pollutant;
        else ++meteo;
    }
    const std::size_t f_pollutant = 7 * (24 + 3);
    const std::size_t f_meteo = 9 * (24 + 3) * 3;
    const std::size_t f_base = f_pollutant + f_meteo;
    const std::size_t f_8h = f_base + 17 + 3;
    auto quad = [](std::size_t p) { return p + p + p * (p - 1) / 2; };
    const bool formulas = f_pollutant == 189 && f_meteo == 729 && f_base == 918 && f_8h == 938 &&
                          quad(f_base) == 422739 && quad(f_8h) == 441329;
    const bool schemas = pollutant == f_pollutant && meteo == f_meteo && max.size() == f_base && max8.size() == f_8h;
    const bool expansions = expanded_feature_count(max.size()) == quad(f_base) &&
                            expanded_feature_count(max8.size()) == quad(f_8h) &&
                            expanded_schema(max).size() == 422739 && expanded_schema(max8).size() == 441329;
    std::ostringstream d;
    d << pollutant << "+" << meteo << "=" << max.size() << ", max8h " << max8.size() << ", expanded "
      << expanded_feature_count(max.size()) << "/" << expanded_feature_count(max8.size());
    return {formulas && schemas && expansions, d.str()};
}

Outcome lasso_ols() {
    double worst = 0.0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const Eigen::MatrixXd X = standardized(random_matrix(50, 10, 100 + s));
        const Eigen::VectorXd Y = centered(X * Eigen::VectorXd::LinSpaced(10, -1.0, 1.0) + random_matrix(50, 1, 200 + s).col(0));
        const Eigen::VectorXd normal = (X.transpose() * X).ldlt().solve(X.transpose() * Y);
        LassoConfig c;
        c.lambda = 0.0;
        const auto fit = fit_lasso(X, Y, c);
        record("lambda=0", X, Y, fit);
        worst = std::max(worst, (fit.beta - normal).lpNorm<Eigen::Infinity>());
    }
    return {worst <= 1e-6, "max |beta - beta_ols| = " + num(worst)};
}

Outcome orthonormal() {
    double worst = 0.0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const int n = 60, p = 12;
        const Eigen::MatrixXd R = random_matrix(n, p, 300 + s);
        const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(R).householderQ() * Eigen::MatrixXd::Identity(n, p);
        const Eigen::MatrixXd X = std::sqrt(static_cast<double>(n)) * Q;
        const Eigen::VectorXd Y = X * random_matrix(p, 1, 400 + s).col(0) + 0.5 * random_matrix(n, 1, 500 + s).col(0);
        const Eigen::VectorXd ols = X.transpose() * Y / static_cast<double>(n);
        const double top = 2.0 * ols.cwiseAbs().maxCoeff();
        for (double frac : {0.05, 0.3, 0.7}) {
            LassoConfig c;
            c.lambda = frac * top;
            const auto fit = fit_lasso(X, Y, c);
            record("orthonormal", X, Y, fit);
            for (int j = 0; j < p; ++j) {
                const double z = ols(j), t = c.lambda / 2.0;
                const double expect = std::abs(z) <= t ? 0.0 : (z > 0 ? z - t : z + t);
                worst = std::max(worst, std::abs(fit.beta(j) - expect));
            }
        }
    }
    return {worst < 1e-8, "max componentwise error = " + num(worst)};
}

Outcome kkt_certificates() {
    double inactive = -1.0, active = 0.0;
    std::string where;
    for (const auto& r : g_fits) {
        // Dense recomputation of g = Xᵀ(Y - X beta) / n for the objective as fitted.
        const double n = static_cast<double>(r.X.rows());
        const Eigen::VectorXd resid = r.Y - r.X * r.beta;
        const Eigen::VectorXd g = r.X.transpose() * resid / n;
        for (Eigen::Index j = 0; j < g.size(); ++j) {
            if (r.beta(j) == 0.0) {
                const double e = std::abs(g(j)) - r.lambda / 2.0;
                if (e > inactive) {
                    inactive = e;
                    if (e > 1e-6) where = r.origin;
                }
            } else {
                const double e = std::abs(g(j) - std::copysign(r.lambda / 2.0, r.beta(j)));
                if (e > active) {
                    active = e;
                    if (e > 1e-6) where = r.origin;
                }
            }
        }
    }
    const bool pass = !g_fits.empty() && inactive <= 1e-6 && active <= 1e-6;
    std::ostringstream d;
    d << g_fits.size() << " converged fits; max |g_j|-lambda/2 on zeros = " << num(inactive)
      << ", max active residual = " << num(active);
    if (g_unconverged) d << "; " << g_unconverged << " unconverged fits excluded";
    if (!where.empty()) d << "; worst in " << where;
    return {pass, d.str()};
}

Outcome null_and_monotone() {
    const Eigen::MatrixXd X = standardized(random_matrix(100, 40, 600));
    Eigen::VectorXd Y = X.col(0) * 2.0 - X.col(5) + X.col(17) * 0.5 + random_matrix(100, 1, 601).col(0);
    Y = centered(Y);
    const DenseColumns cols(X);
    const auto grid = make_lambda_grid(cols, Y, 100, 1e-4);
    LassoConfig base;
    std::vector<double> l1;
    bool null_exact = false;
    lasso_path(cols, Y, grid, base, true, [&](std::size_t i, const ModelFit& fit) {
        record("path", X, Y, fit);
        if (i == 0) null_exact = (fit.beta.array() == 0.0).all();
        l1.push_back(fit.beta.lpNorm<1>());
    });
    // Along a decreasing grid the l1 norm must not decrease.
    double worst_drop = 0.0;
    for (std::size_t i = 1; i < l1.size(); ++i) worst_drop = std::max(worst_drop, l1[i - 1] - l1[i]);
    return {null_exact && worst_drop <= 1e-8 && l1.size() == 100,
            std::string("beta(lambda_max) ") + (null_exact ? "exactly zero" : "NONZERO") +
                ", largest l1 decrease along path = " + num(worst_drop)};
}

Outcome ridge_closed_form() {
    double worst = 0.0;
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const Eigen::MatrixXd X = standardized(random_matrix(50, 10, 700 + s));
        const Eigen::VectorXd Y = centered(random_matrix(50, 1, 800 + s).col(0) + X.col(1));
        const double n = 50.0;
        for (double lambda : {0.0, 1e-3, 0.1, 1.0}) {
            const Eigen::MatrixXd A = X.transpose() * X + n * lambda * Eigen::MatrixXd::Identity(10, 10);
            const Eigen::VectorXd oracle = A.inverse() * (X.transpose() * Y);
            worst = std::max(worst, (fit_ridge(X, Y, lambda).beta - oracle).lpNorm<Eigen::Infinity>());
        }
        const Eigen::VectorXd ols = X.colPivHouseholderQr().solve(Y);
        worst = std::max(worst, (fit_ridge(X, Y, 0.0).beta - ols).lpNorm<Eigen::Infinity>());
    }
    const int n = 30;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd Y = random_matrix(n, 1, 900).col(0);
    for (double lambda : {0.0, 0.01, 0.5}) {
        const Eigen::VectorXd expect = Y / (1.0 + n * lambda);
        worst = std::max(worst, (fit_ridge(I, Y, lambda).beta - expect).lpNorm<Eigen::Infinity>());
    }
    return {worst <= 1e-8, "max |beta - oracle| = " + num(worst)};
}

// Criteria 7 and 9 share this fixture.
struct RecoveryRun {
    bool built = false;
    double seconds = 0.0;
    std::size_t support_size = 0, missed = 0, false_pos = 0, active = 0, candidates = 0, ridge_nonzero = 0;
    double test_rmse = 0.0, noise_sd = 0.0, lambda = 0.0;
};
RecoveryRun g_recovery;
std::unique_ptr<TrainingDesign> g_recovery_design;

void run_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    SynthConfig sc;
    sc.n_days = 300;
    sc.seed = 42;
    sc.sparsity = 5;
    sc.snr = 20.0;
    const auto synth = make_synthetic(sc);
    const auto days = assemble_days(synth.records);
    const auto features = build_base_features(days, Variant::Max);
    const std::vector<DailyFeatureRow> train(features.rows.begin(), features.rows.begin() + 240);
    const std::vector<DailyFeatureRow> test(features.rows.begin() + 240, features.rows.end());

    RunConfig cfg;
    cfg.seed = 42;
    auto design = prepare_design(cfg, train, features.schema, false);
    const auto lasso = train_model(cfg, design, Method::Lasso, std::nullopt);
    record("synthetic lambda_min", materialize(design.design()), design.data.Y, lasso.fit);

    std::set<std::size_t> active;
    for (auto j : lasso.fit.active_set) active.insert(design.params.retained[j]);
    std::set<std::size_t> support;
    for (const auto& t : synth.support) support.insert(t.index);
    auto& r = g_recovery;
    r.support_size = support.size();
    for (auto s : support) r.missed += active.count(s) ? 0 : 1;
    for (auto a : active) r.false_pos += support.count(a) ? 0 : 1;
    r.active = active.size();
    r.candidates = design.candidates();
    r.lambda = lasso.fit.lambda;

    const auto pred = predict(lasso.model, test);
    std::vector<double> obs;
    for (const auto& row : test) obs.push_back(row.target_raw);
    r.test_rmse = rmse(pred, obs);
    r.noise_sd = synth.noise_sd;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.built = true;
    g_recovery_design = std::make_unique<TrainingDesign>(std::move(design));
}

Outcome sparse_recovery() {
    run_recovery();
    const auto& r = g_recovery;
    const bool superset = r.missed == 0;
    const bool few_fp = r.false_pos <= 10;
    const bool accurate = r.test_rmse <= 1.2 * r.noise_sd;
    const bool fast = r.seconds < 60.0;
    std::ostringstream d;
    d << "lambda_min " << num(r.lambda) << ", support " << r.support_size - r.missed << "/" << r.support_size
      << " recovered, " << r.false_pos << " false positives (limit 10), test rmse " << num(r.test_rmse) << " vs 1.2 x noise sd "
      << num(1.2 * r.noise_sd) << ", " << num(r.seconds) << " s";
    return {superset && few_fp && accurate && fast, d.str()};
}

Outcome sparsity_contrast() {
    auto& r = g_recovery;
    if (!r.built) return {false, "recovery fixture unavailable"};
    RunConfig cfg;
    cfg.seed = 42;
    r.ridge_nonzero = train_model(cfg, *g_recovery_design, Method::Ridge, std::nullopt).fit.nonzero_count();
    const double share = static_cast<double>(r.active) / static_cast<double>(r.candidates);
    std::ostringstream d;
    d << "lasso " << r.active << "/" << r.candidates << " (" << num(100.0 * share) << "%), ridge " << r.ridge_nonzero << "/"
      << r.candidates;
    return {r.built && share < 0.2 && r.ridge_nonzero == r.candidates, d.str()};
}

Outcome streamed_vs_materialized() {
    const auto names = base_schema(Variant::Max);
    std::size_t compared = 0, mismatched = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const Eigen::MatrixXd base = standardized(random_matrix(40, 15, 1000 + s));
        const std::vector<FeatureDescriptor> schema(names.begin(), names.begin() + 15);
        const ExpandedDesign streamed(base, schema);
        const Eigen::MatrixXd dense = materialize(streamed);
        const DenseColumns stored(dense);
        const Eigen::VectorXd Y =
            centered(base.col(0).cwiseProduct(base.col(3)) - base.col(7) + 0.3 * random_matrix(40, 1, 1100 + s).col(0));
        const auto grid = make_lambda_grid(stored, Y, 20, 1e-3);
        std::vector<ModelFit> a, b;
        LassoConfig c;
        lasso_path(streamed, Y, grid, c, true, [&](std::size_t, const ModelFit& f) { a.push_back(f); });
        lasso_path(stored, Y, grid, c, true, [&](std::size_t, const ModelFit& f) { b.push_back(f); });
        for (std::size_t i = 0; i < a.size(); ++i) {
            ++compared;
            if (!(a[i].beta.array() == b[i].beta.array()).all() || a[i].sweeps_used != b[i].sweeps_used) ++mismatched;
            record("expanded p0=15", dense, Y, a[i]);
        }
    }
    return {compared == 200 && mismatched == 0,
            std::to_string(compared - mismatched) + "/" + std::to_string(compared) + " path fits bit-identical"};
}

Outcome metric_oracles() {
    std::mt19937_64 eng(1234);
    std::uniform_real_distribution<double> U(-40.0, 120.0);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> p(100), o(100);
        for (auto& v : p) v = U(eng);
        for (auto& v : o) v = U(eng);
        long double se = 0.0L, ae = 0.0L;
        for (std::size_t i = 0; i < p.size(); ++i) {
            se += static_cast<long double>(p[i] - o[i]) * (p[i] - o[i]);
            ae += std::fabs(static_cast<long double>(p[i] - o[i]));
        }
        const double r_oracle = static_cast<double>(std::sqrt(se / p.size()));
        const double a_oracle = static_cast<double>(ae / p.size());
        // Slope, intercept and r from raw sums.
        long double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            sx += o[i];
            sy += p[i];
            sxx += static_cast<long double>(o[i]) * o[i];
            sxy += static_cast<long double>(o[i]) * p[i];
            syy += static_cast<long double>(p[i]) * p[i];
        }
        const long double N = p.size();
        const long double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
        const long double icpt = (sy - slope * sx) / N;
        const long double corr = (N * sxy - sx * sy) / std::sqrt((N * sxx - sx * sx) * (N * syy - sy * sy));
        const auto fit = scatter_fit(p, o);
        if (!fit) return {false, "scatter fit missing"};
        worst = std::max({worst, std::abs(rmse(p, o) - r_oracle) / std::max(1.0, r_oracle),
                          std::abs(mae(p, o) - a_oracle) / std::max(1.0, a_oracle),
                          std::abs(fit->slope - static_cast<double>(slope)),
                          std::abs(fit->intercept - static_cast<double>(icpt)) / std::max(1.0, std::abs(static_cast<double>(icpt))),
                          std::abs(fit->pearson_r - static_cast<double>(corr))});
    }
    std::size_t violations = 0;
    std::uniform_int_distribution<int> len(1, 50);
    for (int t = 0; t < 1000; ++t) {
        std::vector<double> p(static_cast<std::size_t>(len(eng))), o(p.size());
        for (auto& v : p) v = U(eng);
        for (auto& v : o) v = U(eng);
        if (rmse(p, o) < mae(p, o)) ++violations;
    }
    return {worst <= 1e-12 && violations == 0,
            "max relative deviation " + num(worst) + ", rmse < mae on " + std::to_string(violations) + "/1000 inputs"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "ozlasso_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream log;
    for (const char* run : {"a", "b"}) {
        SynthConfig sc;
        sc.n_days = 40;
        sc.seed = 42;
        cmd_synth(sc, root / run / "data", log);
        RunConfig cfg;
        cfg.pollutant_file = (root / run / "data" / "pollutant.csv").string();
        cfg.meteo_file = (root / run / "data" / "meteorology.csv").string();
        cfg.train_end = Date(2014, 1, 30);
        cfg.test_start = Date(2014, 1, 31);
        cfg.seed = 42;
        cfg.output_dir = (root / run / "out").string();
        cmd_train(cfg, log);
        cmd_predict(cfg, root / run / "out" / "model.json", log);
        cmd_evaluate(cfg, root / run / "out" / "predictions.csv", log);
        cmd_report(cfg, log);
    }
    std::size_t files = 0;
    std::vector<std::string> differing;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), root / "a");
        // Effective configs name their own output directory.
        if (rel.filename() == "effective_config.txt") continue;
        ++files;
        if (slurp(entry.path()) != slurp(root / "b" / rel)) differing.push_back(rel.string());
    }
    const bool has_core = fs::exists(root / "a" / "out" / "model.json") && fs::exists(root / "a" / "out" / "predictions.csv") &&
                          fs::exists(root / "a" / "out" / "comparison.csv") &&
                          fs::exists(root / "a" / "out" / "weights_lasso_polynomial.csv");
    fs::remove_all(root);
    std::string detail = std::to_string(files - differing.size()) + "/" + std::to_string(files) + " artifacts byte-identical";
    for (const auto& d : differing) detail += "; differs: " + d;
    return {has_core && differing.empty() && files > 0, detail};
}

Outcome eight_hour_means() {
    std::array<double, 24> ramp{}, flat{};
    for (int h = 0; h < 24; ++h) ramp[static_cast<std::size_t>(h)] = h;
    flat.fill(41.5);
    const auto r = compute_8h_means(ramp);
    const auto f = compute_8h_means(flat);
    bool ok = true;
    for (std::size_t s = 0; s < kEightHourWindows; ++s) {
        ok = ok && r.means[s] == 3.5 + static_cast<double>(s);
        ok = ok && f.means[s] == 41.5;
    }
    const auto argmax = std::max_element(r.means.begin(), r.means.end()) - r.means.begin();
    ok = ok && r.means.size() == 17 && r.summary.max == 19.5 && argmax == 16 && f.summary.max == 41.5 && f.summary.min == 41.5;
    return {ok, "ramp " + num(r.means.front()) + ".." + num(r.means.back()) + ", max " + num(r.summary.max) +
                    " at start hour " + std::to_string(argmax)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0: no runtime limit
        std::function<Outcome()> run;
    };
    // The certificate check runs last so it sees every fit; output is in id order.
    const std::vector<Criterion> criteria = {
        {1, "feature-count exactness", 1.0, feature_counts},
        {2, "lasso-OLS equivalence at lambda=0", 5.0, lasso_ols},
        {3, "orthonormal design soft-threshold exactness", 5.0, orthonormal},
        {5, "lambda_max nullity and l1 path monotonicity", 0.0, null_and_monotone},
        {6, "ridge closed form", 0.0, ridge_closed_form},
        {7, "sparse recovery on synthetic data", 60.0, sparse_recovery},
        {8, "streamed vs materialized expansion", 10.0, streamed_vs_materialized},
        {9, "sparsity contrast lasso vs ridge", 0.0, sparsity_contrast},
        {10, "metric oracles", 0.0, metric_oracles},
        {11, "end-to-end determinism", 0.0, determinism},
        {12, "eight-hour mean correctness", 0.0, eight_hour_means},
        {4, "KKT certificate on every converged fit", 0.0, kkt_certificates},
    };
    std::vector<std::pair<int, std::string>> lines;
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_s > 0.0 && secs >= c.limit_s) {
            o.pass = false;
            o.detail += "; runtime limit " + num(c.limit_s) + " s exceeded";
        }
        if (!o.pass) ++failures;
        std::ostringstream line;
        line << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " (" << num(secs)
             << " s)";
        lines.emplace_back(c.id, line.str());
        std::cerr << line.str() << '\n';
    }
    std::sort(lines.begin(), lines.end());
    std::cout << "---\n";
    for (const auto& [id, text] : lines) std::cout << text << '\n';
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
