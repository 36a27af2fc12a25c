#include "ozlasso/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>

#include "json.hpp"

#include "ozlasso/error.hpp"
#include "ozlasso/textio.hpp"

namespace ozlasso {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "ozlasso-model";

std::optional<Method> method_from_name(std::string_view s) {
    if (s == "ols") return Method::Ols;
    if (s == "ridge") return Method::Ridge;
    if (s == "lasso") return Method::Lasso;
    return std::nullopt;
}

void fnv_mix(std::uint64_t& h, std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
        h ^= (word >> (8 * b)) & 0xffu;
        h *= 0x100000001b3ull;
    }
}

template <class T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw SchemaError(std::string("model file: missing key '") + key + "'");
    return j.at(key).get<T>();
}

}  // namespace

std::string standardization_digest(const StandardizationParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    fnv_mix(h, p.raw_width);
    for (double v : p.mu) fnv_mix(h, std::bit_cast<std::uint64_t>(v));
    for (double v : p.sigma) fnv_mix(h, std::bit_cast<std::uint64_t>(v));
    fnv_mix(h, std::bit_cast<std::uint64_t>(p.y_mu));
    fnv_mix(h, std::bit_cast<std::uint64_t>(p.y_sigma));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TrainedModel make_trained_model(const ModelFit& fit, const StandardizationParams& params,
                                std::span<const FeatureDescriptor> raw_schema, Variant variant, TargetMode mode,
                                const ExpandedDesign* expanded, const LassoConfig* lasso_config) {
    if (raw_schema.size() != params.raw_width) throw SchemaError("raw schema does not match standardizer width");
    const std::size_t p0 = params.width();
    const std::size_t p = expanded ? expanded->cols() : p0;
    if (static_cast<std::size_t>(fit.beta.size()) != p) throw SchemaError("fit width does not match design width");

    TrainedModel m;
    m.method = fit.method;
    m.lambda = fit.lambda;
    m.variant = variant;
    m.target_mode = mode;
    m.polynomial = expanded != nullptr;
    m.intercept = fit.beta0;
    m.candidates = p;
    m.standardization = params;
    for (const auto& d : raw_schema) m.raw_names.push_back(d.name);
    for (auto j : fit.active_set) {
        TrainedModel::Term t;
        t.index = j;
        t.weight = fit.beta(static_cast<Eigen::Index>(j));
        if (j < p0) {
            t.name = raw_schema[params.retained[j]].name;
        } else {
            const auto [a, b] = expansion_parents(p0, j);
            t.parents = std::make_pair(a, b);
            t.name = expanded->descriptor(j).name;
            t.expansion_mean = expanded->params().mean[j - p0];
            t.expansion_sd = expanded->params().sd[j - p0];
        }
        m.terms.push_back(std::move(t));
    }
    m.converged = fit.converged;
    m.sweeps = fit.sweeps_used;
    if (fit.method == Method::Lasso) {
        m.kkt = fit.kkt;
        if (lasso_config) {
            m.tol = lasso_config->tol;
            m.max_sweeps = lasso_config->max_sweeps;
            m.strategy = lasso_config->strategy;
        }
    }
    m.condition_estimate = fit.condition_estimate;
    m.warnings = fit.warnings;
    return m;
}

std::string model_to_json(const TrainedModel& m) {
    json j;
    j["format"] = kFormat;
    j["schema_version"] = kModelSchemaVersion;
    j["method"] = std::string(method_name(m.method));
    j["lambda"] = m.lambda;
    j["lambda_convention"] = std::string(kLambdaConvention);
    j["variant"] = std::string(variant_name(m.variant));
    j["target_mode"] = std::string(target_mode_name(m.target_mode));
    j["expansion"] = m.polynomial ? "polynomial" : "linear";
    j["intercept"] = m.intercept;
    j["candidates"] = m.candidates;
    j["active"] = m.terms.size();

    json weights = json::array();
    for (const auto& t : m.terms) {
        json w;
        w["index"] = t.index;
        w["name"] = t.name;
        w["weight"] = t.weight;
        if (t.parents) {
            w["parents"] = {t.parents->first, t.parents->second};
            w["expansion_mean"] = t.expansion_mean;
            w["expansion_sd"] = t.expansion_sd;
        }
        weights.push_back(std::move(w));
    }
    j["weights"] = std::move(weights);

    const auto& s = m.standardization;
    json st;
    st["digest"] = standardization_digest(s);
    st["raw_width"] = s.raw_width;
    st["mu"] = s.mu;
    st["sigma"] = s.sigma;
    st["retained"] = s.retained;
    st["y_mu"] = s.y_mu;
    st["y_sigma"] = s.y_sigma;
    st["y_constant"] = s.y_constant;
    j["standardization"] = std::move(st);

    json dropped = json::array();
    for (auto idx : s.dropped)
        dropped.push_back({{"index", idx}, {"name", idx < m.raw_names.size() ? m.raw_names[idx] : ""}});
    j["dropped_columns"] = std::move(dropped);
    j["raw_names"] = m.raw_names;

    if (m.kkt) {
        j["kkt"] = {{"satisfied", m.kkt->satisfied},
                    {"max_inactive_excess", m.kkt->max_inactive_excess},
                    {"max_active_residual", m.kkt->max_active_residual},
                    {"tol", m.kkt->tol}};
    }
    json solver;
    solver["converged"] = m.converged;
    solver["sweeps"] = m.sweeps;
    if (m.method == Method::Lasso) {
        solver["tol"] = m.tol;
        solver["max_sweeps"] = m.max_sweeps;
        solver["strategy"] = std::string(strategy_name(m.strategy));
    } else {
        solver["condition_estimate"] = m.condition_estimate;
    }
    j["solver"] = std::move(solver);
    j["warnings"] = m.warnings;
    return j.dump(1) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (required<std::string>(j, "format") != kFormat) throw SchemaError("not an ozlasso model file");
        const int version = required<int>(j, "schema_version");
        if (version != kModelSchemaVersion)
            throw SchemaError("unsupported model schema version " + std::to_string(version) + " (expected " +
                              std::to_string(kModelSchemaVersion) + ")");
        if (required<std::string>(j, "lambda_convention") != kLambdaConvention)
            throw SchemaError("unsupported lambda convention");

        TrainedModel m;
        const auto method = method_from_name(required<std::string>(j, "method"));
        const auto variant = variant_from_name(required<std::string>(j, "variant"));
        const auto mode = target_mode_from_name(required<std::string>(j, "target_mode"));
        if (!method || !variant || !mode) throw SchemaError("model file: unknown method, variant or target mode");
        m.method = *method;
        m.variant = *variant;
        m.target_mode = *mode;
        m.lambda = required<double>(j, "lambda");
        m.polynomial = required<std::string>(j, "expansion") == "polynomial";
        m.intercept = required<double>(j, "intercept");
        m.candidates = required<std::size_t>(j, "candidates");

        const auto& st = j.at("standardization");
        auto& s = m.standardization;
        s.raw_width = required<std::size_t>(st, "raw_width");
        s.mu = required<std::vector<double>>(st, "mu");
        s.sigma = required<std::vector<double>>(st, "sigma");
        s.retained = required<std::vector<std::size_t>>(st, "retained");
        s.y_mu = required<double>(st, "y_mu");
        s.y_sigma = required<double>(st, "y_sigma");
        s.y_constant = required<bool>(st, "y_constant");
        m.raw_names = required<std::vector<std::string>>(j, "raw_names");
        for (const auto& d : j.at("dropped_columns")) {
            const auto idx = required<std::size_t>(d, "index");
            if (idx >= s.raw_width) throw SchemaError("dropped column index " + std::to_string(idx) + " is out of range");
            s.dropped.push_back(idx);
        }
        if (s.mu.size() != s.raw_width || s.sigma.size() != s.raw_width || m.raw_names.size() != s.raw_width)
            throw SchemaError("standardization arrays do not match raw width");
        if (s.retained.size() + s.dropped.size() != s.raw_width)
            throw SchemaError("retained and dropped columns do not partition the raw schema");
        for (auto r : s.retained)
            if (r >= s.raw_width || s.sigma[r] <= 0.0) throw SchemaError("invalid retained column");
        if (required<std::string>(st, "digest") != standardization_digest(s))
            throw SchemaError("standardization digest mismatch");

        const std::size_t p0 = s.retained.size();
        for (const auto& w : j.at("weights")) {
            TrainedModel::Term t;
            t.index = required<std::size_t>(w, "index");
            t.name = required<std::string>(w, "name");
            t.weight = required<double>(w, "weight");
            if (w.contains("parents")) {
                const auto par = w.at("parents").get<std::vector<std::size_t>>();
                if (par.size() != 2 || par[0] >= p0 || par[1] >= p0) throw SchemaError("invalid term parents");
                t.parents = std::make_pair(par[0], par[1]);
                t.expansion_mean = required<double>(w, "expansion_mean");
                t.expansion_sd = required<double>(w, "expansion_sd");
            } else if (t.index >= p0) {
                throw SchemaError("term index " + std::to_string(t.index) + " exceeds retained width");
            }
            m.terms.push_back(std::move(t));
        }
        if (j.contains("kkt")) {
            const auto& k = j.at("kkt");
            KktCertificate c;
            c.satisfied = required<bool>(k, "satisfied");
            c.max_inactive_excess = required<double>(k, "max_inactive_excess");
            c.max_active_residual = required<double>(k, "max_active_residual");
            c.tol = required<double>(k, "tol");
            m.kkt = c;
        }
        const auto& sv = j.at("solver");
        m.converged = required<bool>(sv, "converged");
        m.sweeps = required<int>(sv, "sweeps");
        if (sv.contains("tol")) m.tol = sv.at("tol").get<double>();
        if (sv.contains("max_sweeps")) m.max_sweeps = sv.at("max_sweeps").get<int>();
        if (sv.contains("strategy"))
            m.strategy = strategy_from_name(sv.at("strategy").get<std::string>()).value_or(SweepStrategy::ActiveSet);
        if (sv.contains("condition_estimate")) m.condition_estimate = sv.at("condition_estimate").get<double>();
        m.warnings = j.value("warnings", std::vector<std::string>{});
        return m;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
    write_file_atomic(path, model_to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

std::vector<double> predict(const TrainedModel& model, std::span<const DailyFeatureRow> rows) {
    const auto& s = model.standardization;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const Eigen::VectorXd z = standardize_row(s, row.x);
        double y = model.intercept;
        for (const auto& t : model.terms) {
            double v;
            if (t.parents) {
                v = t.expansion_sd == 0.0
                        ? 0.0
                        : (z(static_cast<Eigen::Index>(t.parents->first)) * z(static_cast<Eigen::Index>(t.parents->second)) -
                           t.expansion_mean) /
                              t.expansion_sd;
            } else {
                v = z(static_cast<Eigen::Index>(t.index));
            }
            y += t.weight * v;
        }
        out.push_back(reanchor(destandardize_response(s, y), row, model.target_mode));
    }
    return out;
}

std::vector<double> predict(const ModelFit& fit, const StandardizationParams& params,
                            std::span<const DailyFeatureRow> rows, TargetMode mode) {
    if (static_cast<std::size_t>(fit.beta.size()) != params.width())
        throw SchemaError("fit width " + std::to_string(fit.beta.size()) + " does not match retained width " +
                          std::to_string(params.width()));
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const Eigen::VectorXd z = standardize_row(params, row.x);
        double y = fit.beta0;
        for (Eigen::Index j = 0; j < z.size(); ++j)
            if (fit.beta(j) != 0.0) y += fit.beta(j) * z(j);
        out.push_back(reanchor(destandardize_response(params, y), row, mode));
    }
    return out;
}

}  // namespace ozlasso
