#include "ozlasso/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ozlasso/error.hpp"
#include "ozlasso/evaluation.hpp"
#include "ozlasso/textio.hpp"

namespace ozlasso {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// configuration

namespace {

double parse_number(std::string_view key, std::string_view value) {
    const auto v = parse_double(value);
    if (!v) throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
    return *v;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view value) {
    value = trim(value);
    Int out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("config: '" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: '" + std::string(key) + "' expects true or false");
}

std::optional<Date> parse_date_setting(std::string_view key, std::string_view value) {
    if (value.empty()) return std::nullopt;
    auto d = Date::parse(value);
    if (!d) throw ConfigError("config: '" + std::string(key) + "' expects YYYY-MM-DD, got '" + std::string(value) + "'");
    return d;
}

template <class T, class F>
T parse_enum(std::string_view key, std::string_view value, F from_name) {
    auto v = from_name(value);
    if (!v) throw ConfigError("config: invalid value '" + std::string(value) + "' for '" + std::string(key) + "'");
    return *v;
}

std::optional<Method> method_from(std::string_view s) {
    if (s == "lasso") return Method::Lasso;
    if (s == "ridge") return Method::Ridge;
    if (s == "ols" || s == "mlr") return Method::Ols;
    return std::nullopt;
}

std::string delimiter_text(char c) { return c == '\t' ? "tab" : std::string(1, c); }

std::string join(const std::vector<std::string>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

std::string optional_lambda_text(const std::optional<double>& v) { return v ? format_double(*v) : "cv"; }

std::optional<double> parse_lambda(std::string_view key, std::string_view value) {
    if (value == "cv") return std::nullopt;
    const double v = parse_number(key, value);
    if (v < 0.0) throw ConfigError("config: '" + std::string(key) + "' must be >= 0");
    return v;
}

}  // namespace

LassoConfig RunConfig::lasso_config(double lambda_value) const {
    LassoConfig c;
    c.lambda = lambda_value;
    c.tol = tol;
    c.max_sweeps = max_sweeps;
    c.strategy = strategy;
    return c;
}

void RunConfig::validate() const {
    auto check_range = [](const std::optional<Date>& a, const std::optional<Date>& b, const char* what) {
        if (a && b && *b < *a) throw ConfigError(std::string("config: ") + what + " range ends before it starts");
    };
    check_range(train_start, train_end, "train");
    check_range(test_start, test_end, "test");
    if (train_start && train_end && test_start && test_end) {
        const bool disjoint = *train_end < *test_start || *test_end < *train_start;
        if (!disjoint) throw ConfigError("config: train and test date ranges overlap");
        if (folds == FoldMode::Blocked && !(*train_end < *test_start))
            throw ConfigError("config: blocked folds require the test range to follow the train range");
    }
    if (cv_k < 2) throw ConfigError("config: cv_k must be >= 2");
    if (cv_points < 1) throw ConfigError("config: cv_points must be >= 1");
    if (!(cv_ratio > 0.0 && cv_ratio < 1.0)) throw ConfigError("config: cv_ratio must lie in (0, 1)");
    if (!(tol > 0.0)) throw ConfigError("config: tol must be > 0");
    if (max_sweeps < 1) throw ConfigError("config: max_sweeps must be >= 1");
    if (max_gap_hours < 0) throw ConfigError("config: max_gap_hours must be >= 0");
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view raw) {
    const std::string_view value = trim(raw);
    if (key == "pollutant_file") c.pollutant_file = value;
    else if (key == "meteo_file") c.meteo_file = value;
    else if (key == "forecast_file") c.forecast_file = value;
    else if (key == "delimiter") {
        if (value == "tab") c.delimiter = '\t';
        else if (value.size() == 1) c.delimiter = value[0];
        else throw ConfigError("config: delimiter must be a single character or 'tab'");
    } else if (key == "missing_tokens") {
        c.missing_tokens = split_fields(value, '|');
        for (auto& t : c.missing_tokens) t = std::string(trim(t));
    } else if (key == "date_column") c.date_column = value;
    else if (key == "hour_column") c.hour_column = value;
    else if (key.starts_with("column.")) {
        const auto var = variable_from_name(key.substr(7));
        if (!var) throw ConfigError("config: unknown channel in '" + std::string(key) + "'");
        c.column_names[*var] = value;
    } else if (key == "max_gap_hours") c.max_gap_hours = parse_integer<int>(key, value);
    else if (key == "variant") c.variant = parse_enum<Variant>(key, value, variant_from_name);
    else if (key == "target_mode") c.target_mode = parse_enum<TargetMode>(key, value, target_mode_from_name);
    else if (key == "expansion") {
        if (value == "linear") c.polynomial = false;
        else if (value == "polynomial") c.polynomial = true;
        else throw ConfigError("config: expansion must be linear or polynomial");
    } else if (key == "train_start") c.train_start = parse_date_setting(key, value);
    else if (key == "train_end") c.train_end = parse_date_setting(key, value);
    else if (key == "test_start") c.test_start = parse_date_setting(key, value);
    else if (key == "test_end") c.test_end = parse_date_setting(key, value);
    else if (key == "method") c.method = parse_enum<Method>(key, value, method_from);
    else if (key == "lambda") c.lambda = parse_lambda(key, value);
    else if (key == "ridge_lambda") c.ridge_lambda = parse_lambda(key, value);
    else if (key == "cv_k") c.cv_k = parse_integer<int>(key, value);
    else if (key == "cv_points") c.cv_points = parse_integer<int>(key, value);
    else if (key == "cv_ratio") c.cv_ratio = parse_number(key, value);
    else if (key == "seed") {
        if (value.empty()) c.seed.reset();
        else c.seed = parse_integer<std::uint64_t>(key, value);
    } else if (key == "folds") c.folds = parse_enum<FoldMode>(key, value, fold_mode_from_name);
    else if (key == "cv_rule") c.rule = parse_enum<SelectionRule>(key, value, selection_rule_from_name);
    else if (key == "tol") c.tol = parse_number(key, value);
    else if (key == "max_sweeps") c.max_sweeps = parse_integer<int>(key, value);
    else if (key == "strategy") c.strategy = parse_enum<SweepStrategy>(key, value, strategy_from_name);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "memory_budget_mb") c.memory_budget_mb = parse_number(key, value);
    else if (key == "report_polynomial") c.report_polynomial = parse_bool(key, value);
    else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

RunConfig parse_config_text(std::string_view text) {
    RunConfig cfg;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
        if (end == text.size()) break;
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) { return parse_config_text(read_file(path)); }

std::string config_to_text(const RunConfig& c) {
    std::ostringstream o;
    auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
    auto date = [&](const char* k, const std::optional<Date>& d) { kv(k, d ? d->iso() : ""); };
    kv("pollutant_file", c.pollutant_file);
    kv("meteo_file", c.meteo_file);
    kv("forecast_file", c.forecast_file);
    kv("delimiter", delimiter_text(c.delimiter));
    kv("missing_tokens", join(c.missing_tokens, '|'));
    kv("date_column", c.date_column);
    kv("hour_column", c.hour_column);
    for (const auto& [var, name] : c.column_names) o << "column." << variable_name(var) << " = " << name << '\n';
    kv("max_gap_hours", std::to_string(c.max_gap_hours));
    kv("variant", std::string(variant_name(c.variant)));
    kv("target_mode", std::string(target_mode_name(c.target_mode)));
    kv("expansion", c.polynomial ? "polynomial" : "linear");
    date("train_start", c.train_start);
    date("train_end", c.train_end);
    date("test_start", c.test_start);
    date("test_end", c.test_end);
    kv("method", std::string(method_name(c.method)));
    kv("lambda", optional_lambda_text(c.lambda));
    kv("ridge_lambda", optional_lambda_text(c.ridge_lambda));
    kv("cv_k", std::to_string(c.cv_k));
    kv("cv_points", std::to_string(c.cv_points));
    kv("cv_ratio", format_double(c.cv_ratio));
    kv("seed", c.seed ? std::to_string(*c.seed) : "");
    kv("folds", std::string(fold_mode_name(c.folds)));
    kv("cv_rule", std::string(selection_rule_name(c.rule)));
    kv("tol", format_double(c.tol));
    kv("max_sweeps", std::to_string(c.max_sweeps));
    kv("strategy", std::string(strategy_name(c.strategy)));
    kv("output_dir", c.output_dir);
    kv("memory_budget_mb", format_double(c.memory_budget_mb));
    kv("report_polynomial", c.report_polynomial ? "true" : "false");
    return o.str();
}

// ---------------------------------------------------------------------------
// data loading

namespace {

IngestSchema schema_for(const RunConfig& cfg, std::span<const Variable> vars) {
    IngestSchema s;
    s.delimiter = cfg.delimiter;
    s.date_column = cfg.date_column;
    s.hour_column = cfg.hour_column;
    s.missing_tokens = cfg.missing_tokens;
    for (auto v : vars) {
        const auto it = cfg.column_names.find(v);
        s.columns[v] = it != cfg.column_names.end() ? it->second : std::string(variable_name(v));
    }
    return s;
}

std::vector<Variable> all_variables() {
    std::vector<Variable> v;
    for (std::size_t i = 0; i < kNumVariables; ++i) v.push_back(variable_at(i));
    return v;
}

void absorb(IngestSummary& s, const ParseResult& r, const std::string& source) {
    s.rows_read += r.rows_read;
    s.cells_missing += r.cells_missing;
    for (const auto& issue : r.rejected)
        s.rejected.push_back(source + ":" + std::to_string(issue.line) + ": " + issue.message);
}

}  // namespace

LoadedData load_data(const RunConfig& cfg) {
    if (cfg.pollutant_file.empty()) throw ConfigError("config: pollutant_file is required");
    LoadedData out;
    std::vector<HourlyRecord> records;
    if (cfg.meteo_file.empty()) {
        const auto vars = all_variables();
        auto r = parse_hourly_file(cfg.pollutant_file, schema_for(cfg, vars));
        absorb(out.summary, r, cfg.pollutant_file);
        records = std::move(r.records);
    } else {
        auto pol = parse_hourly_file(cfg.pollutant_file, schema_for(cfg, kPollutants));
        auto met = parse_hourly_file(cfg.meteo_file, schema_for(cfg, kMeteo));
        absorb(out.summary, pol, cfg.pollutant_file);
        absorb(out.summary, met, cfg.meteo_file);
        records = merge_records(pol.records, met.records);
    }
    if (records.empty()) throw ParseError("no usable hourly records in the input");
    out.days = assemble_days(records, cfg.max_gap_hours);
    for (const auto& d : out.days) {
        std::string missing;
        for (std::size_t i = 0; i < kNumVariables; ++i) {
            out.summary.interpolated += static_cast<std::size_t>(d.filled[i]);
            if (!d.complete[i]) {
                if (!missing.empty()) missing += ' ';
                missing += variable_name(variable_at(i));
            }
        }
        if (!missing.empty()) out.summary.incomplete.emplace_back(d.date, missing);
    }
    if (!cfg.forecast_file.empty()) {
        auto fc = parse_hourly_file(cfg.forecast_file, schema_for(cfg, kMeteo));
        absorb(out.summary, fc, cfg.forecast_file);
        out.forecast = assemble_days(fc.records, cfg.max_gap_hours);
    }
    return out;
}

std::string ingest_report_text(const LoadedData& data) {
    const auto& s = data.summary;
    std::ostringstream o;
    o << "rows_read: " << s.rows_read << '\n';
    o << "rejected_rows: " << s.rejected.size() << '\n';
    for (const auto& r : s.rejected) o << "  " << r << '\n';
    o << "missing_cells: " << s.cells_missing << '\n';
    o << "interpolated_cells: " << s.interpolated << '\n';
    o << "days: " << data.days.size() << '\n';
    o << "incomplete_days: " << s.incomplete.size() << '\n';
    for (const auto& [d, vars] : s.incomplete) o << "  " << d.iso() << ": " << vars << '\n';
    if (!data.forecast.empty()) o << "forecast_days: " << data.forecast.size() << '\n';
    return o.str();
}

namespace {

FeatureSet load_features(const RunConfig& cfg, Variant variant, std::ostream& log) {
    const auto data = load_data(cfg);
    for (const auto& r : data.summary.rejected) log << "warning: rejected row " << r << '\n';
    auto fs = build_base_features(data.days, variant, data.forecast);
    log << "feature rows: " << fs.rows.size() << " (" << fs.dropped.size() << " days dropped)\n";
    return fs;
}

bool in_range(const Date& d, const std::optional<Date>& a, const std::optional<Date>& b) {
    return (!a || !(d < *a)) && (!b || !(*b < d));
}

fs::path out_path(const RunConfig& cfg, const char* name) { return fs::path(cfg.output_dir) / name; }

}  // namespace

RowSplit split_rows(const RunConfig& cfg, std::span<const DailyFeatureRow> rows, bool need_test) {
    cfg.validate();
    RowSplit s;
    const bool has_test = cfg.test_start || cfg.test_end;
    for (const auto& r : rows) {
        if (in_range(r.date, cfg.train_start, cfg.train_end) &&
            (!has_test || !in_range(r.date, cfg.test_start, cfg.test_end)))
            s.train.push_back(r);
        if (has_test && in_range(r.date, cfg.test_start, cfg.test_end)) s.test.push_back(r);
    }
    if (s.train.empty()) throw ConfigError("training date range yields zero rows");
    if (need_test) {
        if (!has_test) throw ConfigError("config: test_start/test_end are required for this command");
        if (s.test.empty()) throw ConfigError("test date range yields zero rows");
    }
    return s;
}

// ---------------------------------------------------------------------------
// training

TrainingDesign::TrainingDesign(TrainingDesign&& other) { *this = std::move(other); }

TrainingDesign& TrainingDesign::operator=(TrainingDesign&& other) {
    params = std::move(other.params);
    data = std::move(other.data);
    raw_schema = std::move(other.raw_schema);
    retained_schema = std::move(other.retained_schema);
    expanded = std::move(other.expanded);
    dense = other.dense ? std::make_unique<DenseColumns>(data.X) : nullptr;
    other.dense.reset();
    notes = std::move(other.notes);
    return *this;
}

const ColumnSource& TrainingDesign::design() const {
    if (expanded) return *expanded;
    return *dense;
}

std::string TrainingDesign::feature_name(std::size_t j) const {
    if (expanded) return expanded->descriptor(j).name;
    return retained_schema.at(j).name;
}

TrainingDesign prepare_design(const RunConfig& cfg, std::span<const DailyFeatureRow> train,
                              std::span<const FeatureDescriptor> raw_schema, bool polynomial) {
    TrainingDesign t;
    t.raw_schema.assign(raw_schema.begin(), raw_schema.end());
    t.params = fit_standardizer(train, cfg.target_mode);
    t.data = apply_standardizer(t.params, train, cfg.target_mode);
    for (std::size_t k = 0; k < t.params.retained.size(); ++k) {
        auto d = t.raw_schema[t.params.retained[k]];
        d.index = k;
        d.parents = {k};
        t.retained_schema.push_back(std::move(d));
    }
    if (!t.params.dropped.empty()) {
        std::string names;
        for (auto j : t.params.dropped) names += (names.empty() ? "" : " ") + t.raw_schema[j].name;
        t.notes.push_back("dropped " + std::to_string(t.params.dropped.size()) +
                          " zero-variance column(s): " + names);
    }
    if (polynomial) {
        t.expanded = std::make_unique<ExpandedDesign>(t.data.X, t.retained_schema);
        const double mb = static_cast<double>(t.expanded->materialized_bytes()) / (1024.0 * 1024.0);
        std::ostringstream msg;
        msg << "polynomial design: " << t.expanded->cols() << " columns streamed from a " << t.data.X.rows() << " x "
            << t.data.X.cols() << " base";
        t.notes.push_back(msg.str());
        if (mb > cfg.memory_budget_mb) {
            std::ostringstream w;
            w << "warning: a materialized polynomial design would need " << mb << " MiB (budget "
              << cfg.memory_budget_mb << " MiB); using streamed columns";
            t.notes.push_back(w.str());
        }
    } else {
        t.dense = std::make_unique<DenseColumns>(t.data.X);
    }
    return t;
}

CvResult run_cv(const RunConfig& cfg, const TrainingDesign& design, CvSolver solver, bool keep_fit) {
    if (cfg.folds == FoldMode::Random && !cfg.seed)
        throw ConfigError("config: cross-validation with random folds requires an explicit seed");
    if (solver == CvSolver::Ridge && design.expanded)
        throw ConfigError("ridge cross-validation is only available on the linear design");
    const auto grid = make_lambda_grid(design.design(), design.data.Y, cfg.cv_points, cfg.cv_ratio);
    CvOptions opt;
    opt.k = cfg.cv_k;
    opt.seed = cfg.seed.value_or(0);
    opt.mode = cfg.folds;
    opt.solver = solver;
    opt.lasso = cfg.lasso_config();
    if (keep_fit && solver == CvSolver::Lasso) opt.keep_fit = cfg.rule;
    return kfold_cv(design.design(), design.data.Y, grid, opt);
}

std::string cv_table_text(const CvResult& cv) {
    std::string out = "lambda,cv_mean,cv_se,nonzero\n";
    for (std::size_t i = 0; i < cv.grid.size(); ++i)
        out += format_double(cv.grid[i]) + "," + format_double(cv.cv_mean[i]) + "," + format_double(cv.cv_se[i]) +
               "," + std::to_string(cv.nonzero[i]) + "\n";
    return out;
}

TrainOutcome train_model(const RunConfig& cfg, const TrainingDesign& design, Method method,
                         std::optional<double> lambda) {
    TrainOutcome out;
    const auto& X = design.design();
    const auto& Y = design.data.Y;
    switch (method) {
        case Method::Lasso: {
            if (lambda) {
                out.fit = fit_lasso_continuation(X, Y, cfg.lasso_config(*lambda));
            } else {
                // The full-data path run for the nonzero counts doubles as the
                // warm-started fit at the selected index.
                out.cv = run_cv(cfg, design, CvSolver::Lasso, true);
                out.fit = *out.cv->selected_fit;
                out.cv->selected_fit.reset();
            }
            break;
        }
        case Method::Ridge: {
            if (design.expanded) throw ConfigError("ridge is only available on the linear design");
            double lam = 0.0;
            if (lambda) {
                lam = *lambda;
            } else {
                out.cv = run_cv(cfg, design, CvSolver::Ridge);
                lam = select_lambda(*out.cv, cfg.rule);
            }
            out.fit = fit_ridge(design.data.X, Y, lam);
            break;
        }
        case Method::Ols:
            if (design.expanded) throw ConfigError("ols is only available on the linear design");
            out.fit = fit_ols(design.data.X, Y);
            break;
    }
    const LassoConfig lc = cfg.lasso_config(out.fit.lambda);
    out.model = make_trained_model(out.fit, design.params, design.raw_schema, cfg.variant, cfg.target_mode,
                                   design.expanded.get(), &lc);
    return out;
}

// ---------------------------------------------------------------------------
// commands

namespace {

void print_notes(const TrainingDesign& d, std::ostream& log) {
    for (const auto& n : d.notes) log << n << '\n';
}

void print_fit_warnings(const ModelFit& fit, std::ostream& log) {
    for (const auto& w : fit.warnings) log << "warning: " << w << '\n';
}

std::string cv_selection_text(const CvResult& cv, SelectionRule rule) {
    std::ostringstream o;
    o << "lambda_min = " << format_double(cv.lambda_min) << '\n';
    o << "lambda_1se = " << format_double(cv.lambda_1se) << '\n';
    o << "rule = " << selection_rule_name(rule) << '\n';
    o << "selected = " << format_double(select_lambda(cv, rule)) << '\n';
    o << "k = " << cv.k << '\n';
    o << "folds = " << fold_mode_name(cv.mode) << '\n';
    o << "seed = " << cv.seed << '\n';
    return o.str();
}

std::string predictions_text(std::span<const DailyFeatureRow> rows, std::span<const double> pred) {
    std::string out = "date,observed,predicted,current_anchor\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        out += rows[i].date.iso() + "," + format_double(rows[i].target_raw) + "," + format_double(pred[i]) + "," +
               format_double(rows[i].current_anchor) + "\n";
    return out;
}

std::string weights_text(const Eigen::VectorXd& beta, const std::function<std::string(std::size_t)>& name_of,
                         bool nonzero_only) {
    std::string out = "index,name,weight\n";
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (nonzero_only && beta(j) == 0.0) continue;
        out += std::to_string(j) + "," + name_of(static_cast<std::size_t>(j)) + "," + format_double(beta(j)) + "\n";
    }
    return out;
}

ComparisonEntry make_entry(std::string method, std::span<const DailyFeatureRow> test, std::span<const double> pred) {
    ComparisonEntry e;
    e.method = std::move(method);
    std::vector<double> obs;
    for (const auto& r : test) {
        e.dates.push_back(r.date);
        obs.push_back(r.target_raw);
    }
    if (!pred.empty()) e.metrics = evaluate(e.dates, pred, obs);
    e.observed = std::move(obs);
    return e;
}

}  // namespace

void cmd_ingest(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto data = load_data(cfg);
    write_file_atomic(out_path(cfg, "hourly.csv"), canonical_hourly_text(data.days, cfg.delimiter));
    const auto report = ingest_report_text(data);
    write_file_atomic(out_path(cfg, "ingest_report.txt"), report);
    log << report;
}

void cmd_featurize(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto fs = load_features(cfg, cfg.variant, log);
    std::string manifest = "index,name,category,parents\n";
    for (const auto& d : fs.schema) {
        manifest += std::to_string(d.index) + "," + d.name + "," + std::string(category_name(d.category)) + ",";
        for (std::size_t k = 0; k < d.parents.size(); ++k)
            manifest += (k ? ";" : "") + std::to_string(d.parents[k]);
        manifest += "\n";
    }
    write_file_atomic(out_path(cfg, "features_manifest.csv"), manifest);

    std::string matrix = "date,target_raw,current_anchor";
    for (const auto& d : fs.schema) matrix += "," + d.name;
    matrix += "\n";
    for (const auto& r : fs.rows) {
        matrix += r.date.iso() + "," + format_double(r.target_raw) + "," + format_double(r.current_anchor);
        for (double v : r.x) matrix += "," + format_double(v);
        matrix += "\n";
    }
    write_file_atomic(out_path(cfg, "features.csv"), matrix);

    std::string dropped = "date,reason\n";
    for (const auto& d : fs.dropped) dropped += d.date.iso() + "," + d.reason + "\n";
    write_file_atomic(out_path(cfg, "dropped_days.csv"), dropped);
}

void cmd_cv(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto fs = load_features(cfg, cfg.variant, log);
    const auto split = split_rows(cfg, fs.rows, false);
    const auto design = prepare_design(cfg, split.train, fs.schema, cfg.polynomial);
    print_notes(design, log);
    const auto solver = cfg.method == Method::Ridge ? CvSolver::Ridge : CvSolver::Lasso;
    if (cfg.method == Method::Ols) throw ConfigError("cross-validation does not apply to ols");
    const auto cv = run_cv(cfg, design, solver);
    write_file_atomic(out_path(cfg, "cv_table.csv"), cv_table_text(cv));
    write_file_atomic(out_path(cfg, "cv_selection.txt"), cv_selection_text(cv, cfg.rule));
    log << "lambda_min = " << format_double(cv.lambda_min) << ", lambda_1se = " << format_double(cv.lambda_1se) << '\n';
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto fs = load_features(cfg, cfg.variant, log);
    const auto split = split_rows(cfg, fs.rows, false);
    const auto design = prepare_design(cfg, split.train, fs.schema, cfg.polynomial);
    print_notes(design, log);
    const auto outcome = train_model(cfg, design, cfg.method, cfg.lambda);
    if (outcome.cv) {
        write_file_atomic(out_path(cfg, "cv_table.csv"), cv_table_text(*outcome.cv));
        write_file_atomic(out_path(cfg, "cv_selection.txt"), cv_selection_text(*outcome.cv, cfg.rule));
    }
    print_fit_warnings(outcome.fit, log);
    save_model(out_path(cfg, "model.json"), outcome.model);
    write_file_atomic(out_path(cfg, "effective_config.txt"), config_to_text(cfg));
    log << method_name(cfg.method) << " model: lambda = " << format_double(outcome.fit.lambda) << ", "
        << outcome.model.terms.size() << "/" << outcome.model.candidates << " nonzero weights\n";
}

void cmd_predict(const RunConfig& cfg, const fs::path& model_path, std::ostream& log) {
    cfg.validate();
    const auto model = load_model(model_path);
    const auto fs = load_features(cfg, model.variant, log);
    const bool has_test = cfg.test_start || cfg.test_end;
    std::vector<DailyFeatureRow> rows;
    if (has_test) rows = split_rows(cfg, fs.rows, true).test;
    else rows = fs.rows;
    if (rows.empty()) throw ConfigError("no rows to predict");
    const auto pred = predict(model, rows);
    write_file_atomic(out_path(cfg, "predictions.csv"), predictions_text(rows, pred));
    log << "predicted " << rows.size() << " days\n";
}

void cmd_evaluate(const RunConfig& cfg, const fs::path& predictions_path, std::ostream& log) {
    cfg.validate();
    const auto text = read_file(predictions_path);
    std::vector<Date> dates;
    std::vector<double> obs, pred;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || trim(line).empty()) continue;
        const auto f = split_fields(line, ',');
        if (f.size() < 3) throw ParseError("predictions line " + std::to_string(line_no) + ": too few fields");
        const auto d = Date::parse(trim(f[0]));
        const auto o = parse_double(f[1]);
        const auto p = parse_double(f[2]);
        if (!d || !o || !p) throw ParseError("predictions line " + std::to_string(line_no) + ": malformed");
        dates.push_back(*d);
        obs.push_back(*o);
        pred.push_back(*p);
    }
    if (dates.empty()) throw ParseError("predictions file has no rows");
    const auto m = evaluate(dates, pred, obs);
    write_file_atomic(out_path(cfg, "metrics.csv"), metrics_table(m));
    std::string scatter = "trimester,date,observed,predicted\n";
    const auto groups = trimester_split(dates);
    for (std::size_t t = 0; t < 4; ++t)
        for (auto i : groups[t])
            scatter += "T" + std::to_string(t + 1) + "," + dates[i].iso() + "," + format_double(obs[i]) + "," +
                       format_double(pred[i]) + "\n";
    write_file_atomic(out_path(cfg, "scatter.csv"), scatter);
    log << "rmse = " << format_double(m.rmse) << " ppb, mae = " << format_double(m.mae) << " ppb over " << m.n
        << " days\n";
}

void cmd_report(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto fs = load_features(cfg, cfg.variant, log);
    const auto split = split_rows(cfg, fs.rows, true);
    const auto& test = split.test;

    std::vector<ComparisonEntry> entries;
    std::vector<std::pair<std::string, std::vector<double>>> series;
    std::string top = "method,rank,weight,name\n";
    auto add_top = [&](const std::string& method, const TrainingDesign& d, const ModelFit& fit) {
        const auto tw = top_weights(fit.beta, [&](std::size_t j) { return d.feature_name(j); }, 10);
        for (std::size_t r = 0; r < tw.size(); ++r)
            top += method + "," + std::to_string(r + 1) + "," + format_double(tw[r].weight) + "," + tw[r].name + "\n";
    };

    const auto linear = prepare_design(cfg, split.train, fs.schema, false);
    print_notes(linear, log);

    {
        const auto out = train_model(cfg, linear, Method::Lasso, cfg.lambda);
        print_fit_warnings(out.fit, log);
        const auto pred = predict(out.model, test);
        auto e = make_entry("lasso-linear", test, pred);
        e.active = out.fit.nonzero_count();
        e.candidates = linear.candidates();
        e.note = "lambda=" + format_double(out.fit.lambda);
        entries.push_back(std::move(e));
        series.emplace_back("lasso_linear", pred);
        write_file_atomic(out_path(cfg, "weights_lasso_linear.csv"),
                          weights_text(out.fit.beta, [&](std::size_t j) { return linear.feature_name(j); }, false));
        add_top("lasso-linear", linear, out.fit);
    }
    if (cfg.report_polynomial) {
        const auto poly = prepare_design(cfg, split.train, fs.schema, true);
        print_notes(poly, log);
        const auto out = train_model(cfg, poly, Method::Lasso, std::nullopt);
        print_fit_warnings(out.fit, log);
        const auto pred = predict(out.model, test);
        auto e = make_entry("lasso-polynomial", test, pred);
        e.active = out.fit.nonzero_count();
        e.candidates = poly.candidates();
        e.note = "lambda=" + format_double(out.fit.lambda);
        entries.push_back(std::move(e));
        series.emplace_back("lasso_polynomial", pred);
        write_file_atomic(out_path(cfg, "weights_lasso_polynomial.csv"),
                          weights_text(out.fit.beta, [&](std::size_t j) { return poly.feature_name(j); }, true));
        add_top("lasso-polynomial", poly, out.fit);
    }
    {
        const auto out = train_model(cfg, linear, Method::Ridge, cfg.ridge_lambda);
        print_fit_warnings(out.fit, log);
        const auto pred = predict(out.model, test);
        auto e = make_entry("ridge", test, pred);
        e.active = out.fit.nonzero_count();
        e.candidates = linear.candidates();
        e.note = "lambda=" + format_double(out.fit.lambda);
        entries.push_back(std::move(e));
        series.emplace_back("ridge", pred);
        write_file_atomic(out_path(cfg, "weights_ridge.csv"),
                          weights_text(out.fit.beta, [&](std::size_t j) { return linear.feature_name(j); }, false));
    }
    try {
        const auto out = train_model(cfg, linear, Method::Ols, std::nullopt);
        print_fit_warnings(out.fit, log);
        const auto pred = predict(out.model, test);
        auto e = make_entry("mlr", test, pred);
        e.active = out.fit.nonzero_count();
        e.candidates = linear.candidates();
        entries.push_back(std::move(e));
        series.emplace_back("mlr", pred);
    } catch (const SingularMatrixError& err) {
        log << "warning: mlr: " << err.what() << '\n';
        auto e = make_entry("mlr", test, {});
        e.candidates = linear.candidates();
        e.active = linear.candidates();
        e.note = "singular normal matrix at pivot " + std::to_string(err.pivot());
        entries.push_back(std::move(e));
        series.emplace_back("mlr", std::vector<double>(test.size(), std::nan("")));
    }
    {
        std::vector<double> pred;
        for (const auto& r : test) pred.push_back(r.current_anchor);
        auto e = make_entry("persistence", test, pred);
        e.metrics = persistence_baseline(test);
        entries.push_back(std::move(e));
        series.emplace_back("persistence", pred);
    }

    const auto table = comparison_table(entries);
    write_file_atomic(out_path(cfg, "comparison.csv"), table);
    write_file_atomic(out_path(cfg, "top_weights.csv"), top);

    std::string s = "date,observed";
    for (const auto& [name, v] : series) s += "," + name;
    s += "\n";
    for (std::size_t i = 0; i < test.size(); ++i) {
        s += test[i].date.iso() + "," + format_double(test[i].target_raw);
        for (const auto& [name, v] : series) s += "," + format_double(v[i]);
        s += "\n";
    }
    write_file_atomic(out_path(cfg, "series.csv"), s);
    log << table;
}

void cmd_synth(const SynthConfig& synth, const fs::path& out_dir, std::ostream& log) {
    const auto data = make_synthetic(synth);
    write_file_atomic(out_dir / "pollutant.csv", hourly_records_text(data.records, kPollutants));
    write_file_atomic(out_dir / "meteorology.csv", hourly_records_text(data.records, kMeteo));
    write_file_atomic(out_dir / "truth.json", synth_truth_json(data));
    log << "wrote " << synth.n_days << " synthetic days to " << out_dir.string() << " (noise sd "
        << format_double(data.noise_sd) << " ppb)\n";
}

}  // namespace ozlasso
