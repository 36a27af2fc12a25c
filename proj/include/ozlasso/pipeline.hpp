#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ozlasso/design.hpp"
#include "ozlasso/expansion.hpp"
#include "ozlasso/features.hpp"
#include "ozlasso/ingest.hpp"
#include "ozlasso/model_io.hpp"
#include "ozlasso/selection.hpp"
#include "ozlasso/solvers.hpp"
#include "ozlasso/standardize.hpp"
#include "ozlasso/synth.hpp"

namespace ozlasso {

// Everything a run depends on besides the input files. Read from a
// `key = value` text file; any key may be overridden from the command line.
struct RunConfig {
    std::string pollutant_file;
    std::string meteo_file;     // empty: the pollutant file carries all 14 channels
    std::string forecast_file;  // empty: observed next-day meteorology
    char delimiter = ',';
    std::vector<std::string> missing_tokens = {""};
    std::string date_column = "date";
    std::string hour_column = "hour";
    std::map<Variable, std::string> column_names;  // header overrides
    int max_gap_hours = kDefaultMaxGapHours;

    Variant variant = Variant::Max;
    TargetMode target_mode = TargetMode::Delta;
    bool polynomial = false;
    std::optional<Date> train_start, train_end, test_start, test_end;

    Method method = Method::Lasso;
    std::optional<double> lambda;        // nullopt: choose by cross-validation
    std::optional<double> ridge_lambda;  // report only; nullopt: cross-validation
    int cv_k = 5;
    int cv_points = kDefaultGridPoints;
    double cv_ratio = kDefaultGridRatio;
    std::optional<std::uint64_t> seed;
    FoldMode folds = FoldMode::Random;
    SelectionRule rule = SelectionRule::Min;

    double tol = 1e-7;
    int max_sweeps = 10000;
    SweepStrategy strategy = SweepStrategy::ActiveSet;

    std::string output_dir = "out";
    double memory_budget_mb = 2048.0;
    bool report_polynomial = true;

    bool operator==(const RunConfig&) const = default;

    LassoConfig lasso_config(double lambda_value = 0.0) const;
    // Throws ConfigError on overlapping or inverted date ranges.
    void validate() const;
};

// Throws ConfigError on unknown keys or malformed values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
RunConfig parse_config_text(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_text(const RunConfig& cfg);

struct IngestSummary {
    std::size_t rows_read = 0;
    std::vector<std::string> rejected;  // "source:line: message"
    std::size_t cells_missing = 0;
    std::size_t interpolated = 0;
    std::vector<std::pair<Date, std::string>> incomplete;  // date, channel list
};

struct LoadedData {
    std::vector<DayBlock> days;
    std::vector<DayBlock> forecast;
    IngestSummary summary;
};

LoadedData load_data(const RunConfig& cfg);
std::string ingest_report_text(const LoadedData& data);

struct RowSplit {
    std::vector<DailyFeatureRow> train;
    std::vector<DailyFeatureRow> test;
};

// Throws ConfigError when a configured range yields no rows.
RowSplit split_rows(const RunConfig& cfg, std::span<const DailyFeatureRow> rows, bool need_test);

// Standardized training design, optionally expanded.
struct TrainingDesign {
    StandardizationParams params;
    StandardizedData data;
    std::vector<FeatureDescriptor> raw_schema;
    std::vector<FeatureDescriptor> retained_schema;
    std::unique_ptr<ExpandedDesign> expanded;
    std::unique_ptr<DenseColumns> dense;
    std::vector<std::string> notes;

    TrainingDesign() = default;
    // `dense` views data.X, so moves re-point it at the new storage.
    TrainingDesign(TrainingDesign&& other);
    TrainingDesign& operator=(TrainingDesign&& other);

    const ColumnSource& design() const;
    std::size_t candidates() const { return design().cols(); }
    std::string feature_name(std::size_t j) const;
};

TrainingDesign prepare_design(const RunConfig& cfg, std::span<const DailyFeatureRow> train,
                              std::span<const FeatureDescriptor> raw_schema, bool polynomial);

// Random folds require cfg.seed. keep_fit retains the full-data lasso fit at
// the configured rule.
CvResult run_cv(const RunConfig& cfg, const TrainingDesign& design, CvSolver solver, bool keep_fit = false);
std::string cv_table_text(const CvResult& cv);

struct TrainOutcome {
    ModelFit fit;
    TrainedModel model;
    std::optional<CvResult> cv;
};

// lambda nullopt: cross-validate, then fit the full training rows along the
// grid (warm starts) down to the selected value.
TrainOutcome train_model(const RunConfig& cfg, const TrainingDesign& design, Method method,
                         std::optional<double> lambda);

// Subcommands. Each writes its artifacts under cfg.output_dir and logs
// progress and warnings to `log`.
void cmd_ingest(const RunConfig& cfg, std::ostream& log);
void cmd_featurize(const RunConfig& cfg, std::ostream& log);
void cmd_cv(const RunConfig& cfg, std::ostream& log);
void cmd_train(const RunConfig& cfg, std::ostream& log);
void cmd_predict(const RunConfig& cfg, const std::filesystem::path& model_path, std::ostream& log);
void cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& predictions_path, std::ostream& log);
void cmd_report(const RunConfig& cfg, std::ostream& log);
void cmd_synth(const SynthConfig& synth, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace ozlasso
