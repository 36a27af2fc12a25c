#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ozlasso/date.hpp"

namespace ozlasso {

// The 14 hourly channels, in canonical column order: 7 pollutants then
// 7 meteorological variables.
enum class Variable : int {
    O3 = 0,
    SO2,
    NO,
    NO2,
    NOX,
    CO,
    PM25,
    Temperature,
    DewPoint,
    RelHumidity,
    WindDirection,
    WindSpeed,
    Visibility,
    Pressure,
};

inline constexpr std::size_t kNumVariables = 14;
inline constexpr std::size_t kNumPollutants = 7;
inline constexpr std::size_t kNumMeteo = 7;
inline constexpr int kHoursPerDay = 24;

constexpr std::size_t index_of(Variable v) { return static_cast<std::size_t>(v); }
constexpr Variable variable_at(std::size_t i) { return static_cast<Variable>(i); }

// Canonical column name ("o3", "dew_point", ...).
std::string_view variable_name(Variable v);
std::optional<Variable> variable_from_name(std::string_view name);

inline constexpr std::array<Variable, kNumPollutants> kPollutants = {
    Variable::O3, Variable::SO2, Variable::NO, Variable::NO2,
    Variable::NOX, Variable::CO, Variable::PM25};
inline constexpr std::array<Variable, kNumMeteo> kMeteo = {
    Variable::Temperature, Variable::DewPoint, Variable::RelHumidity, Variable::WindDirection,
    Variable::WindSpeed, Variable::Visibility, Variable::Pressure};

// One station-hour. Hour-beginning local standard time: hour k covers
// [k:00, k+1:00).
struct HourlyRecord {
    Date date;
    int hour = 0;
    std::array<std::optional<double>, kNumVariables> values{};

    std::optional<double>& operator[](Variable v) { return values[index_of(v)]; }
    const std::optional<double>& operator[](Variable v) const { return values[index_of(v)]; }
};

// Column mapping and token rules for one delimited hourly file.
struct IngestSchema {
    char delimiter = ',';
    std::string date_column = "date";
    // Empty: the date column carries "YYYY-MM-DD HH[:MM]" or "YYYY-MM-DDTHH[:MM]".
    std::string hour_column = "hour";
    // Variable -> header name. A file may map any subset of the 14 channels.
    std::map<Variable, std::string> columns;
    // Cell values (after trimming) that mean "missing".
    std::vector<std::string> missing_tokens = {""};

    // All 14 channels under their canonical names.
    static IngestSchema canonical();
    static IngestSchema pollutants_only();
    static IngestSchema meteorology_only();
};

struct RowIssue {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string message;
};

struct ParseResult {
    std::vector<HourlyRecord> records;
    std::vector<RowIssue> rejected;   // unparseable timestamps, short rows
    std::size_t rows_read = 0;
    std::size_t cells_missing = 0;    // sentinel or unparseable numeric cells
};

// Throws IoError (missing file), ParseError (empty input, malformed header,
// duplicate (date, hour)).
ParseResult parse_hourly_file(const std::filesystem::path& path, const IngestSchema& schema);
ParseResult parse_hourly_text(std::string_view text, const IngestSchema& schema,
                              std::string_view source = "<input>");

// Aligns two record streams on (date, hour). Channels present in `primary`
// take precedence; the union of timestamps is kept. Output is sorted.
std::vector<HourlyRecord> merge_records(std::span<const HourlyRecord> primary,
                                        std::span<const HourlyRecord> secondary);

struct DayBlock {
    Date date;
    std::array<HourlyRecord, kHoursPerDay> hours{};
    // True when all 24 hours of the channel are usable after gap filling.
    std::array<bool, kNumVariables> complete{};
    // Cells filled by interpolation, per channel.
    std::array<int, kNumVariables> filled{};

    bool is_complete(Variable v) const { return complete[index_of(v)]; }
    // Value of a channel at an hour; only meaningful when is_complete(v).
    double value(Variable v, int hour) const { return *hours[static_cast<std::size_t>(hour)][v]; }
};

inline constexpr int kDefaultMaxGapHours = 3;

// Groups records by date and fills interior gaps of at most `max_gap_hours`
// consecutive missing hours by linear interpolation between the nearest
// present neighbours (wind direction along the shorter arc). Longer gaps and
// gaps touching hour 0 or hour 23 leave the channel incomplete for the day.
std::vector<DayBlock> assemble_days(std::span<const HourlyRecord> records,
                                    int max_gap_hours = kDefaultMaxGapHours);

// Canonical hourly text: date,hour,<14 channels>, empty cell for missing.
std::string canonical_hourly_text(std::span<const DayBlock> days, char delimiter = ',');

// Writes records restricted to `variables` (header uses canonical names).
std::string hourly_records_text(std::span<const HourlyRecord> records,
                                std::span<const Variable> variables, char delimiter = ',');

double normalize_degrees(double deg);

}  // namespace ozlasso
