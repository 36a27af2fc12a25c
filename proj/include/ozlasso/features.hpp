#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ozlasso/date.hpp"
#include "ozlasso/ingest.hpp"

namespace ozlasso {

enum class FeatureCategory {
    PollutantHourly,
    PollutantAggregate,
    MeteoHourly,
    MeteoAggregate,
    MeteoDiff,
    EighthHourMean,
    Square,
    Interaction,
};

std::string_view category_name(FeatureCategory c);

struct FeatureDescriptor {
    std::size_t index = 0;
    std::string name;
    FeatureCategory category = FeatureCategory::PollutantHourly;
    // Base features list themselves; squares list the same base index twice;
    // interactions list two distinct base indices in ascending order.
    std::vector<std::size_t> parents;
};

// Which next-day statistic is forecast.
enum class Variant { Max, Max8h };
// Whether the model learns the next-day statistic or its change from today.
enum class TargetMode { Delta, Direct };

std::string_view variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view s);
std::string_view target_mode_name(TargetMode m);
std::optional<TargetMode> target_mode_from_name(std::string_view s);

// Derived meteorological channels: the 7 observed variables with wind
// direction additionally expressed as its cosine and sine.
enum class MeteoChannel {
    Temperature,
    DewPoint,
    RelHumidity,
    WindDirDeg,
    WindDirCos,
    WindDirSin,
    WindSpeed,
    Visibility,
    Pressure,
};

inline constexpr std::size_t kNumMeteoChannels = 9;
inline constexpr std::size_t kAggregateKinds = 3;                               // max, min, mean
inline constexpr std::size_t kBlockWidth = kHoursPerDay + kAggregateKinds;     // 27
inline constexpr std::size_t kEightHourWindows = 17;                           // starts 0:00..16:00
inline constexpr std::size_t kEightHourWidth = 8;

inline constexpr std::size_t kPollutantFeatures = kNumPollutants * kHoursPerDay + kNumPollutants * kAggregateKinds;
inline constexpr std::size_t kMeteoFeatures = kNumMeteoChannels * kBlockWidth * 3;
inline constexpr std::size_t kEightHourFeatures = kEightHourWindows + kAggregateKinds;

constexpr std::size_t base_feature_count(Variant v) {
    return kPollutantFeatures + kMeteoFeatures + (v == Variant::Max8h ? kEightHourFeatures : 0);
}

std::string_view channel_name(MeteoChannel c);

struct DailyAggregates {
    double max = 0.0;
    double min = 0.0;
    double mean = 0.0;
};

// max/min and the left-to-right sum divided by the count.
DailyAggregates aggregate(std::span<const double> values);

struct EightHourMeans {
    // means[h] averages hours h..h+7.
    std::array<double, kEightHourWindows> means{};
    DailyAggregates summary;
};

// Requires exactly 24 hourly values. Windows never extend past 23:00.
EightHourMeans compute_8h_means(std::span<const double> hours);
// Strict policy: nullopt when the day's O3 channel is incomplete.
std::optional<EightHourMeans> compute_8h_means(const DayBlock& day);

struct DailyFeatureRow {
    Date date;
    std::vector<double> x;
    // Next-day maximum (or maximum 8-hour mean) O3, ppb.
    double target_raw = 0.0;
    // Same statistic on the current day.
    double current_anchor = 0.0;
};

struct DroppedDay {
    Date date;
    std::string reason;
};

struct FeatureSet {
    std::vector<DailyFeatureRow> rows;
    std::vector<FeatureDescriptor> schema;
    std::vector<DroppedDay> dropped;
};

// Canonical base ordering: pollutant hourly, pollutant aggregates, then per
// meteorological channel a current-day block, a next-day block and a
// next-minus-current block (24 hourly + max/min/mean each), then for Max8h
// the 17 current-day 8-hour means and their max/min/mean.
std::vector<FeatureDescriptor> base_schema(Variant variant);

// One row per day d whose successor d+1 is present, with every required
// channel complete: all 14 on day d, O3 and the 7 meteorological channels on
// d+1. When `forecast_days` is non-empty the next-day meteorology is read from
// it (keyed by date) instead of from the observations.
FeatureSet build_base_features(std::span<const DayBlock> days, Variant variant,
                               std::span<const DayBlock> forecast_days = {});

// Delta: target_raw - current_anchor. Direct: target_raw.
double delta_target(const DailyFeatureRow& row, TargetMode mode);
// Inverse of delta_target for a model output.
double reanchor(double model_output, const DailyFeatureRow& row, TargetMode mode);

}  // namespace ozlasso
