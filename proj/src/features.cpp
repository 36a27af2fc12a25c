#include "ozlasso/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "ozlasso/error.hpp"

namespace ozlasso {

namespace {

constexpr std::array<std::string_view, kNumMeteoChannels> kChannelNames = {
    "temperature", "dew_point", "rel_humidity", "wind_dir_deg", "wind_dir_cos",
    "wind_dir_sin", "wind_speed", "visibility", "pressure"};

constexpr std::array<std::string_view, kAggregateKinds> kAggNames = {"max", "min", "mean"};

constexpr std::array<std::string_view, 3> kBlockPrefixes = {"cur", "next", "diff"};

std::string hour_tag(std::size_t h) {
    return (h < 10 ? "h0" : "h") + std::to_string(h);
}

Variable source_variable(MeteoChannel c) {
    switch (c) {
        case MeteoChannel::Temperature: return Variable::Temperature;
        case MeteoChannel::DewPoint: return Variable::DewPoint;
        case MeteoChannel::RelHumidity: return Variable::RelHumidity;
        case MeteoChannel::WindDirDeg:
        case MeteoChannel::WindDirCos:
        case MeteoChannel::WindDirSin: return Variable::WindDirection;
        case MeteoChannel::WindSpeed: return Variable::WindSpeed;
        case MeteoChannel::Visibility: return Variable::Visibility;
        case MeteoChannel::Pressure: return Variable::Pressure;
    }
    return Variable::Temperature;
}

std::array<double, kHoursPerDay> channel_hours(const DayBlock& day, MeteoChannel c) {
    std::array<double, kHoursPerDay> out{};
    const auto var = source_variable(c);
    for (int h = 0; h < kHoursPerDay; ++h) {
        const double v = day.value(var, h);
        switch (c) {
            case MeteoChannel::WindDirCos: out[static_cast<std::size_t>(h)] = std::cos(v * std::numbers::pi / 180.0); break;
            case MeteoChannel::WindDirSin: out[static_cast<std::size_t>(h)] = std::sin(v * std::numbers::pi / 180.0); break;
            default: out[static_cast<std::size_t>(h)] = v;
        }
    }
    return out;
}

std::array<double, kHoursPerDay> variable_hours(const DayBlock& day, Variable v) {
    std::array<double, kHoursPerDay> out{};
    for (int h = 0; h < kHoursPerDay; ++h) out[static_cast<std::size_t>(h)] = day.value(v, h);
    return out;
}

// 24 hourly values followed by max/min/mean.
std::array<double, kBlockWidth> block_of(const std::array<double, kHoursPerDay>& hours) {
    std::array<double, kBlockWidth> out{};
    std::copy(hours.begin(), hours.end(), out.begin());
    const auto agg = aggregate(hours);
    out[kHoursPerDay] = agg.max;
    out[kHoursPerDay + 1] = agg.min;
    out[kHoursPerDay + 2] = agg.mean;
    return out;
}

}  // namespace

std::string_view category_name(FeatureCategory c) {
    switch (c) {
        case FeatureCategory::PollutantHourly: return "pollutant-hourly";
        case FeatureCategory::PollutantAggregate: return "pollutant-aggregate";
        case FeatureCategory::MeteoHourly: return "meteo-hourly";
        case FeatureCategory::MeteoAggregate: return "meteo-aggregate";
        case FeatureCategory::MeteoDiff: return "meteo-diff";
        case FeatureCategory::EighthHourMean: return "eighth-hour-mean";
        case FeatureCategory::Square: return "square";
        case FeatureCategory::Interaction: return "interaction";
    }
    return "unknown";
}

std::string_view variant_name(Variant v) { return v == Variant::Max ? "max" : "max8h"; }

std::optional<Variant> variant_from_name(std::string_view s) {
    if (s == "max") return Variant::Max;
    if (s == "max8h") return Variant::Max8h;
    return std::nullopt;
}

std::string_view target_mode_name(TargetMode m) { return m == TargetMode::Delta ? "delta" : "direct"; }

std::optional<TargetMode> target_mode_from_name(std::string_view s) {
    if (s == "delta") return TargetMode::Delta;
    if (s == "direct") return TargetMode::Direct;
    return std::nullopt;
}

std::string_view channel_name(MeteoChannel c) { return kChannelNames[static_cast<std::size_t>(c)]; }

DailyAggregates aggregate(std::span<const double> values) {
    if (values.empty()) throw Error("aggregate: empty input");
    DailyAggregates a{values[0], values[0], 0.0};
    double sum = 0.0;
    for (double v : values) {
        a.max = std::max(a.max, v);
        a.min = std::min(a.min, v);
        sum += v;
    }
    a.mean = sum / static_cast<double>(values.size());
    return a;
}

EightHourMeans compute_8h_means(std::span<const double> hours) {
    if (hours.size() != static_cast<std::size_t>(kHoursPerDay))
        throw Error("compute_8h_means: expected 24 hourly values, got " + std::to_string(hours.size()));
    EightHourMeans out;
    for (std::size_t start = 0; start < kEightHourWindows; ++start)
        out.means[start] = aggregate(hours.subspan(start, kEightHourWidth)).mean;
    out.summary = aggregate(out.means);
    return out;
}

std::optional<EightHourMeans> compute_8h_means(const DayBlock& day) {
    if (!day.is_complete(Variable::O3)) return std::nullopt;
    const auto o3 = variable_hours(day, Variable::O3);
    return compute_8h_means(o3);
}

std::vector<FeatureDescriptor> base_schema(Variant variant) {
    std::vector<FeatureDescriptor> out;
    out.reserve(base_feature_count(variant));
    auto add = [&](std::string name, FeatureCategory cat) {
        const auto idx = out.size();
        out.push_back({idx, std::move(name), cat, {idx}});
    };
    for (auto p : kPollutants)
        for (std::size_t h = 0; h < static_cast<std::size_t>(kHoursPerDay); ++h)
            add("cur_" + std::string(variable_name(p)) + "_" + hour_tag(h), FeatureCategory::PollutantHourly);
    for (auto p : kPollutants)
        for (auto agg : kAggNames)
            add("cur_" + std::string(variable_name(p)) + "_" + std::string(agg), FeatureCategory::PollutantAggregate);
    for (std::size_t c = 0; c < kNumMeteoChannels; ++c) {
        for (std::size_t b = 0; b < kBlockPrefixes.size(); ++b) {
            const std::string stem = std::string(kBlockPrefixes[b]) + "_" + std::string(kChannelNames[c]) + "_";
            for (std::size_t h = 0; h < static_cast<std::size_t>(kHoursPerDay); ++h)
                add(stem + hour_tag(h), b == 2 ? FeatureCategory::MeteoDiff : FeatureCategory::MeteoHourly);
            for (auto agg : kAggNames)
                add(stem + std::string(agg), b == 2 ? FeatureCategory::MeteoDiff : FeatureCategory::MeteoAggregate);
        }
    }
    if (variant == Variant::Max8h) {
        for (std::size_t h = 0; h < kEightHourWindows; ++h)
            add("cur_o3_8h_" + hour_tag(h), FeatureCategory::EighthHourMean);
        for (auto agg : kAggNames) add("cur_o3_8h_" + std::string(agg), FeatureCategory::EighthHourMean);
    }
    return out;
}

namespace {

std::optional<std::string> first_incomplete(const DayBlock& day, std::span<const Variable> vars) {
    for (auto v : vars)
        if (!day.is_complete(v)) return std::string(variable_name(v));
    return std::nullopt;
}

}  // namespace

FeatureSet build_base_features(std::span<const DayBlock> days, Variant variant,
                               std::span<const DayBlock> forecast_days) {
    FeatureSet out;
    out.schema = base_schema(variant);
    const auto width = out.schema.size();

    std::unordered_map<long, const DayBlock*> by_date;
    for (const auto& d : days) by_date[d.date.serial()] = &d;
    std::unordered_map<long, const DayBlock*> forecast_by_date;
    for (const auto& d : forecast_days) forecast_by_date[d.date.serial()] = &d;

    std::array<Variable, kNumVariables> all_vars{};
    for (std::size_t i = 0; i < kNumVariables; ++i) all_vars[i] = variable_at(i);

    for (const auto& today : days) {
        const auto next_it = by_date.find(today.date.next().serial());
        if (next_it == by_date.end()) {
            out.dropped.push_back({today.date, "no successor day"});
            continue;
        }
        const DayBlock& tomorrow = *next_it->second;
        const DayBlock* tomorrow_meteo = &tomorrow;
        if (!forecast_days.empty()) {
            const auto f = forecast_by_date.find(tomorrow.date.serial());
            if (f == forecast_by_date.end()) {
                out.dropped.push_back({today.date, "no forecast for next day"});
                continue;
            }
            tomorrow_meteo = f->second;
        }
        if (auto miss = first_incomplete(today, all_vars)) {
            out.dropped.push_back({today.date, "incomplete " + *miss + " on current day"});
            continue;
        }
        if (!tomorrow.is_complete(Variable::O3)) {
            out.dropped.push_back({today.date, "incomplete o3 on next day"});
            continue;
        }
        if (auto miss = first_incomplete(*tomorrow_meteo, kMeteo)) {
            out.dropped.push_back({today.date, "incomplete " + *miss + " on next day"});
            continue;
        }

        DailyFeatureRow row;
        row.date = today.date;
        row.x.reserve(width);
        std::array<std::array<double, kHoursPerDay>, kNumPollutants> pol{};
        for (std::size_t p = 0; p < kNumPollutants; ++p) {
            pol[p] = variable_hours(today, kPollutants[p]);
            row.x.insert(row.x.end(), pol[p].begin(), pol[p].end());
        }
        for (std::size_t p = 0; p < kNumPollutants; ++p) {
            const auto agg = aggregate(pol[p]);
            row.x.insert(row.x.end(), {agg.max, agg.min, agg.mean});
        }
        for (std::size_t c = 0; c < kNumMeteoChannels; ++c) {
            const auto ch = static_cast<MeteoChannel>(c);
            const auto cur = block_of(channel_hours(today, ch));
            const auto nxt = block_of(channel_hours(*tomorrow_meteo, ch));
            row.x.insert(row.x.end(), cur.begin(), cur.end());
            row.x.insert(row.x.end(), nxt.begin(), nxt.end());
            for (std::size_t k = 0; k < kBlockWidth; ++k) row.x.push_back(nxt[k] - cur[k]);
        }
        if (variant == Variant::Max) {
            row.current_anchor = aggregate(pol[0]).max;
            row.target_raw = aggregate(variable_hours(tomorrow, Variable::O3)).max;
        } else {
            const auto cur8 = *compute_8h_means(today);
            row.x.insert(row.x.end(), cur8.means.begin(), cur8.means.end());
            row.x.insert(row.x.end(), {cur8.summary.max, cur8.summary.min, cur8.summary.mean});
            row.current_anchor = cur8.summary.max;
            row.target_raw = compute_8h_means(tomorrow)->summary.max;
        }
        if (row.x.size() != width) throw Error("build_base_features: internal width mismatch");
        out.rows.push_back(std::move(row));
    }
    return out;
}

double delta_target(const DailyFeatureRow& row, TargetMode mode) {
    return mode == TargetMode::Delta ? row.target_raw - row.current_anchor : row.target_raw;
}

double reanchor(double model_output, const DailyFeatureRow& row, TargetMode mode) {
    return mode == TargetMode::Delta ? model_output + row.current_anchor : model_output;
}

}  // namespace ozlasso
