#include "ozlasso/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "ozlasso/error.hpp"
#include "ozlasso/features.hpp"

namespace ozlasso {

namespace {

// Engine output mapped by hand so that a seed reproduces the same files with
// any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform_open() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct Candidate {
    const char* name;
    double weight;
};

// Planting order; the O3 term must stay first.
constexpr Candidate kCandidates[] = {
    {"cur_o3_max", -0.5},          {"next_temperature_max", 0.8}, {"next_rel_humidity_min", -0.3},
    {"cur_no2_h23", 0.4},          {"next_wind_speed_mean", -0.8}, {"diff_pressure_mean", -6.0},
    {"cur_co_mean", 0.02},         {"next_wind_dir_cos_h12", 3.0},
};
constexpr int kMaxSparsity = static_cast<int>(std::size(kCandidates));
constexpr double kO3Level = 50.0;

double diurnal(int h, double peak_hour) { return std::sin(2.0 * std::numbers::pi * (h - peak_hour + 6.0) / 24.0); }

// Day-level and hourly disturbances are of similar size so that hourly columns
// of one channel are correlated but far from collinear.
void fill_background(std::vector<DayBlock>& days, Rng& rng, const Date& start) {
    double temp_anom = 0.0;
    double press_anom = 0.0;
    for (std::size_t d = 0; d < days.size(); ++d) {
        auto& day = days[d];
        day.date = start.plus_days(static_cast<long>(d));
        const double doy = static_cast<double>(day.date.serial() - Date(day.date.year(), 1, 1).serial());
        const double season = -std::cos(2.0 * std::numbers::pi * doy / 365.25);
        temp_anom = 0.5 * temp_anom + 2.0 * rng.normal();
        press_anom = 0.5 * press_anom + 0.4 * rng.normal();
        const double dew_day = rng.normal();
        const double humid_day = rng.normal();
        const double wind_base = 360.0 * rng.uniform();
        const double wind_day = rng.normal();
        const double vis_day = rng.normal();
        const double so2_day = rng.normal(), no_day = rng.normal(), no2_day = rng.normal();
        const double co_day = rng.normal(), pm_day = rng.normal();
        for (int h = 0; h < kHoursPerDay; ++h) {
            auto& rec = day.hours[static_cast<std::size_t>(h)];
            rec.date = day.date;
            rec.hour = h;
            const double t = 12.0 + 4.0 * season + temp_anom + 3.0 * diurnal(h, 15.0) + 2.0 * rng.normal();
            rec[Variable::Temperature] = t;
            rec[Variable::DewPoint] = 4.0 + 2.0 * season + 1.5 * dew_day + 2.0 * rng.normal();
            rec[Variable::RelHumidity] =
                std::clamp(65.0 + 6.0 * humid_day - 8.0 * diurnal(h, 15.0) + 6.0 * rng.normal(), 5.0, 100.0);
            rec[Variable::WindDirection] = normalize_degrees(wind_base + 60.0 * rng.normal());
            rec[Variable::WindSpeed] = std::abs(12.0 + 3.0 * wind_day + 2.0 * diurnal(h, 14.0) + 3.0 * rng.normal());
            rec[Variable::Visibility] = std::clamp(15.0 + 3.0 * vis_day + 3.0 * rng.normal(), 0.5, 40.0);
            rec[Variable::Pressure] = 101.3 + press_anom + 0.4 * rng.normal();
            const double rush = 1.0 + 1.5 * std::exp(-((h - 8.0) / 2.0) * ((h - 8.0) / 2.0));
            rec[Variable::SO2] = std::exp(std::log(2.0) + 0.3 * so2_day + 0.4 * rng.normal());
            const double no = rush * std::exp(std::log(5.0) + 0.3 * no_day + 0.4 * rng.normal());
            const double no2 = std::abs(12.0 + 3.0 * no2_day + 3.0 * diurnal(h, 20.0) + 3.0 * rng.normal());
            rec[Variable::NO] = no;
            rec[Variable::NO2] = no2;
            rec[Variable::NOX] = no + no2 + 2.0 * std::abs(rng.normal());
            rec[Variable::CO] = std::exp(std::log(250.0) + 0.2 * co_day + 0.3 * rng.normal());
            rec[Variable::PM25] = std::exp(std::log(8.0) + 0.3 * pm_day + 0.4 * rng.normal());
            rec[Variable::O3] = 0.0;
        }
        day.complete.fill(true);
        day.filled.fill(0);
    }
}

// Peak exactly `max_value` at a random afternoon hour, strictly lower elsewhere.
void write_o3_profile(DayBlock& day, double max_value, Rng& rng) {
    const int peak = 12 + static_cast<int>(rng.uniform() * 5.0);
    const double depth = 20.0 + 5.0 * rng.uniform();
    for (int h = 0; h < kHoursPerDay; ++h) {
        const double dh = (h - peak) / 4.0;
        const double shape = h == peak ? 0.0 : 1.0 - std::exp(-dh * dh) + 0.25 * rng.uniform_open();
        day.hours[static_cast<std::size_t>(h)][Variable::O3] = max_value - depth * shape;
    }
}

std::vector<double> row_features(std::span<const DayBlock> pair) {
    auto fs = build_base_features(pair, Variant::Max);
    if (fs.rows.size() != 1) throw Error("synthetic generator: could not build a feature row");
    return std::move(fs.rows.front().x);
}

}  // namespace

SynthData make_synthetic(const SynthConfig& config) {
    if (config.n_days < 10) throw ConfigError("synthetic data needs n_days >= 10");
    if (config.sparsity < 1 || config.sparsity > kMaxSparsity)
        throw ConfigError("synthetic sparsity must lie in [1, " + std::to_string(kMaxSparsity) + "]");
    if (!(config.snr > 0.0)) throw ConfigError("synthetic snr must be > 0");

    SynthData out;
    out.config = config;
    const auto schema = base_schema(Variant::Max);
    for (int i = 0; i < config.sparsity; ++i) {
        const auto it = std::find_if(schema.begin(), schema.end(),
                                     [&](const FeatureDescriptor& d) { return d.name == kCandidates[i].name; });
        out.support.push_back({it->index, it->name, kCandidates[i].weight});
    }

    Rng rng(config.seed);
    std::vector<DayBlock> days(static_cast<std::size_t>(config.n_days));
    fill_background(days, rng, config.start);

    // Exogenous part of the planted signal (everything but the O3 term) does
    // not depend on O3, so its moments can be measured up front.
    std::vector<double> exog(days.size() - 1, 0.0);
    for (std::size_t d = 0; d + 1 < days.size(); ++d) {
        const auto x = row_features(std::span<const DayBlock>(days).subspan(d, 2));
        for (std::size_t k = 1; k < out.support.size(); ++k) exog[d] += out.support[k].weight * x[out.support[k].index];
    }
    double mean = 0.0;
    for (double v : exog) mean += v;
    mean /= static_cast<double>(exog.size());
    double var = 0.0;
    for (double v : exog) var += (v - mean) * (v - mean);
    var /= static_cast<double>(exog.size());
    out.noise_sd = std::isinf(config.snr) ? 0.0 : std::sqrt(var / config.snr);
    out.intercept = -out.support[0].weight * kO3Level - mean;

    double level = kO3Level;
    for (std::size_t d = 0; d < days.size(); ++d) {
        write_o3_profile(days[d], level, rng);
        if (d + 1 == days.size()) break;
        const auto x = row_features(std::span<const DayBlock>(days).subspan(d, 2));
        double change = out.intercept;
        for (const auto& t : out.support) change += t.weight * x[t.index];
        const double eps = rng.normal();
        change += out.noise_sd * eps;
        level = level + change;
    }

    for (const auto& day : days)
        for (const auto& rec : day.hours) out.records.push_back(rec);
    return out;
}

std::string synth_truth_json(const SynthData& data) {
    nlohmann::ordered_json j;
    j["format"] = "ozlasso-synthetic-truth";
    j["seed"] = data.config.seed;
    j["n_days"] = data.config.n_days;
    j["start"] = data.config.start.iso();
    j["snr"] = std::isinf(data.config.snr) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(data.config.snr);
    j["variant"] = "max";
    j["target_mode"] = "delta";
    j["noise_sd"] = data.noise_sd;
    j["intercept"] = data.intercept;
    auto support = nlohmann::ordered_json::array();
    for (const auto& t : data.support) support.push_back({{"index", t.index}, {"name", t.name}, {"weight", t.weight}});
    j["support"] = std::move(support);
    return j.dump(1) + "\n";
}

}  // namespace ozlasso
