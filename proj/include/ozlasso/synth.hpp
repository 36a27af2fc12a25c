#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ozlasso/date.hpp"
#include "ozlasso/ingest.hpp"

namespace ozlasso {

struct SynthConfig {
    int n_days = 60;
    std::uint64_t seed = 0;
    // Number of planted features (1..8); the first is always the current-day
    // maximum O3, which keeps the series mean-reverting.
    int sparsity = 5;
    // Variance ratio of the planted exogenous signal to the noise; infinity
    // means noiseless.
    double snr = 20.0;
    Date start{2014, 1, 1};
};

struct PlantedTerm {
    std::size_t index = 0;  // position in the base (max variant) schema
    std::string name;
    double weight = 0.0;    // raw units: ppb per feature unit
};

struct SynthData {
    std::vector<HourlyRecord> records;  // all 14 channels, no gaps
    std::vector<PlantedTerm> support;
    double intercept = 0.0;
    double noise_sd = 0.0;
    SynthConfig config;
};

// Hourly series with diurnal cycles and seasonal temperature, where the change
// of the next-day O3 maximum is an exact sparse linear function of the
// current day's base features plus seeded Gaussian noise.
SynthData make_synthetic(const SynthConfig& config);

// Ground-truth manifest (JSON).
std::string synth_truth_json(const SynthData& data);

}  // namespace ozlasso
