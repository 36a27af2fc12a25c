#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ozlasso/expansion.hpp"
#include "ozlasso/features.hpp"
#include "ozlasso/solvers.hpp"
#include "ozlasso/standardize.hpp"

namespace ozlasso {

inline constexpr int kModelSchemaVersion = 1;

// Everything needed to turn raw feature rows into ppb predictions.
struct TrainedModel {
    Method method = Method::Lasso;
    double lambda = 0.0;
    Variant variant = Variant::Max;
    TargetMode target_mode = TargetMode::Delta;
    bool polynomial = false;

    struct Term {
        std::size_t index = 0;  // position in the (possibly expanded) retained design
        std::string name;
        double weight = 0.0;
        // Product terms only: base parents and the training mean/sd of the product.
        std::optional<std::pair<std::size_t, std::size_t>> parents;
        double expansion_mean = 0.0;
        double expansion_sd = 0.0;
    };

    double intercept = 0.0;
    std::size_t candidates = 0;
    std::vector<Term> terms;  // nonzero weights only
    StandardizationParams standardization;
    std::vector<std::string> raw_names;  // raw schema, for the dropped-column manifest

    // Solver diagnostics.
    bool converged = true;
    int sweeps = 0;
    double tol = 0.0;
    int max_sweeps = 0;
    SweepStrategy strategy = SweepStrategy::ActiveSet;
    std::optional<KktCertificate> kkt;
    double condition_estimate = 0.0;
    std::vector<std::string> warnings;
};

// `expanded` must be given for polynomial fits (beta indexes its columns).
TrainedModel make_trained_model(const ModelFit& fit, const StandardizationParams& params,
                                std::span<const FeatureDescriptor> raw_schema, Variant variant, TargetMode mode,
                                const ExpandedDesign* expanded, const LassoConfig* lasso_config);

// Hex FNV-1a digest of the standardization parameters' exact bit patterns.
std::string standardization_digest(const StandardizationParams& params);

std::string model_to_json(const TrainedModel& model);
// Throws SchemaError on an unknown format or unsupported schema version.
TrainedModel model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

// Standardize with the training params, apply the linear predictor,
// de-standardize and re-anchor. Throws SchemaError on a width mismatch.
std::vector<double> predict(const TrainedModel& model, std::span<const DailyFeatureRow> rows);

// Same path for an in-memory linear fit over the retained standardized columns.
std::vector<double> predict(const ModelFit& fit, const StandardizationParams& params,
                            std::span<const DailyFeatureRow> rows, TargetMode mode);

}  // namespace ozlasso
