#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ozlasso/features.hpp"
#include "ozlasso/ingest.hpp"

namespace fixtures {

inline Eigen::MatrixXd random_matrix(int n, int p, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd X(n, p);
    for (int j = 0; j < p; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = N(eng);
    return X;
}

inline Eigen::VectorXd random_vector(int n, std::uint64_t seed) {
    return random_matrix(n, 1, seed).col(0);
}

// Columns centred and scaled to unit population variance.
inline Eigen::MatrixXd standardized(Eigen::MatrixXd X) {
    const double n = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        X.col(j).array() -= X.col(j).mean();
        X.col(j) /= std::sqrt(X.col(j).squaredNorm() / n);
    }
    return X;
}

inline Eigen::VectorXd centered(Eigen::VectorXd y) {
    y.array() -= y.mean();
    return y;
}

using HourFn = std::function<double(ozlasso::Variable, int hour)>;

// A complete day whose every cell comes from `fn`.
inline ozlasso::DayBlock make_day(const ozlasso::Date& date, const HourFn& fn) {
    ozlasso::DayBlock day;
    day.date = date;
    for (int h = 0; h < ozlasso::kHoursPerDay; ++h) {
        auto& rec = day.hours[static_cast<std::size_t>(h)];
        rec.date = date;
        rec.hour = h;
        for (std::size_t v = 0; v < ozlasso::kNumVariables; ++v)
            rec.values[v] = fn(ozlasso::variable_at(v), h);
    }
    day.complete.fill(true);
    day.filled.fill(0);
    return day;
}

// Smooth pseudo-random but deterministic cell values.
inline double wavy(ozlasso::Variable v, int h, int day_offset) {
    const double k = static_cast<double>(ozlasso::index_of(v)) + 1.0;
    const double x = std::sin(0.37 * k * (h + 1) + 1.3 * day_offset) + 0.5 * std::cos(0.11 * k * h * (day_offset + 2));
    if (v == ozlasso::Variable::WindDirection) return 180.0 + 170.0 * x / 1.5;
    if (v == ozlasso::Variable::RelHumidity) return 50.0 + 30.0 * x / 1.5;
    return 20.0 + 10.0 * x;
}

inline std::vector<ozlasso::DayBlock> wavy_days(const ozlasso::Date& start, int n) {
    std::vector<ozlasso::DayBlock> days;
    for (int d = 0; d < n; ++d)
        days.push_back(make_day(start.plus_days(d), [d](ozlasso::Variable v, int h) { return wavy(v, h, d); }));
    return days;
}

inline std::string csv_header_all() {
    std::string h = "date,hour";
    for (std::size_t v = 0; v < ozlasso::kNumVariables; ++v)
        h += "," + std::string(ozlasso::variable_name(ozlasso::variable_at(v)));
    return h + "\n";
}

}  // namespace fixtures
