#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "hurstlab/core/errors.hpp"

namespace hurstlab::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw validation_error("mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw validation_error("variance: need at least 2 samples");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

// Standard error of the sample mean.
inline double standard_error(std::span<const double> x) {
    return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

inline double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw validation_error("quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw validation_error("quantile: q outside [0,1]");
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= x.size()) return x.back();
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * x[lo] + w * x[lo + 1];
}

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    std::vector<double> residuals;
};

inline OlsFit ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw validation_error("ols: need matched samples, n >= 2");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw validation_error("ols: regressor has zero variance");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.residuals.resize(x.size());
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += fit.residuals[i] * fit.residuals[i];
    }
    const double dof = static_cast<double>(x.size() >= 3 ? x.size() - 2 : 1);
    fit.slope_se = std::sqrt(sse / dof / sxx);
    return fit;
}

}  // namespace hurstlab::stats
