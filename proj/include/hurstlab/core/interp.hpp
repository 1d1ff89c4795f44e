#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hurstlab/core/errors.hpp"

namespace hurstlab::interp {

// Fritsch-Carlson monotone cubic (PCHIP). Shape-preserving, C^1; used for
// memoized covariance cross-sections.
class Pchip {
public:
    Pchip() = default;

    Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw validation_error("Pchip: need matched nodes, n >= 2");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw validation_error("Pchip: nodes must be ascending");
        slopes_.assign(n, 0.0);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        slopes_[0] = d[0];
        slopes_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                slopes_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
    }

    double operator()(double x) const {
        if (x_.empty()) throw validation_error("Pchip: empty interpolant");
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        i = std::min(i, x_.size() - 2);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        const double h10 = t * (1.0 - t) * (1.0 - t);
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return h00 * y_[i] + h * h10 * slopes_[i] + h01 * y_[i + 1] + h * h11 * slopes_[i + 1];
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

private:
    std::vector<double> x_, y_, slopes_;
};

}  // namespace hurstlab::interp
