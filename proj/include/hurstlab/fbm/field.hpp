#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hurstlab/core/errors.hpp"
#include "hurstlab/fbm/covariance.hpp"

namespace hurstlab::fbm {

// One realization of the field on a (time x Hurst x component) grid.
struct FbmField {
    std::vector<double> t_grid;  // ascending
    std::vector<double> h_grid;  // ascending
    int dim = 1;
    Normalization mode = Normalization::unit_variance;
    std::uint64_t seed = 0;
    std::string sampler_id;
    std::vector<double> values;  // layout (t, h, component)

    std::size_t index(std::size_t it, std::size_t ih, int ic) const {
        return (it * h_grid.size() + ih) * static_cast<std::size_t>(dim) +
               static_cast<std::size_t>(ic);
    }
    double at(std::size_t it, std::size_t ih, int ic = 0) const { return values[index(it, ih, ic)]; }
    double& at(std::size_t it, std::size_t ih, int ic = 0) { return values[index(it, ih, ic)]; }

    std::size_t find_h(double H) const {
        for (std::size_t i = 0; i < h_grid.size(); ++i)
            if (h_grid[i] == H) return i;
        throw validation_error("FbmField: Hurst value not on the grid");
    }
};

inline std::vector<double> uniform_grid(double start, double step, std::size_t count) {
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = start + static_cast<double>(i) * step;
    return g;
}

}  // namespace hurstlab::fbm
