#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "hurstlab/core/errors.hpp"
#include "hurstlab/core/rng.hpp"

namespace hurstlab::fbm {

// Driving Wiener increments on a uniform cell grid [lower, lower + cells*dt),
// shared across every Hurst value drawn from it. Increments are a pure
// function of (seed, component, cell index); identical seeds give
// bit-identical draws.
class WhiteNoiseGrid {
public:
    WhiteNoiseGrid(double dt, double lower, double upper, int dim, std::uint64_t seed)
        : dt_(dt), lower_(lower), dim_(dim), seed_(seed) {
        if (!(dt > 0.0)) throw validation_error("WhiteNoiseGrid: dt must be > 0");
        if (!(lower <= 0.0)) throw validation_error("WhiteNoiseGrid: lower bound must be <= 0");
        if (!(upper >= 0.0)) throw validation_error("WhiteNoiseGrid: upper bound must be >= 0");
        if (dim < 1) throw validation_error("WhiteNoiseGrid: dim must be >= 1");
        cells_ = static_cast<std::size_t>(std::ceil((upper - lower) / dt - 1e-9));
        if (cells_ == 0) cells_ = 1;
        // cell boundaries must hit s = 0 exactly so kernels split cleanly
        const double ratio = -lower / dt;
        if (std::fabs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
            throw validation_error("WhiteNoiseGrid: lower bound must be an integer multiple of dt");
        negative_cells_ = static_cast<std::size_t>(std::llround(ratio));
    }

    double dt() const { return dt_; }
    double lower() const { return lower_; }
    double upper() const { return lower_ + static_cast<double>(cells_) * dt_; }
    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t cells() const { return cells_; }
    std::size_t negative_cells() const { return negative_cells_; }
    double cell_start(std::size_t j) const { return lower_ + static_cast<double>(j) * dt_; }

    // N(0, dt) draw for one cell of one component.
    double increment(std::size_t cell, int component) const {
        rng::CounterRng gen(seed_, static_cast<std::uint64_t>(component));
        return std::sqrt(dt_) * gen.gaussian(cell);
    }

    std::vector<double> increments(int component) const {
        rng::CounterRng gen(seed_, static_cast<std::uint64_t>(component));
        const double scale = std::sqrt(dt_);
        std::vector<double> out(cells_);
        for (std::size_t j = 0; j < cells_; ++j) out[j] = scale * gen.gaussian(j);
        return out;
    }

private:
    double dt_;
    double lower_;
    int dim_;
    std::uint64_t seed_;
    std::size_t cells_;
    std::size_t negative_cells_;
};

}  // namespace hurstlab::fbm
