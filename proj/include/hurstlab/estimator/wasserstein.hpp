#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hurstlab/core/errors.hpp"

namespace hurstlab::est {

// Equal-weight atoms, kept sorted; the quantile function is the step function
// through the order statistics.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
        if (atoms_.empty()) throw validation_error("EmpiricalMeasure: no atoms");
        std::sort(atoms_.begin(), atoms_.end());
    }

    const std::vector<double>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

private:
    std::vector<double> atoms_;
};

// Exact W_p between two empirical measures: the L^p distance of quantile
// functions, integrated by merging the two breakpoint sets i/n and j/m
// (integer arithmetic keeps the merge exact for unequal atom counts).
inline double wasserstein_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int p = 2) {
    if (p != 1 && p != 2) throw validation_error("wasserstein_1d: p must be 1 or 2");
    const auto& xa = a.atoms();
    const auto& xb = b.atoms();
    const auto n = static_cast<unsigned long long>(xa.size());
    const auto m = static_cast<unsigned long long>(xb.size());
    std::size_t ia = 0, ib = 0;
    unsigned long long num = 0;  // current position as a fraction num / (n*m)
    const double denom = static_cast<double>(n) * static_cast<double>(m);
    double acc = 0.0;
    while (ia < xa.size() && ib < xb.size()) {
        const unsigned long long next_a = (ia + 1) * m;  // breakpoint (ia+1)/n scaled by n*m
        const unsigned long long next_b = (ib + 1) * n;
        const unsigned long long next = std::min(next_a, next_b);
        const double len = static_cast<double>(next - num) / denom;
        const double diff = std::fabs(xa[ia] - xb[ib]);
        acc += len * (p == 1 ? diff : diff * diff);
        num = next;
        if (next == next_a) ++ia;
        if (next == next_b) ++ib;
    }
    return p == 1 ? acc : std::sqrt(acc);
}

}  // namespace hurstlab::est
