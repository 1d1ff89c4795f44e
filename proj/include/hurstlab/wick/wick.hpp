#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "hurstlab/core/errors.hpp"

namespace hurstlab::wick {

using Pair = std::pair<int, int>;  // ordered (i < j), indices 1-based
using Matrix = std::vector<std::vector<double>>;

struct Term {
    long long coefficient = 0;
    std::vector<Pair> pairs;  // sorted lexicographically
};

// Expansion of a Gaussian product expectation over pair partitions. `mixed`
// distinguishes partitions of {1,2,3,3,...,n,n} (indices 1 and 2 appear once)
// from partitions of {1,1,...,n,n}.
struct PairPartitionExpansion {
    int n = 0;
    bool mixed = false;
    std::vector<Term> terms;

    double evaluate(const Matrix& cov) const {
        double total = 0.0;
        for (const auto& term : terms) {
            double prod = static_cast<double>(term.coefficient);
            for (const auto& [i, j] : term.pairs) prod *= cov[i - 1][j - 1];
            total += prod;
        }
        return total;
    }
};

// ---------------------------------------------------------------------------
// Brute-force enumeration over perfect matchings (the oracle).
// ---------------------------------------------------------------------------

namespace detail {

inline double sum_over_matchings(std::vector<int>& factors, const Matrix& cov) {
    if (factors.empty()) return 1.0;
    const int first = factors[0];
    double total = 0.0;
    for (std::size_t k = 1; k < factors.size(); ++k) {
        const int partner = factors[k];
        std::vector<int> rest;
        rest.reserve(factors.size() - 2);
        for (std::size_t m = 1; m < factors.size(); ++m)
            if (m != k) rest.push_back(factors[m]);
        total += cov[first][partner] * sum_over_matchings(rest, cov);
    }
    return total;
}

}  // namespace detail

// E[prod_i Z_i^{e_i}] for a centered Gaussian vector, by summing pairwise
// covariances over all perfect matchings. Exponential cost; meant as an
// oracle for small degrees. Odd total degree returns 0.
inline double isserlis_expectation(const std::vector<int>& exponents, const Matrix& cov,
                                   int max_degree = 16) {
    if (exponents.size() > cov.size()) throw validation_error("isserlis: index out of range");
    std::vector<int> factors;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] < 0) throw validation_error("isserlis: negative exponent");
        for (int e = 0; e < exponents[i]; ++e) factors.push_back(static_cast<int>(i));
    }
    if (factors.size() % 2 == 1) return 0.0;
    if (static_cast<int>(factors.size()) > max_degree)
        throw validation_error("isserlis: total degree exceeds the enumeration budget");
    return detail::sum_over_matchings(factors, cov);
}

// ---------------------------------------------------------------------------
// Constructive expansions via Gaussian integration by parts.
// ---------------------------------------------------------------------------

namespace detail {

using TermMap = std::map<std::vector<Pair>, long long>;

inline Pair make_pair_sorted(int i, int j) { return i < j ? Pair{i, j} : Pair{j, i}; }

// append pair and keep the list sorted
inline std::vector<Pair> extended(std::vector<Pair> pairs, Pair extra) {
    pairs.push_back(extra);
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

inline TermMap relabel(const TermMap& src, const std::vector<int>& target) {
    TermMap out;
    for (const auto& [pairs, coeff] : src) {
        std::vector<Pair> mapped;
        mapped.reserve(pairs.size());
        for (const auto& [i, j] : pairs)
            mapped.push_back(make_pair_sorted(target[static_cast<std::size_t>(i) - 1],
                                              target[static_cast<std::size_t>(j) - 1]));
        std::sort(mapped.begin(), mapped.end());
        out[mapped] += coeff;
    }
    return out;
}

inline TermMap mixed_expansion_map(int n);

// E[prod_{i=1}^n (Z_i^2 - E Z_i^2)] over partitions of {1,1,...,n,n}, built by
// pairing Z_1 with every squared factor through Gaussian integration by parts.
inline TermMap square_expansion_map(int n) {
    if (n == 0) return TermMap{{{}, 1}};
    if (n == 1) return TermMap{};  // E[Z^2 - E Z^2] = 0
    TermMap out;
    for (int m = 2; m <= n; ++m) {
        // inner factor E[Z_1 Z_m prod_{k != m} (Z_k^2 - E)] is a mixed form of
        // full rank n over (Z_1, Z_m, remaining squares)
        std::vector<int> target;
        target.push_back(1);
        target.push_back(m);
        for (int i = 2; i <= n; ++i)
            if (i != m) target.push_back(i);
        for (auto& [pairs, coeff] : relabel(mixed_expansion_map(n), target))
            out[extended(pairs, Pair{1, m})] += 2 * coeff;
    }
    return out;
}

// E[Z_1 Z_2 prod_{i=3}^n (Z_i^2 - E Z_i^2)] over partitions of {1,2,3,3,...},
// memoized per rank (the recursion revisits lower ranks heavily).
inline TermMap mixed_expansion_map_uncached(int n) {
    if (n == 2) return TermMap{{{Pair{1, 2}}, 1}};
    TermMap out;
    // integration by parts in Z_1: pairing with each squared factor
    for (int m = 3; m <= n; ++m) {
        std::vector<int> target;  // mixed structure over (Z_2, Z_m, remaining squares)
        target.push_back(2);
        target.push_back(m);
        for (int i = 3; i <= n; ++i)
            if (i != m) target.push_back(i);
        for (auto& [pairs, coeff] : relabel(mixed_expansion_map(n - 1), target))
            out[extended(pairs, Pair{1, m})] += 2 * coeff;
    }
    // the E[Z_1 Z_2] term multiplies the pure square expansion of the rest
    std::vector<int> target;
    for (int i = 3; i <= n; ++i) target.push_back(i);
    for (auto& [pairs, coeff] : relabel(square_expansion_map(n - 2), target))
        out[extended(pairs, Pair{1, 2})] += coeff;
    return out;
}

inline TermMap mixed_expansion_map(int n) {
    static std::mutex mu;
    static std::map<int, TermMap> memo;
    {
        std::lock_guard lock(mu);
        if (auto it = memo.find(n); it != memo.end()) return it->second;
    }
    TermMap computed = mixed_expansion_map_uncached(n);
    std::lock_guard lock(mu);
    return memo.emplace(n, std::move(computed)).first->second;
}

inline PairPartitionExpansion to_expansion(TermMap map, int n, bool mixed) {
    PairPartitionExpansion e;
    e.n = n;
    e.mixed = mixed;
    for (auto& [pairs, coeff] : map) {
        if (coeff == 0) continue;
        e.terms.push_back(Term{coeff, pairs});
    }
    return e;
}

}  // namespace detail

inline constexpr int kDefaultSymbolicBudget = 8;

// Expansion of E[prod (Z_i^2 - E Z_i^2)] with integer coefficients alpha_{p,n}.
inline PairPartitionExpansion centered_square_product_expansion(
    int n, int budget = kDefaultSymbolicBudget) {
    if (n < 2) throw validation_error("centered_square_product_expansion: n must be >= 2");
    if (n > budget)
        throw validation_error("centered_square_product_expansion: n exceeds the symbolic budget; "
                               "use Monte Carlo beyond it");
    return detail::to_expansion(detail::square_expansion_map(n), n, false);
}

// Expansion of E[Z_1 Z_2 prod_{i=3}^n (Z_i^2 - E Z_i^2)], coefficients beta_{p,n}.
inline PairPartitionExpansion mixed_product_expansion(int n, int budget = kDefaultSymbolicBudget) {
    if (n < 2) throw validation_error("mixed_product_expansion: n must be >= 2");
    if (n > budget)
        throw validation_error("mixed_product_expansion: n exceeds the symbolic budget; "
                               "use Monte Carlo beyond it");
    return detail::to_expansion(detail::mixed_expansion_map(n), n, true);
}

// Multiplicity of every index across the pairs of one partition term.
inline std::vector<int> index_multiplicities(const std::vector<Pair>& pairs, int n) {
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (const auto& [i, j] : pairs) {
        if (i < 1 || j < 1 || i > n || j > n || i == j)
            throw validation_error("pair partition: malformed pair");
        ++count[static_cast<std::size_t>(i) - 1];
        ++count[static_cast<std::size_t>(j) - 1];
    }
    return count;
}

// Decomposition of a partition of {1,1,...,n,n} into the cycles of the
// derangement it induces (each pair maps a number to its image).
inline std::vector<std::vector<int>> partition_to_cycles(std::vector<Pair> pairs) {
    int n = 0;
    for (const auto& [i, j] : pairs) n = std::max({n, i, j});
    for (int c : index_multiplicities(pairs, n))
        if (c != 2) throw validation_error("partition_to_cycles: every index must appear twice");
    std::sort(pairs.begin(), pairs.end());
    std::vector<bool> used(pairs.size(), false);
    std::vector<std::vector<int>> cycles;
    for (std::size_t start = 0; start < pairs.size(); ++start) {
        if (used[start]) continue;
        std::vector<int> cycle;
        used[start] = true;
        const int origin = pairs[start].first;
        cycle.push_back(origin);
        int current = pairs[start].second;
        while (current != origin) {
            cycle.push_back(current);
            bool found = false;
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                if (used[k]) continue;
                if (pairs[k].first == current || pairs[k].second == current) {
                    used[k] = true;
                    current = (pairs[k].first == current) ? pairs[k].second : pairs[k].first;
                    found = true;
                    break;
                }
            }
            if (!found) throw validation_error("partition_to_cycles: broken pair chain");
        }
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

}  // namespace hurstlab::wick
