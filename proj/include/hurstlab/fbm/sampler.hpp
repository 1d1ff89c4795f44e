#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "hurstlab/core/fft.hpp"
#include "hurstlab/core/rng.hpp"
#include "hurstlab/fbm/covariance.hpp"
#include "hurstlab/fbm/field.hpp"
#include "hurstlab/fbm/white_noise.hpp"

namespace hurstlab::fbm {

// ---------------------------------------------------------------------------
// Exact sampler: Cholesky factor of the quadrature covariance matrix.
// Rows at t = 0 are pinned to zero and excluded from the factorization.
// ---------------------------------------------------------------------------
class ExactFieldSampler {
public:
    ExactFieldSampler(const CovarianceModel& model, std::vector<double> t_grid,
                      std::vector<double> h_grid, int dim = 1,
                      Normalization mode = Normalization::unit_variance)
        : t_grid_(std::move(t_grid)), h_grid_(std::move(h_grid)), dim_(dim), mode_(mode) {
        if (t_grid_.empty() || h_grid_.empty())
            throw validation_error("ExactFieldSampler: empty grid");
        if (dim_ < 1) throw validation_error("ExactFieldSampler: dim must be >= 1");
        for (std::size_t it = 0; it < t_grid_.size(); ++it)
            for (std::size_t ih = 0; ih < h_grid_.size(); ++ih)
                if (t_grid_[it] != 0.0) live_.emplace_back(it, ih);
        const auto n = static_cast<Eigen::Index>(live_.size());
        cov_.resize(n, n);
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = a; b < n; ++b) {
                const double v = model.cross(t_grid_[live_[a].first], h_grid_[live_[a].second],
                                             t_grid_[live_[b].first], h_grid_[live_[b].second], mode_);
                cov_(a, b) = v;
                cov_(b, a) = v;
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov_);
        if (llt.info() != Eigen::Success) {
            // quadrature noise can push tiny eigenvalues below zero
            const double ridge = 1e-10 * cov_.diagonal().maxCoeff();
            Eigen::MatrixXd fixed = cov_;
            fixed.diagonal().array() += ridge;
            llt.compute(fixed);
            if (llt.info() != Eigen::Success)
                throw model_error("ExactFieldSampler: covariance not PSD even with ridge; "
                                  "model covariances are inconsistent");
        }
        factor_ = llt.matrixL();
    }

    const Eigen::MatrixXd& covariance() const { return cov_; }
    const std::vector<double>& t_grid() const { return t_grid_; }
    const std::vector<double>& h_grid() const { return h_grid_; }

    FbmField sample(std::uint64_t seed) const {
        FbmField f;
        f.t_grid = t_grid_;
        f.h_grid = h_grid_;
        f.dim = dim_;
        f.mode = mode_;
        f.seed = seed;
        f.sampler_id = "exact-cholesky";
        f.values.assign(t_grid_.size() * h_grid_.size() * static_cast<std::size_t>(dim_), 0.0);
        const auto n = static_cast<Eigen::Index>(live_.size());
        Eigen::VectorXd z(n);
        for (int c = 0; c < dim_; ++c) {
            rng::CounterRng gen(seed, static_cast<std::uint64_t>(c));
            for (Eigen::Index i = 0; i < n; ++i) z(i) = gen.gaussian(static_cast<std::uint64_t>(i));
            Eigen::VectorXd x = factor_ * z;
            for (Eigen::Index i = 0; i < n; ++i)
                f.at(live_[i].first, live_[i].second, c) = x(i);
        }
        return f;
    }

private:
    std::vector<double> t_grid_, h_grid_;
    int dim_;
    Normalization mode_;
    std::vector<std::pair<std::size_t, std::size_t>> live_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd factor_;
};

inline FbmField sample_field_exact(const CovarianceModel& model, std::vector<double> t_grid,
                                   std::vector<double> h_grid, int dim, std::uint64_t seed,
                                   Normalization mode = Normalization::unit_variance) {
    return ExactFieldSampler(model, std::move(t_grid), std::move(h_grid), dim, mode).sample(seed);
}

// ---------------------------------------------------------------------------
// Projection sampler: truncated moving-average representation against a shared
// white-noise grid. Kernel weights are exact per-cell integrals, so the s -> t
// endpoint singularity for H < 1/2 never gets point-evaluated. The per-cell
// weight depends only on t - s, which turns the sum into one discrete
// convolution per Hurst value; the noise spectrum is shared across them.
// ---------------------------------------------------------------------------
class MvnFieldSampler {
public:
    explicit MvnFieldSampler(const CovarianceModel& model) : model_(model) {}

    // B(t_i) for every (t, H) on the grid, all driven by `noise`.
    FbmField sample(const WhiteNoiseGrid& noise, std::span<const double> t_grid,
                    std::span<const double> h_grid,
                    Normalization mode = Normalization::unit_variance) const {
        const std::vector<long> t_index = aligned_indices(noise, t_grid);
        const std::size_t m_neg = noise.negative_cells();
        long i_max = 0;
        for (long i : t_index) i_max = std::max(i_max, i);

        FbmField f;
        f.t_grid.assign(t_grid.begin(), t_grid.end());
        f.h_grid.assign(h_grid.begin(), h_grid.end());
        f.dim = noise.dim();
        f.mode = mode;
        f.seed = noise.seed();
        f.sampler_id = "mvn-projection";
        f.values.assign(t_grid.size() * h_grid.size() * static_cast<std::size_t>(noise.dim()), 0.0);

        const std::size_t kernel_len = m_neg + static_cast<std::size_t>(std::max<long>(i_max, 0)) + 1;
        const std::size_t conv_len = noise.cells() + kernel_len - 1;
        const std::size_t nfft = fft::next_pow2(conv_len);

        for (int c = 0; c < noise.dim(); ++c) {
            const auto noise_fft = fft::forward_padded(noise.increments(c), nfft);
            for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
                const double H = h_grid[ih];
                check_hurst(H);
                auto prod = kernel_fft(H, noise.dt(), kernel_len, nfft);
                for (std::size_t i = 0; i < nfft; ++i) prod[i] *= noise_fft[i];
                fft::transform(prod, true);
                const double scale =
                    1.0 / (noise.dt() * std::tgamma(H + 0.5) *
                           (mode == Normalization::unit_variance ? model_.normalization(H) : 1.0));
                const double base = prod[m_neg].real();  // value at t = 0
                for (std::size_t it = 0; it < t_grid.size(); ++it) {
                    const std::size_t m =
                        static_cast<std::size_t>(t_index[it] + static_cast<long>(m_neg));
                    const double raw = (t_index[it] == 0) ? 0.0 : prod[m].real() - base;
                    f.at(it, ih, c) = raw * scale;
                }
            }
        }
        return f;
    }

    // Deterministic bound on |E B^_u B^_v - C(u,v)| from truncation plus the
    // piecewise-constant projection, via Cauchy-Schwarz on the kernel deficits.
    double covariance_bias_bound(const WhiteNoiseGrid& noise, double u, double Hu, double v,
                                 double Hv, Normalization mode = Normalization::unit_variance) const {
        double bound = kernel_deficit(noise, u, Hu) * kernel_deficit(noise, v, Hv);
        if (mode == Normalization::unit_variance)
            bound /= model_.normalization(Hu) * model_.normalization(Hv);
        return bound;
    }

    // sqrt( ||f_t||^2 - ||P f_t||^2 ) on the raw scale.
    double kernel_deficit(const WhiteNoiseGrid& noise, double t, double H) const {
        if (t == 0.0) return 0.0;
        const double var_model = model_.cross(t, H, t, H, Normalization::raw);
        const double var_proj = projected_variance(noise, t, H);
        return std::sqrt(std::max(0.0, var_model - var_proj));
    }

    // Variance actually realized by the projected kernel, raw scale.
    double projected_variance(const WhiteNoiseGrid& noise, double t, double H) const {
        const std::vector<long> idx = aligned_indices(noise, std::span<const double>(&t, 1));
        const long i_t = idx[0];
        const std::size_t m_neg = noise.negative_cells();
        const double dt = noise.dt();
        const double g = std::tgamma(H + 0.5);
        double sum = 0.0;
        const long cells = static_cast<long>(noise.cells());
        for (long j = 0; j < cells; ++j) {
            const long m = i_t + static_cast<long>(m_neg) - j;        // (t - s_j)/dt
            const long m0 = static_cast<long>(m_neg) - j;             // (0 - s_j)/dt
            const double w = cell_weight(H, dt, m) - cell_weight(H, dt, m0);
            sum += w * w;
        }
        return sum / (dt * g * g);
    }

private:
    static std::vector<long> aligned_indices(const WhiteNoiseGrid& noise,
                                             std::span<const double> t_grid) {
        std::vector<long> out;
        out.reserve(t_grid.size());
        for (double t : t_grid) {
            if (t < noise.lower() - 1e-9 || t > noise.upper() + 1e-9)
                throw validation_error("MvnFieldSampler: t outside the noise grid");
            const double ratio = t / noise.dt();
            const double r = std::round(ratio);
            if (std::fabs(ratio - r) > 1e-9 * std::max(1.0, std::fabs(ratio)))
                throw validation_error("MvnFieldSampler: t not aligned to noise cells");
            out.push_back(static_cast<long>(r));
        }
        return out;
    }

    // int over one cell of (x)_+^{H-1/2} ending at distance m*dt.
    static double cell_weight(double H, double dt, long m) {
        if (m <= 0) return 0.0;
        const double p = H + 0.5;
        return (std::pow(static_cast<double>(m) * dt, p) -
                std::pow(static_cast<double>(m - 1) * dt, p)) / p;
    }

    std::vector<std::complex<double>> kernel_fft(double H, double dt, std::size_t kernel_len,
                                                 std::size_t nfft) const {
        const KernelKey key{H, dt, kernel_len, nfft};
        {
            std::lock_guard lock(mutex_);
            if (auto it = kernel_cache_.find(key); it != kernel_cache_.end()) return it->second;
        }
        std::vector<double> k(kernel_len);
        for (std::size_t m = 0; m < kernel_len; ++m)
            k[m] = cell_weight(H, dt, static_cast<long>(m));
        auto spec = fft::forward_padded(k, nfft);
        std::lock_guard lock(mutex_);
        kernel_cache_.emplace(key, spec);
        return spec;
    }

    struct KernelKey {
        double H, dt;
        std::size_t len, nfft;
        bool operator<(const KernelKey& o) const {
            return std::tie(H, dt, len, nfft) < std::tie(o.H, o.dt, o.len, o.nfft);
        }
    };

    const CovarianceModel& model_;
    mutable std::mutex mutex_;
    mutable std::map<KernelKey, std::vector<std::complex<double>>> kernel_cache_;
};

inline FbmField sample_field_mvn(const CovarianceModel& model, const WhiteNoiseGrid& noise,
                                 std::span<const double> t_grid, std::span<const double> h_grid,
                                 Normalization mode = Normalization::unit_variance) {
    return MvnFieldSampler(model).sample(noise, t_grid, h_grid, mode);
}

}  // namespace hurstlab::fbm
