#pragma once

#include "hurstlab/core/errors.hpp"
#include "hurstlab/core/fft.hpp"
#include "hurstlab/core/interp.hpp"
#include "hurstlab/core/parallel.hpp"
#include "hurstlab/core/quadrature.hpp"
#include "hurstlab/core/rng.hpp"
#include "hurstlab/core/stats.hpp"
#include "hurstlab/estimator/hurst.hpp"
#include "hurstlab/estimator/wasserstein.hpp"
#include "hurstlab/fbm/covariance.hpp"
#include "hurstlab/fbm/field.hpp"
#include "hurstlab/fbm/kernels.hpp"
#include "hurstlab/fbm/sampler.hpp"
#include "hurstlab/fbm/white_noise.hpp"
#include "hurstlab/fou/fou.hpp"
#include "hurstlab/regcheck/regcheck.hpp"
#include "hurstlab/sde/sde.hpp"
#include "hurstlab/wick/wick.hpp"

namespace hurstlab {
inline constexpr const char* kVersion = "0.1.0";
}
