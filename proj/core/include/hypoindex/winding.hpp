#pragma once

#include <functional>

#include "hypoindex/periodic.hpp"

namespace hypoindex {

/// Snapshot of the adaptively sampled curve behind a winding computation.
struct SampledCurve {
  int samples = 0;        // final uniform sample count
  double min_modulus = 0; // min |z_j|, positive for admissible curves
  double max_modulus = 0;
};

struct WindingResult {
  int winding = 0;
  double residual = 0;  // |angle sum / 2pi - winding|, < 1e-2 on success
  SampledCurve curve;
};

struct WindingOptions {
  int initial_samples = 256;
  int max_samples = 1 << 20;
};

/// Degree of a nonvanishing closed curve around 0: sum of principal-branch
/// angle increments over uniform samples, refined until every increment is
/// below pi/2 and the rounding residual is below 1e-2.
/// Throws CurveThroughZero when refinement drives min |z| under 1e-12 times
/// the curve scale, NonConvergent when the sample cap is hit first.
WindingResult winding_number(const std::function<Complex(double)>& curve,
                             const WindingOptions& opts = {});

/// Winding of y -> det(lambda I - g_slice(y)); the concrete K^1(S^1) = Z
/// normal form. For rank 1 this is exactly the scalar winding.
int k1_class_winding(double lambda, const PeriodicFunction1D& g_slice,
                     const WindingOptions& opts = {});

}  // namespace hypoindex
