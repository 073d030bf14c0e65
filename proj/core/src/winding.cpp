#include "hypoindex/winding.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hypoindex/errors.hpp"

namespace hypoindex {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kIncrementBound = std::numbers::pi / 2;  // unambiguous branch tracking
constexpr double kResidualBound = 1e-2;
}  // namespace

WindingResult winding_number(const std::function<Complex(double)>& curve,
                             const WindingOptions& opts) {
  for (int m = opts.initial_samples; m <= opts.max_samples; m *= 2) {
    std::vector<Complex> z(m);
    double min_mod = std::numeric_limits<double>::infinity(), max_mod = 0;
    for (int j = 0; j < m; ++j) {
      z[j] = curve(kTwoPi * j / m);
      double a = std::abs(z[j]);
      min_mod = std::min(min_mod, a);
      max_mod = std::max(max_mod, a);
    }
    if (min_mod <= 1e-12 * max_mod)
      throw CurveThroughZero(min_mod, "curve passes through zero within resolution (min |z| = " +
                                          std::to_string(min_mod) + ")");
    double total = 0;
    bool fine = true;
    for (int j = 0; j < m; ++j) {
      double inc = std::arg(z[(j + 1) % m] / z[j]);
      if (std::abs(inc) >= kIncrementBound) {
        fine = false;
        break;
      }
      total += inc;
    }
    if (!fine) continue;
    double turns = total / kTwoPi;
    int w = static_cast<int>(std::lround(turns));
    double residual = std::abs(turns - w);
    if (residual < kResidualBound)
      return WindingResult{w, residual, SampledCurve{m, min_mod, max_mod}};
  }
  throw NonConvergent("winding: increment or residual condition unmet at the sample cap");
}

int k1_class_winding(double lambda, const PeriodicFunction1D& g_slice,
                     const WindingOptions& opts) {
  const int r = g_slice.rank();
  auto curve = [&](double y) -> Complex {
    if (g_slice.kind() != ValueKind::Matrix) return lambda - g_slice.evaluate(y);
    Eigen::MatrixXcd m = -g_slice.evaluate_matrix(y);
    for (int i = 0; i < r; ++i) m(i, i) += lambda;
    return m.determinant();
  };
  return winding_number(curve, opts).winding;
}

}  // namespace hypoindex
