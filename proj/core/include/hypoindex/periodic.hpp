#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace hypoindex {

using Complex = std::complex<double>;

enum class ValueKind { ScalarReal, ScalarComplex, Matrix };

/// Finite Fourier series on the circle, scalar or square-matrix valued.
/// Immutable after construction; evaluation and differentiation are exact
/// operations on the coefficient table.
class PeriodicFunction1D {
 public:
  PeriodicFunction1D() = default;  // the zero scalar-real series
  static PeriodicFunction1D scalar(const std::map<int, Complex>& coeffs, bool real_valued);
  static PeriodicFunction1D matrix(const std::map<int, Eigen::MatrixXcd>& coeffs);
  static PeriodicFunction1D zero(ValueKind kind = ValueKind::ScalarReal, int rank = 1);

  ValueKind kind() const { return kind_; }
  int rank() const { return rank_; }
  int bandwidth() const { return bandwidth_; }
  bool is_identically_zero() const { return coeffs_.empty(); }
  const std::map<int, Eigen::MatrixXcd>& coefficients() const { return coeffs_; }

  /// Trigonometric sum at `angle`; derivative of any order by multiplying
  /// each coefficient with (i n)^order.
  Complex evaluate(double angle, int derivative = 0) const;
  Eigen::MatrixXcd evaluate_matrix(double angle, int derivative = 0) const;

  /// Sum of coefficient operator norms (certified sup bound helper).
  double coefficient_norm_sum() const;
  /// \sum |n|^order * ||coeff(n)||, the scale used for derivative tolerances.
  double derivative_scale(int order) const;

  PeriodicFunction1D scaled(Complex factor) const;
  PeriodicFunction1D rotated(double theta) const;  // x -> x + theta

 private:
  ValueKind kind_ = ValueKind::ScalarReal;
  int rank_ = 1;
  int bandwidth_ = 0;
  std::map<int, Eigen::MatrixXcd> coeffs_;
};

/// Finite Fourier series on the 2-torus with values in C or r x r matrices.
class PeriodicFunction2D {
 public:
  PeriodicFunction2D() = default;  // the zero scalar series
  using Key = std::pair<int, int>;  // (m, n) = (base frequency, fiber frequency)

  static PeriodicFunction2D scalar(const std::map<Key, Complex>& coeffs);
  static PeriodicFunction2D matrix(const std::map<Key, Eigen::MatrixXcd>& coeffs);

  int rank() const { return rank_; }
  int bandwidth_x() const { return bw_x_; }
  int bandwidth_y() const { return bw_y_; }
  bool is_scalar() const { return rank_ == 1; }
  const std::map<Key, Eigen::MatrixXcd>& coefficients() const { return coeffs_; }

  Eigen::MatrixXcd evaluate_matrix(double x, double y) const;
  Complex evaluate(double x, double y) const;

  /// Slice at fixed base angle; a valid 1D series with bandwidth <= bandwidth_y.
  PeriodicFunction1D slice_x(double x) const;

  PeriodicFunction2D scaled(Complex factor) const;
  PeriodicFunction2D plus(const PeriodicFunction2D& other) const;

 private:
  int rank_ = 1;
  int bw_x_ = 0, bw_y_ = 0;
  std::map<Key, Eigen::MatrixXcd> coeffs_;
};

/// A zero of f with its vanishing order and leading Taylor coefficient
/// c = f^(order)(location) / order!.
struct ZeroDatum {
  double location = 0.0;  // radians in [0, 2pi)
  int order = 0;
  double leading_coeff = 0.0;
};

struct DeclaredZero {
  double location;
  int order;
};

struct ZeroSearchOptions {
  int grid_density = 0;          // 0 = max(1024, 64 * bandwidth)
  double tol = 1e-9;             // relative derivative-magnitude tolerance
  int order_cap = 12;            // non-flatness cap
  double merge_tol = 1e-6;       // radians; clusters merged below this
  std::optional<std::vector<DeclaredZero>> declared;  // verify instead of search
};

/// All zeros of a scalar-real f on the circle, each annotated with vanishing
/// order and leading coefficient. Even-order zeros are located through local
/// minima of |f|; flat-looking zeros are rejected.
std::vector<ZeroDatum> locate_zeros(const PeriodicFunction1D& f,
                                    const ZeroSearchOptions& opts = {});

/// Maximal vanishing order and the zeros attaining it (k = 0 for empty input).
std::pair<int, std::vector<ZeroDatum>> max_order_zeros(const std::vector<ZeroDatum>& zeros);

struct SupNormBound {
  double upper;          // sum of coefficient operator norms
  double sampled_lower;  // max of ||g|| over a sample grid, for diagnostics
};

SupNormBound certified_sup_norm(const PeriodicFunction2D& g, int grid = 100);
SupNormBound certified_sup_norm(const PeriodicFunction1D& g, int grid = 2048);

}  // namespace hypoindex
