#include "hypoindex/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hypoindex/errors.hpp"

namespace hypoindex {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r;
}

Eigen::MatrixXcd as_matrix(Complex z) {
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = z;
  return m;
}

double op_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return m.jacobiSvd().singularValues()(0);
}

// (i n)^order
Complex freq_factor(int n, int order) {
  Complex in(0.0, static_cast<double>(n));
  Complex f(1.0, 0.0);
  for (int j = 0; j < order; ++j) f *= in;
  return f;
}
}  // namespace

PeriodicFunction1D PeriodicFunction1D::scalar(const std::map<int, Complex>& coeffs,
                                              bool real_valued) {
  PeriodicFunction1D fn;
  fn.kind_ = real_valued ? ValueKind::ScalarReal : ValueKind::ScalarComplex;
  fn.rank_ = 1;
  std::map<int, Complex> table = coeffs;
  if (real_valued) {
    // Conjugate symmetry coeff(-n) = conj(coeff(n)). Missing partners are
    // completed; present but inconsistent ones are an error.
    double scale = 0;
    for (auto& [n, c] : table) scale = std::max(scale, std::abs(c));
    for (auto& [n, c] : coeffs) {
      auto it = table.find(-n);
      if (it == table.end()) {
        table[-n] = std::conj(c);
      } else if (std::abs(it->second - std::conj(c)) > 1e-12 * std::max(1.0, scale)) {
        throw std::invalid_argument(
            "real-valued series requires coeff(-n) = conj(coeff(n)); frequency " +
            std::to_string(n) + " violates it");
      }
    }
  }
  for (auto& [n, c] : table) {
    if (std::abs(c) == 0.0) continue;
    fn.coeffs_[n] = as_matrix(c);
    fn.bandwidth_ = std::max(fn.bandwidth_, std::abs(n));
  }
  return fn;
}

PeriodicFunction1D PeriodicFunction1D::matrix(const std::map<int, Eigen::MatrixXcd>& coeffs) {
  PeriodicFunction1D fn;
  fn.kind_ = ValueKind::Matrix;
  fn.rank_ = 1;
  for (auto& [n, c] : coeffs) {
    if (c.rows() != c.cols()) throw std::invalid_argument("matrix coefficients must be square");
    fn.rank_ = static_cast<int>(c.rows());
    if (c.norm() == 0.0) continue;
    fn.coeffs_[n] = c;
    fn.bandwidth_ = std::max(fn.bandwidth_, std::abs(n));
  }
  for (auto& [n, c] : fn.coeffs_)
    if (c.rows() != fn.rank_)
      throw std::invalid_argument("matrix coefficients must share one rank");
  return fn;
}

PeriodicFunction1D PeriodicFunction1D::zero(ValueKind kind, int rank) {
  PeriodicFunction1D fn;
  fn.kind_ = kind;
  fn.rank_ = rank;
  return fn;
}

Complex PeriodicFunction1D::evaluate(double angle, int derivative) const {
  if (kind_ == ValueKind::Matrix) throw std::logic_error("evaluate: matrix-valued series");
  Complex acc(0, 0);
  for (const auto& [n, c] : coeffs_)
    acc += freq_factor(n, derivative) * c(0, 0) * std::exp(Complex(0, n * angle));
  return acc;
}

Eigen::MatrixXcd PeriodicFunction1D::evaluate_matrix(double angle, int derivative) const {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rank_, rank_);
  for (const auto& [n, c] : coeffs_)
    acc += freq_factor(n, derivative) * std::exp(Complex(0, n * angle)) * c;
  return acc;
}

double PeriodicFunction1D::coefficient_norm_sum() const {
  double s = 0;
  for (const auto& [n, c] : coeffs_) s += op_norm(c);
  return s;
}

double PeriodicFunction1D::derivative_scale(int order) const {
  double s = 0;
  for (const auto& [n, c] : coeffs_) s += std::pow(std::abs(n), order) * op_norm(c);
  return s;
}

PeriodicFunction1D PeriodicFunction1D::scaled(Complex factor) const {
  PeriodicFunction1D fn = *this;
  if (kind_ == ValueKind::ScalarReal && std::abs(factor.imag()) > 0)
    fn.kind_ = ValueKind::ScalarComplex;
  for (auto& [n, c] : fn.coeffs_) c *= factor;
  return fn;
}

PeriodicFunction1D PeriodicFunction1D::rotated(double theta) const {
  PeriodicFunction1D fn = *this;
  for (auto& [n, c] : fn.coeffs_) c *= std::exp(Complex(0, n * theta));
  return fn;
}

PeriodicFunction2D PeriodicFunction2D::scalar(const std::map<Key, Complex>& coeffs) {
  PeriodicFunction2D fn;
  fn.rank_ = 1;
  for (auto& [k, c] : coeffs) {
    if (std::abs(c) == 0.0) continue;
    fn.coeffs_[k] = as_matrix(c);
    fn.bw_x_ = std::max(fn.bw_x_, std::abs(k.first));
    fn.bw_y_ = std::max(fn.bw_y_, std::abs(k.second));
  }
  return fn;
}

PeriodicFunction2D PeriodicFunction2D::matrix(const std::map<Key, Eigen::MatrixXcd>& coeffs) {
  PeriodicFunction2D fn;
  fn.rank_ = 1;
  for (auto& [k, c] : coeffs) {
    if (c.rows() != c.cols()) throw std::invalid_argument("matrix coefficients must be square");
    fn.rank_ = static_cast<int>(c.rows());
    if (c.norm() == 0.0) continue;
    fn.coeffs_[k] = c;
    fn.bw_x_ = std::max(fn.bw_x_, std::abs(k.first));
    fn.bw_y_ = std::max(fn.bw_y_, std::abs(k.second));
  }
  for (auto& [k, c] : fn.coeffs_)
    if (c.rows() != fn.rank_)
      throw std::invalid_argument("matrix coefficients must share one rank");
  return fn;
}

Eigen::MatrixXcd PeriodicFunction2D::evaluate_matrix(double x, double y) const {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rank_, rank_);
  for (const auto& [k, c] : coeffs_)
    acc += std::exp(Complex(0, k.first * x + k.second * y)) * c;
  return acc;
}

Complex PeriodicFunction2D::evaluate(double x, double y) const {
  if (rank_ != 1) throw std::logic_error("evaluate: matrix-valued series");
  return evaluate_matrix(x, y)(0, 0);
}

PeriodicFunction1D PeriodicFunction2D::slice_x(double x) const {
  std::map<int, Eigen::MatrixXcd> out;
  for (const auto& [k, c] : coeffs_) {
    Eigen::MatrixXcd term = std::exp(Complex(0, k.first * x)) * c;
    auto it = out.find(k.second);
    if (it == out.end())
      out[k.second] = term;
    else
      it->second += term;
  }
  if (rank_ == 1) {
    std::map<int, Complex> sc;
    for (auto& [n, c] : out) sc[n] = c(0, 0);
    return PeriodicFunction1D::scalar(sc, /*real_valued=*/false);
  }
  return PeriodicFunction1D::matrix(out);
}

PeriodicFunction2D PeriodicFunction2D::scaled(Complex factor) const {
  PeriodicFunction2D fn = *this;
  for (auto& [k, c] : fn.coeffs_) c *= factor;
  return fn;
}

PeriodicFunction2D PeriodicFunction2D::plus(const PeriodicFunction2D& other) const {
  if (rank_ != other.rank_) throw std::invalid_argument("plus: rank mismatch");
  PeriodicFunction2D fn = *this;
  for (auto& [k, c] : other.coeffs_) {
    auto it = fn.coeffs_.find(k);
    if (it == fn.coeffs_.end())
      fn.coeffs_[k] = c;
    else
      it->second += c;
    fn.bw_x_ = std::max(fn.bw_x_, std::abs(k.first));
    fn.bw_y_ = std::max(fn.bw_y_, std::abs(k.second));
  }
  return fn;
}

namespace {

// Vanishing order at `x`: first j <= cap with |f^(j)(x)| above the relative
// tolerance tol * (1 + sum |n|^j |coeff(n)|).
int vanishing_order(const PeriodicFunction1D& f, double x, double tol, int cap) {
  for (int j = 1; j <= cap; ++j) {
    double scale = 1.0 + f.derivative_scale(j);
    double mag = std::abs(f.evaluate(x, j));
    if (mag > tol * scale) return j;
  }
  return -1;
}

// Bisection for a sign change of fn on [a, b].
template <class Fn>
double bisect_sign_change(const Fn& fn, double a, double b) {
  double fa = fn(a);
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    double fm = fn(m);
    if ((fa < 0) == (fm < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
    if (b - a < 1e-15) break;
  }
  return 0.5 * (a + b);
}

// Local minimum of |f|^2 by golden-section on [a, b].
double golden_min(const PeriodicFunction1D& f, double a, double b) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  auto val = [&](double x) { return std::norm(f.evaluate(x)); };
  double fc = val(c), fd = val(d);
  for (int it = 0; it < 120 && (b - a) > 1e-15; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = val(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = val(d);
    }
  }
  return 0.5 * (a + b);
}

// Newton refinement of an odd-order zero using f'/f where usable.
double refine_zero(const PeriodicFunction1D& f, double x0) {
  double x = x0;
  for (int it = 0; it < 40; ++it) {
    double v = f.evaluate(x).real();
    double d = f.evaluate(x, 1).real();
    if (std::abs(d) < 1e-14) break;
    double step = v / d;
    if (std::abs(step) > 0.1) break;
    x -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return wrap_angle(x);
}

}  // namespace

std::vector<ZeroDatum> locate_zeros(const PeriodicFunction1D& f, const ZeroSearchOptions& opts) {
  if (f.kind() != ValueKind::ScalarReal)
    throw std::invalid_argument("locate_zeros: f must be scalar-real");
  if (f.is_identically_zero())
    throw std::invalid_argument("locate_zeros: f is identically zero");

  const double f_scale = 1.0 + f.coefficient_norm_sum();

  auto annotate = [&](double loc) -> ZeroDatum {
    int order = vanishing_order(f, loc, opts.tol, opts.order_cap);
    if (order < 0)
      throw FlatZeroDetected(loc, "no derivative up to order " + std::to_string(opts.order_cap) +
                                      " exceeds tolerance at x=" + std::to_string(loc));
    double c = f.evaluate(loc, order).real();
    double fact = 1.0;
    for (int j = 2; j <= order; ++j) fact *= j;
    return ZeroDatum{wrap_angle(loc), order, c / fact};
  };

  if (opts.declared.has_value()) {
    // Declared zeros are verified, not discovered.
    std::vector<ZeroDatum> out;
    for (const auto& dz : *opts.declared) {
      double v = std::abs(f.evaluate(dz.location));
      if (v > 1e-6 * f_scale)
        throw std::invalid_argument("declared zero at x=" + std::to_string(dz.location) +
                                    " has |f| = " + std::to_string(v));
      ZeroDatum z = annotate(dz.location);
      if (z.order != dz.order)
        throw std::invalid_argument("declared zero at x=" + std::to_string(dz.location) +
                                    " has order " + std::to_string(z.order) + ", declared " +
                                    std::to_string(dz.order));
      out.push_back(z);
    }
    std::sort(out.begin(), out.end(),
              [](const ZeroDatum& a, const ZeroDatum& b) { return a.location < b.location; });
    return out;
  }

  int grid = opts.grid_density > 0 ? opts.grid_density
                                   : std::max(1024, 64 * std::max(1, f.bandwidth()));
  std::vector<double> vals(grid);
  for (int i = 0; i < grid; ++i) vals[i] = f.evaluate(kTwoPi * i / grid).real();

  auto value_at = [&](double x) { return f.evaluate(x).real(); };
  auto deriv_at = [&](double x) { return f.evaluate(x, 1).real(); };

  std::vector<double> candidates;
  for (int i = 0; i < grid; ++i) {
    int j = (i + 1) % grid;
    double a = kTwoPi * i / grid, b = kTwoPi * (i + 1) / grid;
    if ((vals[i] < 0) != (vals[j] < 0)) {
      candidates.push_back(refine_zero(f, bisect_sign_change(value_at, a, b)));
    } else {
      // Even-order zeros: local minima of |f| dipping toward zero. The golden
      // search only localizes coarsely on flat minima; the derivative's sign
      // change there pins the location to machine precision.
      int h = (i + grid - 1) % grid;
      double m = std::abs(vals[i]);
      if (m <= std::abs(vals[h]) && m <= std::abs(vals[j]) && m < 1e-3 * f_scale) {
        double x = golden_min(f, a - kTwoPi / grid, b);
        double w = 2.0 * kTwoPi / grid;
        if ((deriv_at(x - w) < 0) != (deriv_at(x + w) < 0))
          x = bisect_sign_change(deriv_at, x - w, x + w);
        if (std::abs(f.evaluate(x)) < 1e-8 * f_scale) candidates.push_back(wrap_angle(x));
      }
    }
  }

  std::sort(candidates.begin(), candidates.end());
  std::vector<ZeroDatum> out;
  for (double x : candidates) {
    bool merged = false;
    for (auto& z : out) {
      double d = std::abs(x - z.location);
      d = std::min(d, kTwoPi - d);
      if (d < opts.merge_tol) { merged = true; break; }
    }
    if (!merged) out.push_back(annotate(x));
  }
  return out;
}

std::pair<int, std::vector<ZeroDatum>> max_order_zeros(const std::vector<ZeroDatum>& zeros) {
  int k = 0;
  for (const auto& z : zeros) k = std::max(k, z.order);
  std::vector<ZeroDatum> subset;
  for (const auto& z : zeros)
    if (z.order == k) subset.push_back(z);
  return {k, subset};
}

SupNormBound certified_sup_norm(const PeriodicFunction2D& g, int grid) {
  double upper = 0;
  for (const auto& [k, c] : g.coefficients()) upper += op_norm(c);
  double lower = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      lower = std::max(lower, op_norm(g.evaluate_matrix(kTwoPi * i / grid, kTwoPi * j / grid)));
  return {upper, lower};
}

SupNormBound certified_sup_norm(const PeriodicFunction1D& g, int grid) {
  double upper = g.coefficient_norm_sum();
  double lower = 0;
  for (int i = 0; i < grid; ++i)
    lower = std::max(lower, op_norm(g.evaluate_matrix(kTwoPi * i / grid)));
  return {upper, lower};
}

}  // namespace hypoindex
