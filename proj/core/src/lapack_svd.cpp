#include "hypoindex/lapack_svd.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <random>
#include <stdexcept>

namespace hypoindex {

SvdTriplets dense_svd_bottom(const Eigen::MatrixXcd& A, int kept) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw std::invalid_argument("dense_svd_bottom: square matrices only");
  kept = std::min(kept, n);

  Eigen::MatrixXcd work = A;  // zgesdd overwrites
  Eigen::MatrixXcd U(n, n), VT(n, n);
  std::vector<double> s(n);
  int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', n, n, work.data(), n, s.data(), U.data(), n,
                            VT.data(), n);
  if (info != 0) throw std::runtime_error("zgesdd failed, info=" + std::to_string(info));

  SvdTriplets out;
  out.singular_values = std::move(s);
  out.kept = kept;
  out.bottom_left.resize(n, kept);
  out.bottom_right.resize(n, kept);
  for (int j = 0; j < kept; ++j) {
    int col = n - 1 - j;  // smallest first
    out.bottom_left.col(j) = U.col(col);
    out.bottom_right.col(j) = VT.row(col).adjoint();
  }
  std::reverse(out.singular_values.begin(), out.singular_values.end());  // ascending
  return out;
}

SvdTriplets lanczos_svd_bottom(
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
    const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply_adjoint,
    int dim, int kept, int max_iter, unsigned seed) {
  // Golub-Kahan bidiagonalization of A with full reorthogonalization; the
  // bidiagonal SVD then approximates extreme singular triplets of A.
  const int m = std::min(max_iter, dim);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;

  Eigen::MatrixXcd V(dim, m + 1), U(dim, m);
  Eigen::VectorXcd v(dim), u(dim), w(dim);
  for (int i = 0; i < dim; ++i) v(i) = std::complex<double>(dist(rng), dist(rng));
  v.normalize();
  V.col(0) = v;

  std::vector<double> alpha(m), beta(m);
  for (int j = 0; j < m; ++j) {
    apply(V.col(j), u);
    if (j > 0) u -= beta[j - 1] * U.col(j - 1);
    for (int t = 0; t < 2; ++t)  // reorthogonalize
      for (int i = 0; i < j; ++i) u -= (U.col(i).adjoint() * u)(0) * U.col(i);
    alpha[j] = u.norm();
    if (alpha[j] < 1e-300) break;
    U.col(j) = u / alpha[j];

    apply_adjoint(U.col(j), w);
    w -= alpha[j] * V.col(j);
    for (int t = 0; t < 2; ++t)
      for (int i = 0; i <= j; ++i) w -= (V.col(i).adjoint() * w)(0) * V.col(i);
    beta[j] = w.norm();
    if (beta[j] < 1e-300) {
      beta[j] = 0;
      break;
    }
    V.col(j + 1) = w / beta[j];
  }

  // dense SVD of the small bidiagonal
  Eigen::MatrixXd Bd = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    Bd(j, j) = alpha[j];
    if (j + 1 < m) Bd(j, j + 1) = beta[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Bd, Eigen::ComputeThinU | Eigen::ComputeThinV);

  SvdTriplets out;
  out.kept = std::min(kept, m);
  out.singular_values.resize(m);
  for (int i = 0; i < m; ++i) out.singular_values[i] = svd.singularValues()(m - 1 - i);
  out.bottom_left.resize(dim, out.kept);
  out.bottom_right.resize(dim, out.kept);
  for (int j = 0; j < out.kept; ++j) {
    int col = m - 1 - j;
    out.bottom_left.col(j) = U.leftCols(m) * svd.matrixU().col(col);
    out.bottom_right.col(j) = V.leftCols(m) * svd.matrixV().col(col);
  }
  return out;
}

}  // namespace hypoindex
