#pragma once

#include <functional>
#include <vector>

namespace hypoindex {

/// LDL^T factors of a symmetric positive-definite tridiagonal matrix,
/// A = L D L^T with unit lower-bidiagonal L. For M-matrices (our
/// finite-difference operators) the factorization is componentwise
/// relatively accurate, which is what makes the shifted counts below
/// meaningful far below eps * ||A||.
struct TridiagLDLT {
  std::vector<double> d;  // pivots
  std::vector<double> l;  // subdiagonal multipliers, size n-1
};

/// Factor a pd tridiagonal matrix (diag a, subdiag b).
TridiagLDLT factor_pd_tridiag(const std::vector<double>& a, const std::vector<double>& b);

/// Number of eigenvalues of L D L^T strictly below sigma, via the
/// differential stationary qds transform (no cancellation against the
/// matrix scale, so small eigenvalues of stiff matrices count correctly).
int count_below_ldlt(const TridiagLDLT& f, double sigma);

/// Batched variant: one sweep over the factors serves all shifts, which
/// keeps the division-bound recurrences pipelined.
void count_below_ldlt_multi(const TridiagLDLT& f, const std::vector<double>& sigmas,
                            std::vector<int>& counts);

/// Symmetric banded matrix in lower band storage:
/// band[b][i] = A(i+b, i), b = 0..bw.
struct SymmetricBanded {
  int n = 0;
  int bw = 0;
  std::vector<std::vector<double>> band;
};

/// Negative-pivot count of the no-pivoting banded LDL^T of (A - sigma I).
/// Zero pivots are nudged; by Sylvester's law this is the number of
/// eigenvalues below sigma whenever the factorization completes sensibly.
int inertia_below(const SymmetricBanded& A, double sigma);

/// Cholesky factor of a symmetric positive-definite banded matrix
/// (A + shift I = L L^T), kept in lower band storage like SymmetricBanded.
struct BandedCholesky {
  int n = 0;
  int bw = 0;
  std::vector<std::vector<double>> low;

  /// Throws std::runtime_error on a nonpositive pivot.
  static BandedCholesky factor(const SymmetricBanded& A, double shift);
  void solve_inplace(double* x) const;  // L L^T y = x
};

/// Counting function: fills counts[i] = #{eigenvalues < sigmas[i]}.
using MultiCounter =
    std::function<void(const std::vector<double>& sigmas, std::vector<int>& counts)>;

/// Lowest `count` values of the spectrum described by a counting function.
/// Batched bisection on [lo, hi]; each value is resolved to
/// rel_width * max(1, |value|). `hints` (previous refinement level of the
/// same operator), when given, seed the brackets.
std::vector<double> lowest_by_counting(const MultiCounter& count_below, int count, double lo,
                                       double hi, double rel_width,
                                       const std::vector<double>* hints = nullptr);

}  // namespace hypoindex
