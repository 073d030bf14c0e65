#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hypoindex {

enum class Family { A, AEven, B };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// One-dimensional self-adjoint model operator attached to a zero of f:
///   A, A-even:  base  -d^2/dz^2 + c^2 z^{2k}   (order 2)
///   B:          base   d^4/dz^4 + c^2 z^{2k}   (order 4)
/// raised to the family's power ((k+1)/2, k+1, (k+2)/4 respectively).
struct ModelOperatorSpec {
  Family family = Family::A;
  int k = 1;
  double c = 1.0;

  int power() const;
  int base_order() const;           // 2 or 4
  void validate() const;            // parity constraints on k
};

/// Eigenvalue list with per-entry error bounds and the two-method audit trail.
struct Spectrum {
  std::vector<double> eigenvalues;   // ascending
  std::vector<double> error_bounds;  // per entry, absolute
  double truncation_bound = 0;       // complete below this magnitude
  double method_agreement = 0;       // max |finite difference - oscillator basis|

  // finite-difference snapshot, kept for doubling audits
  std::vector<double> fd_values;
  int fd_grid = 0;
  double fd_half_width = 0;
  int galerkin_basis = 0;
};

struct SolverLimits {
  int fd_initial_grid = 4096;
  int fd_max_grid = 1 << 21;
  int fd_max_grid_order4 = 1 << 17;  // preconditioner conditioning limit
  int galerkin_initial = 64;
  int galerkin_max = 2048;
  std::optional<std::string> cache_dir;  // unset: HYPOINDEX_CACHE_DIR env, if any
};

/// Lowest `count` eigenvalues of the positive base operator, computed by two
/// independent symmetric discretizations (Dirichlet finite differences and a
/// scaled oscillator-eigenbasis Galerkin scheme) with forced agreement.
/// Tolerances are relative with floor 1: entry i is resolved to
/// tol * max(1, |mu_i|). Throws ConvergenceFailure when either ladder stalls
/// or the cross-method discrepancy stays above tolerance.
Spectrum base_spectrum(int k, double c, int order, int count, double tol,
                       const SolverLimits& limits = {});

/// All eigenvalues of the powered symbol with |lambda| <= lambda_cap.
/// Families A and A-even map base eigenvalues mu to (-mu)^power, family B to
/// mu^power; completeness below the cap follows from monotone growth of mu.
Spectrum symbol_spectrum(const ModelOperatorSpec& spec, double lambda_cap, double tol,
                         const SolverLimits& limits = {});

/// Single-discretization solvers, exposed for cross-method property tests.
std::vector<double> fd_lowest_eigenvalues(int k, double c, int order, int count,
                                          double half_width, int grid);
std::vector<double> hermite_lowest_eigenvalues(int k, double c, int order, int count, int basis);

/// Re-solves the finite-difference side at twice the recorded grid and
/// returns the per-entry movement (doubling audit).
std::vector<double> fd_doubling_audit(int k, double c, int order, const Spectrum& s);

}  // namespace hypoindex
