#pragma once

#include <string>
#include <vector>

#include "hypoindex/periodic.hpp"
#include "hypoindex/spectra.hpp"

namespace hypoindex {

/// One of the three operator families on the torus:
///   A:      (dx^2 + (f dy)^2)^{(k+1)/2} + g sqrt(-1) dy      (k odd)
///   A-even: (dx^2 + (f dy)^2)^{k+1}     + g dy^2             (any k)
///   B:      (dx^4 - (f dy)^2)^{(k+2)/4} + g sqrt(-1) dy      (4 | k+2)
/// where k is the maximal vanishing order of f.
struct OperatorProblem {
  PeriodicFunction1D f;
  PeriodicFunction2D g;
  Family family = Family::A;
  int l = 1;  // classical order of the perturbation; 1 for A and B, 2 for A-even

  static OperatorProblem make(PeriodicFunction1D f, PeriodicFunction2D g, Family family);
  int perturbation_order() const { return family == Family::AEven ? 2 : 1; }
};

/// Classical principal symbol of the perturbation term as written in D,
/// at base point x, fiber point y, unit fiber covector xi = +-1:
///   families A, B:  sigma(g sqrt(-1) dy) = -xi g(x, y)
///   family A-even:  sigma(g dy^2)        = -g(x, y)      (xi-independent)
Eigen::MatrixXcd classical_fiber_symbol(const OperatorProblem& problem, double x, double y,
                                        int xi);

struct ScalarSymbolCheck {
  bool pass = true;
  std::string reason;
};

/// Injectivity of the one-dimensional-representation symbol for nonzero
/// covectors, checked structurally: (-xi1^2 - xi2^2)^p never vanishes away
/// from 0, and xi1^4 + xi2^2 likewise for family B.
ScalarSymbolCheck scalar_symbol_check(const OperatorProblem& problem);

struct Witness {
  double x = 0, y = 0, lambda = 0;
  int xi = 0;
  double smallest_singular_value = 0;
};

struct HypoCertificate {
  enum class Status { Certified, Violated, Undecided };
  Status status = Status::Undecided;
  double margin = 0;     // min over max-order zeros, contributing lambda, y, xi
  double threshold = 0;  // certified requires margin > threshold
  double scale = 1;      // violation cut is 1e-10 * scale
  std::vector<Witness> witnesses;  // near-violations, worst first

  int k = 0;
  std::vector<ZeroDatum> zeros;            // all zeros of f
  std::vector<ZeroDatum> max_order;        // the zeros the condition lives on
  double sup_norm_bound = 0;               // certified sup bound for g
  double lambda_cap = 0;                   // spectral truncation used
  ScalarSymbolCheck scalar_check;
  std::vector<std::string> notes;

  bool certified() const { return status == Status::Certified; }
};

struct CertifyOptions {
  double spectral_tol = 1e-8;
  double threshold = -1;  // < 0: default 1e-8 * (1 + sup|g|)
  int y_grid = 0;         // 0: automatic from g's fiber bandwidth
  int workers = 1;
  SolverLimits limits;
  std::optional<std::vector<DeclaredZero>> declared_zeros;
  ZeroSearchOptions zero_search;
};

/// Spectral-avoidance certificate: at every maximal-order zero the classical
/// fiber symbol must miss the model operator's spectrum; the margin is the
/// smallest singular value of lambda I - sigma(D') seen anywhere.
HypoCertificate certify(const OperatorProblem& problem, const CertifyOptions& opts = {});

struct LambdaContribution {
  double lambda = 0;
  int multiplicity = 1;
  int winding_plus = 0;   // winding at fiber covector xi = +1
  int winding_minus = 0;  // winding at fiber covector xi = -1
  int contribution = 0;   // (winding_minus - winding_plus) * multiplicity
};

struct PerZeroContribution {
  ZeroDatum zero;
  std::vector<LambdaContribution> lambdas;
  int subtotal = 0;
};

struct IndexReport {
  HypoCertificate certificate;
  std::vector<PerZeroContribution> per_zero;
  long long total_index = 0;
  double spectral_truncation = 0;
  std::vector<std::string> notes;
};

struct IndexOptions {
  double spectral_tol = 1e-8;
  int workers = 1;
  bool truncation_audit = false;  // re-run with doubled cap, verify nothing changes
  SolverLimits limits;
};

/// Evaluates the topological index formula
///   sum over max-order zeros, sum over model eigenvalues lambda of
///   w(det(lambda I + g-symbol at xi=-1 slice)) - w(det(lambda I + ... xi=+1))
/// which reduces in the scalar families to w(lambda + g) - w(lambda - g).
/// The orientation of the fiber covectors is calibrated so the total equals
/// dim ker D - dim ker D* of the compressed operator (see galerkin module).
/// Requires a certified problem; throws CertificateRequired otherwise.
IndexReport topological_index(const OperatorProblem& problem, const HypoCertificate& certificate,
                              const IndexOptions& opts = {});

}  // namespace hypoindex
