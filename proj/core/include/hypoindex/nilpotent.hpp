#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hypoindex/rational.hpp"

namespace hypoindex {

/// Graded nilpotent Lie algebra presented by a weighted basis and exact
/// rational structure constants. Antisymmetry, the Jacobi identity and the
/// grading are verified in exact arithmetic at construction.
class GradedNilpotentLieAlgebra {
 public:
  struct Generator {
    std::string name;
    int weight = 1;
  };

  GradedNilpotentLieAlgebra(std::vector<Generator> basis,
                            std::map<std::pair<int, int>, std::map<int, Rational>> brackets);

  int dimension() const { return static_cast<int>(basis_.size()); }
  const std::vector<Generator>& basis() const { return basis_; }

  /// [e_i, e_j] as a sparse coordinate vector.
  std::map<int, Rational> bracket(int i, int j) const;

  void verify_jacobi() const;   // throws std::logic_error on failure
  void verify_grading() const;  // c_{ij}^l != 0 only when w_l = w_i + w_j

 private:
  std::vector<Generator> basis_;
  // stored for i < j; antisymmetry supplies the rest
  std::map<std::pair<int, int>, std::map<int, Rational>> brackets_;
};

/// The model algebra at a vanishing point: basis {d_x (weight 1)} together
/// with {x^i d_{y_l} (weight k+1-i)} for 0 <= i <= k, 1 <= l <= n, and
/// relations [d_x, x^i d_{y_l}] = i x^{i-1} d_{y_l}. Dimension 1 + n(k+1).
/// Basis order: index 0 is d_x; x^i d_{y_l} sits at 1 + i*n + (l-1).
GradedNilpotentLieAlgebra build_model_gr(int k, int n);

/// Linear functional on the model algebra. coords(0) is eta (dual of d_x),
/// coords(1 + i*n + (l-1)) is xi_{i,l}.
struct Covector {
  Eigen::VectorXd coords;

  static Covector zero(const GradedNilpotentLieAlgebra& alg);
  double eta() const { return coords(0); }
  double xi(int i, int l, int n) const { return coords(1 + i * n + (l - 1)); }
  double& xi(int i, int l, int n) { return coords(1 + i * n + (l - 1)); }
};

/// B_xi(X, Y) = xi([X, Y]) as an exactly antisymmetric real matrix.
Eigen::MatrixXd coadjoint_form(const GradedNilpotentLieAlgebra& alg, const Covector& xi);

/// Coadjoint-orbit dimension through xi = numerical rank of B_xi
/// (singular values above 1e-10 times the largest; even by antisymmetry).
/// Throws RankAmbiguous when a singular value falls within a factor 10 of
/// the rank threshold.
int orbit_dimension(const GradedNilpotentLieAlgebra& alg, const Covector& xi);

enum class MembershipKind { Member, MemberDegenerate, NonMember };

struct MembershipResult {
  MembershipKind kind = MembershipKind::NonMember;
  double a = 0;        // Member: xi_{i,l} = a^i b_l
  Eigen::VectorXd b;   // both member branches
};

/// Characteristic-set membership of a covector on the model algebra:
/// either xi_{i,l} = a^i b_l for some a in R, b in R^n, or xi vanishes below
/// level k with xi_{k,.} = b free (eta is unconstrained in both branches).
MembershipResult characteristic_membership(int k, int n, const Covector& xi, double tol = 1e-9);

struct TheoremBReport {
  int k = 0, n = 0;
  int samples = 0;
  int bound = 0;  // 2 * dim M = 2 * (n + 1)
  int max_orbit_dimension = 0;
  bool all_within_bound = false;
  bool all_even = false;
  std::map<int, int> orbit_dimension_histogram;
  int non_characteristic_examined = 0;
  int non_characteristic_within_bound = 0;
  int non_characteristic_found = 0;  // draws the membership solver rejected
};

/// Samples characteristic covectors (both branches) and checks the orbit
/// bound dim <= 2 dim(M); random non-characteristic covectors are reported
/// alongside, exhibiting that the bound alone does not cut out the
/// characteristic set.
TheoremBReport verify_theorem_b(int k, int n, int samples, unsigned seed = 7,
                                int workers = 1);

}  // namespace hypoindex
