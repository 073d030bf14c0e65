#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace hypoindex {

/// Singular triplets of a dense complex matrix, LAPACK divide-and-conquer.
struct SvdTriplets {
  std::vector<double> singular_values;  // descending, all of them
  Eigen::MatrixXcd bottom_left;         // left vectors of the smallest `kept`
  Eigen::MatrixXcd bottom_right;        // right vectors of the smallest `kept`
  int kept = 0;
};

SvdTriplets dense_svd_bottom(const Eigen::MatrixXcd& A, int kept);

/// Golub-Kahan-Lanczos with full reorthogonalization for matrices too large
/// to densify; returns approximate extreme triplets. Exists for the sparse
/// regime (> 20000 unknowns); the dense route is authoritative below that.
SvdTriplets lanczos_svd_bottom(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply,
                               const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& apply_adjoint,
                               int dim, int kept, int max_iter, unsigned seed);

}  // namespace hypoindex
