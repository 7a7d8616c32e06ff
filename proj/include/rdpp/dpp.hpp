#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rdpp {

/// Quality/similarity decomposition of an L-ensemble over a sampled set.
struct EnsembleMatrices {
  Eigen::VectorXd q;      ///< per-caption quality, CIDEr units (0..10)
  Eigen::MatrixXd S;      ///< pairwise similarity, unit diagonal
  Eigen::MatrixXd L;      ///< L_ij = q_i * s_ij * q_j
  Eigen::MatrixXd signs;  ///< entries in {-1, 0, +1}
  double eps = 1e-6;      ///< ridge added before inversion
};

/// Sorted, distinct positions into a ground set.
struct SubsetIndex {
  std::vector<int> indices;
};

/// L = q^T q (elementwise) S. Throws ShapeError on dimension mismatch.
Eigen::MatrixXd build_l(const Eigen::VectorXd& q, const Eigen::MatrixXd& S);

/// log det(M + eps*I) via a symmetric (LDLT) factorization.
///
/// Returns -infinity when the ridged matrix is singular or indefinite.
/// A 0x0 matrix has determinant 1, so the result is 0.
/// Throws SymmetryError when max|M - M^T| > 1e-8, ShapeError if not square.
double log_det(const Eigen::MatrixXd& M, double eps = 0.0);

/// Inverse of (L + eps*I), symmetrized after the solve.
/// Throws SingularityError when the factorization fails even with the ridge.
Eigen::MatrixXd ridge_inverse(const Eigen::MatrixXd& L, double eps);

/// Signs of the entries of (L + eps*I)^-1: +1 above tol, -1 below -tol, else 0.
Eigen::MatrixXd inverse_sign_matrix(const Eigen::MatrixXd& L, double eps = 1e-6,
                                    double tol = 1e-12);

/// Exact log P(subset) = log det(L_X) - log det(L + I) for a small ground set.
/// Throws CapacityError when the ground set exceeds 15 items.
double dpp_log_prob(const Eigen::MatrixXd& L_full, const SubsetIndex& subset);

}  // namespace rdpp
