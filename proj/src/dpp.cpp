#include "rdpp/dpp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rdpp/errors.hpp"

namespace rdpp {

namespace {

constexpr double kSymmetryTol = 1e-8;
constexpr int kMaxGroundSet = 15;

void check_square_symmetric(const Eigen::MatrixXd& M, const char* who) {
  if (M.rows() != M.cols())
    throw ShapeError(std::string(who) + ": matrix must be square, got " +
                     std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  if (M.rows() == 0) return;
  const double skew = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (skew > kSymmetryTol)
    throw SymmetryError(std::string(who) + ": matrix is not symmetric, max|M - M^T| = " +
                        std::to_string(skew));
}

}  // namespace

Eigen::MatrixXd build_l(const Eigen::VectorXd& q, const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols())
    throw ShapeError("build_l: S must be square, got " + std::to_string(S.rows()) + "x" +
                     std::to_string(S.cols()));
  if (q.size() != S.rows())
    throw ShapeError("build_l: len(q) = " + std::to_string(q.size()) +
                     " does not match dim(S) = " + std::to_string(S.rows()));
  return (q * q.transpose()).cwiseProduct(S);
}

double log_det(const Eigen::MatrixXd& M, double eps) {
  check_square_symmetric(M, "log_det");
  const Eigen::Index n = M.rows();
  if (n == 0) return 0.0;

  Eigen::MatrixXd A = M;
  A.diagonal().array() += eps;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    return -std::numeric_limits<double>::infinity();

  double sum = 0.0;
  const Eigen::VectorXd d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i) <= 0.0) return -std::numeric_limits<double>::infinity();
    sum += std::log(d(i));
  }
  return sum;
}

Eigen::MatrixXd ridge_inverse(const Eigen::MatrixXd& L, double eps) {
  check_square_symmetric(L, "ridge_inverse");
  const Eigen::Index n = L.rows();
  if (n == 0) return Eigen::MatrixXd(0, 0);

  Eigen::MatrixXd A = L;
  A.diagonal().array() += eps;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw SingularityError("ridge_inverse: LDLT factorization failed with eps = " +
                           std::to_string(eps));
  Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  if (!inv.allFinite())
    throw SingularityError("ridge_inverse: matrix is singular even after the eps ridge");
  inv = ((inv + inv.transpose()) * 0.5).eval();
  return inv;
}

Eigen::MatrixXd inverse_sign_matrix(const Eigen::MatrixXd& L, double eps, double tol) {
  const Eigen::MatrixXd inv = ridge_inverse(L, eps);
  Eigen::MatrixXd signs = Eigen::MatrixXd::Zero(inv.rows(), inv.cols());
  for (Eigen::Index i = 0; i < inv.rows(); ++i)
    for (Eigen::Index j = 0; j < inv.cols(); ++j) {
      if (inv(i, j) > tol)
        signs(i, j) = 1.0;
      else if (inv(i, j) < -tol)
        signs(i, j) = -1.0;
    }
  return signs;
}

double dpp_log_prob(const Eigen::MatrixXd& L_full, const SubsetIndex& subset) {
  check_square_symmetric(L_full, "dpp_log_prob");
  const Eigen::Index n = L_full.rows();
  if (n > kMaxGroundSet)
    throw CapacityError("dpp_log_prob: ground set of " + std::to_string(n) +
                        " items exceeds the enumerable limit of " +
                        std::to_string(kMaxGroundSet));

  int prev = -1;
  for (int idx : subset.indices) {
    if (idx <= prev)
      throw ShapeError("dpp_log_prob: subset indices must be strictly increasing");
    if (idx < 0 || idx >= static_cast<int>(n))
      throw ShapeError("dpp_log_prob: subset index " + std::to_string(idx) +
                       " out of range for ground set of " + std::to_string(n));
    prev = idx;
  }

  const Eigen::Index k = static_cast<Eigen::Index>(subset.indices.size());
  Eigen::MatrixXd minor(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      minor(a, b) = L_full(subset.indices[static_cast<std::size_t>(a)],
                           subset.indices[static_cast<std::size_t>(b)]);

  return log_det(minor, 0.0) - log_det(L_full, 1.0);
}

}  // namespace rdpp
