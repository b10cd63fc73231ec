#pragma once

// Right pseudoinverse and null-space basis of wide, full-row-rank matrices.

#include <Eigen/Dense>

#include "cstrans/errors.hpp"

namespace cstrans {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixX = Eigen::MatrixXd;
using VectorX = Eigen::VectorXd;

/// Reciprocal condition above which the Cholesky route is trusted.
inline constexpr double kCholeskyRcond = 1e-8;
/// Condition number of P P^T at which the matrix is declared singular.
inline constexpr double kSingularCondition = 1e12;

/// Solver for the normal system (P P^T) y = b of a full-row-rank P.
/// Uses Cholesky when well conditioned and falls back to an SVD of P P^T.
template <typename Scalar>
class RowSpaceSolver {
 public:
  template <typename Derived>
  explicit RowSpaceSolver(const Eigen::MatrixBase<Derived>& p) : p_(p) {
    const MatX<Scalar> gram = p_ * p_.transpose();
    llt_.compute(gram);
    if (llt_.info() == Eigen::Success && llt_.rcond() > Scalar(kCholeskyRcond)) return;
    use_svd_ = true;
    svd_.compute(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd_.singularValues();
    if (s.size() == 0 || !(s(0) > Scalar(0)) ||
        s(0) / s(s.size() - 1) >= Scalar(kSingularCondition)) {
      throw SingularConfiguration();
    }
  }

  /// Solves (P P^T) y = b.
  template <typename Derived>
  VecX<Scalar> solve_gram(const Eigen::MatrixBase<Derived>& b) const {
    if (use_svd_) return svd_.solve(b);
    return llt_.solve(b);
  }

  /// Minimum-norm solution of P x = b, i.e. P^T (P P^T)^{-1} b.
  template <typename Derived>
  VecX<Scalar> min_norm(const Eigen::MatrixBase<Derived>& b) const {
    return p_.transpose() * solve_gram(b);
  }

  /// Orthogonal projection onto null(P): (I - P^+ P) g.
  template <typename Derived>
  VecX<Scalar> project_null(const Eigen::MatrixBase<Derived>& g) const {
    return g - min_norm(p_ * g);
  }

  const MatX<Scalar>& matrix() const { return p_; }
  bool used_svd_fallback() const { return use_svd_; }

 private:
  MatX<Scalar> p_;
  Eigen::LLT<MatX<Scalar>> llt_;
  Eigen::JacobiSVD<MatX<Scalar>> svd_;
  bool use_svd_ = false;
};

/// P^+ = P^T (P P^T)^{-1}. Throws SingularConfiguration.
template <typename Derived>
MatX<typename Derived::Scalar> pinv_full_row(const Eigen::MatrixBase<Derived>& p) {
  using S = typename Derived::Scalar;
  RowSpaceSolver<S> solver(p);
  const MatX<S> eye = MatX<S>::Identity(p.rows(), p.rows());
  MatX<S> out(p.cols(), p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) out.col(i) = solver.min_norm(eye.col(i));
  return out;
}

/// Orthonormal basis of null(P) from the SVD, rank cutoff sigma < 1e-9 sigma_max.
/// Exactly cols - rows columns; throws SingularConfiguration when P is rank deficient.
template <typename Derived>
MatX<typename Derived::Scalar> nullspace_basis(const Eigen::MatrixBase<Derived>& p) {
  using S = typename Derived::Scalar;
  const Eigen::Index rows = p.rows();
  const Eigen::Index cols = p.cols();
  if (cols < rows) throw SingularConfiguration("matrix has fewer columns than rows");
  Eigen::JacobiSVD<MatX<S>> svd(p, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const S cutoff = S(1e-9) * s(0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!(s(i) > cutoff)) throw SingularConfiguration("matrix is not full row rank");
  }
  return svd.matrixV().rightCols(cols - rows);
}

}  // namespace cstrans
