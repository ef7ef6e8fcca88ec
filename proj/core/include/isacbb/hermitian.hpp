#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace isacbb {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Dense complex Hermitian matrix. Every constructor reads only the upper
/// triangle of its argument and mirrors it, so A(i,j) == conj(A(j,i)) holds
/// bit-for-bit and the diagonal is exactly real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& upper);

  static HermitianMatrix zero(Eigen::Index n);
  static HermitianMatrix identity(Eigen::Index n);
  static HermitianMatrix diagonal(const Eigen::VectorXd& d);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const ComplexMatrix& dense() const noexcept { return m_; }

  double trace() const;
  /// Re tr(this * other); exact for Hermitian pairs.
  double trace_product(const HermitianMatrix& other) const;
  /// x^H A x (real for Hermitian A).
  double quadratic_form(const ComplexVector& x) const;
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator-=(const HermitianMatrix& o);

  /// U A U^H for a square (usually unitary) U.
  HermitianMatrix congruence(const ComplexMatrix& u) const;

 private:
  ComplexMatrix m_;
};

inline HermitianMatrix operator*(double s, const HermitianMatrix& a) {
  return a * s;
}

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
struct EigenDecomposition {
  Eigen::VectorXd values;
  ComplexMatrix vectors;

  HermitianMatrix reconstruct() const;
};

struct JacobiOptions {
  int max_sweeps = 100;
  double off_diagonal_tol = 1e-15;  // relative to the Frobenius norm
};

/// h h^H.
HermitianMatrix outer(const ComplexVector& h);

/// Cyclic Jacobi eigensolver with complex plane rotations. Throws
/// ErrorCode::kNonConvergence after max_sweeps sweeps.
EigenDecomposition eig(const HermitianMatrix& a, const JacobiOptions& opts = {});

double min_eigenvalue(const HermitianMatrix& a);

inline constexpr double kDefaultPsdTol = 1e-9;

/// Returns F (n x r) with F F^H ~= A, keeping only eigenvalues above tol.
/// Eigenvalues in [-tol, tol] are clipped to zero; anything below -tol raises
/// ErrorCode::kNotPsd.
ComplexMatrix psd_factor(const HermitianMatrix& a, double tol = kDefaultPsdTol);

/// [[Re A, -Im A], [Im A, Re A]].
Eigen::MatrixXd real_embed(const HermitianMatrix& a);

/// Inverse of a positive definite matrix via Cholesky. Throws
/// ErrorCode::kSingularCovariance if A is not numerically positive definite.
HermitianMatrix inverse_pd(const HermitianMatrix& a);

/// Orthonormal completion: returns an n x (n - m) matrix whose columns span the
/// orthogonal complement of the (orthonormal) columns of q. Gram-Schmidt over
/// the standard basis, taking the candidate with the largest residual first.
ComplexMatrix orthonormal_complement(const ComplexMatrix& q);

}  // namespace isacbb
