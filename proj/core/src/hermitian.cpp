#include "isacbb/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "isacbb/error.hpp"

namespace isacbb {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotPsd: return "NotPSD";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kChannelsNotOrthogonal: return "ChannelsNotOrthogonal";
    case ErrorCode::kZeroBeamGain: return "ZeroBeamGain";
    case ErrorCode::kInfeasibleBox: return "InfeasibleBox";
    case ErrorCode::kRootNotBracketed: return "RootNotBracketed";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRootNotBracketed:
    case ErrorCode::kNonConvergence:
    case ErrorCode::kNumericalFailure:
      return 3;
    default:
      return 2;
  }
}

HermitianMatrix::HermitianMatrix(const ComplexMatrix& upper) {
  if (upper.rows() != upper.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "Hermitian matrix must be square");
  }
  const Eigen::Index n = upper.rows();
  m_.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      m_(i, j) = upper(i, j);
      m_(j, i) = std::conj(upper(i, j));
    }
    m_(j, j) = Complex(upper(j, j).real(), 0.0);
  }
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) {
  return HermitianMatrix(ComplexMatrix::Zero(n, n));
}

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) {
  return HermitianMatrix(ComplexMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::diagonal(const Eigen::VectorXd& d) {
  return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

double HermitianMatrix::trace() const { return m_.diagonal().real().sum(); }

double HermitianMatrix::trace_product(const HermitianMatrix& other) const {
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij).
  return (m_.array() * other.m_.array().conjugate()).real().sum();
}

double HermitianMatrix::quadratic_form(const ComplexVector& x) const {
  return x.dot(m_ * x).real();
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  HermitianMatrix r = *this;
  r += o;
  return r;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  HermitianMatrix r = *this;
  r -= o;
  return r;
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  HermitianMatrix r = *this;
  r.m_ *= s;
  return r;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw Error(ErrorCode::kShapeMismatch, "dimension mismatch in +");
  m_ += o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
  if (o.dim() != dim()) throw Error(ErrorCode::kShapeMismatch, "dimension mismatch in -");
  m_ -= o.m_;
  return *this;
}

HermitianMatrix HermitianMatrix::congruence(const ComplexMatrix& u) const {
  return HermitianMatrix(ComplexMatrix(u * m_ * u.adjoint()));
}

HermitianMatrix EigenDecomposition::reconstruct() const {
  return HermitianMatrix(ComplexMatrix(
      vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint()));
}

HermitianMatrix outer(const ComplexVector& h) {
  return HermitianMatrix(ComplexMatrix(h * h.adjoint()));
}

namespace {

double off_diagonal_norm2(const ComplexMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) s += 2.0 * std::norm(a(i, j));
  }
  return s;
}

// Zeroes a(p,q) with the unitary U = diag(1, e^{-i phi}) * J where J is the
// classical real Jacobi rotation of the phase-corrected 2x2 block.
void rotate(ComplexMatrix& a, ComplexMatrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex upp = c;
  const Complex upq = s;
  const Complex uqp = -s * std::conj(phase);
  const Complex uqq = c * std::conj(phase);

  const Eigen::Index n = a.rows();
  for (Eigen::Index r = 0; r < n; ++r) {
    const Complex arp = a(r, p);
    const Complex arq = a(r, q);
    a(r, p) = arp * upp + arq * uqp;
    a(r, q) = arp * upq + arq * uqq;
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    const Complex bp = a(p, col);
    const Complex bq = a(q, col);
    a(p, col) = std::conj(upp) * bp + std::conj(uqp) * bq;
    a(q, col) = std::conj(upq) * bp + std::conj(uqq) * bq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
  for (Eigen::Index r = 0; r < n; ++r) {
    const Complex vrp = v(r, p);
    const Complex vrq = v(r, q);
    v(r, p) = vrp * upp + vrq * uqp;
    v(r, q) = vrp * upq + vrq * uqq;
  }
}

}  // namespace

EigenDecomposition eig(const HermitianMatrix& a, const JacobiOptions& opts) {
  const Eigen::Index n = a.dim();
  ComplexMatrix work = a.dense();
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  const double norm2 = work.squaredNorm();
  const double target = opts.off_diagonal_tol * opts.off_diagonal_tol * norm2;

  int sweep = 0;
  while (off_diagonal_norm2(work) > target) {
    if (sweep++ >= opts.max_sweeps) {
      std::ostringstream msg;
      msg << "Jacobi eigensolver did not converge after " << opts.max_sweeps
          << " sweeps (n=" << n << ", residual off-diagonal norm "
          << std::sqrt(off_diagonal_norm2(work)) << ")";
      throw Error(ErrorCode::kNonConvergence, msg.str());
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(work, v, p, q);
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return work(i, i).real() > work(j, j).real();
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = work(src, src).real();
    out.vectors.col(k) = v.col(src);
  }
  return out;
}

double min_eigenvalue(const HermitianMatrix& a) {
  const auto d = eig(a);
  return d.values(d.values.size() - 1);
}

ComplexMatrix psd_factor(const HermitianMatrix& a, double tol) {
  const auto d = eig(a);
  const Eigen::Index n = a.dim();
  if (n > 0 && d.values(n - 1) < -tol) {
    std::ostringstream msg;
    msg << "smallest eigenvalue " << d.values(n - 1) << " below -" << tol;
    throw Error(ErrorCode::kNotPsd, msg.str());
  }
  Eigen::Index rank = 0;
  while (rank < n && d.values(rank) > tol) ++rank;
  ComplexMatrix f(n, rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    f.col(k) = d.vectors.col(k) * std::sqrt(d.values(k));
  }
  return f;
}

Eigen::MatrixXd real_embed(const HermitianMatrix& a) {
  const Eigen::Index n = a.dim();
  Eigen::MatrixXd out(2 * n, 2 * n);
  const Eigen::MatrixXd re = a.dense().real();
  const Eigen::MatrixXd im = a.dense().imag();
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return out;
}

HermitianMatrix inverse_pd(const HermitianMatrix& a) {
  Eigen::LLT<ComplexMatrix> llt(a.dense());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance, "matrix is not positive definite");
  }
  // Cholesky happily succeeds on roundoff-sized pivots of a singular matrix.
  const Eigen::VectorXd piv = llt.matrixLLT().diagonal().real().cwiseAbs2();
  const double diag_max = a.dense().diagonal().real().cwiseAbs().maxCoeff();
  if (!(piv.minCoeff() > 64.0 * std::numeric_limits<double>::epsilon() * a.dim() * diag_max)) {
    throw Error(ErrorCode::kSingularCovariance, "matrix is numerically singular");
  }
  return HermitianMatrix(
      ComplexMatrix(llt.solve(ComplexMatrix::Identity(a.dim(), a.dim()))));
}

ComplexMatrix orthonormal_complement(const ComplexMatrix& q) {
  const Eigen::Index n = q.rows();
  const Eigen::Index m = q.cols();
  ComplexMatrix basis(n, n);
  basis.leftCols(m) = q;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = m; k < n; ++k) {
    Eigen::Index best = -1;
    double best_norm = -1.0;
    ComplexVector best_vec;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      ComplexVector e = ComplexVector::Zero(n);
      e(j) = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = 0; c < k; ++c) e -= basis.col(c) * basis.col(c).dot(e);
      }
      const double nrm = e.norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = j;
        best_vec = e;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    basis.col(k) = best_vec / best_norm;
  }
  return basis.rightCols(n - m);
}

}  // namespace isacbb
