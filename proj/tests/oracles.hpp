#pragma once
// Reference computations for tests. Written directly against Eigen and the
// problem definitions so they share no code with the library under test.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "isacbb/model.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Vec random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v;
}

inline Mat random_hermitian(std::mt19937_64& rng, int n) {
  Mat a(n, n);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  return 0.5 * (a + a.adjoint());
}

// Random PSD matrix of the given rank.
inline Mat random_psd(std::mt19937_64& rng, int n, int rank) {
  Mat f(n, rank);
  for (int j = 0; j < rank; ++j) f.col(j) = random_vector(rng, n);
  Mat a = f * f.adjoint();
  return 0.5 * (a + a.adjoint());
}

inline Eigen::VectorXd eigenvalues_desc(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

inline double min_eig(const Mat& a) { return eigenvalues_desc(a).minCoeff(); }

inline double inverse_trace(const Mat& r) {
  const Eigen::VectorXd ev = eigenvalues_desc(r);
  double s = 0.0;
  for (double v : ev) s += 1.0 / v;
  return s;
}

inline double quad(const Mat& a, const Vec& h) { return (h.adjoint() * a * h)(0, 0).real(); }

// SINR from beamformers and the sensing factor.
inline double sinr_from_beams(const isacbb::ProblemInstance& inst, const std::vector<Vec>& w,
                              const Mat& wa, int k) {
  const Vec& h = inst.channels[k];
  const double sig = std::norm(h.dot(w[k]));
  double itf = 0.0;
  for (int j = 0; j < static_cast<int>(w.size()); ++j)
    if (j != k) itf += std::norm(h.dot(w[j]));
  for (int j = 0; j < wa.cols(); ++j) itf += std::norm(h.dot(wa.col(j)));
  return sig / (itf + inst.sigma_c2);
}

inline double objective(const isacbb::ProblemInstance& inst, const Mat& rx,
                        const std::vector<double>& gamma) {
  double rate = 0.0;
  for (double g : gamma) rate += std::log(1.0 + g);
  return -rate + inst.rho * inverse_trace(rx);
}

// Root of the single-user stationarity equation by plain bisection on a
// hand-written residual.
inline double single_user_root(const isacbb::ProblemInstance& inst) {
  const double c = inst.channels[0].squaredNorm();
  const double s2 = inst.sigma_c2;
  const double p = std::pow(10.0, inst.power_dbm / 10.0);
  const double nt = inst.num_tx;
  auto f = [&](double g) {
    const double rhs = inst.rho * s2 *
                       (std::pow(c * (nt - 1.0), 2) / std::pow(p * c - g * s2, 2) -
                        c * c / std::pow(g * s2, 2));
    return rhs - c / (1.0 + g);
  };
  double lo = 0.0, hi = p * c / s2;
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Objective of the single-user problem at a given SINR, R_X eigenvalues
// fixed by the power equality.
inline double single_user_value(const isacbb::ProblemInstance& inst, double g) {
  const double c = inst.channels[0].squaredNorm();
  const double p = std::pow(10.0, inst.power_dbm / 10.0);
  const double l1 = g * inst.sigma_c2 / c;
  const double rest = inst.num_tx > 1 ? (inst.num_tx - 1) * (inst.num_tx - 1) / (p - l1) : 0.0;
  return -std::log1p(g) + inst.rho * (1.0 / l1 + rest);
}

// Replaces the channels by a Gram-Schmidt orthogonalised set that keeps
// each channel's norm.
inline void orthogonalize(isacbb::ProblemInstance& inst) {
  const int k = inst.num_users;
  Mat h(inst.num_tx, k);
  for (int j = 0; j < k; ++j) h.col(j) = inst.channels[j];
  Eigen::HouseholderQR<Mat> qr(h);
  const Mat q = qr.householderQ() * Mat::Identity(inst.num_tx, k);
  for (int j = 0; j < k; ++j) inst.channels[j] = q.col(j) * inst.channels[j].norm();
}

}  // namespace oracle
