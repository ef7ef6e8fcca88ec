#include <algorithm>
#include <cmath>
#include <vector>

#include "isacbb/closed_form.hpp"
#include "isacbb/error.hpp"
#include "isacbb/mer_solver.hpp"

namespace isacbb {

namespace {

// Root in lambda of c / (1 + c lambda) + rho / lambda^2 = mu; the left side
// decreases from +inf to 0.
double user_eigenvalue(double c, double rho, double mu) {
  auto f = [&](double lam) { return c / (1.0 + c * lam) + rho / (lam * lam) - mu; };
  double lo = std::sqrt(rho / mu);  // f(lo) >= 0
  double hi = lo;
  while (f(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BeamformingSolution solve_orthogonal(const ProblemInstance& inst, double tol) {
  inst.validate();
  if (!check_orthogonal(inst, tol)) {
    throw Error(ErrorCode::kChannelsNotOrthogonal, "channels are not pairwise orthogonal");
  }
  const int users = inst.num_users;
  const int n = inst.num_tx;
  if (users > n) throw Error(ErrorCode::kChannelsNotOrthogonal, "more orthogonal users than antennas");
  const double p = inst.power();
  const double rho = inst.rho;
  std::vector<double> c(users);
  for (int k = 0; k < users; ++k) c[k] = inst.channel_gain(k) / inst.sigma_c2;

  // Dual bisection on the power multiplier: total eigenvalue mass falls as
  // mu grows.
  auto allocate = [&](double mu, std::vector<double>& lam) {
    lam.assign(n, std::sqrt(rho / mu));
    double total = 0.0;
    for (int k = 0; k < users; ++k) lam[k] = user_eigenvalue(c[k], rho, mu);
    for (double l : lam) total += l;
    return total;
  };
  std::vector<double> lam;
  double mu_lo = 1.0;
  double mu_hi = 1.0;
  while (allocate(mu_lo, lam) < p) mu_lo *= 0.5;
  while (allocate(mu_hi, lam) > p) mu_hi *= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = std::sqrt(mu_lo * mu_hi);
    if (mid <= mu_lo || mid >= mu_hi) break;
    (allocate(mid, lam) > p ? mu_lo : mu_hi) = mid;
  }
  double total = allocate(std::sqrt(mu_lo * mu_hi), lam);
  for (double& l : lam) l *= p / total;

  ComplexMatrix u(n, users);
  for (int k = 0; k < users; ++k) u.col(k) = inst.channels[k].normalized();
  const ComplexMatrix comp = orthonormal_complement(u);

  BeamformingSolution sol;
  ComplexMatrix rx = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < users; ++k) {
    const ComplexMatrix wk = lam[k] * u.col(k) * u.col(k).adjoint();
    rx += wk;
    sol.w.emplace_back(wk);
    sol.gamma.push_back(lam[k] * c[k]);
  }
  for (Eigen::Index i = 0; i < comp.cols(); ++i) {
    rx += lam[users + i] * comp.col(i) * comp.col(i).adjoint();
  }
  sol.rx = HermitianMatrix(rx);
  return sol;
}

}  // namespace isacbb
