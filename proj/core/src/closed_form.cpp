#include "isacbb/closed_form.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "isacbb/error.hpp"
#include "isacbb/mer_solver.hpp"

namespace isacbb {

namespace {

double residual_derivative(const ProblemInstance& inst, double gamma) {
  const double c = inst.channel_gain(0);
  const double s2 = inst.sigma_c2;
  const double rest = inst.power() * c - gamma * s2;
  const double a = c * (inst.num_tx - 1);
  const double gs = gamma * s2;
  return inst.rho * s2 * (2.0 * a * a * s2 / (rest * rest * rest) + 2.0 * c * c * s2 / (gs * gs * gs)) +
         c / ((1.0 + gamma) * (1.0 + gamma));
}

double single_user_value(const ProblemInstance& inst, double gamma) {
  const double c = inst.channel_gain(0);
  const double lam1 = gamma * inst.sigma_c2 / c;
  const double rest = (inst.power() - lam1) / (inst.num_tx - 1);
  return -std::log1p(gamma) + inst.rho * (1.0 / lam1 + (inst.num_tx - 1) / rest);
}

double bisect_root(const ProblemInstance& inst, double lo, double hi, double width) {
  for (int it = 0; it < 400 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (single_user_residual(inst, mid) < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    const double d = residual_derivative(inst, x);
    if (!(d > 0.0)) break;
    const double next = x - single_user_residual(inst, x) / d;
    if (next > lo && next < hi) x = next;
  }
  return x;
}

}  // namespace

double single_user_residual(const ProblemInstance& inst, double gamma) {
  const double c = inst.channel_gain(0);
  const double s2 = inst.sigma_c2;
  const double rest = inst.power() * c - gamma * s2;
  const double a = c * (inst.num_tx - 1);
  const double gs = gamma * s2;
  return inst.rho * s2 * (a * a / (rest * rest) - c * c / (gs * gs)) - c / (1.0 + gamma);
}

double single_user_gamma(const ProblemInstance& inst) {
  inst.validate();
  if (inst.num_users != 1) throw Error(ErrorCode::kInvalidArgument, "single-user solver needs K = 1");
  const double top = inst.max_sinr(0);
  if (inst.num_tx == 1) return top;

  // Scan for sign changes; the ends behave like -inf and +inf.
  constexpr int kScan = 10000;
  std::vector<std::pair<double, double>> brackets;
  double prev_x = 0.0;
  bool prev_neg = true;
  for (int i = 1; i <= kScan + 1; ++i) {
    const double x = i <= kScan ? top * i / (kScan + 1.0) : top;
    const bool neg = i <= kScan ? single_user_residual(inst, x) < 0.0 : false;
    if (prev_neg && !neg) brackets.emplace_back(prev_x, x);
    prev_x = x;
    prev_neg = neg;
  }
  if (brackets.empty()) {
    throw Error(ErrorCode::kRootNotBracketed, "no sign change of the single-user stationarity equation");
  }
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_value = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : brackets) {
    const double g = bisect_root(inst, lo, hi, 1e-12 * std::min(1.0, top));
    const double v = single_user_value(inst, g);
    if (v < best_value) {
      best_value = v;
      best = g;
    }
  }
  return best;
}

BeamformingSolution solve_single_user(const ProblemInstance& inst) {
  const double gamma = single_user_gamma(inst);
  const int n = inst.num_tx;
  const double c = inst.channel_gain(0);
  const double p = inst.power();
  const double lam1 = n == 1 ? p : gamma * inst.sigma_c2 / c;
  const double rest = n == 1 ? 0.0 : (p - lam1) / (n - 1);

  const ComplexVector u1 = inst.channels[0] / std::sqrt(c);
  ComplexMatrix basis(n, 1);
  basis.col(0) = u1;
  const ComplexMatrix comp = orthonormal_complement(basis);
  ComplexMatrix rx = lam1 * u1 * u1.adjoint();
  for (Eigen::Index i = 0; i < comp.cols(); ++i) rx += rest * comp.col(i) * comp.col(i).adjoint();

  BeamformingSolution sol;
  sol.rx = HermitianMatrix(rx);
  sol.w.push_back(HermitianMatrix(lam1 * u1 * u1.adjoint()));
  sol.gamma.push_back(gamma);
  return sol;
}

bool check_orthogonal(const ProblemInstance& inst, double tol) {
  for (int i = 0; i < inst.num_users; ++i) {
    for (int j = i + 1; j < inst.num_users; ++j) {
      const auto& hi = inst.channels.at(i);
      const auto& hj = inst.channels.at(j);
      const double r = std::abs(hi.dot(hj)) / (hi.norm() * hj.norm());
      if (!(r <= tol)) return false;
    }
  }
  return true;
}

BeamformingSolution solve_orthogonal_case(const ProblemInstance& inst) {
  return solve_orthogonal(inst);
}

}  // namespace isacbb
