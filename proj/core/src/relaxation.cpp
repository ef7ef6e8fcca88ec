#include "isacbb/relaxation.hpp"

#include <algorithm>
#include <cmath>

#include "isacbb/error.hpp"

namespace isacbb {

bool Box::contains(const std::vector<double>& gamma, double tol) const {
  if (gamma.size() != lo.size()) return false;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (gamma[k] < lo[k] - tol || gamma[k] > hi[k] + tol) return false;
  }
  return true;
}

bool Box::contains(const Box& inner) const {
  if (inner.lo.size() != lo.size()) return false;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (inner.lo[k] < lo[k] || inner.hi[k] > hi[k]) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
  return v;
}

void Box::validate() const {
  if (lo.size() != hi.size()) throw Error(ErrorCode::kShapeMismatch, "box bounds differ in length");
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(lo[k] >= 0.0) || !(hi[k] >= lo[k]) || !std::isfinite(hi[k])) {
      throw Error(ErrorCode::kInvalidArgument, "box interval must satisfy 0 <= lo <= hi");
    }
  }
}

std::array<EnvelopeRow, 4> envelope_constraints(double lo, double hi, double cap) {
  return {{
      {1.0, 0.0, -lo, 0.0},             // a >= lo I
      {1.0, -cap, -hi, hi * cap},       // a >= hi I + (Gamma - hi) cap
      {-1.0, 0.0, hi, 0.0},             // a <= hi I
      {-1.0, cap, lo, -lo * cap},       // a <= (Gamma - lo) cap + lo I
  }};
}

FeasibleSolution repair(const RelaxationSolution& node, const Box& box, const ProblemInstance& inst) {
  FeasibleSolution out;
  out.solution.rx = node.rx;
  out.solution.w = node.w;
  out.relaxed_gamma = node.gamma;
  out.aux = node.aux;
  const double s2 = inst.sigma_c2;
  for (int k = 0; k < inst.num_users; ++k) {
    const HermitianMatrix q = inst.channel_gram(k);
    const double itf = std::max(0.0, q.trace_product(node.rx - node.w[k]));
    const double g = (node.gamma[k] * s2 + box.lo[k] * itf) / (s2 + itf);
    out.solution.gamma.push_back(std::clamp(g, box.lo[k], node.gamma[k]));
  }
  out.value = objective(inst, out.solution);
  return out;
}

int branch_index(const std::vector<double>& relaxed_gamma, const std::vector<double>& repaired_gamma,
                 const Box& box) {
  int best = -1;
  double best_gap = 0.0;
  int widest = -1;
  double widest_w = 0.0;
  for (int k = 0; k < box.size(); ++k) {
    const double w = box.width(k);
    if (!(w > 0.0)) continue;
    if (w > widest_w) {
      widest_w = w;
      widest = k;
    }
    const double gap = (relaxed_gamma[k] - repaired_gamma[k]) / (1.0 + repaired_gamma[k]);
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best >= 0 ? best : widest;
}

int branch_index(const FeasibleSolution& repaired, const Box& box) {
  return branch_index(repaired.relaxed_gamma, repaired.solution.gamma, box);
}

std::pair<Box, Box> bisect(const Box& box, int k) {
  if (k < 0 || k >= box.size()) throw Error(ErrorCode::kInvalidArgument, "branch index out of range");
  const double mid = 0.5 * (box.lo[k] + box.hi[k]);
  Box a = box;
  Box b = box;
  a.hi[k] = mid;
  b.lo[k] = mid;
  return {std::move(a), std::move(b)};
}

Box root_box(const ProblemInstance& inst) {
  Box b;
  for (int k = 0; k < inst.num_users; ++k) {
    b.lo.push_back(0.0);
    b.hi.push_back(inst.max_sinr(k));
  }
  return b;
}

double feasibility_violation(const ProblemInstance& inst, const BeamformingSolution& sol) {
  const double p = inst.power();
  double worst = std::max(0.0, (sol.rx.trace() - p) / p);
  HermitianMatrix rest = sol.rx;
  for (int k = 0; k < inst.num_users; ++k) {
    worst = std::max(worst, -min_eigenvalue(sol.w[k]) / p);
    rest -= sol.w[k];
  }
  worst = std::max(worst, -min_eigenvalue(rest) / p);
  for (int k = 0; k < inst.num_users; ++k) {
    const HermitianMatrix q = inst.channel_gram(k);
    const double sig = q.trace_product(sol.w[k]);
    const double itf = q.trace_product(sol.rx - sol.w[k]);
    const double need = sol.gamma[k] * (itf + inst.sigma_c2);
    const double scale = std::max({sig, need, inst.sigma_c2});
    worst = std::max(worst, (need - sig) / scale);
  }
  return worst;
}

}  // namespace isacbb
