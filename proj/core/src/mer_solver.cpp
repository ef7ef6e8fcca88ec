#include "isacbb/mer_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "barrier.hpp"
#include "isacbb/error.hpp"

namespace isacbb {

namespace {

using detail::BarrierOptions;
using detail::BarrierProblem;
using detail::BarrierSolver;
using detail::HermitianCoords;
using detail::InteriorStatus;

// Variable layout of one relaxation in scaled units: block 0 is R/P_T,
// block 1+k is W_k/P_T, then (s_k, z_k) for every user whose interval has
// positive width.
struct Layout {
  int users = 0;
  int n = 0;
  std::vector<int> s_var;  // -1 for fixed-SINR users
  std::vector<int> z_var;
};

struct Builder {
  const ProblemInstance& inst;
  const Box& box;
  HermitianCoords coords;
  Layout layout;
  BarrierProblem bp;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> offsets;
  std::vector<Eigen::VectorXd> g_grad;  // trace gradient of G_k
  std::vector<double> beta;             // tr G_k

  Builder(const ProblemInstance& i, const Box& b) : inst(i), box(b), coords(i.num_tx) {}

  int nn() const { return coords.size(); }

  Eigen::VectorXd zero() const { return Eigen::VectorXd::Zero(bp.dim()); }

  void add_row(Eigen::VectorXd a, double d) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), std::abs(d));
    if (scale > 0.0) {
      a /= scale;
      d /= scale;
    }
    rows.push_back(std::move(a));
    offsets.push_back(d);
  }

  // Coefficients of I~_k = tr(G_k (R - W_k)).
  Eigen::VectorXd interference(int k) const {
    Eigen::VectorXd a = zero();
    a.segment(bp.block_offset(0), nn()) += g_grad[k];
    a.segment(bp.block_offset(1 + k), nn()) -= g_grad[k];
    return a;
  }

  void build() {
    const int users = inst.num_users;
    const double p = inst.power();
    layout.users = users;
    layout.n = inst.num_tx;
    layout.s_var.assign(users, -1);
    layout.z_var.assign(users, -1);
    int scalars = 0;
    for (int k = 0; k < users; ++k) {
      if (box.width(k) > 0.0) {
        layout.s_var[k] = scalars++;
        layout.z_var[k] = scalars++;
      }
    }
    bp.n = inst.num_tx;
    bp.blocks = users + 1;
    bp.scalars = scalars;
    for (int k = 0; k < users; ++k) {
      if (layout.s_var[k] >= 0) {
        layout.s_var[k] = bp.scalar_index(layout.s_var[k]);
        layout.z_var[k] = bp.scalar_index(layout.z_var[k]);
      }
    }

    detail::Lmi coupling;
    coupling.terms.push_back({0, 1.0});
    for (int k = 0; k < users; ++k) coupling.terms.push_back({1 + k, -1.0});
    bp.lmis.push_back(coupling);
    for (int k = 0; k < users; ++k) bp.lmis.push_back({{{1 + k, 1.0}}, -1});

    for (int k = 0; k < users; ++k) {
      const ComplexMatrix g = (p / inst.sigma_c2) * inst.channel_gram(k).dense();
      g_grad.push_back(coords.trace_gradient(g));
      beta.push_back(inst.max_sinr(k));
    }

    // Power budget: 1 - tr R >= 0.
    {
      Eigen::VectorXd a = zero();
      a.segment(0, nn()) = -coords.trace_gradient(ComplexMatrix::Identity(bp.n, bp.n));
      add_row(a, 1.0);
    }

    for (int k = 0; k < users; ++k) {
      const double lo = box.lo[k];
      const double w = box.width(k);
      const Eigen::VectorXd itf = interference(k);
      const Eigen::VectorXd iota = itf / beta[k];
      Eigen::VectorXd signal = zero();
      signal.segment(bp.block_offset(1 + k), nn()) = g_grad[k];

      add_row(iota, 0.0);
      add_row(-iota, 1.0);
      if (layout.s_var[k] < 0) {
        // Fixed SINR: tr(G W) - lo * I~ - lo >= 0.
        add_row(signal - lo * itf, -lo);
        bp.obj_const -= std::log1p(lo);
        continue;
      }
      const int s = layout.s_var[k];
      const int z = layout.z_var[k];
      Eigen::VectorXd e;
      e = zero(); e(z) = 1.0; add_row(e, 0.0);                  // z >= 0
      e = iota; e(z) -= 1.0; add_row(e, 0.0);                   // z <= iota
      e = -iota; e(z) += 1.0; e(s) -= 1.0; add_row(e, 1.0);     // z >= iota + s - 1
      e = zero(); e(s) = 1.0; e(z) = -1.0; add_row(e, 0.0);     // z <= s
      e = zero(); e(s) = 1.0; add_row(e, 0.0);                  // s >= 0
      e = zero(); e(s) = -1.0; add_row(e, 1.0);                 // s <= 1
      e = signal - lo * itf;
      e(z) -= w * beta[k];
      e(s) -= w;
      add_row(e, -lo);                                           // SINR row
      bp.log_terms.push_back({s, 1.0 + lo, w});
    }

    bp.a.resize(static_cast<Eigen::Index>(rows.size()), bp.dim());
    bp.d.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bp.a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      bp.d(static_cast<Eigen::Index>(r)) = offsets[r];
    }
    bp.inv_trace_block = 0;
    bp.inv_trace_coef = inst.rho / p;
  }

  // Matrix part of the start point; scalar part chosen from it.
  Eigen::VectorXd start(const RelaxationSolution* warm) const {
    const int n = bp.n;
    const int users = layout.users;
    const double r0 = 0.9 / n;
    const double c = r0 / (users + 1);
    Eigen::VectorXd x = zero();
    const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
    x.segment(0, nn()) = coords.pack(r0 * eye);
    for (int k = 0; k < users; ++k) {
      const ComplexVector u = inst.channels[k].normalized();
      const ComplexMatrix wk = c * (0.5 * eye + 0.49 * u * u.adjoint());
      x.segment(bp.block_offset(1 + k), nn()) = coords.pack(wk);
    }
    if (warm != nullptr && warm->rx.dim() == n && static_cast<int>(warm->w.size()) == users) {
      const double p = inst.power();
      Eigen::VectorXd hint = zero();
      hint.segment(0, nn()) = coords.pack(warm->rx.dense() / p);
      for (int k = 0; k < users; ++k) {
        hint.segment(bp.block_offset(1 + k), nn()) = coords.pack(warm->w[k].dense() / p);
      }
      x = 0.9 * hint + 0.1 * x;
    }
    // Scalars at the bilinear point, halfway into the attainable range.
    for (int k = 0; k < users; ++k) {
      if (layout.s_var[k] < 0) continue;
      const double itf = interference(k).dot(x);
      const double sig = g_grad[k].dot(x.segment(bp.block_offset(1 + k), nn()));
      const double attainable = sig / (1.0 + itf);
      const double lo = box.lo[k];
      const double w = box.width(k);
      const double top = std::min(attainable, box.hi[k]);
      const double s = top > lo ? 0.5 * (top - lo) / w : 0.5;
      const double iota = std::clamp(itf / beta[k], 0.0, 1.0);
      x(layout.s_var[k]) = s;
      x(layout.z_var[k]) = s * iota;
    }
    return x;
  }
};

}  // namespace

MerProblem MerProblem::make(const ProblemInstance& inst, Box box) {
  MerProblem p;
  p.instance = &inst;
  p.box = std::move(box);
  for (int k = 0; k < inst.num_users; ++k) {
    p.interference_cap.push_back(inst.power() * inst.channel_gain(k));
  }
  return p;
}

RelaxationSolution solve_mer(const MerProblem& p, const MerOptions& opts,
                             const RelaxationSolution* warm) {
  if (p.instance == nullptr) throw Error(ErrorCode::kInvalidArgument, "MER problem without instance");
  const ProblemInstance& inst = *p.instance;
  p.box.validate();
  if (p.box.size() != inst.num_users) {
    throw Error(ErrorCode::kShapeMismatch, "box dimension differs from user count");
  }
  for (int k = 0; k < inst.num_users; ++k) {
    if (p.box.lo[k] > inst.max_sinr(k) * (1.0 + 1e-12)) {
      throw Error(ErrorCode::kInfeasibleBox,
                  "lower SINR bound of user " + std::to_string(k) + " exceeds its maximum");
    }
  }

  Builder b(inst, p.box);
  b.build();
  BarrierSolver solver(b.bp);
  BarrierOptions bo;
  bo.tol = opts.tol;
  bo.mu = opts.mu;

  Eigen::VectorXd x = b.start(warm);
  int phase1_steps = 0;
  if (!solver.strictly_feasible(x)) {
    const auto ip = detail::find_interior_point(b.bp, x, bo);
    phase1_steps = ip.newton_steps;
    if (ip.status == InteriorStatus::kInfeasible) {
      throw Error(ErrorCode::kInfeasibleBox, "no strictly feasible point in the SINR box");
    }
    if (ip.status != InteriorStatus::kFound || !solver.strictly_feasible(ip.x)) {
      throw Error(ErrorCode::kNumericalFailure, "phase one failed to locate an interior point");
    }
    x = ip.x;
  }

  const auto res = solver.minimize(x, bo);
  if (res.x.size() != b.bp.dim() || !solver.strictly_feasible(res.x)) {
    throw Error(ErrorCode::kNumericalFailure, "barrier iterate left the feasible set");
  }
  // An early centre is accepted while its gap stays far below any useful
  // branch-and-bound tolerance.
  const bool usable = res.last_decrement <= 1e-3 &&
                      res.gap_bound <= 1e-4 * std::max(1.0, std::abs(res.objective));
  if (!res.converged && !usable) {
    throw Error(ErrorCode::kNumericalFailure,
                "barrier method stalled at duality measure " + std::to_string(res.gap_bound));
  }

  const double pw = inst.power();
  RelaxationSolution out;
  out.rx = HermitianMatrix(pw * solver.block(res.x, 0));
  for (int k = 0; k < inst.num_users; ++k) {
    out.w.emplace_back(pw * solver.block(res.x, 1 + k));
  }
  for (int k = 0; k < inst.num_users; ++k) {
    const double lo = p.box.lo[k];
    const double w = p.box.width(k);
    const double itf_scaled = b.interference(k).dot(res.x);
    if (b.layout.s_var[k] < 0) {
      out.gamma.push_back(lo);
      out.aux.push_back(inst.sigma_c2 * lo * itf_scaled);
    } else {
      const double s = res.x(b.layout.s_var[k]);
      const double z = res.x(b.layout.z_var[k]);
      out.gamma.push_back(lo + w * s);
      out.aux.push_back(inst.sigma_c2 * (lo * itf_scaled + w * b.beta[k] * z));
    }
  }
  out.objective = res.objective;
  // An inexact centre weakens the dual estimate; widen the gap accordingly.
  const double widen = 1.0 + 2.0 * std::sqrt(2.0 * std::max(res.last_decrement, 0.0));
  out.value = res.objective - res.gap_bound * widen;
  out.kkt_residual = res.gap_bound / std::max(1.0, std::abs(res.objective));
  out.newton_steps = res.newton_steps + phase1_steps;
  return out;
}

}  // namespace isacbb
