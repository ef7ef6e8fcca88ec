#include "barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include <Eigen/Eigenvalues>

namespace isacbb::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

HermitianCoords::HermitianCoords(int n) : n_(n) {
  basis_.reserve(static_cast<std::size_t>(n * n));
  for (int p = 0; p < n; ++p) {
    basis_.push_back({{{{p, p, 1.0}, {0, 0, 0.0}}}, 1});
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      basis_.push_back({{{{p, q, 1.0}, {q, p, 1.0}}}, 2});
      basis_.push_back({{{{p, q, Complex(0.0, 1.0)}, {q, p, Complex(0.0, -1.0)}}}, 2});
    }
  }
}

Eigen::VectorXd HermitianCoords::pack(const ComplexMatrix& x) const {
  Eigen::VectorXd v(size());
  int i = 0;
  for (int p = 0; p < n_; ++p) v(i++) = x(p, p).real();
  for (int p = 0; p < n_; ++p) {
    for (int q = p + 1; q < n_; ++q) {
      v(i++) = x(p, q).real();
      v(i++) = x(p, q).imag();
    }
  }
  return v;
}

ComplexMatrix HermitianCoords::unpack(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  ComplexMatrix x(n_, n_);
  int i = 0;
  for (int p = 0; p < n_; ++p) x(p, p) = v(i++);
  for (int p = 0; p < n_; ++p) {
    for (int q = p + 1; q < n_; ++q) {
      const Complex z(v(i), v(i + 1));
      i += 2;
      x(p, q) = z;
      x(q, p) = std::conj(z);
    }
  }
  return x;
}

Eigen::VectorXd HermitianCoords::trace_gradient(const ComplexMatrix& g) const {
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) {
    const auto& el = basis_[static_cast<std::size_t>(i)];
    Complex s = 0.0;
    for (int e = 0; e < el.count; ++e) {
      const auto& en = el.entries[static_cast<std::size_t>(e)];
      s += g(en.col, en.row) * en.value;
    }
    out(i) = s.real();
  }
  return out;
}

Eigen::MatrixXd HermitianCoords::sandwich(const ComplexMatrix& a,
                                          const ComplexMatrix& b) const {
  const int m = size();
  Eigen::MatrixXd h(m, m);
  for (int i = 0; i < m; ++i) {
    const auto& ei = basis_[static_cast<std::size_t>(i)];
    for (int j = i; j < m; ++j) {
      const auto& ej = basis_[static_cast<std::size_t>(j)];
      Complex s = 0.0;
      for (int x = 0; x < ei.count; ++x) {
        const auto& u = ei.entries[static_cast<std::size_t>(x)];
        for (int y = 0; y < ej.count; ++y) {
          const auto& w = ej.entries[static_cast<std::size_t>(y)];
          const Complex vw = u.value * w.value;
          s += vw * (a(w.col, u.row) * b(u.col, w.row) + b(w.col, u.row) * a(u.col, w.row));
        }
      }
      h(i, j) = s.real();
      h(j, i) = s.real();
    }
  }
  return h;
}

BarrierSolver::BarrierSolver(const BarrierProblem& problem)
    : p_(problem), coords_(problem.n) {
  sparse_rows_.resize(static_cast<std::size_t>(p_.a.rows()));
  for (Eigen::Index r = 0; r < p_.a.rows(); ++r) {
    for (Eigen::Index c = 0; c < p_.a.cols(); ++c) {
      if (p_.a(r, c) != 0.0) sparse_rows_[static_cast<std::size_t>(r)].emplace_back(static_cast<int>(c), p_.a(r, c));
    }
  }
}

ComplexMatrix BarrierSolver::block(const Eigen::VectorXd& x, int b) const {
  return coords_.unpack(x.segment(p_.block_offset(b), coords_.size()));
}

ComplexMatrix BarrierSolver::lmi_matrix(const Eigen::VectorXd& x, const Lmi& lmi) const {
  ComplexMatrix s = ComplexMatrix::Zero(p_.n, p_.n);
  for (const auto& t : lmi.terms) s += t.coef * block(x, t.block);
  if (lmi.shift_var >= 0) s.diagonal().array() += x(lmi.shift_var);
  return s;
}

bool BarrierSolver::evaluate(const Eigen::VectorXd& x, bool want, Derivatives& out) const {
  const int dim = p_.dim();
  const int nn = coords_.size();
  out.f = p_.obj_const;
  out.phi = 0.0;
  if (want) {
    out.gf = Eigen::VectorXd::Zero(dim);
    out.gphi = Eigen::VectorXd::Zero(dim);
    out.hf = Eigen::MatrixXd::Zero(dim, dim);
    out.hphi = Eigen::MatrixXd::Zero(dim, dim);
  }
  const ComplexMatrix eye = ComplexMatrix::Identity(p_.n, p_.n);

  // Scalar inequalities.
  if (p_.a.rows() > 0) {
    const Eigen::VectorXd g = p_.a * x + p_.d;
    if ((g.array() <= 0.0).any()) return false;
    out.phi -= g.array().log().sum();
    if (want) {
      for (std::size_t r = 0; r < sparse_rows_.size(); ++r) {
        const double inv = 1.0 / g(static_cast<Eigen::Index>(r));
        const double inv2 = inv * inv;
        const auto& row = sparse_rows_[r];
        for (const auto& [i, ai] : row) {
          out.gphi(i) -= ai * inv;
          for (const auto& [j, aj] : row) out.hphi(i, j) += inv2 * ai * aj;
        }
      }
    }
  }

  // Linear matrix inequalities.
  for (const auto& lmi : p_.lmis) {
    const ComplexMatrix s = lmi_matrix(x, lmi);
    Eigen::LLT<ComplexMatrix> llt(s);
    if (llt.info() != Eigen::Success) return false;
    const auto diag = llt.matrixLLT().diagonal().real();
    if ((diag.array() <= 0.0).any()) return false;
    out.phi -= 2.0 * diag.array().log().sum();
    if (!want) continue;
    const ComplexMatrix v = llt.solve(eye);
    const Eigen::VectorXd gv = coords_.trace_gradient(v);
    const Eigen::MatrixXd hv = 0.5 * coords_.sandwich(v, v);
    for (const auto& ti : lmi.terms) {
      const int oi = p_.block_offset(ti.block);
      out.gphi.segment(oi, nn) -= ti.coef * gv;
      for (const auto& tj : lmi.terms) {
        const int oj = p_.block_offset(tj.block);
        out.hphi.block(oi, oj, nn, nn) += (ti.coef * tj.coef) * hv;
      }
    }
    if (lmi.shift_var >= 0) {
      const int si = lmi.shift_var;
      const ComplexMatrix v2 = v * v;
      out.gphi(si) -= v.trace().real();
      out.hphi(si, si) += v2.trace().real();
      const Eigen::VectorXd gv2 = coords_.trace_gradient(v2);
      for (const auto& ti : lmi.terms) {
        const int oi = p_.block_offset(ti.block);
        out.hphi.block(oi, si, nn, 1) += ti.coef * gv2;
        out.hphi.block(si, oi, 1, nn) += ti.coef * gv2.transpose();
      }
    }
  }

  // Objective: log terms.
  for (const auto& lt : p_.log_terms) {
    const double arg = lt.offset + lt.slope * x(lt.var);
    if (arg <= 0.0) return false;
    out.f -= std::log(arg);
    if (want) {
      out.gf(lt.var) -= lt.slope / arg;
      out.hf(lt.var, lt.var) += lt.slope * lt.slope / (arg * arg);
    }
  }

  // Objective: c tr(X^{-1}).
  if (p_.inv_trace_block >= 0) {
    const ComplexMatrix xb = block(x, p_.inv_trace_block);
    Eigen::LLT<ComplexMatrix> llt(xb);
    if (llt.info() != Eigen::Success) return false;
    const ComplexMatrix v = llt.solve(eye);
    const double tr = v.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) return false;
    out.f += p_.inv_trace_coef * tr;
    if (want) {
      const ComplexMatrix v2 = v * v;
      const int o = p_.block_offset(p_.inv_trace_block);
      out.gf.segment(o, nn) -= p_.inv_trace_coef * coords_.trace_gradient(v2);
      out.hf.block(o, o, nn, nn) += p_.inv_trace_coef * coords_.sandwich(v, v2);
    }
  }

  if (p_.linear_obj.size() == dim) {
    out.f += p_.linear_obj.dot(x);
    if (want) out.gf += p_.linear_obj;
  }
  return std::isfinite(out.f) && std::isfinite(out.phi);
}

bool BarrierSolver::strictly_feasible(const Eigen::VectorXd& x) const {
  Derivatives d;
  return evaluate(x, false, d);
}

double BarrierSolver::objective(const Eigen::VectorXd& x) const {
  Derivatives d;
  return evaluate(x, false, d) ? d.f : kInf;
}

double BarrierSolver::merit(const Eigen::VectorXd& x, double t) const {
  Derivatives d;
  if (!evaluate(x, false, d)) return kInf;
  return t * d.f + d.phi;
}

BarrierResult BarrierSolver::minimize(
    Eigen::VectorXd x, const BarrierOptions& opts,
    const std::function<bool(const BarrierResult&)>& stop) const {
  BarrierResult res;
  const double m = p_.barrier_parameter();
  const int dim = p_.dim();

  Derivatives d;
  if (!evaluate(x, true, d)) {
    res.x = std::move(x);
    return res;
  }

  double t = opts.t0;
  if (!(t > 0.0)) {
    // Pick t so that t*grad f and grad phi balance in the phi-Hessian norm.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(d.hphi + 1e-12 * Eigen::MatrixXd::Identity(dim, dim));
    const Eigen::VectorXd hf = ldlt.solve(d.gf);
    const double num = -hf.dot(d.gphi);
    const double den = hf.dot(d.gf);
    t = (den > 0.0 && num > 0.0) ? num / den : m / std::max(1.0, std::abs(d.f));
    t = std::clamp(t, 1e-4, 1e4);
  }

  std::optional<BarrierResult> centred;
  for (res.outer_iterations = 0; res.outer_iterations < opts.max_outer; ++res.outer_iterations) {
    // Centering by damped Newton.
    double decrement = kInf;
    for (int inner = 0; inner < opts.max_centering; ++inner) {
      if (res.newton_steps >= opts.max_newton) break;
      if (!evaluate(x, true, d)) break;
      const Eigen::VectorXd grad = t * d.gf + d.gphi;
      Eigen::MatrixXd hess = t * d.hf + d.hphi;
      Eigen::LLT<Eigen::MatrixXd> llt(hess);
      double reg = 0.0;
      const double scale = std::max(1e-300, hess.diagonal().cwiseAbs().maxCoeff());
      while (llt.info() != Eigen::Success) {
        reg = (reg == 0.0) ? 1e-14 * scale : reg * 100.0;
        if (reg > scale) break;
        llt.compute(hess + reg * Eigen::MatrixXd::Identity(dim, dim));
      }
      if (llt.info() != Eigen::Success) break;
      const Eigen::VectorXd step = -llt.solve(grad);
      const double lambda2 = -grad.dot(step);
      ++res.newton_steps;
      decrement = 0.5 * std::max(lambda2, 0.0);
      if (decrement <= opts.centering_tol || !std::isfinite(lambda2)) break;

      // Largest step keeping the scalar inequalities strictly positive.
      double alpha = 1.0;
      if (p_.a.rows() > 0) {
        const Eigen::VectorXd g = p_.a * x + p_.d;
        const Eigen::VectorXd dg = p_.a * step;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
          if (dg(i) < 0.0) alpha = std::min(alpha, -0.99 * g(i) / dg(i));
        }
      }
      const double f0 = t * d.f + d.phi;
      const double slope = grad.dot(step);
      bool accepted = false;
      double f1 = f0;
      for (int bt = 0; bt < 80; ++bt) {
        const Eigen::VectorXd trial = x + alpha * step;
        f1 = merit(trial, t);
        if (f1 <= f0 + 1e-4 * alpha * slope + 1e-13 * std::abs(f0)) {
          x = trial;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      if (opts.accept && opts.accept(x)) {
        res.t = t;
        res.last_decrement = decrement;
        res.gap_bound = m / t;
        res.objective = objective(x);
        res.x = x;
        res.stopped_early = true;
        return res;
      }
      // Progress below roundoff: as centred as this precision allows.
      if (decrement <= 1e-6 && f0 - f1 <= 1e-13 * std::max(1.0, std::abs(f0))) break;
    }

    res.t = t;
    res.last_decrement = decrement;
    res.gap_bound = m / t;
    res.objective = objective(x);
    res.x = x;
    if (stop && stop(res)) {
      res.stopped_early = true;
      return res;
    }
    if (decrement > 1e-3 || res.newton_steps >= opts.max_newton) {
      // Centering broke down. Fall back to the last point that was centred,
      // whose gap bound is still valid, only looser.
      if (centred) return *centred;
      res.converged = false;
      return res;
    }
    centred = res;
    if (res.gap_bound <= opts.tol * std::max(1.0, std::abs(res.objective))) {
      res.converged = true;
      return res;
    }
    t *= opts.mu;
  }
  return res;
}

InteriorPoint find_interior_point(const BarrierProblem& problem,
                                  const Eigen::VectorXd& guess,
                                  const BarrierOptions& opts) {
  BarrierProblem aux;
  aux.n = problem.n;
  aux.blocks = problem.blocks;
  aux.scalars = problem.scalars + 1;
  const int dim = aux.dim();
  const int tau = dim - 1;
  aux.lmis = problem.lmis;
  for (auto& lmi : aux.lmis) lmi.shift_var = tau;
  aux.a = Eigen::MatrixXd::Zero(problem.a.rows(), dim);
  aux.a.leftCols(problem.dim()) = problem.a;
  aux.a.col(tau).setOnes();
  aux.d = problem.d;
  aux.linear_obj = Eigen::VectorXd::Zero(dim);
  aux.linear_obj(tau) = 1.0;

  BarrierSolver base(problem);
  double violation = 0.0;
  if (problem.a.rows() > 0) {
    violation = std::max(violation, -(problem.a * guess + problem.d).minCoeff());
  }
  for (const auto& lmi : problem.lmis) {
    const ComplexMatrix s = base.lmi_matrix(guess, lmi);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s, Eigen::EigenvaluesOnly);
    violation = std::max(violation, -es.eigenvalues().minCoeff());
  }

  Eigen::VectorXd x0(dim);
  x0.head(problem.dim()) = guess;
  x0(tau) = 1.5 * violation + 0.05;

  InteriorPoint out;
  BarrierSolver solver(aux);
  if (!solver.strictly_feasible(x0)) {
    out.status = InteriorStatus::kFailed;
    return out;
  }
  const double m = aux.barrier_parameter();
  // Only a sign matters here, so centre loosely and raise t aggressively;
  // the infeasibility test widens the duality gap to cover inexact centres.
  BarrierOptions o = opts;
  o.tol = 1e-12;
  o.mu = 20.0;
  o.centering_tol = 1e-3;
  o.max_outer = 60;
  bool infeasible = false;
  auto stop = [&](const BarrierResult& r) {
    const double tau_now = r.x(tau);
    if (tau_now < 0.0) return true;
    if (tau_now - 4.0 * m / r.t > 0.0) {
      infeasible = true;
      return true;
    }
    return false;
  };
  o.accept = [tau](const Eigen::VectorXd& x) { return x(tau) < 0.0; };
  const auto res = solver.minimize(x0, o, stop);
  out.newton_steps = res.newton_steps;
  out.slack = res.x.size() == dim ? res.x(tau) : 0.0;
  if (res.x.size() == dim && res.x(tau) < 0.0) {
    out.status = InteriorStatus::kFound;
    out.x = res.x.head(problem.dim());
    return out;
  }
  // No negative shift reached: either certified infeasible or an empty
  // interior at working precision.
  out.status = (infeasible || res.converged) ? InteriorStatus::kInfeasible
                                             : InteriorStatus::kFailed;
  return out;
}

}  // namespace isacbb::detail
