#pragma once

// Dense log-barrier interior-point method over Hermitian matrix blocks and
// real scalars. Internal to the core library.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "isacbb/hermitian.hpp"

namespace isacbb::detail {

// Real coordinates of an n x n Hermitian matrix: the n diagonal entries, then
// (Re X_pq, Im X_pq) for every p < q.
class HermitianCoords {
 public:
  explicit HermitianCoords(int n);

  int n() const noexcept { return n_; }
  int size() const noexcept { return n_ * n_; }

  Eigen::VectorXd pack(const ComplexMatrix& x) const;
  ComplexMatrix unpack(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  // g such that g . pack(X) == Re tr(G X) for every Hermitian X.
  Eigen::VectorXd trace_gradient(const ComplexMatrix& g) const;
  // H_ij = Re tr(A E_i B E_j) + Re tr(B E_i A E_j) over the coordinate basis.
  Eigen::MatrixXd sandwich(const ComplexMatrix& a, const ComplexMatrix& b) const;

 private:
  struct Entry {
    int row;
    int col;
    Complex value;
  };
  struct Element {
    std::array<Entry, 2> entries;
    int count;
  };
  int n_;
  std::vector<Element> basis_;
};

struct LmiTerm {
  int block;
  double coef;
};

// sum_t coef_t X_{block_t} + x[shift_var] * I  >=  0 (PSD).
struct Lmi {
  std::vector<LmiTerm> terms;
  int shift_var = -1;
};

// -log(offset + slope * x[var]) in the objective.
struct LogTerm {
  int var;
  double offset;
  double slope;
};

struct BarrierProblem {
  int n = 0;
  int blocks = 0;
  int scalars = 0;
  std::vector<Lmi> lmis;
  Eigen::MatrixXd a;  // rows of a x + d >= 0
  Eigen::VectorXd d;
  std::vector<LogTerm> log_terms;
  int inv_trace_block = -1;  // adds inv_trace_coef * tr(X_b^{-1})
  double inv_trace_coef = 0.0;
  Eigen::VectorXd linear_obj;  // empty or dim()
  double obj_const = 0.0;

  int dim() const { return blocks * n * n + scalars; }
  int block_offset(int b) const { return b * n * n; }
  int scalar_index(int s) const { return blocks * n * n + s; }
  // Barrier complexity parameter: sum of LMI orders plus scalar inequalities.
  double barrier_parameter() const {
    return static_cast<double>(lmis.size()) * n + static_cast<double>(a.rows());
  }
};

struct BarrierOptions {
  double tol = 1e-7;     // stop when (barrier parameter)/t <= tol * max(1, |f|)
  double mu = 5.0;       // t multiplier per outer iteration
  double t0 = -1.0;      // <= 0: pick from the gradient balance heuristic
  double centering_tol = 1e-10;  // lambda^2 / 2
  int max_newton = 600;
  int max_centering = 60;  // Newton steps per centering
  int max_outer = 80;
  // Consulted after every Newton step; true ends the run at that iterate.
  std::function<bool(const Eigen::VectorXd&)> accept;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  double gap_bound = 0.0;       // (barrier parameter) / t at the last center
  double last_decrement = 0.0;  // lambda^2 / 2 at exit
  double t = 0.0;
  int newton_steps = 0;
  int outer_iterations = 0;
  bool converged = false;
  bool stopped_early = false;
};

class BarrierSolver {
 public:
  explicit BarrierSolver(const BarrierProblem& problem);

  bool strictly_feasible(const Eigen::VectorXd& x) const;
  // +inf outside the objective's domain.
  double objective(const Eigen::VectorXd& x) const;

  // Path following from a strictly feasible x0. `stop` is consulted after
  // every centering; returning true ends the run with stopped_early set.
  BarrierResult minimize(
      Eigen::VectorXd x0, const BarrierOptions& opts,
      const std::function<bool(const BarrierResult&)>& stop = {}) const;

  ComplexMatrix block(const Eigen::VectorXd& x, int b) const;
  ComplexMatrix lmi_matrix(const Eigen::VectorXd& x, const Lmi& lmi) const;

 private:
  struct Derivatives {
    double f = 0.0;
    double phi = 0.0;
    Eigen::VectorXd gf, gphi;
    Eigen::MatrixXd hf, hphi;
  };
  bool evaluate(const Eigen::VectorXd& x, bool want_derivatives, Derivatives& out) const;
  double merit(const Eigen::VectorXd& x, double t) const;

  const BarrierProblem& p_;
  HermitianCoords coords_;
  // Nonzeros of each scalar inequality row.
  std::vector<std::vector<std::pair<int, double>>> sparse_rows_;
};

enum class InteriorStatus { kFound, kInfeasible, kFailed };

struct InteriorPoint {
  InteriorStatus status = InteriorStatus::kFailed;
  Eigen::VectorXd x;
  double slack = 0.0;  // most negative uniform shift reached
  int newton_steps = 0;
};

// Phase one: minimise a uniform shift tau over all constraints. A negative
// optimum yields a strictly feasible point for `problem`.
InteriorPoint find_interior_point(const BarrierProblem& problem,
                                  const Eigen::VectorXd& guess,
                                  const BarrierOptions& opts);

}  // namespace isacbb::detail
