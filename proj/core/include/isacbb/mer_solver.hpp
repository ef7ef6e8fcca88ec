#pragma once

#include <vector>

#include "isacbb/box.hpp"
#include "isacbb/model.hpp"

namespace isacbb {

/// One node relaxation: the instance restricted to a SINR box, with the
/// interference caps b_k = P_T ||h_k||^2 kept at their root values.
struct MerProblem {
  const ProblemInstance* instance = nullptr;
  Box box;
  std::vector<double> interference_cap;  // b_k, power units

  static MerProblem make(const ProblemInstance& inst, Box box);
};

struct RelaxationSolution {
  HermitianMatrix rx;
  std::vector<HermitianMatrix> w;
  std::vector<double> gamma;
  std::vector<double> aux;  // a_k, power * SINR units
  double value = 0.0;       // certified lower bound on the box
  double objective = 0.0;   // relaxation objective at (rx, gamma)
  double kkt_residual = 0.0;  // duality measure at exit
  int newton_steps = 0;
};

struct MerOptions {
  double tol = 1e-7;
  double mu = 5.0;
};

/// Solves the McCormick relaxation on p.box. `warm` (a parent node's
/// solution) only seeds the starting point. Throws kInfeasibleBox when the
/// box admits no strictly feasible point, kNumericalFailure otherwise.
RelaxationSolution solve_mer(const MerProblem& p, const MerOptions& opts = {},
                             const RelaxationSolution* warm = nullptr);

/// Optimal eigenvalue allocation for pairwise orthogonal channels. Returns
/// the assembled covariance solution (W_k rank one along h_k, zero
/// interference). Throws kChannelsNotOrthogonal.
BeamformingSolution solve_orthogonal(const ProblemInstance& inst, double tol = 1e-8);

}  // namespace isacbb
