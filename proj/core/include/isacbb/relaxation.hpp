#pragma once

#include <array>
#include <utility>
#include <vector>

#include "isacbb/box.hpp"
#include "isacbb/mer_solver.hpp"
#include "isacbb/model.hpp"

namespace isacbb {

/// coef_a * a + coef_gamma * Gamma + coef_itf * I + constant >= 0.
struct EnvelopeRow {
  double coef_a = 0.0;
  double coef_gamma = 0.0;
  double coef_itf = 0.0;
  double constant = 0.0;

  double slack(double a, double gamma, double itf) const {
    return coef_a * a + coef_gamma * gamma + coef_itf * itf + constant;
  }
};

/// The four McCormick inequalities for a = Gamma * I over
/// Gamma in [lo, hi], I in [0, cap]: two under-estimators, then two
/// over-estimators.
std::array<EnvelopeRow, 4> envelope_constraints(double lo, double hi, double cap);

/// Feasible point recovered from a node relaxation. solution.gamma holds the
/// repaired SINRs; value is the objective there.
struct FeasibleSolution {
  BeamformingSolution solution;
  std::vector<double> relaxed_gamma;
  std::vector<double> aux;
  double value = 0.0;
};

/// Gamma_hat_k = (Gamma_k sigma^2 + lo_k I_k) / (sigma^2 + I_k), with
/// I_k = tr(Q_k (R_X - W_k)); matrices are kept.
FeasibleSolution repair(const RelaxationSolution& node, const Box& box, const ProblemInstance& inst);

/// argmax_k (Gamma_k - Gamma_hat_k) / (1 + Gamma_hat_k) over intervals of
/// positive width, smallest k on ties. Without a positive gap the widest
/// interval is returned; -1 if every interval is degenerate.
int branch_index(const std::vector<double>& relaxed_gamma, const std::vector<double>& repaired_gamma,
                 const Box& box);
int branch_index(const FeasibleSolution& repaired, const Box& box);

/// Halves interval k at its midpoint.
std::pair<Box, Box> bisect(const Box& box, int k);

/// [0, P_T ||h_k||^2 / sigma_C^2] for every user.
Box root_box(const ProblemInstance& inst);

/// Largest violation of the constraints a repaired point must satisfy:
/// power budget, PSD of W_k and R_X - sum W_k, and the SINR constraints
/// tr(Q_k W_k) >= Gamma_k (tr(Q_k (R_X - W_k)) + sigma^2). Relative to the
/// magnitude of each constraint's terms.
double feasibility_violation(const ProblemInstance& inst, const BeamformingSolution& sol);

}  // namespace isacbb
