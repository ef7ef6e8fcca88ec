#pragma once

#include "isacbb/model.hpp"

namespace isacbb {

/// Stationarity residual of the single-user problem as a function of Gamma:
/// rho sigma^2 ((c (N_t-1))^2 / (P c - Gamma sigma^2)^2 - c^2 / (Gamma sigma^2)^2)
///   - c / (1 + Gamma),  with c = ||h||^2.
/// Increasing on (0, P c / sigma^2), from -inf to +inf.
double single_user_residual(const ProblemInstance& inst, double gamma);

/// Optimal SINR of a single-user instance (root of single_user_residual).
/// Throws kRootNotBracketed if no sign change is found.
double single_user_gamma(const ProblemInstance& inst);

/// Exact optimum for K = 1: W_1 along h, R_X with eigenvector h/||h|| and
/// the remaining power spread evenly over its orthogonal complement.
BeamformingSolution solve_single_user(const ProblemInstance& inst);

/// max_{i != j} |h_i^H h_j| / (||h_i|| ||h_j||) <= tol.
bool check_orthogonal(const ProblemInstance& inst, double tol = 1e-8);

/// Exact optimum for pairwise orthogonal channels; throws
/// kChannelsNotOrthogonal otherwise.
BeamformingSolution solve_orthogonal_case(const ProblemInstance& inst);

}  // namespace isacbb
