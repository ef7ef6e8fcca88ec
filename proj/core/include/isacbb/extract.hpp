#pragma once

#include "isacbb/model.hpp"

namespace isacbb {

/// W Q W / tr(Q W) with Q = h h^H: rank one, same tr(Q W), and dominated by
/// W in the PSD order. Throws kZeroBeamGain when h^H W h <= 1e-12 ||h||^2 tr W.
HermitianMatrix rank_one_project(const HermitianMatrix& wbar, const ComplexVector& h);

/// Projects every W_k to rank one, fills w_k = (h^H W h)^{-1/2} W h and a
/// factor of the sensing covariance R_X - sum_k W_k. R_X and Gamma are kept.
BeamformingSolution recover_beamformers(const BeamformingSolution& sol, const ProblemInstance& inst);

}  // namespace isacbb
