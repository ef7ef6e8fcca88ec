#include "isacbb/extract.hpp"

#include <cmath>

#include "isacbb/error.hpp"

namespace isacbb {

namespace {

// Returns W h and h^H W h after the degeneracy check.
std::pair<ComplexVector, double> beam_direction(const HermitianMatrix& wbar, const ComplexVector& h) {
  if (wbar.dim() != h.size()) throw Error(ErrorCode::kShapeMismatch, "beam and channel sizes differ");
  const ComplexVector wh = wbar.dense() * h;
  const double gain = h.dot(wh).real();
  const double floor = 1e-12 * h.squaredNorm() * std::abs(wbar.trace());
  if (!(gain > floor) || !(gain > 0.0)) {
    throw Error(ErrorCode::kZeroBeamGain, "covariance has no gain along the channel");
  }
  return {wh, gain};
}

}  // namespace

HermitianMatrix rank_one_project(const HermitianMatrix& wbar, const ComplexVector& h) {
  const auto [wh, gain] = beam_direction(wbar, h);
  return HermitianMatrix(wh * wh.adjoint() / gain);
}

BeamformingSolution recover_beamformers(const BeamformingSolution& sol, const ProblemInstance& inst) {
  if (static_cast<int>(sol.w.size()) != inst.num_users) {
    throw Error(ErrorCode::kShapeMismatch, "solution user count differs from instance");
  }
  BeamformingSolution out;
  out.rx = sol.rx;
  out.gamma = sol.gamma;
  HermitianMatrix sensing = sol.rx;
  for (int k = 0; k < inst.num_users; ++k) {
    const auto [wh, gain] = beam_direction(sol.w[k], inst.channels[k]);
    const ComplexVector w = wh / std::sqrt(gain);
    out.beamformers.push_back(w);
    out.w.emplace_back(w * w.adjoint());
    sensing -= out.w.back();
  }
  const double tol = kDefaultPsdTol * std::max(1.0, sol.rx.trace());
  out.sensing_factor = psd_factor(sensing, tol);
  return out;
}

}  // namespace isacbb
