#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isacbb/hermitian.hpp"

namespace isacbb {

/// dBm (milliwatt-referenced) to linear power: 30 dBm -> 1000.
double dbm_to_linear(double dbm);

/// Full input of the joint sum-rate / CRB beamforming problem.
struct ProblemInstance {
  int num_users = 0;     // K
  int num_tx = 0;        // N_t
  int num_rx = 16;       // N_r, only scales the reported CRB
  int frame_len = 16;    // L
  double power_dbm = 30.0;
  double sigma_c2 = 1.0;
  double sigma_s2 = 1.0;
  double rho = 1.0;
  std::vector<ComplexVector> channels;  // h_k, length N_t each
  std::uint64_t seed = 0;
  int scenario = 0;  // 0 = user supplied, 1 or 2 = generated

  double power() const { return dbm_to_linear(power_dbm); }
  HermitianMatrix channel_gram(int k) const { return outer(channels.at(k)); }
  double channel_gain(int k) const { return channels.at(k).squaredNorm(); }
  /// P_T ||h_k||^2 / sigma_C^2: the largest SINR user k can reach.
  double max_sinr(int k) const { return power() * channel_gain(k) / sigma_c2; }

  /// Throws ErrorCode::kInvalidArgument on a malformed instance. Returns
  /// non-fatal warnings (e.g. N_t >= N_r).
  std::vector<std::string> validate() const;
};

/// Covariance-level solution, optionally with recovered beamformers.
struct BeamformingSolution {
  HermitianMatrix rx;                  // R_X
  std::vector<HermitianMatrix> w;      // per-user covariances W_k
  std::vector<double> gamma;           // SINR values entering the rate term
  std::vector<ComplexVector> beamformers;     // w_k, empty until extraction
  std::optional<ComplexMatrix> sensing_factor;  // W_A

  bool has_beamformers() const { return !beamformers.empty(); }
};

/// SINR of user k. Uses the beamformer form when beamformers are present,
/// otherwise tr(Q_k W_k) / (tr(Q_k (R_X - W_k)) + sigma_C^2).
double sinr(const ProblemInstance& inst, const BeamformingSolution& sol, int k);

/// sum_k log(1 + Gamma_k) in nats over the solution's Gamma values.
double sum_rate(const ProblemInstance& inst, const BeamformingSolution& sol);

/// sum_k log(1 + sinr_k) evaluated from the matrices themselves.
double achieved_sum_rate(const ProblemInstance& inst, const BeamformingSolution& sol);

/// tr(R_X^{-1}); throws ErrorCode::kSingularCovariance unless R_X is PD.
double inverse_trace(const HermitianMatrix& rx);

/// (sigma_s^2 N_r / L) tr(R_X^{-1}).
double crb(const ProblemInstance& inst, const BeamformingSolution& sol);

/// -sum_rate + rho tr(R_X^{-1}). The CRB scaling is not applied here.
double objective(const ProblemInstance& inst, const BeamformingSolution& sol);

struct ScenarioParams {
  int num_users = 3;
  int num_tx = 6;
  int num_rx = 16;
  int frame_len = 16;
  double power_dbm = 30.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
};

/// i.i.d. CN(0, 1) channel entries.
ProblemInstance gen_scenario1(const ScenarioParams& p);

/// Rayleigh fading with 32.6 + 36.7 log10(d) dB path loss; users equally
/// spaced on [50, 200] m (a single user sits at 50 m).
ProblemInstance gen_scenario2(const ScenarioParams& p);

double path_loss_db(double distance_m);
std::vector<double> scenario2_distances(int num_users);

}  // namespace isacbb
