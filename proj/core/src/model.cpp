#include "isacbb/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "isacbb/error.hpp"

namespace isacbb {

double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }

std::vector<std::string> ProblemInstance::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidArgument, msg);
  };
  if (num_users < 1) fail("K must be >= 1");
  if (num_tx < 1) fail("N_t must be >= 1");
  if (num_rx < 1) fail("N_r must be >= 1");
  if (frame_len < 1) fail("L must be >= 1");
  if (!std::isfinite(power_dbm)) fail("power must be finite");
  if (!(sigma_c2 > 0.0) || !(sigma_s2 > 0.0)) fail("noise variances must be > 0");
  if (!(rho > 0.0) || !std::isfinite(rho)) fail("rho must be > 0");
  if (static_cast<int>(channels.size()) != num_users) {
    fail("expected " + std::to_string(num_users) + " channels, got " +
         std::to_string(channels.size()));
  }
  for (int k = 0; k < num_users; ++k) {
    const auto& h = channels[static_cast<std::size_t>(k)];
    if (h.size() != num_tx) fail("channel " + std::to_string(k) + " has wrong length");
    if (!h.allFinite()) fail("channel " + std::to_string(k) + " has non-finite entries");
    if (h.squaredNorm() == 0.0) fail("channel " + std::to_string(k) + " is zero");
  }
  std::vector<std::string> warnings;
  if (num_tx >= num_rx) {
    std::ostringstream msg;
    msg << "N_t (" << num_tx << ") >= N_r (" << num_rx
        << "); the CRB model assumes N_t < N_r";
    warnings.push_back(msg.str());
  }
  return warnings;
}

double sinr(const ProblemInstance& inst, const BeamformingSolution& sol, int k) {
  if (k < 0 || k >= inst.num_users) {
    throw Error(ErrorCode::kInvalidArgument, "user index out of range");
  }
  const auto& h = inst.channels[static_cast<std::size_t>(k)];
  if (sol.has_beamformers()) {
    double interference = inst.sigma_c2;
    double signal = 0.0;
    for (int i = 0; i < inst.num_users; ++i) {
      const double g = std::norm(h.dot(sol.beamformers[static_cast<std::size_t>(i)]));
      if (i == k) signal = g;
      else interference += g;
    }
    if (sol.sensing_factor) {
      interference += (h.adjoint() * *sol.sensing_factor).squaredNorm();
    }
    return signal / interference;
  }
  const auto& wk = sol.w.at(static_cast<std::size_t>(k));
  const double signal = wk.quadratic_form(h);
  const double interference = sol.rx.quadratic_form(h) - signal;
  return std::max(signal, 0.0) / (std::max(interference, 0.0) + inst.sigma_c2);
}

double sum_rate(const ProblemInstance&, const BeamformingSolution& sol) {
  double r = 0.0;
  for (double g : sol.gamma) r += std::log1p(g);
  return r;
}

double achieved_sum_rate(const ProblemInstance& inst, const BeamformingSolution& sol) {
  double r = 0.0;
  for (int k = 0; k < inst.num_users; ++k) r += std::log1p(sinr(inst, sol, k));
  return r;
}

double inverse_trace(const HermitianMatrix& rx) {
  const double t = inverse_pd(rx).trace();
  if (!std::isfinite(t) || t <= 0.0) {
    throw Error(ErrorCode::kSingularCovariance, "R_X is numerically singular");
  }
  return t;
}

double crb(const ProblemInstance& inst, const BeamformingSolution& sol) {
  return inst.sigma_s2 * inst.num_rx / inst.frame_len * inverse_trace(sol.rx);
}

double objective(const ProblemInstance& inst, const BeamformingSolution& sol) {
  return -sum_rate(inst, sol) + inst.rho * inverse_trace(sol.rx);
}

namespace {

ProblemInstance make_base(const ScenarioParams& p, int scenario) {
  ProblemInstance inst;
  inst.num_users = p.num_users;
  inst.num_tx = p.num_tx;
  inst.num_rx = p.num_rx;
  inst.frame_len = p.frame_len;
  inst.power_dbm = p.power_dbm;
  inst.rho = p.rho;
  inst.seed = p.seed;
  inst.scenario = scenario;
  return inst;
}

std::vector<ComplexVector> draw_gaussian(int users, int nt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<ComplexVector> out;
  out.reserve(static_cast<std::size_t>(users));
  for (int k = 0; k < users; ++k) {
    ComplexVector h(nt);
    for (int n = 0; n < nt; ++n) {
      const double re = normal(rng);
      const double im = normal(rng);
      h(n) = Complex(re, im);
    }
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace

ProblemInstance gen_scenario1(const ScenarioParams& p) {
  auto inst = make_base(p, 1);
  inst.channels = draw_gaussian(p.num_users, p.num_tx, p.seed);
  inst.validate();
  return inst;
}

double path_loss_db(double distance_m) { return 32.6 + 36.7 * std::log10(distance_m); }

std::vector<double> scenario2_distances(int num_users) {
  std::vector<double> d(static_cast<std::size_t>(num_users));
  if (num_users == 1) {
    d[0] = 50.0;
    return d;
  }
  for (int k = 0; k < num_users; ++k) {
    d[static_cast<std::size_t>(k)] = 50.0 + 150.0 * k / (num_users - 1);
  }
  return d;
}

ProblemInstance gen_scenario2(const ScenarioParams& p) {
  auto inst = make_base(p, 2);
  inst.channels = draw_gaussian(p.num_users, p.num_tx, p.seed);
  const auto dist = scenario2_distances(p.num_users);
  for (int k = 0; k < p.num_users; ++k) {
    const double gain = std::pow(10.0, -path_loss_db(dist[static_cast<std::size_t>(k)]) / 10.0);
    inst.channels[static_cast<std::size_t>(k)] *= std::sqrt(gain);
  }
  inst.validate();
  return inst;
}

}  // namespace isacbb
