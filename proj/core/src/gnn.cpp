#include "isacbb/gnn.hpp"

#include <cmath>

#include "isacbb/error.hpp"

namespace isacbb {

void NodeGraph::validate() const {
  if (antenna.size() != num_tx || user.rows() != num_users || user.cols() != kUserFeatures ||
      edge.size() != static_cast<std::size_t>(num_tx) * static_cast<std::size_t>(num_users)) {
    throw Error(ErrorCode::kShapeMismatch, "node graph dimensions are inconsistent");
  }
  bool finite = antenna.allFinite() && user.allFinite();
  for (const auto& e : edge) {
    for (double v : e) finite = finite && std::isfinite(v);
  }
  if (!finite) throw Error(ErrorCode::kInvalidArgument, "node graph has non-finite features");
}

GnnWeights GnnWeights::zeros(int depth, int hidden) {
  GnnWeights w;
  w.depth = depth;
  w.hidden = hidden;
  w.p_ant = Eigen::VectorXd::Zero(hidden);
  w.p_user = Eigen::MatrixXd::Zero(hidden, kUserFeatures);
  for (int d = 0; d < depth; ++d) {
    w.layers.push_back({Eigen::MatrixXd::Zero(hidden, hidden), Eigen::MatrixXd::Zero(hidden, hidden),
                        Eigen::MatrixXd::Zero(hidden, kEdgeFeatures)});
  }
  w.beta = Eigen::VectorXd::Zero(hidden);
  w.feature_shift = Eigen::VectorXd::Zero(kUserFeatures);
  w.feature_scale = Eigen::VectorXd::Ones(kUserFeatures);
  return w;
}

void GnnWeights::validate() const {
  const int h = hidden;
  bool ok = depth >= 0 && h > 0 && static_cast<int>(layers.size()) == depth && p_ant.size() == h &&
            p_user.rows() == h && p_user.cols() == kUserFeatures && beta.size() == h &&
            feature_shift.size() == kUserFeatures && feature_scale.size() == kUserFeatures;
  for (const auto& l : layers) {
    ok = ok && l.z1.rows() == h && l.z1.cols() == h && l.z2.rows() == h && l.z2.cols() == h &&
         l.z3.rows() == h && l.z3.cols() == kEdgeFeatures;
  }
  if (!ok) throw Error(ErrorCode::kShapeMismatch, "GNN weight shapes are inconsistent");
  bool finite = p_ant.allFinite() && p_user.allFinite() && beta.allFinite() &&
                feature_shift.allFinite() && feature_scale.allFinite();
  for (const auto& l : layers) finite = finite && l.z1.allFinite() && l.z2.allFinite() && l.z3.allFinite();
  if (!finite) throw Error(ErrorCode::kInvalidArgument, "GNN weights contain non-finite values");
  if ((feature_scale.array() == 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "feature scale must be nonzero");
  }
}

NodeGraph extract_features(const BnbNode& node, const FeasibleSolution& repaired,
                           const SearchState& state, const ProblemInstance& inst) {
  const int nt = inst.num_tx;
  const int users = inst.num_users;
  const RelaxationSolution& rel = node.relaxation;
  NodeGraph g;
  g.num_tx = nt;
  g.num_users = users;
  g.antenna = eig(rel.rx).values;
  g.user.resize(users, kUserFeatures);
  g.edge.resize(static_cast<std::size_t>(nt * users));
  for (int k = 0; k < users; ++k) {
    const HermitianMatrix q = inst.channel_gram(k);
    const double incumbent_gamma =
        state.incumbent != nullptr ? state.incumbent->solution.gamma.at(k) : 0.0;
    g.user.row(k) << node.box.lo[k], node.box.hi[k], repaired.solution.gamma[k], rel.gamma[k],
        state.upper, state.lower, (repaired.value - state.upper <= state.epsilon) ? 1.0 : 0.0,
        static_cast<double>(node.depth), q.trace_product(rel.w[k]), q.trace_product(rel.rx - rel.w[k]),
        node.lower_bound, repaired.value, incumbent_gamma;
    const Eigen::VectorXd wev = eig(rel.w[k]).values;
    const ComplexVector& h = inst.channels[k];
    for (int n = 0; n < nt; ++n) {
      g.edge[static_cast<std::size_t>(n * users + k)] = {h(n).real(), h(n).imag(), std::abs(h(n)), wev(n)};
    }
  }
  return g;
}

double policy_score(const NodeGraph& g, const GnnWeights& w) {
  g.validate();
  w.validate();
  const int nt = g.num_tx;
  const int users = g.num_users;
  const int h = w.hidden;

  Eigen::MatrixXd qa(h, nt);
  Eigen::MatrixXd qu(h, users);
  for (int n = 0; n < nt; ++n) qa.col(n) = w.p_ant * g.antenna(n);
  for (int k = 0; k < users; ++k) {
    const Eigen::VectorXd x =
        (g.user.row(k).transpose() - w.feature_shift).cwiseQuotient(w.feature_scale);
    qu.col(k) = w.p_user * x;
  }

  for (const auto& layer : w.layers) {
    const Eigen::MatrixXd ma = layer.z2 * qa;  // messages from antennas
    const Eigen::MatrixXd mu = layer.z2 * qu;  // messages from users
    Eigen::MatrixXd na = layer.z1 * qa;
    Eigen::MatrixXd nu = layer.z1 * qu;
    for (int n = 0; n < nt; ++n) {
      for (int k = 0; k < users; ++k) {
        const auto& e = g.edge_at(n, k);
        const Eigen::Map<const Eigen::Vector4d> ev(e.data());
        const Eigen::VectorXd edge_term = layer.z3 * ev;
        na.col(n) += mu.col(k) + edge_term;
        nu.col(k) += ma.col(n) + edge_term;
      }
    }
    qa = na.cwiseMax(0.0);
    qu = nu.cwiseMax(0.0);
  }

  double total = 0.0;
  auto sigmoid = [](double v) { return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); };
  for (int n = 0; n < nt; ++n) total += sigmoid(w.beta.dot(qa.col(n)));
  for (int k = 0; k < users; ++k) total += sigmoid(w.beta.dot(qu.col(k)));
  return total / (nt + users);
}

PruningPolicy PruningPolicy::learned(GnnWeights w) {
  w.validate();
  return PruningPolicy(Kind::kLearned, 0.0, std::make_shared<const GnnWeights>(std::move(w)));
}

double PruningPolicy::score(const NodeGraph& g) const {
  switch (kind_) {
    case Kind::kExact:
      return 1.0;
    case Kind::kConstant:
      return constant_;
    case Kind::kLearned:
      return policy_score(g, *weights_);
  }
  return 1.0;
}

}  // namespace isacbb
