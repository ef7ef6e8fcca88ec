#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "isacbb/model.hpp"
#include "isacbb/node.hpp"
#include "isacbb/relaxation.hpp"

namespace isacbb {

inline constexpr int kUserFeatures = 13;
inline constexpr int kEdgeFeatures = 4;

/// Complete bipartite antenna/user graph describing one search node.
struct NodeGraph {
  int num_tx = 0;
  int num_users = 0;
  Eigen::VectorXd antenna;  // num_tx
  Eigen::MatrixXd user;     // num_users x 13, raw (unstandardised)
  std::vector<std::array<double, kEdgeFeatures>> edge;  // index n * num_users + k

  const std::array<double, kEdgeFeatures>& edge_at(int n, int k) const {
    return edge.at(static_cast<std::size_t>(n * num_users + k));
  }
  /// Throws kShapeMismatch or kInvalidArgument (non-finite entries).
  void validate() const;
};

struct GnnLayer {
  Eigen::MatrixXd z1;  // H x H
  Eigen::MatrixXd z2;  // H x H
  Eigen::MatrixXd z3;  // H x 4
};

struct GnnWeights {
  int depth = 3;
  int hidden = 64;
  Eigen::VectorXd p_ant;   // H
  Eigen::MatrixXd p_user;  // H x 13
  std::vector<GnnLayer> layers;
  Eigen::VectorXd beta;    // H
  Eigen::VectorXd feature_shift;  // 13
  Eigen::VectorXd feature_scale;  // 13

  /// All-zero weights of the given size, identity standardisation.
  static GnnWeights zeros(int depth, int hidden);
  void validate() const;
};

/// Search state seen when a node is taken from the list.
struct SearchState {
  double lower = 0.0;  // global L^t
  double upper = 0.0;  // incumbent U^t
  double epsilon = 0.0;
  const FeasibleSolution* incumbent = nullptr;
};

/// Per-user features, in order: lo, hi, repaired SINR, relaxed SINR, U, L,
/// [node's repaired value - U <= eps], depth, tr(Q W), tr(Q (R - W)), node
/// bound, node's repaired value, incumbent SINR. Antennas carry the
/// eigenvalues of R_X; edge (n, k) carries Re/Im/abs of h_k[n] and the n-th
/// eigenvalue of W_k (all descending).
NodeGraph extract_features(const BnbNode& node, const FeasibleSolution& repaired,
                           const SearchState& state, const ProblemInstance& inst);

/// Mean over vertices of sigmoid(beta^T q^D) after D rounds of message
/// passing with ReLU.
double policy_score(const NodeGraph& g, const GnnWeights& w);

enum class Decision { kPreserve, kPrune };

inline Decision decide(double score) { return score >= 0.5 ? Decision::kPreserve : Decision::kPrune; }

/// Exact never consults a score. Constant returns a fixed score through the
/// same decision path as Learned.
class PruningPolicy {
 public:
  enum class Kind { kExact, kConstant, kLearned };

  static PruningPolicy exact() { return PruningPolicy(Kind::kExact, 1.0, nullptr); }
  static PruningPolicy constant(double score) { return PruningPolicy(Kind::kConstant, score, nullptr); }
  static PruningPolicy learned(GnnWeights w);

  Kind kind() const noexcept { return kind_; }
  bool is_exact() const noexcept { return kind_ == Kind::kExact; }
  double score(const NodeGraph& g) const;

 private:
  PruningPolicy(Kind k, double c, std::shared_ptr<const GnnWeights> w)
      : kind_(k), constant_(c), weights_(std::move(w)) {}
  Kind kind_;
  double constant_;
  std::shared_ptr<const GnnWeights> weights_;
};

}  // namespace isacbb
