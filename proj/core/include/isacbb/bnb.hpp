#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "isacbb/gnn.hpp"
#include "isacbb/node.hpp"
#include "isacbb/relaxation.hpp"

namespace isacbb {

enum class TraceAction { kBranch, kPrune, kStop };
const char* to_string(TraceAction a);

struct TraceRecord {
  std::int64_t t = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t node_id = -1;
  int depth = 0;
  int k_star = -1;
  TraceAction action = TraceAction::kStop;

  double gap() const { return upper - lower; }
  bool operator==(const TraceRecord&) const = default;
};

enum class BnbStatus { kConverged, kNodeCapReached, kListExhausted };
const char* to_string(BnbStatus s);

struct BnbTrace {
  std::vector<TraceRecord> records;
  BnbStatus status = BnbStatus::kConverged;
  std::int64_t iterations = 0;  // branch operations
  std::int64_t nodes_solved = 0;
  std::int64_t policy_pruned = 0;
  double wall_seconds = 0.0;
};

struct BnbResult {
  FeasibleSolution best;
  BnbTrace trace;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double certified_gap = 0.0;
  // True when a policy discarded nodes; the gap then ignores their bounds.
  bool gap_is_optimistic = false;
};

/// Called when a node is taken from the list, before the policy decision.
using NodeObserver =
    std::function<void(const BnbNode&, const FeasibleSolution& repaired, const SearchState&)>;
/// Called with the features of every node the policy scores.
using FeatureSink = std::function<void(const BnbNode&, const NodeGraph&, double score)>;

struct BnbOptions {
  double epsilon = 1e-3;
  PruningPolicy policy = PruningPolicy::exact();
  std::int64_t node_cap = 100000;
  MerOptions solver;
  bool parallel = true;  // solve the two children concurrently when cores allow
  NodeObserver on_node;
  FeatureSink on_features;
  bool extract_features_for_exact = false;  // feed on_features under the exact policy too
};

/// Best-first branch-and-bound over SINR boxes. Stops when U - L <= epsilon,
/// when the list empties, or at node_cap solved nodes (best so far returned).
BnbResult solve_bnb(const ProblemInstance& inst, const BnbOptions& opts = {});

/// ceil((Gamma_max / delta)^K) + 1 with delta = (exp(eps / K) - 1) / 2,
/// saturating at the largest uint64.
std::uint64_t worst_case_iterations(const ProblemInstance& inst, double epsilon);
std::uint64_t worst_case_iterations(double gamma_max, int users, double epsilon);

}  // namespace isacbb
