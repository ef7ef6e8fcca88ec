#include "isacbb/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <thread>

#include "isacbb/error.hpp"

namespace isacbb {

const char* to_string(TraceAction a) {
  switch (a) {
    case TraceAction::kBranch:
      return "branch";
    case TraceAction::kPrune:
      return "prune";
    case TraceAction::kStop:
      return "stop";
  }
  return "?";
}

const char* to_string(BnbStatus s) {
  switch (s) {
    case BnbStatus::kConverged:
      return "converged";
    case BnbStatus::kNodeCapReached:
      return "node_cap_reached";
    case BnbStatus::kListExhausted:
      return "list_exhausted";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Min-heap order on (lower bound, id).
struct LaterFirst {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.lower_bound != b.lower_bound) return a.lower_bound > b.lower_bound;
    return a.id > b.id;
  }
};

std::optional<RelaxationSolution> solve_child(const ProblemInstance& inst, const Box& box,
                                              const MerOptions& opts, const RelaxationSolution& parent,
                                              std::int64_t parent_id) {
  const MerProblem p = MerProblem::make(inst, box);
  try {
    try {
      return solve_mer(p, opts, &parent);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericalFailure) throw;
      return solve_mer(p, opts, nullptr);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInfeasibleBox) return std::nullopt;
    throw Error(e.code(), std::string("child of node ") + std::to_string(parent_id) + ": " + e.what());
  }
}

}  // namespace

BnbResult solve_bnb(const ProblemInstance& inst, const BnbOptions& opts) {
  inst.validate();
  if (!(opts.epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  if (opts.node_cap < 1) throw Error(ErrorCode::kInvalidArgument, "node cap must be positive");
  const auto started = std::chrono::steady_clock::now();
  const double eps = opts.epsilon;
  const bool parallel = opts.parallel && std::thread::hardware_concurrency() > 1;
  const bool score_nodes = !opts.policy.is_exact() || (opts.extract_features_for_exact && opts.on_features);

  BnbResult result;
  BnbTrace& trace = result.trace;
  std::int64_t next_id = 0;

  BnbNode root;
  root.box = root_box(inst);
  root.relaxation = solve_mer(MerProblem::make(inst, root.box), opts.solver);
  root.lower_bound = root.relaxation.value;
  root.id = next_id++;
  trace.nodes_solved = 1;

  FeasibleSolution incumbent = repair(root.relaxation, root.box, inst);
  double upper = incumbent.value;

  std::vector<BnbNode> heap;
  // Bounds of nodes dropped because they cannot beat U - eps. They still
  // count towards L so the trace matches a search that kept them.
  double fathomed_floor = kInf;
  auto admit = [&](BnbNode&& node) {
    if (node.lower_bound >= upper - eps) {
      fathomed_floor = std::min(fathomed_floor, node.lower_bound);
      return;
    }
    heap.push_back(std::move(node));
    std::push_heap(heap.begin(), heap.end(), LaterFirst{});
  };
  admit(std::move(root));

  double lower = -kInf;
  for (std::int64_t t = 0;; ++t) {
    double lmin = heap.empty() ? fathomed_floor : std::min(heap.front().lower_bound, fathomed_floor);
    if (!std::isfinite(lmin)) lmin = upper;
    lower = std::min(std::max(lower, lmin), upper);

    TraceRecord rec;
    rec.t = t;
    rec.lower = lower;
    rec.upper = upper;
    if (upper - lower <= eps || heap.empty()) {
      trace.status = upper - lower <= eps ? BnbStatus::kConverged : BnbStatus::kListExhausted;
      trace.records.push_back(rec);
      break;
    }
    if (trace.nodes_solved + 2 > opts.node_cap) {
      trace.status = BnbStatus::kNodeCapReached;
      trace.records.push_back(rec);
      break;
    }

    std::pop_heap(heap.begin(), heap.end(), LaterFirst{});
    BnbNode node = std::move(heap.back());
    heap.pop_back();
    rec.node_id = node.id;
    rec.depth = node.depth;

    const FeasibleSolution repaired = repair(node.relaxation, node.box, inst);
    const SearchState state{lower, upper, eps, &incumbent};
    if (opts.on_node) opts.on_node(node, repaired, state);
    if (score_nodes) {
      const NodeGraph g = extract_features(node, repaired, state, inst);
      const double score = opts.policy.score(g);
      if (opts.on_features) opts.on_features(node, g, score);
      if (!opts.policy.is_exact() && decide(score) == Decision::kPrune) {
        rec.action = TraceAction::kPrune;
        trace.records.push_back(rec);
        ++trace.policy_pruned;
        continue;
      }
    }

    const int k = branch_index(repaired, node.box);
    rec.k_star = k;
    if (k < 0) {
      // A single SINR point: the relaxation is exact there.
      fathomed_floor = std::min(fathomed_floor, node.lower_bound);
      rec.action = TraceAction::kPrune;
      trace.records.push_back(rec);
      continue;
    }
    rec.action = TraceAction::kBranch;
    trace.records.push_back(rec);
    ++trace.iterations;

    auto [box1, box2] = bisect(node.box, k);
    std::optional<RelaxationSolution> sol1;
    std::optional<RelaxationSolution> sol2;
    if (parallel) {
      auto second = std::async(std::launch::async, solve_child, std::cref(inst), std::cref(box2),
                               std::cref(opts.solver), std::cref(node.relaxation), node.id);
      sol1 = solve_child(inst, box1, opts.solver, node.relaxation, node.id);
      sol2 = second.get();
    } else {
      sol1 = solve_child(inst, box1, opts.solver, node.relaxation, node.id);
      sol2 = solve_child(inst, box2, opts.solver, node.relaxation, node.id);
    }
    trace.nodes_solved += 2;

    std::vector<BnbNode> children;
    std::vector<FeasibleSolution> candidates;
    for (auto* pr : {&sol1, &sol2}) {
      auto& sol = *pr;
      Box& box = pr == &sol1 ? box1 : box2;
      const std::int64_t id = next_id++;
      if (!sol) continue;
      BnbNode child;
      child.box = std::move(box);
      child.lower_bound = std::max(sol->value, node.lower_bound);
      child.relaxation = std::move(*sol);
      child.depth = node.depth + 1;
      child.id = id;
      child.parent = node.id;
      candidates.push_back(repair(child.relaxation, child.box, inst));
      children.push_back(std::move(child));
    }
    if (!candidates.empty()) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < candidates.size(); ++j) {
        if (candidates[j].value < candidates[best].value) best = j;
      }
      if (upper >= candidates[best].value) {
        upper = candidates[best].value;
        incumbent = std::move(candidates[best]);
      }
    }
    for (auto& c : children) admit(std::move(c));
  }

  result.best = std::move(incumbent);
  result.lower_bound = lower;
  result.upper_bound = upper;
  result.certified_gap = upper - lower;
  result.gap_is_optimistic = trace.policy_pruned > 0;
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::uint64_t worst_case_iterations(double gamma_max, int users, double epsilon) {
  if (!(epsilon > 0.0) || users < 1 || !(gamma_max >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "worst-case bound needs eps > 0, K >= 1, Gamma_max >= 0");
  }
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const double delta = 0.5 * std::expm1(epsilon / users);
  const double v = std::pow(gamma_max / delta, users);
  // The bound counts at least one box even when delta exceeds Gamma_max.
  const double c = std::max(1.0, std::ceil(v));
  if (!std::isfinite(c) || c >= 18446744073709549568.0) return kMax;
  return static_cast<std::uint64_t>(c) + 1;
}

std::uint64_t worst_case_iterations(const ProblemInstance& inst, double epsilon) {
  double gmax = 0.0;
  for (int k = 0; k < inst.num_users; ++k) gmax = std::max(gmax, inst.max_sinr(k));
  return worst_case_iterations(gmax, inst.num_users, epsilon);
}

}  // namespace isacbb
