#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "isacbb/bnb.hpp"
#include "isacbb/gnn.hpp"
#include "isacbb/model.hpp"

namespace isacbb {

// All documents are JSON; doubles are written with round-trip precision.
// Parse and file errors raise ErrorCode::kIo, bad content kInvalidArgument.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

std::string instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const std::string& text);
ProblemInstance read_instance(const std::string& path);
void write_instance(const std::string& path, const ProblemInstance& inst);

/// Solution document contents. Bound fields are NaN for methods without a
/// certificate.
struct SolutionReport {
  std::string method;
  std::string status = "optimal";
  BeamformingSolution solution;
  double objective = 0.0;
  double sum_rate = 0.0;           // over the stored Gamma, nats
  double achieved_sum_rate = 0.0;  // from the matrices, nats
  double crb = 0.0;
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  double upper_bound = std::numeric_limits<double>::quiet_NaN();
  double certified_gap = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  std::int64_t iterations = 0;
  std::int64_t nodes = 0;
  double wall_seconds = 0.0;
  bool gap_is_optimistic = false;
};

/// Fills the metric fields from the instance and solution; bounds are NaN.
SolutionReport make_report(const ProblemInstance& inst, BeamformingSolution sol, std::string method);

std::string solution_to_json(const SolutionReport& r);
SolutionReport solution_from_json(const std::string& text);
SolutionReport read_solution(const std::string& path);
void write_solution(const std::string& path, const SolutionReport& r);

std::string weights_to_json(const GnnWeights& w);
GnnWeights weights_from_json(const std::string& text);
GnnWeights read_weights(const std::string& path);

std::string graph_to_json(const NodeGraph& g);
NodeGraph graph_from_json(const std::string& text);

struct ParityVector {
  NodeGraph graph;
  double score = 0.0;
};
std::string parity_vectors_to_json(const std::vector<ParityVector>& v);
std::vector<ParityVector> parity_vectors_from_json(const std::string& text);

/// One JSON line per scored node: ids, depth, box and graph.
std::string feature_record_json(const BnbNode& node, const NodeGraph& g, double score);

/// Columns t,L,U,gap,node_id,depth,k_star,action.
void write_trace_csv(std::ostream& os, const BnbTrace& trace);
std::vector<TraceRecord> read_trace_csv(std::istream& is);

}  // namespace isacbb
