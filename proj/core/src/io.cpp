#include "isacbb/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "isacbb/error.hpp"

namespace isacbb {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return kNaN;
  return j.at(key).get<double>();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("malformed JSON: ") + e.what());
  }
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("unexpected document layout: ") + e.what());
  }
}

json vector_json(const ComplexVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
  return a;
}

ComplexVector vector_from(const json& a) {
  ComplexVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != 2) throw Error(ErrorCode::kInvalidArgument, "complex entries are [re, im] pairs");
    v(static_cast<Eigen::Index>(i)) = Complex(a[i][0].get<double>(), a[i][1].get<double>());
  }
  return v;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

ComplexMatrix matrix_from(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const ComplexVector row = vector_from(rows[static_cast<std::size_t>(r)]);
    if (row.size() != n) throw Error(ErrorCode::kShapeMismatch, "matrix must be square");
    m.row(r) = row.transpose();
  }
  return m;
}

json real_json(const Eigen::MatrixXd& m) {
  // Row-major flattening.
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

Eigen::MatrixXd real_from(const json& a, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (a.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorCode::kShapeMismatch, std::string("wrong length for ") + what);
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = a[i++].get<double>();
  return m;
}

json graph_json(const NodeGraph& g) {
  json j;
  j["nt"] = g.num_tx;
  j["k"] = g.num_users;
  j["antenna"] = real_json(g.antenna);
  json users = json::array();
  for (Eigen::Index k = 0; k < g.user.rows(); ++k) users.push_back(real_json(g.user.row(k)));
  j["user"] = users;
  json edges = json::array();
  for (int n = 0; n < g.num_tx; ++n) {
    json row = json::array();
    for (int k = 0; k < g.num_users; ++k) {
      const auto& e = g.edge_at(n, k);
      row.push_back(json(std::vector<double>(e.begin(), e.end())));
    }
    edges.push_back(row);
  }
  j["edge"] = edges;
  return j;
}

NodeGraph graph_from(const json& j) {
  NodeGraph g;
  g.num_tx = j.at("nt").get<int>();
  g.num_users = j.at("k").get<int>();
  if (g.num_tx < 1 || g.num_users < 1) throw Error(ErrorCode::kInvalidArgument, "graph needs nt, k >= 1");
  g.antenna = real_from(j.at("antenna"), g.num_tx, 1, "antenna features");
  const json& users = j.at("user");
  if (users.size() != static_cast<std::size_t>(g.num_users)) {
    throw Error(ErrorCode::kShapeMismatch, "user feature rows differ from k");
  }
  g.user.resize(g.num_users, kUserFeatures);
  for (int k = 0; k < g.num_users; ++k) {
    g.user.row(k) = real_from(users[static_cast<std::size_t>(k)], 1, kUserFeatures, "user features");
  }
  const json& edges = j.at("edge");
  if (edges.size() != static_cast<std::size_t>(g.num_tx)) throw Error(ErrorCode::kShapeMismatch, "edge rows differ from nt");
  g.edge.resize(static_cast<std::size_t>(g.num_tx * g.num_users));
  for (int n = 0; n < g.num_tx; ++n) {
    const json& row = edges[static_cast<std::size_t>(n)];
    if (row.size() != static_cast<std::size_t>(g.num_users)) throw Error(ErrorCode::kShapeMismatch, "edge columns differ from k");
    for (int k = 0; k < g.num_users; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      if (e.size() != kEdgeFeatures) throw Error(ErrorCode::kShapeMismatch, "edge features have length 4");
      for (int f = 0; f < kEdgeFeatures; ++f) {
        g.edge[static_cast<std::size_t>(n * g.num_users + k)][static_cast<std::size_t>(f)] =
            e[static_cast<std::size_t>(f)].get<double>();
      }
    }
  }
  g.validate();
  return g;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::string instance_to_json(const ProblemInstance& inst) {
  json j;
  j["K"] = inst.num_users;
  j["Nt"] = inst.num_tx;
  j["Nr"] = inst.num_rx;
  j["L"] = inst.frame_len;
  j["P_T_dBm"] = inst.power_dbm;
  j["sigmaC2"] = inst.sigma_c2;
  j["sigmaS2"] = inst.sigma_s2;
  j["rho"] = inst.rho;
  json ch = json::array();
  for (const auto& h : inst.channels) ch.push_back(vector_json(h));
  j["channels"] = ch;
  j["seed"] = inst.seed;
  j["scenario"] = inst.scenario;
  return j.dump(2);
}

ProblemInstance instance_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    ProblemInstance inst;
    inst.num_users = j.at("K").get<int>();
    inst.num_tx = j.at("Nt").get<int>();
    inst.num_rx = j.value("Nr", 16);
    inst.frame_len = j.value("L", 16);
    inst.power_dbm = j.at("P_T_dBm").get<double>();
    inst.sigma_c2 = j.value("sigmaC2", 1.0);
    inst.sigma_s2 = j.value("sigmaS2", 1.0);
    inst.rho = j.at("rho").get<double>();
    for (const auto& h : j.at("channels")) inst.channels.push_back(vector_from(h));
    inst.seed = j.value("seed", std::uint64_t{0});
    inst.scenario = j.value("scenario", 0);
    inst.validate();
    return inst;
  });
}

ProblemInstance read_instance(const std::string& path) { return instance_from_json(read_text_file(path)); }

void write_instance(const std::string& path, const ProblemInstance& inst) {
  write_text_file(path, instance_to_json(inst) + "\n");
}

SolutionReport make_report(const ProblemInstance& inst, BeamformingSolution sol, std::string method) {
  SolutionReport r;
  r.method = std::move(method);
  r.solution = std::move(sol);
  r.objective = objective(inst, r.solution);
  r.sum_rate = sum_rate(inst, r.solution);
  r.achieved_sum_rate = achieved_sum_rate(inst, r.solution);
  r.crb = crb(inst, r.solution);
  r.lower_bound = kNaN;
  r.upper_bound = kNaN;
  r.certified_gap = kNaN;
  r.epsilon = kNaN;
  return r;
}

std::string solution_to_json(const SolutionReport& r) {
  json j;
  j["method"] = r.method;
  j["status"] = r.status;
  j["R_X"] = matrix_json(r.solution.rx.dense());
  json w = json::array();
  for (const auto& wk : r.solution.w) w.push_back(matrix_json(wk.dense()));
  j["W"] = w;
  j["Gamma"] = r.solution.gamma;
  json beams = json::array();
  for (const auto& b : r.solution.beamformers) beams.push_back(vector_json(b));
  j["w"] = beams;
  if (r.solution.sensing_factor) {
    const ComplexMatrix& f = *r.solution.sensing_factor;
    json cols = json::array();
    for (Eigen::Index c = 0; c < f.cols(); ++c) cols.push_back(vector_json(f.col(c)));
    j["W_A_columns"] = cols;
  }
  j["objective"] = r.objective;
  j["sum_rate"] = r.sum_rate;
  j["achieved_sum_rate"] = r.achieved_sum_rate;
  j["CRB"] = r.crb;
  j["lower_bound"] = number_or_null(r.lower_bound);
  j["upper_bound"] = number_or_null(r.upper_bound);
  j["certified_gap"] = number_or_null(r.certified_gap);
  j["epsilon"] = number_or_null(r.epsilon);
  j["gap_is_optimistic"] = r.gap_is_optimistic;
  j["iterations"] = r.iterations;
  j["nodes"] = r.nodes;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2);
}

SolutionReport solution_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    SolutionReport r;
    r.method = j.value("method", std::string());
    r.status = j.value("status", std::string());
    r.solution.rx = HermitianMatrix(matrix_from(j.at("R_X")));
    for (const auto& wk : j.at("W")) r.solution.w.emplace_back(matrix_from(wk));
    r.solution.gamma = j.at("Gamma").get<std::vector<double>>();
    if (j.contains("w")) {
      for (const auto& b : j.at("w")) r.solution.beamformers.push_back(vector_from(b));
    }
    if (j.contains("W_A_columns")) {
      const json& cols = j.at("W_A_columns");
      ComplexMatrix f(r.solution.rx.dim(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) f.col(static_cast<Eigen::Index>(c)) = vector_from(cols[c]);
      r.solution.sensing_factor = f;
    }
    r.objective = j.at("objective").get<double>();
    r.sum_rate = j.value("sum_rate", kNaN);
    r.achieved_sum_rate = j.value("achieved_sum_rate", kNaN);
    r.crb = j.value("CRB", kNaN);
    r.lower_bound = number_or_nan(j, "lower_bound");
    r.upper_bound = number_or_nan(j, "upper_bound");
    r.certified_gap = number_or_nan(j, "certified_gap");
    r.epsilon = number_or_nan(j, "epsilon");
    r.gap_is_optimistic = j.value("gap_is_optimistic", false);
    r.iterations = j.value("iterations", std::int64_t{0});
    r.nodes = j.value("nodes", std::int64_t{0});
    r.wall_seconds = j.value("wall_seconds", 0.0);
    return r;
  });
}

SolutionReport read_solution(const std::string& path) { return solution_from_json(read_text_file(path)); }

void write_solution(const std::string& path, const SolutionReport& r) {
  write_text_file(path, solution_to_json(r) + "\n");
}

std::string weights_to_json(const GnnWeights& w) {
  w.validate();
  json j;
  j["format"] = "isacbb-gnn-v1";
  j["D"] = w.depth;
  j["H"] = w.hidden;
  j["P_ant"] = real_json(w.p_ant);
  j["P_user"] = real_json(w.p_user);
  json layers = json::array();
  for (const auto& l : w.layers) {
    layers.push_back({{"Z1", real_json(l.z1)}, {"Z2", real_json(l.z2)}, {"Z3", real_json(l.z3)}});
  }
  j["layers"] = layers;
  j["beta"] = real_json(w.beta);
  j["feature_shift"] = real_json(w.feature_shift);
  j["feature_scale"] = real_json(w.feature_scale);
  return j.dump();
}

GnnWeights weights_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    if (j.value("format", std::string()) != "isacbb-gnn-v1") {
      throw Error(ErrorCode::kInvalidArgument, "unknown weight format");
    }
    GnnWeights w;
    w.depth = j.at("D").get<int>();
    w.hidden = j.at("H").get<int>();
    const int h = w.hidden;
    if (w.depth < 0 || h < 1) throw Error(ErrorCode::kInvalidArgument, "weights need D >= 0 and H >= 1");
    w.p_ant = real_from(j.at("P_ant"), h, 1, "P_ant");
    w.p_user = real_from(j.at("P_user"), h, kUserFeatures, "P_user");
    const json& layers = j.at("layers");
    if (layers.size() != static_cast<std::size_t>(w.depth)) {
      throw Error(ErrorCode::kShapeMismatch, "layer count differs from D");
    }
    for (const auto& l : layers) {
      w.layers.push_back({real_from(l.at("Z1"), h, h, "Z1"), real_from(l.at("Z2"), h, h, "Z2"),
                          real_from(l.at("Z3"), h, kEdgeFeatures, "Z3")});
    }
    w.beta = real_from(j.at("beta"), h, 1, "beta");
    w.feature_shift = real_from(j.at("feature_shift"), kUserFeatures, 1, "feature_shift");
    w.feature_scale = real_from(j.at("feature_scale"), kUserFeatures, 1, "feature_scale");
    w.validate();
    return w;
  });
}

GnnWeights read_weights(const std::string& path) { return weights_from_json(read_text_file(path)); }

std::string graph_to_json(const NodeGraph& g) { return graph_json(g).dump(); }

NodeGraph graph_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] { return graph_from(j); });
}

std::string parity_vectors_to_json(const std::vector<ParityVector>& v) {
  json arr = json::array();
  for (const auto& p : v) arr.push_back({{"graph", graph_json(p.graph)}, {"score", p.score}});
  return json{{"vectors", arr}}.dump();
}

std::vector<ParityVector> parity_vectors_from_json(const std::string& text) {
  const json j = parse(text);
  return guarded([&] {
    std::vector<ParityVector> out;
    for (const auto& v : j.at("vectors")) out.push_back({graph_from(v.at("graph")), v.at("score").get<double>()});
    return out;
  });
}

std::string feature_record_json(const BnbNode& node, const NodeGraph& g, double score) {
  json j;
  j["node_id"] = node.id;
  j["parent"] = node.parent;
  j["depth"] = node.depth;
  j["lo"] = node.box.lo;
  j["hi"] = node.box.hi;
  j["score"] = score;
  j["graph"] = graph_json(g);
  return j.dump();
}

void write_trace_csv(std::ostream& os, const BnbTrace& trace) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "t,L,U,gap,node_id,depth,k_star,action\n";
  for (const auto& r : trace.records) {
    os << r.t << ',' << r.lower << ',' << r.upper << ',' << r.gap() << ',' << r.node_id << ','
       << r.depth << ',' << r.k_star << ',' << to_string(r.action) << '\n';
  }
  os.precision(old);
}

std::vector<TraceRecord> read_trace_csv(std::istream& is) {
  std::vector<TraceRecord> out;
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,L,U", 0) != 0) {
    throw Error(ErrorCode::kIo, "trace CSV header missing");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw Error(ErrorCode::kIo, "trace row needs 8 columns");
    TraceRecord r;
    try {
      r.t = std::stoll(cells[0]);
      r.lower = std::stod(cells[1]);
      r.upper = std::stod(cells[2]);
      r.node_id = std::stoll(cells[4]);
      r.depth = std::stoi(cells[5]);
      r.k_star = std::stoi(cells[6]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kIo, "unparsable trace row: " + line);
    }
    if (cells[7] == "branch") r.action = TraceAction::kBranch;
    else if (cells[7] == "prune") r.action = TraceAction::kPrune;
    else if (cells[7] == "stop") r.action = TraceAction::kStop;
    else throw Error(ErrorCode::kIo, "unknown trace action " + cells[7]);
    out.push_back(r);
  }
  return out;
}

}  // namespace isacbb
