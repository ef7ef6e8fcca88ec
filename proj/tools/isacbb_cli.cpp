// isacbb: generate instances, solve them, sweep rho, evaluate pruning
// policies and print iteration bounds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isacbb/bnb.hpp"
#include "isacbb/closed_form.hpp"
#include "isacbb/error.hpp"
#include "isacbb/extract.hpp"
#include "isacbb/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace isacbb;

namespace {

struct GenerateArgs {
  int scenario = 1;
  int k = 3;
  int nt = 6;
  int nr = 16;
  int frame_len = 16;
  double power_dbm = 30.0;
  double rho = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveArgs {
  std::string instance;
  std::string method = "bnb";
  double eps = 1e-3;
  std::string weights;
  std::int64_t node_cap = 100000;
  std::string out;
  std::string trace;
  std::string features;
  double rho = std::numeric_limits<double>::quiet_NaN();
};

struct SweepArgs {
  std::string instance;
  std::vector<double> rhos;
  std::string method = "bnb";
  double eps = 1e-3;
  std::string weights;
  std::int64_t node_cap = 100000;
  std::string out;
};

struct EvalArgs {
  std::string dir;
  std::string weights;
  double eps = 1e-3;
  std::int64_t node_cap = 100000;
  std::string out;
};

struct BoundArgs {
  std::string instance;
  double eps = 1e-3;
};

struct ParityArgs {
  std::string weights;
  std::string vectors;
  double tol = 1e-6;
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

PruningPolicy policy_for(const std::string& method, const std::string& weights) {
  if (method != "bnb-gnn") return PruningPolicy::exact();
  if (weights.empty()) throw Error(ErrorCode::kInvalidArgument, "--weights is required for bnb-gnn");
  return PruningPolicy::learned(read_weights(weights));
}

// Solves with the chosen method; beamformers are recovered once at the end.
SolutionReport run_method(const ProblemInstance& inst, const SolveArgs& a, std::ostream* trace_out,
                          std::ostream* feature_out) {
  if (a.method == "single-user") {
    SolutionReport r = make_report(inst, recover_beamformers(solve_single_user(inst), inst), a.method);
    return r;
  }
  if (a.method == "orthogonal") {
    return make_report(inst, recover_beamformers(solve_orthogonal_case(inst), inst), a.method);
  }
  BnbOptions o;
  o.epsilon = a.eps;
  o.node_cap = a.node_cap;
  o.policy = policy_for(a.method, a.weights);
  if (feature_out != nullptr) {
    o.extract_features_for_exact = true;
    o.on_features = [feature_out](const BnbNode& node, const NodeGraph& g, double score) {
      *feature_out << feature_record_json(node, g, score) << '\n';
    };
  }
  const BnbResult res = solve_bnb(inst, o);
  if (trace_out != nullptr) write_trace_csv(*trace_out, res.trace);
  SolutionReport r = make_report(inst, recover_beamformers(res.best.solution, inst), a.method);
  r.status = to_string(res.trace.status);
  r.lower_bound = res.lower_bound;
  r.upper_bound = res.upper_bound;
  r.certified_gap = res.certified_gap;
  r.epsilon = a.eps;
  r.iterations = res.trace.iterations;
  r.nodes = res.trace.nodes_solved;
  r.wall_seconds = res.trace.wall_seconds;
  r.gap_is_optimistic = res.gap_is_optimistic;
  return r;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
  return f;
}

void write_meta(const std::string& csv_path, json meta) {
  meta["csv"] = fs::path(csv_path).filename().string();
  write_text_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

int cmd_generate(const GenerateArgs& a) {
  ScenarioParams p;
  p.num_users = a.k;
  p.num_tx = a.nt;
  p.num_rx = a.nr;
  p.frame_len = a.frame_len;
  p.power_dbm = a.power_dbm;
  p.rho = a.rho;
  p.seed = a.seed;
  const ProblemInstance inst = a.scenario == 1 ? gen_scenario1(p) : gen_scenario2(p);
  for (const auto& w : inst.validate()) std::cerr << "warning: " << w << '\n';
  if (a.out.empty()) {
    std::cout << instance_to_json(inst) << '\n';
  } else {
    write_instance(a.out, inst);
  }
  return 0;
}

int cmd_solve(const SolveArgs& a) {
  ProblemInstance inst = read_instance(a.instance);
  if (std::isfinite(a.rho)) inst.rho = a.rho;
  for (const auto& w : inst.validate()) std::cerr << "warning: " << w << '\n';
  std::ofstream trace_file;
  std::ofstream feature_file;
  if (!a.trace.empty()) trace_file = open_out(a.trace);
  if (!a.features.empty()) feature_file = open_out(a.features);
  const SolutionReport r = run_method(inst, a, a.trace.empty() ? nullptr : &trace_file,
                                      a.features.empty() ? nullptr : &feature_file);
  if (a.out.empty()) {
    std::cout << solution_to_json(r) << '\n';
  } else {
    write_solution(a.out, r);
    std::cout << "objective " << fmt(r.objective) << " sum_rate " << fmt(r.sum_rate) << " crb "
              << fmt(r.crb);
    if (std::isfinite(r.certified_gap)) {
      std::cout << " gap " << fmt(r.certified_gap) << " iterations " << r.iterations << " status "
                << r.status;
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_sweep(const SweepArgs& a) {
  const ProblemInstance base = read_instance(a.instance);
  std::ofstream csv = open_out(a.out);
  csv << "rho,sum_rate,achieved_sum_rate,inverse_trace,crb,objective,certified_gap,iterations\n";
  csv << std::setprecision(17);
  bool optimistic = false;
  for (double rho : a.rhos) {
    ProblemInstance inst = base;
    inst.rho = rho;
    SolveArgs s;
    s.method = a.method;
    s.eps = a.eps;
    s.weights = a.weights;
    s.node_cap = a.node_cap;
    const SolutionReport r = run_method(inst, s, nullptr, nullptr);
    optimistic = optimistic || r.gap_is_optimistic;
    csv << rho << ',' << r.sum_rate << ',' << r.achieved_sum_rate << ','
        << inverse_trace(r.solution.rx) << ',' << r.crb << ',' << r.objective << ','
        << r.certified_gap << ',' << r.iterations << '\n';
  }
  write_meta(a.out, {{"command", "sweep-rho"},
                     {"instance", a.instance},
                     {"method", a.method},
                     {"epsilon", a.eps},
                     {"weights", a.weights},
                     {"node_cap", a.node_cap},
                     {"gap_is_optimistic", optimistic},
                     {"units", {{"sum_rate", "nats"}, {"crb", "sigma_s^2 N_r / L tr(R_X^-1)"}}}});
  return 0;
}

int cmd_eval(const EvalArgs& a) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::kInvalidArgument, "no instance files in " + a.dir);
  const PruningPolicy learned = PruningPolicy::learned(read_weights(a.weights));

  std::ofstream csv = open_out(a.out);
  csv << "instance,objective_exact,objective_gnn,ogap_percent,speedup,iterations_exact,iterations_gnn,"
         "seconds_exact,seconds_gnn\n";
  csv << std::setprecision(17);
  for (const auto& f : files) {
    const ProblemInstance inst = read_instance(f.string());
    BnbOptions o;
    o.epsilon = a.eps;
    o.node_cap = a.node_cap;
    const BnbResult exact = solve_bnb(inst, o);
    o.policy = learned;
    const BnbResult gnn = solve_bnb(inst, o);
    const double ustar = exact.upper_bound;
    const double ogap = 100.0 * (gnn.upper_bound - ustar) / std::abs(ustar);
    const double speedup = exact.trace.wall_seconds / std::max(gnn.trace.wall_seconds, 1e-12);
    csv << f.filename().string() << ',' << ustar << ',' << gnn.upper_bound << ',' << ogap << ','
        << speedup << ',' << exact.trace.iterations << ',' << gnn.trace.iterations << ','
        << exact.trace.wall_seconds << ',' << gnn.trace.wall_seconds << '\n';
  }
  write_meta(a.out, {{"command", "eval"},
                     {"instances", a.dir},
                     {"weights", a.weights},
                     {"epsilon", a.eps},
                     {"node_cap", a.node_cap},
                     {"ogap", "(U_gnn - U_exact) / |U_exact| * 100"},
                     {"speedup", "wall seconds exact / wall seconds gnn (hardware dependent)"}});
  return 0;
}

int cmd_bound(const BoundArgs& a) {
  const ProblemInstance inst = read_instance(a.instance);
  const Box root = root_box(inst);
  std::cout << "K " << inst.num_users << " Nt " << inst.num_tx << " epsilon " << fmt(a.eps) << '\n';
  double gmax = 0.0;
  for (int k = 0; k < inst.num_users; ++k) {
    std::cout << "user " << k << " root_interval [" << fmt(root.lo[k]) << ", " << fmt(root.hi[k])
              << "]\n";
    gmax = std::max(gmax, root.hi[k]);
  }
  const std::uint64_t t = worst_case_iterations(inst, a.eps);
  std::cout << "gamma_max " << fmt(gmax) << '\n';
  std::cout << "delta " << fmt(0.5 * std::expm1(a.eps / inst.num_users)) << '\n';
  std::cout << "worst_case_iterations "
            << (t == std::numeric_limits<std::uint64_t>::max() ? std::string("saturated")
                                                                : std::to_string(t))
            << '\n';
  return 0;
}

int cmd_parity(const ParityArgs& a) {
  const GnnWeights w = read_weights(a.weights);
  const auto vectors = parity_vectors_from_json(read_text_file(a.vectors));
  double worst = 0.0;
  for (const auto& v : vectors) worst = std::max(worst, std::abs(policy_score(v.graph, w) - v.score));
  std::cout << "vectors " << vectors.size() << " max_abs_diff " << fmt(worst) << '\n';
  return worst <= a.tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global ISAC beamforming optimizer"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Draw a random instance");
  g->add_option("--scenario", gen.scenario, "1: i.i.d. CN(0,1), 2: path loss")->check(CLI::IsMember({1, 2}));
  g->add_option("--k", gen.k, "Users")->check(CLI::PositiveNumber);
  g->add_option("--nt", gen.nt, "Transmit antennas")->check(CLI::PositiveNumber);
  g->add_option("--nr", gen.nr, "Receive antennas")->check(CLI::PositiveNumber);
  g->add_option("--frame-len", gen.frame_len, "Frame length L")->check(CLI::PositiveNumber);
  g->add_option("--power-dbm", gen.power_dbm, "Power budget in dBm");
  g->add_option("--rho", gen.rho, "Trade-off weight")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "RNG seed");
  g->add_option("--out", gen.out, "Output file (stdout if omitted)");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve an instance");
  s->add_option("instance", sol.instance, "Instance file")->required()->check(CLI::ExistingFile);
  s->add_option("--method", sol.method)->check(CLI::IsMember({"bnb", "bnb-gnn", "single-user", "orthogonal"}));
  s->add_option("--eps", sol.eps, "Optimality tolerance")->check(CLI::PositiveNumber);
  s->add_option("--weights", sol.weights, "GNN weight file for bnb-gnn");
  s->add_option("--node-cap", sol.node_cap, "Maximum solved nodes")->check(CLI::PositiveNumber);
  s->add_option("--rho", sol.rho, "Override the instance's trade-off weight")->check(CLI::PositiveNumber);
  s->add_option("--out", sol.out, "Solution file (stdout if omitted)");
  s->add_option("--trace", sol.trace, "Per-iteration CSV trace");
  s->add_option("--features", sol.features, "JSON-lines dump of node features");

  SweepArgs sw;
  auto* r = app.add_subcommand("sweep-rho", "Trade-off curve over rho");
  r->add_option("instance", sw.instance)->required()->check(CLI::ExistingFile);
  r->add_option("--rho", sw.rhos, "Weights to sweep")->required()->delimiter(',')->check(CLI::PositiveNumber);
  r->add_option("--method", sw.method)->check(CLI::IsMember({"bnb", "bnb-gnn", "single-user", "orthogonal"}));
  r->add_option("--eps", sw.eps)->check(CLI::PositiveNumber);
  r->add_option("--weights", sw.weights);
  r->add_option("--node-cap", sw.node_cap)->check(CLI::PositiveNumber);
  r->add_option("--out", sw.out, "CSV output")->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Compare exact and GNN-pruned search");
  e->add_option("instances", ev.dir, "Directory of instance files")->required()->check(CLI::ExistingDirectory);
  e->add_option("--weights", ev.weights)->required()->check(CLI::ExistingFile);
  e->add_option("--eps", ev.eps)->check(CLI::PositiveNumber);
  e->add_option("--node-cap", ev.node_cap)->check(CLI::PositiveNumber);
  e->add_option("--out", ev.out, "CSV output")->required();

  BoundArgs bd;
  auto* b = app.add_subcommand("bound", "Worst-case iteration bound and root box");
  b->add_option("instance", bd.instance)->required()->check(CLI::ExistingFile);
  b->add_option("--eps", bd.eps)->check(CLI::PositiveNumber);

  ParityArgs pa;
  auto* p = app.add_subcommand("parity", "Check policy scores against test vectors");
  p->add_option("--weights", pa.weights)->required()->check(CLI::ExistingFile);
  p->add_option("--vectors", pa.vectors)->required()->check(CLI::ExistingFile);
  p->add_option("--tol", pa.tol)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*r) return cmd_sweep(sw);
    if (*e) return cmd_eval(ev);
    if (*b) return cmd_bound(bd);
    if (*p) return cmd_parity(pa);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_status(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  }
  return 0;
}
