#include "recount/cli.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "recount/attacker.hpp"
#include "recount/core.hpp"
#include "recount/defender.hpp"
#include "recount/instance_io.hpp"
#include "recount/reductions.hpp"

namespace recount::cli {

namespace {

using nlohmann::json;

// Thrown when a printed witness does not replay to the reported outcome.
struct ReplayMismatch : std::logic_error {
  using std::logic_error::logic_error;
};

json scores_json(const Election& e, const VoteVector& scores) {
  json out = json::object();
  for (CandidateId c = 0; c < e.num_candidates(); ++c) out[e.name(c)] = scores[c];
  return out;
}

json manipulation_json(const Election& e, const Manipulation& m) {
  json out = json::array();
  for (const auto& [i, v] : m.entries()) out.push_back({{"index", i}, {"votes", scores_json(e, v)}});
  return out;
}

json report_json(const Election& e, const SolveReport& r) {
  json out;
  out["algorithm"] = r.algorithm;
  out["decision"] = r.decision;
  out["winner"] = r.winner ? json(e.name(*r.winner)) : json(nullptr);
  out["recount"] = r.recount ? json(r.recount->indices()) : json(nullptr);
  out["states_explored"] = r.stats.states_explored;
  out["timing_ms"] = r.stats.wall_ms;
  return out;
}

CandidateId candidate(const Election& e, const std::string& name) {
  auto id = e.find(name);
  if (!id) throw ValidationError("target.known", "unknown candidate \"" + name + "\"");
  return *id;
}

void print(std::ostream& out, const json& doc) { out << doc.dump(2) << "\n"; }

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) parts.push_back(cur);
  }
  return parts;
}

std::size_t to_index(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ValidationError(what, "not a non-negative integer: \"" + s + "\"");
  }
}

// --- eval ------------------------------------------------------------------

int cmd_eval(const std::string& file, std::ostream& out) {
  Instance inst = load_instance(file);
  const Election& e = inst.election;
  const Tally truth = tally(e);
  json doc;
  doc["rule"] = std::string(rule_name(e.rule()));
  doc["true_scores"] = scores_json(e, truth.scores);
  doc["true_winner"] = e.name(truth.winner);
  doc["welfare"] = scores_json(e, e.welfare());
  if (inst.manipulation) {
    const Tally distorted = tally(e, *inst.manipulation);
    doc["distorted_scores"] = scores_json(e, distorted.scores);
    doc["distorted_winner"] = e.name(distorted.winner);
    doc["regular"] = is_regular(e, *inst.manipulation);
  }
  print(out, doc);
  return kOk;
}

// --- solve rec -------------------------------------------------------------

struct RecArgs {
  std::string file;
  std::string target;
  std::string algo = "dp";
  std::optional<Count> budget;
  bool parallel = false;
  std::uint64_t state_cap = RecountOptions{}.state_cap;
  std::uint64_t subset_cap = kDefaultSubsetCap;
};

int cmd_rec(const RecArgs& a, std::ostream& out) {
  Instance inst = load_instance(a.file);
  const Election& e = inst.election;
  const Manipulation m = inst.manipulation.value_or(Manipulation{});
  const Count budget = a.budget.value_or(e.budget_defender());
  RecountOptions opts;
  opts.execution = a.parallel ? Execution::kParallel : Execution::kSerial;
  opts.state_cap = a.state_cap;
  opts.subset_cap = a.subset_cap;

  SolveReport r;
  if (a.algo == "greedy") {
    r = greedy_recount(e, m, budget);
  } else if (!a.target.empty()) {
    const CandidateId t = candidate(e, a.target);
    if (a.algo == "dp") {
      r = rec_decide_dp(e, m, budget, t, opts);
    } else if (a.algo == "brute") {
      r = rec_decide_brute(e, m, budget, t, opts);
    } else {
      r = rec_pd_unweighted(e, m, budget, t);
    }
  } else if (a.algo == "unweighted-pd") {
    // Best achievable winner: try candidates in the defender's order.
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t states = 0;
    for (CandidateId c : defender_ranking(e)) {
      r = rec_pd_unweighted(e, m, budget, c);
      states += r.stats.states_explored;
      if (r.decision) break;
    }
    r.stats.states_explored = states;
    r.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  } else {
    r = rec_optimize(e, m, budget, a.algo == "dp" ? RecountAlgorithm::kDp : RecountAlgorithm::kBrute,
                     opts);
  }

  json doc = report_json(e, r);
  doc["command"] = "solve rec";
  doc["budget"] = budget;
  if (!a.target.empty() && a.algo != "greedy") doc["target"] = a.target;
  if (r.winner && r.recount) {
    if (static_cast<Count>(r.recount->size()) > budget) throw ReplayMismatch("witness over budget");
    const Tally replay = tally(e, m, *r.recount);
    if (replay.winner != *r.winner) throw ReplayMismatch("recount witness does not replay");
    doc["scores"] = scores_json(e, replay.scores);
    doc["welfare"] = social_welfare(e, *r.winner);
  }
  print(out, doc);
  return kOk;
}

// --- solve man -------------------------------------------------------------

struct ManArgs {
  std::string file;
  std::string algo = "auto";
  bool regular = false;
  bool parallel = false;
  std::uint64_t manipulation_cap = ManipulationOptions{}.manipulation_cap;
  std::uint64_t subset_cap = kDefaultSubsetCap;
};

int cmd_man(const ManArgs& a, std::ostream& out) {
  Instance inst = load_instance(a.file);
  const Election& e = inst.election;
  std::string algo = a.algo;
  if (algo == "auto") {
    algo = a.regular && e.rule() == Rule::kPluralityOverDistricts ? "pd-reg" : "brute";
  }
  if (algo == "pd-reg" && !a.regular) {
    throw PreconditionError("pd-reg only searches regular manipulations; pass --regular");
  }
  SolveReport r;
  if (algo == "pd-reg") {
    r = man_pd_regular(e);
  } else {
    ManipulationOptions opts;
    opts.execution = a.parallel ? Execution::kParallel : Execution::kSerial;
    opts.manipulation_cap = a.manipulation_cap;
    opts.subset_cap = a.subset_cap;
    r = man_decide_brute(e, a.regular, opts);
  }

  json doc = report_json(e, r);
  doc["command"] = "solve man";
  doc["regular"] = a.regular;
  doc["attacker_wins"] = r.decision;
  doc["preferred"] = e.name(e.require_preferred());
  if (r.decision) {
    const Manipulation& m = *r.manipulation;
    if (!validate(e, m, a.regular).empty()) throw ReplayMismatch("manipulation witness is invalid");
    const RecountSet response = r.recount.value_or(RecountSet{});
    const Tally replay = tally(e, m, response);
    if (replay.winner != e.require_preferred()) {
      throw ReplayMismatch("manipulation witness does not replay");
    }
    doc["manipulation"] = manipulation_json(e, m);
    doc["scores"] = scores_json(e, replay.scores);
  }
  print(out, doc);
  return kOk;
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::vector<Count> xs;
  bool weighted = false;
  std::size_t universe = 0;
  std::string sets;
  std::size_t nodes = 0;
  std::string edges;
  std::size_t size = 0;
  double epsilon = 1.0;
  // random
  std::uint64_t seed = 0;
  std::string rule = "PV";
  std::size_t k = 4;
  std::size_t m = 3;
  Count n_max = 5;
  Count w_max = 1;
  std::string gamma = "full";
  Count budget_attacker = 2;
  Count budget_defender = 1;
  std::optional<std::size_t> manipulate;
  bool regular = false;
  std::string output;
};

RandomParams random_params(const std::string& rule, std::size_t k, std::size_t m, Count n_max,
                           Count w_max, const std::string& gamma, Count ba, Count bd) {
  RandomParams p;
  auto parsed = parse_rule(rule);
  if (!parsed) throw ValidationError("rule", "expected PV or PD");
  if (gamma != "full" && gamma != "random") throw ValidationError("gamma", "expected full or random");
  p.rule = *parsed;
  p.districts = k;
  p.candidates = m;
  p.max_voters = n_max;
  p.max_weight = w_max;
  p.gamma = gamma == "full" ? GammaMode::kFull : GammaMode::kRandom;
  p.budget_attacker = ba;
  p.budget_defender = bd;
  return p;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  std::string text;
  if (a.kind == "random") {
    Election e = gen_random(random_params(a.rule, a.k, a.m, a.n_max, a.w_max, a.gamma,
                                          a.budget_attacker, a.budget_defender),
                            a.seed);
    std::optional<Manipulation> m;
    if (a.manipulate) m = random_manipulation(e, *a.manipulate, a.regular, mix(a.seed));
    text = serialize(e, m);
  } else {
    std::optional<GeneratedInstance> g;
    if (a.kind == "subsetsum-pv-rec") {
      g.emplace(gen_subsetsum_pv_rec(a.xs, a.weighted));
    } else if (a.kind == "x3c-pv-rec") {
      std::vector<std::array<std::size_t, 3>> sets;
      for (const std::string& group : split(a.sets, ';')) {
        auto parts = split(group, ',');
        if (parts.size() != 3) throw ValidationError("sets", "each set needs three elements");
        sets.push_back({to_index(parts[0], "sets"), to_index(parts[1], "sets"),
                        to_index(parts[2], "sets")});
      }
      g.emplace(gen_x3c_pv_rec(a.universe, sets));
    } else if (a.kind == "subsetsum-pv-man") {
      g.emplace(gen_subsetsum_pv_man(a.xs));
    } else if (a.kind == "is-pd-rec") {
      Graph graph{a.nodes, {}};
      for (const std::string& pair : split(a.edges, ',')) {
        auto ends = split(pair, '-');
        if (ends.size() != 2) throw ValidationError("edges", "expected u-v pairs");
        graph.edges.emplace_back(to_index(ends[0], "edges"), to_index(ends[1], "edges"));
      }
      g.emplace(gen_is_pd_rec(graph, a.size));
    } else if (a.kind == "sss-pd-man") {
      g.emplace(gen_sss_pd_man(a.xs, a.size));
    } else {
      g.emplace(gen_partition_pv_recreg(a.xs, a.epsilon));
    }
    text = serialize(g->election, g->manipulation);
  }
  if (a.output.empty()) {
    out << text;
  } else {
    std::ofstream file(a.output, std::ios::binary);
    if (!file) throw ValidationError("output", "cannot write " + a.output);
    file << text;
  }
  return kOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  std::uint64_t seed = 1;
  std::size_t trials = 10;
  std::string rule = "PV";
  std::size_t k = 5;
  std::size_t m = 3;
  Count n_max = 5;
  Count w_max = 10;
  std::string gamma = "full";
  Count budget_attacker = 3;
  Count budget_defender = 1;
  bool regular = true;
  bool parallel = false;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const RandomParams params = random_params(a.rule, a.k, a.m, a.n_max, a.w_max, a.gamma,
                                            a.budget_attacker, a.budget_defender);
  struct Row {
    bool attacker_wins = false;
    Count greedy_sw = 0;
    Count opt_sw = 0;
    double runtime_ms = 0;
    std::string error;
  };
  std::vector<Row> rows(a.trials);
  const auto n = static_cast<std::int64_t>(a.trials);
#pragma omp parallel for schedule(dynamic, 1) if (a.parallel)
  for (std::int64_t t = 0; t < n; ++t) {
    Row& row = rows[static_cast<std::size_t>(t)];
    const auto start = std::chrono::steady_clock::now();
    try {
      const std::uint64_t trial_seed = mix(a.seed ^ mix(static_cast<std::uint64_t>(t)));
      Election e = gen_random(params, trial_seed);
      Manipulation m = random_manipulation(e, static_cast<std::size_t>(a.budget_attacker),
                                           a.regular, mix(trial_seed));
      SolveReport greedy = greedy_recount(e, m, e.budget_defender());
      SolveReport best = rec_optimize(e, m, e.budget_defender(), RecountAlgorithm::kDp);
      row.attacker_wins = best.winner == e.preferred();
      row.greedy_sw = social_welfare(e, *greedy.winner);
      row.opt_sw = social_welfare(e, *best.winner);
    } catch (const std::exception& err) {
      row.error = err.what();
    }
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  for (const Row& row : rows) {
    if (!row.error.empty()) throw ValidationError("bench", row.error);
  }
  out << "seed,trial,rule,k,m,B_A,B_D,regular,attacker_wins,greedy_sw,opt_sw,ratio,runtime_ms\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const Row& row = rows[t];
    const double ratio =
        row.opt_sw == 0 ? 1.0 : static_cast<double>(row.greedy_sw) / static_cast<double>(row.opt_sw);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.3f", ratio, row.runtime_ms);
    out << a.seed << ',' << t << ',' << a.rule << ',' << a.k << ',' << a.m << ','
        << a.budget_attacker << ',' << a.budget_defender << ',' << (a.regular ? 1 : 0) << ','
        << (row.attacker_wins ? 1 : 0) << ',' << row.greedy_sw << ',' << row.opt_sw << ',' << buf
        << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Election recount game solver", "recount"};
  app.require_subcommand(1);

  std::string eval_file;
  auto* eval = app.add_subcommand("eval", "Tally the true and distorted profiles");
  eval->add_option("file", eval_file, "Instance file")->required();

  auto* solve = app.add_subcommand("solve", "Run a solver");
  solve->require_subcommand(1);

  RecArgs rec;
  auto* rec_cmd = solve->add_subcommand("rec", "Defender: choose districts to recount");
  rec_cmd->add_option("file", rec.file, "Instance file with a manipulation block")->required();
  rec_cmd->add_option("--target", rec.target, "Decide whether this candidate can be made to win");
  rec_cmd->add_option("--algo", rec.algo, "dp|brute|unweighted-pd|greedy")
      ->check(CLI::IsMember({"dp", "brute", "unweighted-pd", "greedy"}));
  rec_cmd->add_option("--budget", rec.budget, "Recount budget (default: budget_defender)");
  rec_cmd->add_flag("--parallel", rec.parallel, "Parallel brute-force enumeration");
  rec_cmd->add_option("--state-cap", rec.state_cap, "State cap for dp");
  rec_cmd->add_option("--subset-cap", rec.subset_cap, "Subset cap for brute");

  ManArgs man;
  auto* man_cmd = solve->add_subcommand("man", "Attacker: search for a winning manipulation");
  man_cmd->add_option("file", man.file, "Instance file")->required();
  man_cmd->add_flag("--regular", man.regular, "Only regular manipulations");
  man_cmd->add_option("--algo", man.algo, "auto|brute|pd-reg")
      ->check(CLI::IsMember({"auto", "brute", "pd-reg"}));
  man_cmd->add_flag("--parallel", man.parallel, "Parallel search over attacked sets");
  man_cmd->add_option("--cap", man.manipulation_cap, "Cap on candidate manipulations");
  man_cmd->add_option("--subset-cap", man.subset_cap, "Recount subsets per manipulation");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance");
  gen_cmd->add_option("kind", gen.kind)
      ->required()
      ->check(CLI::IsMember({"subsetsum-pv-rec", "x3c-pv-rec", "subsetsum-pv-man", "is-pd-rec",
                             "sss-pd-man", "partition-pv-recreg", "random"}));
  gen_cmd->add_option("--x", gen.xs, "Integers, comma separated (use --x=-1,2 for negatives)")
      ->delimiter(',');
  gen_cmd->add_flag("--weighted", gen.weighted, "PD with weight = district size");
  gen_cmd->add_option("--universe", gen.universe, "X3C universe size 3l");
  gen_cmd->add_option("--sets", gen.sets, "X3C sets, e.g. 1,2,3;4,5,6");
  gen_cmd->add_option("--nodes", gen.nodes, "Graph node count");
  gen_cmd->add_option("--edges", gen.edges, "Graph edges, e.g. 0-1,1-2");
  gen_cmd->add_option("--size", gen.size, "Independent set size / SSS subset size");
  gen_cmd->add_option("--epsilon", gen.epsilon, "Partition approximation slack");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--rule", gen.rule)->check(CLI::IsMember({"PV", "PD"}));
  gen_cmd->add_option("--k", gen.k, "Districts");
  gen_cmd->add_option("--m", gen.m, "Candidates");
  gen_cmd->add_option("--n-max", gen.n_max);
  gen_cmd->add_option("--w-max", gen.w_max);
  gen_cmd->add_option("--gamma", gen.gamma)->check(CLI::IsMember({"full", "random"}));
  gen_cmd->add_option("--budget-attacker", gen.budget_attacker);
  gen_cmd->add_option("--budget-defender", gen.budget_defender);
  gen_cmd->add_option("--manipulate", gen.manipulate, "Attach a random manipulation of this size");
  gen_cmd->add_flag("--regular", gen.regular, "Make the attached manipulation regular");
  gen_cmd->add_option("--output,-o", gen.output, "Write to a file instead of stdout");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Greedy vs optimal recounting on random instances");
  bench_cmd->add_option("--seed", bench.seed)->required();
  bench_cmd->add_option("--trials", bench.trials)->required();
  bench_cmd->add_option("--rule", bench.rule)->check(CLI::IsMember({"PV", "PD"}));
  bench_cmd->add_option("--k", bench.k);
  bench_cmd->add_option("--m", bench.m);
  bench_cmd->add_option("--n-max", bench.n_max);
  bench_cmd->add_option("--w-max", bench.w_max);
  bench_cmd->add_option("--gamma", bench.gamma)->check(CLI::IsMember({"full", "random"}));
  bench_cmd->add_option("--budget-attacker", bench.budget_attacker);
  bench_cmd->add_option("--budget-defender", bench.budget_defender);
  bench_cmd->add_option("--regular", bench.regular, "1: regular manipulations, 0: general");
  bench_cmd->add_flag("--parallel", bench.parallel, "Run trials in parallel");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    if (*eval) return cmd_eval(eval_file, out);
    if (*rec_cmd) return cmd_rec(rec, out);
    if (*man_cmd) return cmd_man(man, out);
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*bench_cmd) return cmd_bench(bench, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kResourceLimit;
  } catch (const PreconditionError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace recount::cli
