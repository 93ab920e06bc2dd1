#include <atomic>
#include <cctype>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "csr/io.hpp"
#include "csr/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitBudget = 3;

const std::set<std::string> kCheckNames = {"lemma1", "lemma2", "lemma3",
                                           "thm3",   "thm4",   "thm5"};

// A graph source is either a readable file (JSON or edge-list text) or a
// generator spec: "kind n [p] [seed=S]" with ':' accepted as separator, e.g.
// "cycle:6" or "erdos_renyi 30 0.5 seed=7". Without seed= the fallback applies.
csr::Graph resolve_graph(const std::string& source, std::uint64_t fallback_seed) {
  if (std::filesystem::exists(source)) return csr::load_graph_file(source);
  std::string normalized = source;
  for (char& c : normalized) {
    if (c == ':') c = ' ';
  }
  std::istringstream in(normalized);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  if (tokens.size() < 2) {
    throw csr::Error("graph source is neither a file nor a 'kind n [p] [seed=S]' spec: " +
                     source);
  }
  csr::GraphKind kind = csr::parse_kind(tokens[0]);
  int n = 0;
  double p = 0.0;
  std::uint64_t seed = fallback_seed;
  try {
    n = std::stoi(tokens[1]);
    for (std::size_t i = 2; i < tokens.size(); ++i) {
      if (tokens[i].rfind("seed=", 0) == 0) {
        seed = std::stoull(tokens[i].substr(5));
      } else {
        p = std::stod(tokens[i]);
      }
    }
  } catch (const std::exception&) {
    throw csr::Error("malformed graph spec: " + source);
  }
  return csr::generate(kind, n, p, seed);
}

csr::AllocationProfile make_initial(const csr::Game& game, const std::string& mode,
                                    const std::string& init_file, std::uint64_t seed) {
  if (mode == "all-one") return csr::AllocationProfile(game.n(), 1);
  if (mode == "random") {
    std::mt19937_64 rng(seed);
    std::vector<int> held(game.n());
    for (int& h : held) h = 1 + static_cast<int>(csr::rng_below(rng, game.k));
    return csr::AllocationProfile(held);
  }
  std::string path = mode == "file" ? init_file : mode;
  if (path.empty()) throw csr::Error("--init file requires --init-file PATH");
  csr::AllocationProfile p = csr::profile_from_json(csr::Json::parse(csr::read_file(path)));
  csr::validate_profile(p, game.n(), game.k);
  return p;
}

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void emit(const csr::Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    csr::write_file(out_path, j.dump(2) + "\n");
  }
}

// Per-trace check evaluation. Event-level checks report violation counts;
// bound checks pass vacuously outside their regime.
struct CheckOutcome {
  std::map<std::string, bool> ok;
  std::map<std::string, long long> violations;
  bool all_ok = true;
};

CheckOutcome evaluate_checks(const csr::Game& game, const csr::Trace& trace,
                             const csr::BoundReport& rep,
                             const std::set<std::string>& enabled) {
  CheckOutcome res;
  auto record = [&](const std::string& name, bool ok, long long bad) {
    if (!enabled.count(name)) return;
    res.ok[name] = ok;
    res.violations[name] = bad;
    res.all_ok = res.all_ok && ok;
  };
  long long bad1 = 0, bad2 = 0;
  for (const csr::UpdateEvent& ev : trace.events) {
    bool lex_drop =
        csr::lex_compare(ev.rv_after, ev.rv_before) == std::strong_ordering::less;
    if (!csr::check_lemma1(ev) || !lex_drop) ++bad1;
    if (!csr::check_lemma2(ev, trace.n)) ++bad2;
  }
  record("lemma1", bad1 == 0, bad1);
  record("lemma2", bad2 == 0, bad2);
  record("lemma3", csr::check_lemma3(trace), csr::check_lemma3(trace) ? 0 : 1);
  csr::PotentialSumResult pot = csr::check_theorem3(trace);
  record("thm3", pot.ok, pot.ok ? 0 : 1);
  bool t4 = !rep.thm4_applicable || rep.thm4_ok;
  record("thm4", t4, t4 ? 0 : 1);
  bool t5 = !rep.thm5_applicable || rep.thm5_ok;
  record("thm5", t5, t5 ? 0 : 1);
  (void)game;
  return res;
}

csr::Json checks_to_json(const CheckOutcome& res) {
  csr::Json j = csr::Json::object();
  for (const auto& [name, ok] : res.ok) j[name] = ok;
  return j;
}

// Shared flag block for run and sweep.
struct RunFlags {
  std::string graph_source;
  std::string scheduler = "lbr";
  std::string init = "all-one";
  std::string init_file;
  std::uint64_t seed = 0;
  long long max_steps = -1;  // -1: 3n^3 min{k-1,D} + n default
  std::vector<std::string> checks{"lemma1", "lemma2", "lemma3", "thm3", "thm4", "thm5"};
  std::string out;
};

struct TrialResult {
  bool ran = false;
  bool terminated = false;
  long long T = 0;
  long long bad_cases = 0;
  double ratio_thm4 = -1.0;
  double ratio_thm5 = -1.0;
  CheckOutcome checks;
  std::string error;
};

TrialResult one_trial(const RunFlags& flags, int k, std::uint64_t trial_seed) {
  TrialResult res;
  try {
    csr::Graph graph = resolve_graph(flags.graph_source, csr::mix_seed(trial_seed, 3));
    csr::Game game(graph, k);
    csr::AllocationProfile init =
        make_initial(game, flags.init, flags.init_file, csr::mix_seed(trial_seed, 1));
    csr::Scheduler sched{csr::parse_scheduler(flags.scheduler), csr::mix_seed(trial_seed, 2)};
    long long budget = flags.max_steps >= 0 ? flags.max_steps : csr::default_max_steps(game);
    csr::Trace trace = csr::run_dynamics(game, init, sched, budget);
    csr::BoundReport rep = csr::bound_report(game, trace);
    std::set<std::string> enabled(flags.checks.begin(), flags.checks.end());
    res.ran = true;
    res.terminated = trace.terminated;
    res.T = rep.T;
    res.bad_cases = rep.bad_case_count;
    if (rep.thm4_applicable && rep.bound_thm4 > 0) {
      res.ratio_thm4 = static_cast<double>(rep.T) / static_cast<double>(rep.bound_thm4);
    }
    if (rep.thm5_applicable && rep.bound_thm5 > 0) {
      res.ratio_thm5 = static_cast<double>(rep.T) / static_cast<double>(rep.bound_thm5);
    }
    res.checks = evaluate_checks(game, trace, rep, enabled);
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

int cmd_gen_graph(const std::string& spec, const std::string& out, std::uint64_t seed) {
  csr::Graph g = resolve_graph(spec, seed);
  csr::Json stats = csr::stats_to_json(csr::compute_stats(g));
  if (out.empty()) {
    std::cout << csr::graph_to_json(g).dump(2) << '\n';
    std::cerr << stats.dump(2) << '\n';
  } else {
    csr::write_file(out, csr::graph_to_json(g).dump(2) + "\n");
    std::cout << stats.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_run(const RunFlags& flags, int k, bool no_timestamp) {
  csr::Graph graph = resolve_graph(flags.graph_source, csr::mix_seed(flags.seed, 3));
  csr::Game game(graph, k);
  csr::AllocationProfile init =
      make_initial(game, flags.init, flags.init_file, csr::mix_seed(flags.seed, 1));
  csr::Scheduler sched{csr::parse_scheduler(flags.scheduler), csr::mix_seed(flags.seed, 2)};
  long long budget = flags.max_steps >= 0 ? flags.max_steps : csr::default_max_steps(game);
  csr::Trace trace = csr::run_dynamics(game, init, sched, budget);
  csr::BoundReport rep = csr::bound_report(game, trace);
  std::set<std::string> enabled(flags.checks.begin(), flags.checks.end());
  CheckOutcome checks = evaluate_checks(game, trace, rep, enabled);

  csr::Json report;
  report["command"] = "run";
  report["graph"] = {{"n", game.n()},
                     {"diameter", game.diameter()},
                     {"d_min", graph.min_degree()}};
  report["k"] = k;
  report["scheduler"] = flags.scheduler;
  report["seed"] = flags.seed;
  report["init"] = flags.init;
  report["max_steps"] = budget;
  report["terminated"] = trace.terminated;
  report["T"] = rep.T;
  report["final_profile"] = csr::profile_to_json(trace.final_profile);
  report["checks"] = checks_to_json(checks);
  report["all_checks_ok"] = checks.all_ok;
  report["bounds"] = csr::bound_report_to_json(rep);
  if (!no_timestamp) report["timestamp"] = utc_now();

  std::cout << report.dump(2) << '\n';
  if (!flags.out.empty()) {
    csr::write_file(flags.out + ".report.json", report.dump(2) + "\n");
    std::ostringstream jsonl;
    csr::write_trace_jsonl(jsonl, game, trace);
    csr::write_file(flags.out + ".trace.jsonl", jsonl.str());
    std::ostringstream csv;
    csr::write_trace_csv(csv, trace);
    csr::write_file(flags.out + ".trace.csv", csv.str());
  }
  if (!trace.terminated) return kExitBudget;
  if (!checks.all_ok) return kExitCheckFailed;
  return kExitOk;
}

int cmd_sweep(const RunFlags& flags, const std::vector<int>& ks, long long trials, int workers,
              bool no_timestamp) {
  if (trials < 0) throw csr::Error("--trials must be >= 0");
  if (workers < 1) throw csr::Error("--workers must be >= 1");
  for (const std::string& c : flags.checks) {
    if (!kCheckNames.count(c)) throw csr::Error("unknown check: " + c);
  }
  const std::size_t total = ks.size() * static_cast<std::size_t>(trials);
  std::vector<TrialResult> results(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < total;) {
      int k = ks[i / trials];
      std::uint64_t trial_seed = csr::mix_seed(csr::mix_seed(flags.seed, k), i % trials);
      results[i] = one_trial(flags, k, trial_seed);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  bool any_error = false, any_check_fail = false, any_unterminated = false;
  csr::Json per_k = csr::Json::array();
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    long long terminated = 0, errors = 0, bad_cases = 0, max_T = 0;
    double sum_T = 0.0, max_r4 = -1.0, max_r5 = -1.0;
    std::map<std::string, long long> pass, fail;
    for (long long t = 0; t < trials; ++t) {
      const TrialResult& r = results[ki * trials + t];
      if (!r.error.empty()) {
        ++errors;
        any_error = true;
        continue;
      }
      terminated += r.terminated ? 1 : 0;
      any_unterminated = any_unterminated || !r.terminated;
      bad_cases += r.bad_cases;
      max_T = std::max(max_T, r.T);
      sum_T += static_cast<double>(r.T);
      max_r4 = std::max(max_r4, r.ratio_thm4);
      max_r5 = std::max(max_r5, r.ratio_thm5);
      for (const auto& [name, ok] : r.checks.ok) {
        ++(ok ? pass : fail)[name];
        any_check_fail = any_check_fail || !ok;
      }
    }
    csr::Json row;
    row["k"] = ks[ki];
    row["trials"] = trials;
    row["terminated"] = terminated;
    row["errors"] = errors;
    row["bad_cases"] = bad_cases;
    row["max_T"] = max_T;
    row["mean_T"] = trials > 0 ? sum_T / static_cast<double>(trials) : 0.0;
    row["max_ratio_thm4"] = max_r4;
    row["max_ratio_thm5"] = max_r5;
    row["check_pass"] = csr::Json(pass);
    row["check_fail"] = csr::Json(fail);
    per_k.push_back(std::move(row));
  }

  csr::Json report;
  report["command"] = "sweep";
  report["graph_source"] = flags.graph_source;
  report["scheduler"] = flags.scheduler;
  report["init"] = flags.init;
  report["seed"] = flags.seed;
  report["trials"] = trials;
  report["workers"] = workers;
  report["checks_enabled"] = flags.checks;
  report["per_k"] = std::move(per_k);
  report["all_ok"] = !any_error && !any_check_fail && !any_unterminated;
  if (!no_timestamp) report["timestamp"] = utc_now();

  emit(report, flags.out);
  if (flags.out.empty()) {
  } else {
    std::cout << (report["all_ok"].get<bool>() ? "ok" : "violations found") << '\n';
  }
  if (any_error) return kExitInput;
  if (any_check_fail) return kExitCheckFailed;
  if (any_unterminated) return kExitBudget;
  return kExitOk;
}

int cmd_tree(const std::string& source, int k, int root, const std::string& out,
             std::uint64_t seed, bool no_timestamp) {
  csr::Game game(resolve_graph(source, seed), k);
  csr::TreeSolveResult res = csr::solve_tree(game, root);
  bool verified = csr::verify_theorem1(game, root);
  csr::Json j = csr::tree_result_to_json(res);
  j["command"] = "tree";
  j["k"] = k;
  j["equilibrium"] = csr::is_equilibrium(game, res.profile);
  j["verified"] = verified;
  if (!no_timestamp) j["timestamp"] = utc_now();
  emit(j, out);
  return verified ? kExitOk : kExitCheckFailed;
}

int cmd_plan(const std::string& source, int k, bool with_ip, const std::string& out,
             std::uint64_t seed, bool no_timestamp) {
  csr::Graph g = resolve_graph(source, seed);
  csr::CapacityPlan plan = csr::plan_capacity(g, k);
  csr::Json j = csr::plan_to_json(plan);
  j["command"] = "plan";
  j["k"] = k;
  j["n"] = g.n;
  j["step_budget"] = csr::planned_step_budget(g.n, k, csr::all_pairs_distances(g).diameter());
  if (with_ip) {
    csr::IpResult ip = csr::brute_force_ip(g, k);
    j["ip_total"] = ip.total;
    j["ip_y"] = ip.y;
  }
  if (!no_timestamp) j["timestamp"] = utc_now();
  emit(j, out);
  return kExitOk;
}

int cmd_coloring(const std::string& source, int k, std::uint64_t seed, const std::string& out,
                 bool no_timestamp) {
  csr::Game game(resolve_graph(source, seed), k);
  csr::ColoringReport rep = csr::check_proposition1(game);
  bool extension_ok = csr::check_coloring_extension(game, seed);
  csr::Json j = csr::coloring_report_to_json(rep);
  j["command"] = "coloring";
  j["k"] = k;
  j["extension_ok"] = extension_ok;
  if (!no_timestamp) j["timestamp"] = utc_now();
  emit(j, out);
  if (rep.h && !rep.matched) return kExitCheckFailed;
  if (!extension_ok) return kExitCheckFailed;
  return kExitOk;
}

int cmd_verify(const std::string& source, int k, const std::string& profile_path,
               const std::string& out, std::uint64_t seed, bool no_timestamp) {
  csr::Game game(resolve_graph(source, seed), k);
  csr::AllocationProfile p =
      csr::profile_from_json(csr::Json::parse(csr::read_file(profile_path)));
  csr::validate_profile(p, game.n(), game.k);
  bool eq = csr::is_equilibrium(game, p);
  csr::Json j;
  j["command"] = "verify";
  j["k"] = k;
  j["equilibrium"] = eq;
  csr::Json unsat = csr::Json::array();
  for (int i = 1; i <= game.n(); ++i) {
    if (csr::is_unsatisfied(game, p, i)) unsat.push_back(i);
  }
  j["unsatisfied"] = std::move(unsat);
  j["radius_vector"] = csr::radius_vector_to_json(csr::radius_vector(game, p));
  if (!no_timestamp) j["timestamp"] = utc_now();
  emit(j, out);
  return eq ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacitated selfish replication: dynamics, planning, and coloring driver"};
  app.set_config("--config");
  app.require_subcommand(1);

  bool no_timestamp = false;
  app.add_flag("--no-timestamp", no_timestamp, "omit the timestamp field from reports")
      ->configurable(true);

  auto* gen = app.add_subcommand("gen-graph", "generate a graph file and echo its stats");
  std::string gen_spec, gen_out;
  std::uint64_t gen_seed = 0;
  gen->add_option("spec", gen_spec, "generator spec, e.g. cycle:6 or 'erdos_renyi 30 0.5'");
  gen->add_option("--graph", gen_spec, "generator spec (alias for the positional)");
  gen->add_option("--out", gen_out, "output path (stdout when omitted)");
  gen->add_option("--seed", gen_seed, "seed for generator specs without seed=");

  RunFlags rf;
  int run_k = 2;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--graph", rf.graph_source, "graph file or generator spec")->required();
    cmd->add_option("--scheduler", rf.scheduler, "lbr | min-index | random")
        ->check(CLI::IsMember({"lbr", "min-index", "random"}));
    cmd->add_option("--init", rf.init, "all-one | random | file");
    cmd->add_option("--init-file", rf.init_file, "profile JSON for --init file");
    cmd->add_option("--seed", rf.seed, "base seed; init, scheduler, and generator streams derive from it");
    cmd->add_option("--max-steps", rf.max_steps, "step budget (-1: cubic default)");
    cmd->add_option("--checks", rf.checks, "subset of lemma1,lemma2,lemma3,thm3,thm4,thm5")
        ->delimiter(',')
        ->check(CLI::IsMember(kCheckNames));
    cmd->add_option("--out", rf.out, "output path / prefix");
  };

  auto* run = app.add_subcommand("run", "single dynamics run with checkers");
  add_run_flags(run);
  run->add_option("--k", run_k, "number of resources")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "seeded batch of runs with aggregate report");
  std::vector<int> sweep_ks{2};
  long long sweep_trials = 1;
  int sweep_workers = 1;
  add_run_flags(sweep);
  sweep->add_option("--k", sweep_ks, "resource counts, e.g. 2,3,4")->delimiter(',');
  sweep->add_option("--trials", sweep_trials, "trials per k");
  sweep->add_option("--workers", sweep_workers, "concurrent trial workers");

  auto* tree = app.add_subcommand("tree", "construct a tree equilibrium root-first");
  std::string tree_graph, tree_out;
  int tree_k = 2, tree_root = 1;
  std::uint64_t tree_seed = 0;
  tree->add_option("--graph", tree_graph, "tree file or generator spec")->required();
  tree->add_option("--k", tree_k)->check(CLI::PositiveNumber);
  tree->add_option("--root", tree_root, "allocation starts here");
  tree->add_option("--out", tree_out);
  tree->add_option("--seed", tree_seed);

  auto* plan = app.add_subcommand("plan", "LP capacity augmentation plan");
  std::string plan_graph, plan_out;
  int plan_k = 2;
  bool plan_ip = false;
  std::uint64_t plan_seed = 0;
  plan->add_option("--graph", plan_graph)->required();
  plan->add_option("--k", plan_k)->check(CLI::PositiveNumber);
  plan->add_flag("--ip", plan_ip, "also solve the exact integer program (n <= 12)");
  plan->add_option("--out", plan_out);
  plan->add_option("--seed", plan_seed);

  auto* coloring = app.add_subcommand("coloring", "power-coloring round trip report");
  std::string col_graph, col_out;
  int col_k = 2;
  std::uint64_t col_seed = 0;
  coloring->add_option("--graph", col_graph)->required();
  coloring->add_option("--k", col_k)->check(CLI::PositiveNumber);
  coloring->add_option("--seed", col_seed);
  coloring->add_option("--out", col_out);

  auto* verify = app.add_subcommand("verify", "equilibrium check of a profile file");
  std::string ver_graph, ver_profile, ver_out;
  int ver_k = 2;
  std::uint64_t ver_seed = 0;
  verify->add_option("--graph", ver_graph)->required();
  verify->add_option("--k", ver_k)->check(CLI::PositiveNumber);
  verify->add_option("--profile", ver_profile, "profile JSON file")->required();
  verify->add_option("--seed", ver_seed);
  verify->add_option("--out", ver_out);

  // Parent flags (--no-timestamp, --config) stay valid after a subcommand name.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (gen->parsed()) {
      if (gen_spec.empty()) throw csr::Error("gen-graph needs a generator spec");
      return cmd_gen_graph(gen_spec, gen_out, gen_seed);
    }
    if (run->parsed()) return cmd_run(rf, run_k, no_timestamp);
    if (sweep->parsed()) {
      return cmd_sweep(rf, sweep_ks, sweep_trials, sweep_workers, no_timestamp);
    }
    if (tree->parsed()) {
      return cmd_tree(tree_graph, tree_k, tree_root, tree_out, tree_seed, no_timestamp);
    }
    if (plan->parsed()) return cmd_plan(plan_graph, plan_k, plan_ip, plan_out, plan_seed, no_timestamp);
    if (coloring->parsed()) return cmd_coloring(col_graph, col_k, col_seed, col_out, no_timestamp);
    if (verify->parsed()) {
      return cmd_verify(ver_graph, ver_k, ver_profile, ver_out, ver_seed, no_timestamp);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
