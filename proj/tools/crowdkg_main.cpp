// crowdkg: budget-allocation policies for crowd labeling.
//
// Subcommands:
//   reward-table  per-instance transition probabilities and one-step rewards
//   dp            exact finite-horizon solve of a small state matrix
//   simulate      synthetic experiment grid, CSV/JSON results
//   replay        the same grid over a recorded label dataset

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdkg/beta_core.hpp"
#include "crowdkg/binary_mdp.hpp"
#include "crowdkg/errors.hpp"
#include "crowdkg/harness.hpp"
#include "crowdkg/policies.hpp"

namespace {

using namespace crowdkg;

BetaState parse_state(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw validation_error("state '" + text + "': expected a,b");
  }
  try {
    std::size_t used = 0;
    const double a = std::stod(text.substr(0, comma), &used);
    const double b = std::stod(text.substr(comma + 1), &used);
    const BetaState s{a, b};
    if (!s.valid()) throw validation_error("state '" + text + "': counts must be positive");
    return s;
  } catch (const std::invalid_argument&) {
    throw validation_error("state '" + text + "': expected a,b");
  }
}

std::vector<BetaState> parse_states(const std::vector<std::string>& texts) {
  std::vector<BetaState> states;
  states.reserve(texts.size());
  for (const auto& t : texts) states.push_back(parse_state(t));
  return states;
}

void emit_rows(const std::vector<ResultRow>& rows, const std::string& out_path,
               bool as_json, bool timing) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw validation_error("cannot open output '" + out_path + "'");
    out = &file;
  }
  if (as_json) {
    write_json(rows, *out);
  } else {
    write_csv(rows, *out, timing);
  }
}

int run_reward_table(const std::vector<std::string>& state_texts) {
  const auto states = parse_states(state_texts);
  std::printf("%-10s %-12s %-12s %-14s %-14s %-14s\n", "instance", "p1", "p2", "R1", "R2", "R");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto [p1, p2] = transition_probs(states[i]);
    const RewardPair r = reward_pair(states[i]);
    const double expected = scored_reward(states[i], RiskMode::expected());
    std::printf("%-10zu %-12.10g %-12.10g %-14.10g %-14.10g %-14.10g\n", i, p1, p2, r.r_pos,
                r.r_neg, expected);
  }
  return 0;
}

int run_dp(const std::vector<std::string>& state_texts, std::uint64_t budget,
           std::uint64_t cap) {
  const auto initial = StateMatrix::from_states(parse_states(state_texts));
  const DPSolution sol = dp_solve(initial, budget, cap);
  std::printf("value        %.12g\n", sol.value);
  std::printf("first_action %zu\n", sol.first_action);
  std::printf("table_size   %zu\n", sol.table.size());
  return 0;
}

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string policies_csv;
  std::string budgets_csv;
  std::vector<std::uint64_t> budgets;
  std::vector<std::string> policies;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t reps = 0;
  bool as_json = false;
  bool timing = false;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : text) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void apply_policy_flags(ExperimentConfig& cfg, const CommonFlags& flags) {
  if (!flags.policies_csv.empty()) {
    cfg.policies.clear();
    for (const auto& name : split_list(flags.policies_csv)) {
      cfg.policies.push_back(PolicySpec::parse(name));
    }
  }
  if (flags.alpha > 0.0) {
    for (auto& p : cfg.policies) {
      if (p.rule == PolicySpec::Rule::CVaRKG) p.alpha = flags.alpha;
    }
  }
  if (!flags.budgets_csv.empty()) {
    cfg.budgets.clear();
    for (const auto& b : split_list(flags.budgets_csv)) {
      try {
        cfg.budgets.push_back(std::stoull(b));
      } catch (const std::exception&) {
        throw validation_error("budgets: bad entry '" + b + "'");
      }
    }
  }
  if (flags.reps > 0) cfg.replications = flags.reps;
  if (flags.seed_set) cfg.seed = flags.seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget allocation policies for crowd labeling"};
  app.require_subcommand(1);

  // reward-table
  auto* table_cmd =
      app.add_subcommand("reward-table", "Print transition/reward rows for given states");
  std::vector<std::string> table_states;
  table_cmd->add_option("states", table_states, "States as a,b (e.g. 3,1 2,2 2,1)")
      ->required();

  // dp
  auto* dp_cmd = app.add_subcommand("dp", "Exact finite-horizon solve");
  std::vector<std::string> dp_states;
  std::uint64_t dp_budget = 1;
  std::uint64_t dp_cap = 20'000'000;
  dp_cmd->add_option("states", dp_states, "Initial states as a,b")->required();
  dp_cmd->add_option("--budget", dp_budget, "Label budget")->required();
  dp_cmd->add_option("--cap", dp_cap, "Refuse above this reachable-state count");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Synthetic experiment grid");
  CommonFlags sim;
  std::string sim_mode;
  std::size_t sim_k = 0, sim_m = 0, sim_c = 0, sim_p = 0;
  std::string sim_instance_prior, sim_worker_prior, sim_generator, sim_worker_generator;
  sim_cmd->add_option("--config", sim.config_path, "JSON config; flags override its fields");
  sim_cmd->add_option("--mode", sim_mode,
                      "binary-homogeneous|binary-heterogeneous|multiclass|contextual");
  sim_cmd->add_option("--K", sim_k, "Instances");
  sim_cmd->add_option("--M", sim_m, "Workers (heterogeneous)");
  sim_cmd->add_option("--C", sim_c, "Classes (multiclass)");
  sim_cmd->add_option("--p", sim_p, "Feature dimension (contextual)");
  sim_cmd->add_option("--instance-prior", sim_instance_prior, "a,b");
  sim_cmd->add_option("--worker-prior", sim_worker_prior, "c,d");
  sim_cmd->add_option("--generator", sim_generator, "True theta distribution a,b");
  sim_cmd->add_option("--worker-generator", sim_worker_generator, "True rho distribution a,b");
  sim_cmd->add_option("--budgets", sim.budgets_csv, "Comma-separated budgets");
  sim_cmd->add_option("--policies", sim.policies_csv,
                      "Comma-separated: uniform,kg,kg-random,optkg,pesskg,cvarkg:a,dp");
  sim_cmd->add_option("--alpha", sim.alpha, "Override alpha of cvarkg policies");
  sim_cmd->add_option("--reps", sim.reps, "Replications");
  sim_cmd->add_option("--seed", sim.seed, "Base seed")->each([&](const std::string&) {
    sim.seed_set = true;
  });
  sim_cmd->add_option("--out", sim.out_path, "Output path (default stdout)");
  sim_cmd->add_flag("--json", sim.as_json, "Emit JSON (with traces if configured)");
  sim_cmd->add_flag("--timing", sim.timing, "Add a micros column to the CSV");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Experiment over a recorded dataset");
  CommonFlags rep;
  std::string rep_data, rep_features, rep_instance_prior, rep_worker_prior;
  std::size_t rep_classes = 2;
  bool rep_per_pair = false;
  replay_cmd->add_option("--data", rep_data, "Dataset CSV")->required();
  replay_cmd->add_option("--classes", rep_classes, "Label classes (2 = binary +1/-1)");
  replay_cmd->add_option("--features", rep_features, "Feature CSV (contextual replay)");
  replay_cmd->add_flag("--per-pair", rep_per_pair,
                       "Pool labels per (instance, worker) and model workers");
  replay_cmd->add_option("--config", rep.config_path, "JSON config; flags override");
  replay_cmd->add_option("--instance-prior", rep_instance_prior, "a,b");
  replay_cmd->add_option("--worker-prior", rep_worker_prior, "c,d");
  replay_cmd->add_option("--budgets", rep.budgets_csv, "Comma-separated budgets");
  replay_cmd->add_option("--policies", rep.policies_csv, "Comma-separated policy names");
  replay_cmd->add_option("--alpha", rep.alpha, "Override alpha of cvarkg policies");
  replay_cmd->add_option("--reps", rep.reps, "Replications");
  replay_cmd->add_option("--seed", rep.seed, "Base seed")->each([&](const std::string&) {
    rep.seed_set = true;
  });
  replay_cmd->add_option("--out", rep.out_path, "Output path (default stdout)");
  replay_cmd->add_flag("--json", rep.as_json, "Emit JSON");
  replay_cmd->add_flag("--timing", rep.timing, "Add a micros column to the CSV");

  try {
    app.parse(argc, argv);

    if (table_cmd->parsed()) return run_reward_table(table_states);
    if (dp_cmd->parsed()) return run_dp(dp_states, dp_budget, dp_cap);

    if (sim_cmd->parsed()) {
      ExperimentConfig cfg;
      if (!sim.config_path.empty()) cfg = ExperimentConfig::from_json_file(sim.config_path);
      if (!sim_mode.empty()) cfg.mode = parse_mode(sim_mode);
      if (sim_k) cfg.instances = sim_k;
      if (sim_m) cfg.workers = sim_m;
      if (sim_c) cfg.classes = sim_c;
      if (sim_p) cfg.dim = sim_p;
      if (!sim_instance_prior.empty()) {
        const BetaState prior = parse_state(sim_instance_prior);
        cfg.instance_prior = prior;
        if (sim_generator.empty() && sim.config_path.empty()) {
          cfg.generator = ScalarGenerator::beta(prior.a, prior.b);
        }
      }
      if (!sim_worker_prior.empty()) {
        const BetaState prior = parse_state(sim_worker_prior);
        cfg.worker_prior = {prior.a, prior.b};
        if (sim_worker_generator.empty() && sim.config_path.empty()) {
          cfg.worker_generator = ScalarGenerator::beta(prior.a, prior.b);
        }
      }
      if (!sim_generator.empty()) {
        const BetaState g = parse_state(sim_generator);
        cfg.generator = ScalarGenerator::beta(g.a, g.b);
      }
      if (!sim_worker_generator.empty()) {
        const BetaState g = parse_state(sim_worker_generator);
        cfg.worker_generator = ScalarGenerator::beta(g.a, g.b);
      }
      apply_policy_flags(cfg, sim);
      if (sim.as_json) cfg.keep_traces = true;
      const auto rows = run_experiment(cfg);
      emit_rows(rows, sim.out_path, sim.as_json, sim.timing);
      return 0;
    }

    if (replay_cmd->parsed()) {
      ExperimentConfig cfg;
      if (!rep.config_path.empty()) cfg = ExperimentConfig::from_json_file(rep.config_path);
      if (!rep_instance_prior.empty()) {
        cfg.instance_prior = parse_state(rep_instance_prior);
      }
      if (!rep_worker_prior.empty()) {
        const BetaState prior = parse_state(rep_worker_prior);
        cfg.worker_prior = {prior.a, prior.b};
      }
      apply_policy_flags(cfg, rep);
      if (rep.as_json) cfg.keep_traces = true;

      const auto granularity = rep_per_pair ? ReplayEnv::Granularity::PerPair
                                            : ReplayEnv::Granularity::PerInstance;
      const ReplayDataset data = load_replay_dataset(rep_data, rep_classes, granularity);
      std::fprintf(stderr, "loaded %zu labels: K=%zu M=%zu truth=%zu/%zu\n", data.rows,
                   data.env.num_instances, data.env.num_workers, data.truth_covered,
                   data.env.num_instances);

      std::vector<ResultRow> rows;
      if (!rep_features.empty()) {
        const FeatureSet features = load_features_csv(rep_features, data.instance_ids);
        rows = run_replay_experiment(data, cfg, &features);
      } else {
        rows = run_replay_experiment(data, cfg);
      }
      emit_rows(rows, rep.out_path, rep.as_json, rep.timing);
      return 0;
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
