#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "crowdkg/binary_mdp.hpp"
#include "crowdkg/contextual.hpp"
#include "crowdkg/hetero.hpp"
#include "crowdkg/multiclass.hpp"
#include "crowdkg/policies.hpp"

namespace crowdkg {

enum class ExperimentMode { BinaryHomogeneous, BinaryHeterogeneous, Multiclass, Contextual };

std::string to_string(ExperimentMode mode);
ExperimentMode parse_mode(const std::string& text);

// True sampling distribution for a latent scalar in [0,1] (a soft label or
// a worker reliability). May differ from the prior to study mis-specified
// beliefs. Grid pins one value per index.
struct ScalarGenerator {
  enum class Kind { Beta, Grid };

  Kind kind = Kind::Beta;
  double a = 1.0;
  double b = 1.0;
  std::vector<double> values;

  static ScalarGenerator beta(double a, double b) { return {Kind::Beta, a, b, {}}; }
  static ScalarGenerator grid(std::vector<double> v) {
    return {Kind::Grid, 0.0, 0.0, std::move(v)};
  }
};

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::BinaryHomogeneous;
  std::size_t instances = 1;  // K
  std::size_t workers = 0;    // M, heterogeneous mode
  std::size_t classes = 2;    // C, multi-class mode
  std::size_t dim = 1;        // p, contextual mode

  BetaState instance_prior{1.0, 1.0};
  WorkerState worker_prior{4.0, 1.0};
  std::vector<double> dirichlet_prior;  // defaults to all-ones of length C

  ScalarGenerator generator = ScalarGenerator::beta(1.0, 1.0);
  ScalarGenerator worker_generator = ScalarGenerator::beta(4.0, 1.0);
  std::vector<double> dirichlet_generator;  // defaults to dirichlet_prior

  std::vector<std::uint64_t> budgets;
  std::vector<PolicySpec> policies;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  bool keep_traces = false;

  void validate() const;
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

struct ResultRow {
  std::string policy;
  std::uint64_t budget = 0;
  std::size_t replication = 0;
  double accuracy = 0.0;
  std::vector<std::uint64_t> instance_counts;
  std::vector<std::uint64_t> worker_counts;  // empty outside heterogeneous runs
  std::uint64_t micros = 0;
  std::vector<LabelOutcome> outcomes;  // filled only when keep_traces is set
};

// One row per (policy, budget, replication), in that loop order.
// Replication r of every cell regenerates its data under seed XOR r, so two
// runs of the same config produce identical rows.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// Fixed column order: policy,budget,replication,accuracy,instance_counts,
// worker_counts[,micros]. Timing is opt-in so that default output is
// byte-stable across runs.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out, bool include_timing);

// Debugging variant: everything write_csv has, plus timing and any traces.
void write_json(const std::vector<ResultRow>& rows, std::ostream& out);

struct ReplayDataset {
  ReplayEnv env;
  std::vector<std::string> instance_ids;  // dense index -> external id
  std::vector<std::string> worker_ids;
  std::size_t classes = 2;
  std::size_t rows = 0;
  std::size_t truth_covered = 0;  // instances with a known true label
};

// CSV with a required `instance_id,worker_id,label,true_label` header.
// Binary runs use labels in {1,-1}; `classes` > 2 switches the label domain
// to {0..C-1}. true_label additionally admits NA.
ReplayDataset load_replay_dataset(const std::string& path, std::size_t classes,
                                  ReplayEnv::Granularity granularity);

// CSV with an `instance_id,f0,...,f{p-1}` header, joined by id against the
// dataset's instance order. Every dataset instance must appear.
FeatureSet load_features_csv(const std::string& path,
                             const std::vector<std::string>& instance_ids);

// Episodes over a recorded dataset. The dataset fixes K (and M); policies,
// budgets, replications, seed, and priors come from the config. Per-pair
// datasets run the worker-aware process; `features`, when given, runs the
// contextual one.
std::vector<ResultRow> run_replay_experiment(const ReplayDataset& data,
                                             const ExperimentConfig& config,
                                             const FeatureSet* features = nullptr);

}  // namespace crowdkg
