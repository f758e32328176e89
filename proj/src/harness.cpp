#include "crowdkg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "crowdkg/errors.hpp"
#include "crowdkg/special.hpp"

namespace crowdkg {

using nlohmann::json;

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::BinaryHomogeneous:
      return "binary-homogeneous";
    case ExperimentMode::BinaryHeterogeneous:
      return "binary-heterogeneous";
    case ExperimentMode::Multiclass:
      return "multiclass";
    case ExperimentMode::Contextual:
      return "contextual";
  }
  return "?";
}

ExperimentMode parse_mode(const std::string& text) {
  if (text == "binary-homogeneous") return ExperimentMode::BinaryHomogeneous;
  if (text == "binary-heterogeneous") return ExperimentMode::BinaryHeterogeneous;
  if (text == "multiclass") return ExperimentMode::Multiclass;
  if (text == "contextual") return ExperimentMode::Contextual;
  throw validation_error("mode: unknown value '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (instances < 1) throw validation_error("K: need at least one instance");
  if (replications < 1) throw validation_error("replications: must be >= 1");
  if (budgets.empty()) throw validation_error("budgets: must be non-empty");
  if (policies.empty()) throw validation_error("policies: must be non-empty");
  if (!instance_prior.valid()) throw validation_error("instance_prior: invalid pseudo-counts");
  for (const auto& p : policies) {
    if (!p.valid()) throw validation_error("policies: invalid entry '" + p.label() + "'");
    if (p.rule == PolicySpec::Rule::DPExact && mode != ExperimentMode::BinaryHomogeneous) {
      throw validation_error("policies: exact DP runs only in binary-homogeneous mode");
    }
  }
  if (generator.kind == ScalarGenerator::Kind::Grid &&
      generator.values.size() != instances) {
    throw validation_error("generator: grid must list one value per instance");
  }
  if (mode == ExperimentMode::BinaryHeterogeneous) {
    if (workers < 1) throw validation_error("M: heterogeneous mode needs workers");
    if (!worker_prior.valid()) throw validation_error("worker_prior: invalid pseudo-counts");
    if (worker_generator.kind == ScalarGenerator::Kind::Grid &&
        worker_generator.values.size() != workers) {
      throw validation_error("worker_generator: grid must list one value per worker");
    }
  }
  if (mode == ExperimentMode::Multiclass) {
    if (classes < 2) throw validation_error("C: multi-class mode needs >= 2 classes");
    if (!dirichlet_prior.empty() && dirichlet_prior.size() != classes) {
      throw validation_error("dirichlet_prior: needs one entry per class");
    }
    if (!dirichlet_generator.empty() && dirichlet_generator.size() != classes) {
      throw validation_error("dirichlet_generator: needs one entry per class");
    }
  }
  if (mode == ExperimentMode::Contextual && dim < 1) {
    throw validation_error("p: contextual mode needs a positive feature dimension");
  }
}

namespace {

ScalarGenerator generator_from_json(const json& j, const char* field) {
  if (j.is_array()) {
    if (j.size() != 2) throw validation_error(std::string(field) + ": expected [a, b]");
    return ScalarGenerator::beta(j[0].get<double>(), j[1].get<double>());
  }
  if (j.is_object()) {
    if (j.contains("beta")) {
      const auto& v = j["beta"];
      return ScalarGenerator::beta(v[0].get<double>(), v[1].get<double>());
    }
    if (j.contains("grid")) {
      return ScalarGenerator::grid(j["grid"].get<std::vector<double>>());
    }
  }
  throw validation_error(std::string(field) + ": expected [a,b], {\"beta\":[a,b]}, or {\"grid\":[...]}");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("mode")) cfg.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("K")) cfg.instances = j["K"].get<std::size_t>();
    if (j.contains("M")) cfg.workers = j["M"].get<std::size_t>();
    if (j.contains("C")) cfg.classes = j["C"].get<std::size_t>();
    if (j.contains("p")) cfg.dim = j["p"].get<std::size_t>();
    if (j.contains("instance_prior")) {
      cfg.instance_prior = {j["instance_prior"][0].get<double>(),
                            j["instance_prior"][1].get<double>()};
    }
    if (j.contains("worker_prior")) {
      cfg.worker_prior = {j["worker_prior"][0].get<double>(),
                          j["worker_prior"][1].get<double>()};
    }
    if (j.contains("dirichlet_prior")) {
      cfg.dirichlet_prior = j["dirichlet_prior"].get<std::vector<double>>();
    }
    if (j.contains("generator")) {
      cfg.generator = generator_from_json(j["generator"], "generator");
    } else {
      cfg.generator = ScalarGenerator::beta(cfg.instance_prior.a, cfg.instance_prior.b);
    }
    if (j.contains("worker_generator")) {
      cfg.worker_generator = generator_from_json(j["worker_generator"], "worker_generator");
    } else {
      cfg.worker_generator = ScalarGenerator::beta(cfg.worker_prior.c, cfg.worker_prior.d);
    }
    if (j.contains("dirichlet_generator")) {
      cfg.dirichlet_generator = j["dirichlet_generator"].get<std::vector<double>>();
    }
    if (j.contains("budgets")) cfg.budgets = j["budgets"].get<std::vector<std::uint64_t>>();
    if (j.contains("policies")) {
      for (const auto& p : j["policies"]) {
        cfg.policies.push_back(PolicySpec::parse(p.get<std::string>()));
      }
    }
    if (j.contains("replications")) cfg.replications = j["replications"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("keep_traces")) cfg.keep_traces = j["keep_traces"].get<bool>();
  } catch (const json::exception& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

// ---------------------------------------------------------------------------
// Seeded samplers on the stable Rng stream.

namespace {

double normal_sample(Rng& rng) {
  const double u1 = 1.0 - rng.next_double();  // (0, 1]
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Marsaglia-Tsang, with the power boost for shape < 1.
double gamma_sample(Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = 1.0 - rng.next_double();
    return gamma_sample(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal_sample(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double beta_sample(Rng& rng, double a, double b) {
  const double x = gamma_sample(rng, a);
  const double y = gamma_sample(rng, b);
  return x / (x + y);
}

std::vector<double> dirichlet_sample(Rng& rng, const std::vector<double>& alpha) {
  std::vector<double> draw(alpha.size());
  double total = 0.0;
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    draw[c] = gamma_sample(rng, alpha[c]);
    total += draw[c];
  }
  for (double& v : draw) v /= total;
  return draw;
}

std::vector<double> scalar_draws(Rng& rng, const ScalarGenerator& gen, std::size_t n) {
  if (gen.kind == ScalarGenerator::Kind::Grid) return gen.values;
  std::vector<double> out(n);
  for (double& v : out) v = beta_sample(rng, gen.a, gen.b);
  return out;
}

// Independent streams per replication: labels/policy use base ^ r directly
// (the episode derives its own policy stream), data generation gets a mixed
// offset so the two never overlap.
std::uint64_t episode_seed(std::uint64_t seed, std::size_t replication) {
  return seed ^ static_cast<std::uint64_t>(replication);
}

std::uint64_t data_seed(std::uint64_t seed, std::size_t replication) {
  return Rng::mix(episode_seed(seed, replication) ^ 0x8f1bbcdc2f1bbcdcull);
}

struct EpisodeResult {
  double accuracy = 0.0;
  std::vector<std::uint64_t> instance_counts;
  std::vector<std::uint64_t> worker_counts;
  std::vector<LabelOutcome> outcomes;
};

EpisodeResult run_one(const ExperimentConfig& cfg, const PolicySpec& policy,
                      std::uint64_t budget, std::size_t replication) {
  const std::uint64_t ep_seed = episode_seed(cfg.seed, replication);
  Rng data_rng(data_seed(cfg.seed, replication));
  EpisodeResult out;

  switch (cfg.mode) {
    case ExperimentMode::BinaryHomogeneous: {
      SyntheticEnv env{scalar_draws(data_rng, cfg.generator, cfg.instances)};
      auto trace = run_episode(env, policy, budget,
                               StateMatrix::from_prior(cfg.instances, cfg.instance_prior),
                               ep_seed);
      out.accuracy = trace.accuracy;
      out.instance_counts = std::move(trace.label_counts);
      out.outcomes = std::move(trace.outcomes);
      break;
    }
    case ExperimentMode::BinaryHeterogeneous: {
      SyntheticHeteroEnv env{scalar_draws(data_rng, cfg.generator, cfg.instances),
                             scalar_draws(data_rng, cfg.worker_generator, cfg.workers)};
      auto trace = run_hetero_episode(
          env, policy, budget, std::vector<BetaState>(cfg.instances, cfg.instance_prior),
          std::vector<WorkerState>(cfg.workers, cfg.worker_prior), ep_seed);
      out.accuracy = trace.accuracy;
      out.instance_counts = std::move(trace.instance_counts);
      out.worker_counts = std::move(trace.worker_counts);
      out.outcomes = std::move(trace.outcomes);
      break;
    }
    case ExperimentMode::Multiclass: {
      std::vector<double> prior = cfg.dirichlet_prior;
      if (prior.empty()) prior.assign(cfg.classes, 1.0);
      std::vector<double> gen = cfg.dirichlet_generator;
      if (gen.empty()) gen = prior;
      SyntheticMulticlassEnv env;
      env.theta.reserve(cfg.instances);
      for (std::size_t i = 0; i < cfg.instances; ++i) {
        env.theta.push_back(dirichlet_sample(data_rng, gen));
      }
      auto trace = run_multiclass_episode(
          env, policy, budget,
          std::vector<DirichletState>(cfg.instances, DirichletState{prior}), ep_seed);
      out.accuracy = trace.accuracy;
      out.instance_counts = std::move(trace.label_counts);
      out.outcomes = std::move(trace.outcomes);
      break;
    }
    case ExperimentMode::Contextual: {
      FeatureSet features;
      features.vectors.reserve(cfg.instances);
      for (std::size_t i = 0; i < cfg.instances; ++i) {
        Vec x(cfg.dim);
        for (double& v : x) v = normal_sample(data_rng);
        features.vectors.push_back(std::move(x));
      }
      Vec w(cfg.dim);
      for (double& v : w) v = normal_sample(data_rng);
      SyntheticContextualEnv env;
      env.theta.reserve(cfg.instances);
      for (const Vec& x : features.vectors) {
        env.theta.push_back(special::sigmoid(dot(w, x)));
      }
      auto trace = run_contextual_episode(env, policy, budget,
                                          GaussianBelief::standard(cfg.dim), features,
                                          ep_seed);
      out.accuracy = trace.accuracy;
      out.instance_counts = std::move(trace.label_counts);
      out.outcomes = std::move(trace.outcomes);
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ResultRow> rows;
  rows.reserve(cfg.policies.size() * cfg.budgets.size() * cfg.replications);
  for (const auto& policy : cfg.policies) {
    for (const std::uint64_t budget : cfg.budgets) {
      for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        EpisodeResult ep = run_one(cfg, policy, budget, rep);
        const auto stop = std::chrono::steady_clock::now();
        ResultRow row;
        row.policy = policy.label();
        row.budget = budget;
        row.replication = rep;
        row.accuracy = ep.accuracy;
        row.instance_counts = std::move(ep.instance_counts);
        row.worker_counts = std::move(ep.worker_counts);
        row.micros = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count());
        if (cfg.keep_traces) row.outcomes = std::move(ep.outcomes);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

namespace {

std::string join_counts(const std::vector<std::uint64_t>& counts) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(counts[i]);
  }
  return out;
}

std::string format_accuracy(double acc) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", acc);
  return buf;
}

}  // namespace

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out, bool include_timing) {
  out << "policy,budget,replication,accuracy,instance_counts,worker_counts";
  if (include_timing) out << ",micros";
  out << '\n';
  for (const auto& row : rows) {
    out << row.policy << ',' << row.budget << ',' << row.replication << ','
        << format_accuracy(row.accuracy) << ',' << join_counts(row.instance_counts) << ','
        << join_counts(row.worker_counts);
    if (include_timing) out << ',' << row.micros;
    out << '\n';
  }
}

void write_json(const std::vector<ResultRow>& rows, std::ostream& out) {
  json arr = json::array();
  for (const auto& row : rows) {
    json r{{"policy", row.policy},
           {"budget", row.budget},
           {"replication", row.replication},
           {"accuracy", row.accuracy},
           {"instance_counts", row.instance_counts},
           {"worker_counts", row.worker_counts},
           {"micros", row.micros}};
    if (!row.outcomes.empty()) {
      json trace = json::array();
      for (const auto& o : row.outcomes) {
        trace.push_back({{"instance", o.instance},
                         {"worker", o.worker},
                         {"label", o.label},
                         {"stage", o.stage}});
      }
      r["outcomes"] = std::move(trace);
    }
    arr.push_back(std::move(r));
  }
  out << arr.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Replay ingestion.

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

int parse_label(const std::string& text, std::size_t classes, std::size_t line_no) {
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw validation_error("line " + std::to_string(line_no) + ": unparseable label '" +
                           text + "'");
  }
  if (classes == 2) {
    if (value != 1 && value != -1) {
      throw validation_error("line " + std::to_string(line_no) + ": binary label must be 1 or -1");
    }
  } else if (value < 0 || static_cast<std::size_t>(value) >= classes) {
    throw validation_error("line " + std::to_string(line_no) + ": label outside 0.." +
                           std::to_string(classes - 1));
  }
  return value;
}

}  // namespace

ReplayDataset load_replay_dataset(const std::string& path, std::size_t classes,
                                  ReplayEnv::Granularity granularity) {
  if (classes < 2) throw validation_error("classes: must be >= 2");
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open dataset '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw validation_error("dataset '" + path + "' is empty");
  {
    const auto header = split_csv_line(line);
    const std::vector<std::string> expect{"instance_id", "worker_id", "label", "true_label"};
    if (header.size() != 4 || !std::equal(header.begin(), header.end(), expect.begin())) {
      throw validation_error("line 1: header must be 'instance_id,worker_id,label,true_label'");
    }
  }

  ReplayDataset data;
  data.classes = classes;
  std::map<std::string, std::size_t> instance_index;
  std::map<std::string, std::size_t> worker_index;
  std::vector<std::optional<int>> truths;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw validation_error("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                             std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw validation_error("line " + std::to_string(line_no) + ": empty id");
    }

    const auto [ii, inserted_i] =
        instance_index.try_emplace(fields[0], data.instance_ids.size());
    if (inserted_i) {
      data.instance_ids.push_back(fields[0]);
      truths.emplace_back();
    }
    const auto [wi, inserted_w] = worker_index.try_emplace(fields[1], data.worker_ids.size());
    if (inserted_w) data.worker_ids.push_back(fields[1]);
    const std::size_t inst = ii->second;
    const std::size_t work = wi->second;

    const int label = parse_label(fields[2], classes, line_no);
    if (fields[3] != "NA") {
      const int truth = parse_label(fields[3], classes, line_no);
      if (truths[inst].has_value() && *truths[inst] != truth) {
        throw validation_error("line " + std::to_string(line_no) +
                               ": conflicting true_label for instance '" + fields[0] + "'");
      }
      truths[inst] = truth;
    }

    if (data.env.instance_pools.size() <= inst) data.env.instance_pools.resize(inst + 1);
    data.env.instance_pools[inst].push_back(label);
    data.env.pair_pools[{inst, work}].push_back(label);
    ++data.rows;
  }
  if (data.rows == 0) throw validation_error("dataset '" + path + "' has no label rows");

  data.env.granularity = granularity;
  data.env.num_instances = data.instance_ids.size();
  data.env.num_workers = data.worker_ids.size();
  data.env.true_labels = std::move(truths);
  for (const auto& t : data.env.true_labels) {
    if (t.has_value()) ++data.truth_covered;
  }
  return data;
}

FeatureSet load_features_csv(const std::string& path,
                             const std::vector<std::string>& instance_ids) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open features '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw validation_error("features '" + path + "' is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "instance_id") {
    throw validation_error("line 1: feature header must be 'instance_id,f0,...'");
  }
  const std::size_t dim = header.size() - 1;

  std::map<std::string, Vec> by_id;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != dim + 1) {
      throw validation_error("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(dim + 1) + " fields");
    }
    Vec x(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      try {
        std::size_t used = 0;
        x[d] = std::stod(fields[d + 1], &used);
        if (used != fields[d + 1].size()) throw std::invalid_argument(fields[d + 1]);
      } catch (const std::exception&) {
        throw validation_error("line " + std::to_string(line_no) + ": bad feature value '" +
                               fields[d + 1] + "'");
      }
    }
    by_id[fields[0]] = std::move(x);
  }

  FeatureSet features;
  features.vectors.reserve(instance_ids.size());
  for (const auto& id : instance_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw validation_error("features: no row for instance '" + id + "'");
    }
    features.vectors.push_back(it->second);
  }
  return features;
}

std::vector<ResultRow> run_replay_experiment(const ReplayDataset& data,
                                             const ExperimentConfig& cfg,
                                             const FeatureSet* features) {
  if (cfg.budgets.empty()) throw validation_error("budgets: must be non-empty");
  if (cfg.policies.empty()) throw validation_error("policies: must be non-empty");
  if (cfg.replications < 1) throw validation_error("replications: must be >= 1");

  const std::size_t k = data.env.num_instances;
  const bool per_pair = data.env.granularity == ReplayEnv::Granularity::PerPair;
  for (const auto& p : cfg.policies) {
    if (p.rule == PolicySpec::Rule::DPExact) {
      throw validation_error("policies: exact DP assumes an unrestricted synthetic source");
    }
  }
  if (features && (per_pair || data.classes != 2)) {
    throw validation_error("features: contextual replay runs on binary per-instance data");
  }

  std::vector<ResultRow> rows;
  for (const auto& policy : cfg.policies) {
    for (const std::uint64_t budget : cfg.budgets) {
      for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
        const std::uint64_t ep_seed = episode_seed(cfg.seed, rep);
        const auto start = std::chrono::steady_clock::now();
        ResultRow row;
        if (features) {
          auto trace = run_contextual_episode(data.env, policy, budget,
                                              GaussianBelief::standard(features->dim()),
                                              *features, ep_seed);
          row.accuracy = trace.accuracy;
          row.instance_counts = std::move(trace.label_counts);
          if (cfg.keep_traces) row.outcomes = std::move(trace.outcomes);
        } else if (per_pair) {
          auto trace = run_hetero_episode(
              data.env, policy, budget, std::vector<BetaState>(k, cfg.instance_prior),
              std::vector<WorkerState>(data.env.num_workers, cfg.worker_prior), ep_seed);
          row.accuracy = trace.accuracy;
          row.instance_counts = std::move(trace.instance_counts);
          row.worker_counts = std::move(trace.worker_counts);
          if (cfg.keep_traces) row.outcomes = std::move(trace.outcomes);
        } else if (data.classes > 2) {
          std::vector<double> prior = cfg.dirichlet_prior;
          if (prior.empty()) prior.assign(data.classes, 1.0);
          auto trace = run_multiclass_episode(
              data.env, policy, budget,
              std::vector<DirichletState>(k, DirichletState{prior}), ep_seed);
          row.accuracy = trace.accuracy;
          row.instance_counts = std::move(trace.label_counts);
          if (cfg.keep_traces) row.outcomes = std::move(trace.outcomes);
        } else {
          auto trace = run_episode(data.env, policy, budget,
                                   StateMatrix::from_prior(k, cfg.instance_prior), ep_seed);
          row.accuracy = trace.accuracy;
          row.instance_counts = std::move(trace.label_counts);
          if (cfg.keep_traces) row.outcomes = std::move(trace.outcomes);
        }
        const auto stop = std::chrono::steady_clock::now();
        row.policy = policy.label();
        row.budget = budget;
        row.replication = rep;
        row.micros = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count());
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace crowdkg
