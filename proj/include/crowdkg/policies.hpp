#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crowdkg/beta_core.hpp"
#include "crowdkg/binary_mdp.hpp"
#include "crowdkg/rng.hpp"

namespace crowdkg {

enum class TieBreak { Deterministic, Randomized };

// Tagged choice of allocation rule. The index policies score every
// instance's two-point reward distribution and pick the argmax; DPExact
// solves the remaining horizon exactly.
struct PolicySpec {
  enum class Rule { Uniform, KG, OptKG, PessKG, CVaRKG, DPExact };

  Rule rule = Rule::OptKG;
  TieBreak tie = TieBreak::Deterministic;
  double alpha = 1.0;                     // CVaRKG only, in (0, 1]
  std::uint64_t state_cap = 20'000'000;   // DPExact only

  static PolicySpec uniform();
  static PolicySpec kg(TieBreak tie = TieBreak::Deterministic);
  static PolicySpec opt_kg(TieBreak tie = TieBreak::Deterministic);
  static PolicySpec pess_kg();
  static PolicySpec cvar_kg(double alpha);
  static PolicySpec dp_exact(std::uint64_t state_cap);

  bool is_index_policy() const;
  RiskMode risk_mode() const;  // scoring rule of an index policy

  std::string label() const;
  // Accepts the labels produced by label(): uniform, kg, kg-random, optkg,
  // optkg-random, pesskg, cvarkg:<alpha>, dp[:<cap>].
  static PolicySpec parse(const std::string& text);

  bool valid() const;
};

// Exact solve of the finite-horizon allocation problem.
struct DPKey {
  std::vector<double> state;  // flattened (a_0, b_0, a_1, b_1, ...)
  std::uint64_t remaining = 0;
};

struct DPKeyLess {
  bool operator()(const DPKey& x, const DPKey& y) const;
};

struct DPEntry {
  int action = -1;      // -1 at the horizon
  double value = 0.0;   // optimal future reward from this state
};

struct DPSolution {
  double value = 0.0;          // prior confidence + optimal cumulative reward
  std::size_t first_action = 0;
  std::map<DPKey, DPEntry, DPKeyLess> table;  // every reachable (state, remaining)
};

// Backward induction over all reachable states. Refuses (with the count in
// the message) when the reachable-state estimate exceeds `state_cap`:
// a silently truncated solve would no longer be exact.
DPSolution dp_solve(const StateMatrix& initial, std::uint64_t budget,
                    std::uint64_t state_cap);

// Number of states reachable within `budget` unit updates of `k` instances.
double dp_state_estimate(std::size_t k, std::uint64_t budget);

// Scores within this distance of the best are treated as tied. Index-policy
// scores that are equal in exact arithmetic (notably the zero expected
// reward of every unbalanced integer state) come out of floating point a
// few ulps apart; comparing them exactly would turn the documented
// smallest-index tie rule into noise.
inline constexpr double kScoreTieTolerance = 1e-12;

// Argmax with the tie rule above. `allowed` (optional) masks candidates.
// Randomized tie-break draws uniformly among the tied set.
std::size_t argmax_with_ties(std::span<const double> scores,
                             const std::vector<char>* allowed, TieBreak tie, Rng* rng);

// Next instance to label. `allowed` masks instances whose pools are empty;
// empty action set throws exhausted_error. `remaining` is consumed only by
// DPExact -- the index policies are stationary.
std::size_t select_action(const PolicySpec& policy, const StateMatrix& s,
                          std::uint64_t remaining, Rng& rng,
                          const std::vector<char>* allowed = nullptr);

}  // namespace crowdkg
