#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "mtsim/engine.hpp"

namespace mtsim {

enum class TuningMode : std::uint8_t {
  Replay,  // every candidate replays the same window from the same warmed state
  Online,  // candidates consume successive windows on the live engine
};

struct AnnealingConfig {
  double alpha = 0.9;        // cooling factor
  std::uint64_t gamma = 10;  // accepted transitions per temperature
  double t0 = 800.0;
  double t_min = 0.00008;
  double lambda = 0.0;  // weight of the reciprocal NVM-write term
  std::uint64_t epoch_ops = 1'000'000;
  TuningMode mode = TuningMode::Replay;
  std::uint64_t seed = 0;
  MigrationPolicy initial = MigrationPolicy::eager();

  // Proposals allowed per temperature before cooling anyway.
  std::uint64_t max_proposals() const { return 50 * gamma; }

  void validate() const;
};

// Allowed values for each policy coordinate.
class PolicyGrid {
 public:
  // Strictly increasing, containing 0 and 1; throws ConfigError otherwise.
  explicit PolicyGrid(std::vector<double> values);

  // {0, 0.001, 0.01, 0.1, 0.2, 0.3, 0.5, 1}
  static PolicyGrid standard();
  // {0, 1}
  static PolicyGrid binary();

  const std::vector<double>& values() const { return values_; }
  bool contains(double v) const;
  bool contains(const MigrationPolicy& p) const;
  // Throws ConfigError when v is not on the grid.
  std::size_t index_of(double v) const;

  // Every policy on the grid, lexicographic by (d_r, d_w, n_r, n_w).
  std::vector<MigrationPolicy> all_policies() const;

 private:
  std::vector<double> values_;
};

// Throughput + lambda / max(nvm_writes, 1).
double objective(const SimMetrics& metrics, double lambda);

// Boltzmann factor for an energy change at a temperature: 1 when
// delta_e <= 0, exp(-delta_e / T) otherwise.
double acceptance_probability(double delta_e, double temperature);

// t0 * alpha^k for k = 0, 1, ... while the value exceeds t_min.
std::vector<double> temperature_schedule(const AnnealingConfig& config);

// Moves one uniformly chosen coordinate one grid step up or down, reflecting
// at the ends. Consumes two draws.
MigrationPolicy neighbor(const MigrationPolicy& policy, const PolicyGrid& grid, Random& rng);

struct TuningStep {
  std::size_t step = 0;
  double temperature = 0.0;
  MigrationPolicy policy;
  double objective = 0.0;
  bool accepted = false;
};

struct TuningResult {
  MigrationPolicy best_policy;
  double best_objective = 0.0;
  std::vector<TuningStep> history;  // step 0 is the initial policy
  std::size_t simulations = 0;      // epochs actually simulated
  bool trace_exhausted = false;     // online mode ran out of trace
};

// Replay-mode policy evaluation: the trace prefix before the final
// epoch_ops operations warms an engine under warm_policy, and each
// evaluation replays the final window from a copy of that state.
// Results are memoized per policy since they are deterministic.
class ReplayEvaluator {
 public:
  ReplayEvaluator(const Hierarchy& hierarchy, const Trace& trace, std::uint64_t epoch_ops,
                  const MigrationPolicy& warm_policy, std::uint64_t engine_seed, const Snapshot* snapshot = nullptr);

  SimMetrics evaluate(const MigrationPolicy& policy);
  std::size_t simulations() const { return simulations_; }

 private:
  const Trace& trace_;
  std::size_t window_begin_;
  MigrationEngine base_;
  std::map<MigrationPolicy, SimMetrics> cache_;
  std::size_t simulations_ = 0;
};

// Simulated annealing over the policy grid with energy = -objective.
// Throws ConfigError when the trace is shorter than one epoch or the
// initial policy is off the grid.
TuningResult anneal(const AnnealingConfig& config, const Hierarchy& hierarchy, const Trace& trace,
                    const PolicyGrid& grid, const Snapshot* snapshot = nullptr);

// "step,temperature,d_r,d_w,n_r,n_w,objective,accepted"
void write_history_csv(std::ostream& out, const TuningResult& result);

}  // namespace mtsim
