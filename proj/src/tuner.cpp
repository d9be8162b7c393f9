#include "mtsim/tuner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>

#include "mtsim/error.hpp"

namespace mtsim {

void AnnealingConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
  if (gamma < 1) throw ConfigError("gamma must be >= 1");
  if (!(t_min > 0.0) || !(t_min < t0)) throw ConfigError("temperatures must satisfy 0 < t_min < t0");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (epoch_ops < 1) throw ConfigError("epoch_ops must be >= 1");
  initial.validate();
}

PolicyGrid::PolicyGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2 || values_.front() != 0.0 || values_.back() != 1.0)
    throw ConfigError("policy grid must start at 0 and end at 1");
  if (std::adjacent_find(values_.begin(), values_.end(), std::greater_equal<>()) != values_.end())
    throw ConfigError("policy grid must be strictly increasing");
}

PolicyGrid PolicyGrid::standard() { return PolicyGrid({0.0, 0.001, 0.01, 0.1, 0.2, 0.3, 0.5, 1.0}); }

PolicyGrid PolicyGrid::binary() { return PolicyGrid({0.0, 1.0}); }

bool PolicyGrid::contains(double v) const { return std::binary_search(values_.begin(), values_.end(), v); }

bool PolicyGrid::contains(const MigrationPolicy& p) const {
  return contains(p.d_r) && contains(p.d_w) && contains(p.n_r) && contains(p.n_w);
}

std::size_t PolicyGrid::index_of(double v) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), v);
  if (it == values_.end() || *it != v) throw ConfigError("value is not on the policy grid");
  return static_cast<std::size_t>(it - values_.begin());
}

std::vector<MigrationPolicy> PolicyGrid::all_policies() const {
  std::vector<MigrationPolicy> out;
  for (double a : values_)
    for (double b : values_)
      for (double c : values_)
        for (double d : values_) out.push_back({a, b, c, d});
  return out;
}

double objective(const SimMetrics& metrics, double lambda) {
  const double writes = static_cast<double>(std::max<std::uint64_t>(metrics.nvm_writes, 1));
  return metrics.throughput_ops_per_s + lambda / writes;
}

double acceptance_probability(double delta_e, double temperature) {
  return delta_e <= 0.0 ? 1.0 : std::exp(-delta_e / temperature);
}

std::vector<double> temperature_schedule(const AnnealingConfig& config) {
  config.validate();
  std::vector<double> temps;
  for (int k = 0;; ++k) {
    const double t = config.t0 * std::pow(config.alpha, k);
    if (!(t > config.t_min)) break;
    temps.push_back(t);
  }
  return temps;
}

MigrationPolicy neighbor(const MigrationPolicy& policy, const PolicyGrid& grid, Random& rng) {
  MigrationPolicy next = policy;
  double* coords[] = {&next.d_r, &next.d_w, &next.n_r, &next.n_w};
  double& c = *coords[rng.below(4)];
  const std::size_t i = grid.index_of(c);
  const std::size_t top = grid.values().size() - 1;
  const bool up = rng.below(2) == 1;
  std::size_t j;
  if (up) j = i == top ? i - 1 : i + 1;
  else j = i == 0 ? 1 : i - 1;
  c = grid.values()[j];
  return next;
}

ReplayEvaluator::ReplayEvaluator(const Hierarchy& hierarchy, const Trace& trace, std::uint64_t epoch_ops,
                                 const MigrationPolicy& warm_policy, std::uint64_t engine_seed,
                                 const Snapshot* snapshot)
    : trace_(trace),
      window_begin_(trace.ops.size() - std::min<std::size_t>(epoch_ops, trace.ops.size())),
      base_(EngineConfig{warm_policy, 0.0, engine_seed}, hierarchy) {
  if (epoch_ops > trace.ops.size()) throw ConfigError("epoch is longer than the trace");
  if (snapshot) base_.load_snapshot(*snapshot);
  base_.set_measuring(false);
  base_.replay(trace_.window(0, window_begin_));
  base_.set_measuring(true);
  base_.reset_metrics();
}

SimMetrics ReplayEvaluator::evaluate(const MigrationPolicy& policy) {
  if (const auto it = cache_.find(policy); it != cache_.end()) return it->second;
  MigrationEngine engine = base_;
  engine.set_policy(policy);
  engine.replay(trace_.window(window_begin_, trace_.ops.size() - window_begin_));
  ++simulations_;
  return cache_.emplace(policy, engine.metrics()).first->second;
}

namespace {

// Online-mode evaluation on the live engine; nullopt once the trace is
// exhausted.
class OnlineEvaluator {
 public:
  OnlineEvaluator(const Hierarchy& hierarchy, const Trace& trace, std::uint64_t epoch_ops,
                  const MigrationPolicy& initial, std::uint64_t engine_seed, const Snapshot* snapshot)
      : trace_(trace), epoch_ops_(epoch_ops), engine_(EngineConfig{initial, 0.0, engine_seed}, hierarchy) {
    if (snapshot) engine_.load_snapshot(*snapshot);
  }

  std::optional<SimMetrics> evaluate(const MigrationPolicy& policy) {
    if (cursor_ + epoch_ops_ > trace_.ops.size()) return std::nullopt;
    engine_.set_policy(policy);
    engine_.reset_metrics();
    engine_.replay(trace_.window(cursor_, epoch_ops_));
    cursor_ += epoch_ops_;
    ++simulations_;
    return engine_.metrics();
  }

  std::size_t simulations() const { return simulations_; }

 private:
  const Trace& trace_;
  std::uint64_t epoch_ops_;
  MigrationEngine engine_;
  std::size_t cursor_ = 0;
  std::size_t simulations_ = 0;
};

}  // namespace

TuningResult anneal(const AnnealingConfig& config, const Hierarchy& hierarchy, const Trace& trace,
                    const PolicyGrid& grid, const Snapshot* snapshot) {
  config.validate();
  if (config.epoch_ops > trace.ops.size())
    throw ConfigError("epoch of " + std::to_string(config.epoch_ops) + " ops is longer than the trace (" +
                      std::to_string(trace.ops.size()) + " ops)");
  if (!grid.contains(config.initial)) throw ConfigError("initial policy is not on the policy grid");
  if (trace.footprint_blocks > hierarchy.slots(TierKind::Ssd))
    throw ConfigError("trace footprint does not fit on the SSD tier");

  const std::uint64_t engine_seed = mix_seed(config.seed, 1);
  Random rng(mix_seed(config.seed, 2));

  std::optional<ReplayEvaluator> replay;
  std::optional<OnlineEvaluator> online;
  if (config.mode == TuningMode::Replay)
    replay.emplace(hierarchy, trace, config.epoch_ops, config.initial, engine_seed, snapshot);
  else
    online.emplace(hierarchy, trace, config.epoch_ops, config.initial, engine_seed, snapshot);

  auto evaluate = [&](const MigrationPolicy& p) -> std::optional<double> {
    if (replay) return objective(replay->evaluate(p), config.lambda);
    if (auto m = online->evaluate(p)) return objective(*m, config.lambda);
    return std::nullopt;
  };

  TuningResult result;
  const std::vector<double> temps = temperature_schedule(config);

  MigrationPolicy current = config.initial;
  const auto first = evaluate(current);
  double current_obj = *first;  // the epoch check above guarantees one window
  result.best_policy = current;
  result.best_objective = current_obj;
  result.history.push_back({0, config.t0, current, current_obj, true});

  for (const double temperature : temps) {
    std::uint64_t accepted = 0;
    for (std::uint64_t proposals = 0; accepted < config.gamma && proposals < config.max_proposals(); ++proposals) {
      const MigrationPolicy candidate = neighbor(current, grid, rng);
      const auto obj = evaluate(candidate);
      if (!obj) {
        result.trace_exhausted = true;
        break;
      }
      // Energy is the negated objective.
      const double delta_e = current_obj - *obj;
      const bool accept = delta_e < 0.0 || rng.uniform() < acceptance_probability(delta_e, temperature);
      result.history.push_back({result.history.size(), temperature, candidate, *obj, accept});
      if (accept) {
        ++accepted;
        current = candidate;
        current_obj = *obj;
        if (current_obj > result.best_objective) {
          result.best_objective = current_obj;
          result.best_policy = current;
        }
      }
    }
    if (result.trace_exhausted) break;
  }
  result.simulations = replay ? replay->simulations() : online->simulations();
  return result;
}

void write_history_csv(std::ostream& out, const TuningResult& result) {
  const auto num = [](double v) {
    char buf[32];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
  };
  out << "step,temperature,d_r,d_w,n_r,n_w,objective,accepted\n";
  for (const auto& s : result.history) {
    out << s.step << ',' << num(s.temperature) << ',' << num(s.policy.d_r) << ',' << num(s.policy.d_w) << ','
        << num(s.policy.n_r) << ',' << num(s.policy.n_w) << ',' << num(s.objective) << ','
        << (s.accepted ? 1 : 0) << '\n';
  }
}

}  // namespace mtsim
