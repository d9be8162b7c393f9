#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "mtsim/error.hpp"
#include "mtsim/tuner.hpp"

namespace mtsim {
namespace {

Hierarchy small_hierarchy() {
  auto catalog = DeviceCatalog::defaults();
  catalog.set_nvm_multiplier(2.0);
  return make_hierarchy_blocks(catalog, 16, 64, 1024);
}

// Objective of every {0,1} policy on the final window, warmed under the
// eager policy. Computed by driving the engine directly.
std::map<MigrationPolicy, double> brute_force(const Hierarchy& h, const Trace& t, std::size_t epoch, double lambda) {
  MigrationEngine warm(EngineConfig{MigrationPolicy::eager(), 0.0, 0}, h);
  warm.set_measuring(false);
  warm.replay(t.window(0, t.size() - epoch));
  std::map<MigrationPolicy, double> out;
  for (int m = 0; m < 16; ++m) {
    const MigrationPolicy p{double(m & 1), double(m >> 1 & 1), double(m >> 2 & 1), double(m >> 3 & 1)};
    MigrationEngine e = warm;
    e.set_policy(p);
    e.set_measuring(true);
    e.replay(t.window(t.size() - epoch, epoch));
    const SimMetrics mm = e.metrics();
    out[p] = mm.throughput_ops_per_s + lambda / std::max<double>(1.0, mm.nvm_writes);
  }
  return out;
}

TEST(Objective, Examples) {
  SimMetrics m;
  m.throughput_ops_per_s = 100;
  m.nvm_writes = 10;
  EXPECT_DOUBLE_EQ(objective(m, 0.0), 100.0);
  EXPECT_DOUBLE_EQ(objective(m, 50.0), 105.0);
  m.nvm_writes = 0;
  EXPECT_DOUBLE_EQ(objective(m, 50.0), 150.0);
}

TEST(Acceptance, BoltzmannFactor) {
  EXPECT_EQ(acceptance_probability(0.0, 5.0), 1.0);
  EXPECT_EQ(acceptance_probability(-3.0, 5.0), 1.0);
  EXPECT_NEAR(acceptance_probability(5.0, 5.0), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(acceptance_probability(7.0, 2.0), std::exp(-3.5), 1e-15);
}

TEST(Schedule, GeometricAndTerminating) {
  AnnealingConfig c;
  const auto temps = temperature_schedule(c);
  ASSERT_FALSE(temps.empty());
  EXPECT_EQ(temps.front(), 800.0);
  for (std::size_t k = 0; k < temps.size(); ++k) {
    EXPECT_NEAR(temps[k], 800.0 * std::pow(0.9, double(k)), 1e-9 * temps[k]);
    EXPECT_GT(temps[k], c.t_min);
    if (k) EXPECT_LT(temps[k], temps[k - 1]);
  }
  EXPECT_LE(800.0 * std::pow(0.9, double(temps.size())), c.t_min);
  // ceil(log(800 / 8e-5) / log(1 / 0.9)) levels.
  EXPECT_EQ(temps.size(), 153u);
}

TEST(Config, Validation) {
  AnnealingConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.max_proposals(), 500u);
  for (void (*bad)(AnnealingConfig&) : {+[](AnnealingConfig& x) { x.alpha = 1.0; }, +[](AnnealingConfig& x) { x.alpha = 0.0; },
                   +[](AnnealingConfig& x) { x.gamma = 0; }, +[](AnnealingConfig& x) { x.t_min = 900; },
                   +[](AnnealingConfig& x) { x.epoch_ops = 0; }, +[](AnnealingConfig& x) { x.lambda = -1; }}) {
    AnnealingConfig x;
    bad(x);
    EXPECT_THROW(x.validate(), ConfigError);
  }
}

TEST(Grid, Shapes) {
  EXPECT_EQ(PolicyGrid::standard().values(), (std::vector<double>{0, 0.001, 0.01, 0.1, 0.2, 0.3, 0.5, 1}));
  EXPECT_EQ(PolicyGrid::binary().all_policies().size(), 16u);
  EXPECT_THROW(PolicyGrid({0.0, 0.5}), ConfigError);
  EXPECT_THROW(PolicyGrid({0.0, 0.5, 0.5, 1.0}), ConfigError);
  EXPECT_THROW(PolicyGrid({0.1, 1.0}), ConfigError);
  EXPECT_TRUE(PolicyGrid::standard().contains(MigrationPolicy{1, 1, 0.01, 0.5}));
  EXPECT_FALSE(PolicyGrid::standard().contains(MigrationPolicy{1, 1, 0.02, 0.5}));
}

TEST(Neighbor, ReflectsAtTop) {
  Random rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto n = neighbor(MigrationPolicy::eager(), PolicyGrid::standard(), rng);
    const std::array<double, 4> v{n.d_r, n.d_w, n.n_r, n.n_w};
    EXPECT_EQ(std::count(v.begin(), v.end(), 0.5), 1);
    EXPECT_EQ(std::count(v.begin(), v.end(), 1.0), 3);
  }
}

TEST(Neighbor, ReflectsAtBottom) {
  Random rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto n = neighbor({0, 0, 0, 0}, PolicyGrid::standard(), rng);
    const std::array<double, 4> v{n.d_r, n.d_w, n.n_r, n.n_w};
    EXPECT_EQ(std::count(v.begin(), v.end(), 0.001), 1);
    EXPECT_EQ(std::count(v.begin(), v.end(), 0.0), 3);
  }
}

TEST(Neighbor, UniformCoordinateAndDirection) {
  Random rng(3);
  const MigrationPolicy start{0.1, 0.1, 0.1, 0.1};
  std::array<int, 4> coord{};
  int up = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) {
    const auto p = neighbor(start, PolicyGrid::standard(), rng);
    const std::array<double, 4> v{p.d_r, p.d_w, p.n_r, p.n_w};
    int changed = 0;
    for (int c = 0; c < 4; ++c) {
      if (v[c] != 0.1) {
        ++changed;
        ++coord[c];
        EXPECT_TRUE(v[c] == 0.01 || v[c] == 0.2);
        up += v[c] == 0.2;
      }
    }
    EXPECT_EQ(changed, 1);
  }
  for (int c : coord) EXPECT_NEAR(c / double(n), 0.25, 0.02);
  EXPECT_NEAR(up / double(n), 0.5, 0.02);
}

TEST(Anneal, BinaryGridFindsBruteForceArgmax) {
  const Hierarchy h = small_hierarchy();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Trace t = generate({ZipfShape{1.0}, 1000, 20'000, 0.5 + 0.1 * seed, seed});
    AnnealingConfig c;
    c.epoch_ops = 10'000;
    c.seed = seed;
    const auto oracle = brute_force(h, t, c.epoch_ops, c.lambda);
    const auto best = std::max_element(oracle.begin(), oracle.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    const TuningResult r = anneal(c, h, t, PolicyGrid::binary());
    EXPECT_EQ(r.best_policy, best->first) << "seed " << seed;
    EXPECT_DOUBLE_EQ(r.best_objective, best->second);
    for (const auto& s : r.history) EXPECT_DOUBLE_EQ(s.objective, oracle.at(s.policy));
  }
}

TEST(Anneal, HistoryInvariants) {
  const Hierarchy h = small_hierarchy();
  const Trace t = generate({ZipfShape{0.9}, 1000, 10'000, 0.6, 7});
  AnnealingConfig c;
  c.epoch_ops = 4'000;
  c.seed = 7;
  c.t0 = 2000;
  c.t_min = 1;
  c.initial = {1, 1, 0.5, 0.5};
  const TuningResult r = anneal(c, h, t, PolicyGrid::standard());
  ASSERT_FALSE(r.history.empty());
  EXPECT_EQ(r.history[0].policy, c.initial);
  EXPECT_TRUE(r.history[0].accepted);
  double incumbent = r.history[0].objective;
  double best = incumbent;
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    const auto& s = r.history[i];
    EXPECT_EQ(s.step, i);
    EXPECT_TRUE(PolicyGrid::standard().contains(s.policy));
    if (i == 0) continue;
    EXPECT_LE(s.temperature, r.history[i - 1].temperature);
    if (s.objective > incumbent) EXPECT_TRUE(s.accepted) << "step " << i;
    if (s.accepted) {
      incumbent = s.objective;
      best = std::max(best, incumbent);
    }
  }
  EXPECT_EQ(r.best_objective, best);
  EXPECT_LE(r.simulations, PolicyGrid::standard().all_policies().size());
}

TEST(Anneal, ProposalCapBoundsEachTemperature) {
  const Hierarchy h = small_hierarchy();
  const Trace t = generate({ZipfShape{0.9}, 500, 4'000, 0.6, 1});
  AnnealingConfig c;
  c.epoch_ops = 2'000;
  c.gamma = 3;
  c.t0 = 1;
  c.t_min = 0.1;
  const TuningResult r = anneal(c, h, t, PolicyGrid::binary());
  std::map<double, std::size_t> per_temp;
  for (std::size_t i = 1; i < r.history.size(); ++i) ++per_temp[r.history[i].temperature];
  for (const auto& [temp, n] : per_temp) EXPECT_LE(n, c.max_proposals());
}

TEST(Anneal, Deterministic) {
  const Hierarchy h = small_hierarchy();
  const Trace t = generate({ZipfShape{1.0}, 1000, 10'000, 0.7, 2});
  AnnealingConfig c;
  c.epoch_ops = 5'000;
  c.seed = 1;
  c.t_min = 1;
  std::ostringstream a, b;
  write_history_csv(a, anneal(c, h, t, PolicyGrid::standard()));
  write_history_csv(b, anneal(c, h, t, PolicyGrid::standard()));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "step,temperature,d_r,d_w,n_r,n_w,objective,accepted");
}

TEST(Anneal, EpochLongerThanTraceRejected) {
  const Trace t = generate({ZipfShape{1.0}, 100, 1'000, 0.7, 2});
  AnnealingConfig c;
  c.epoch_ops = 1'001;
  EXPECT_THROW(anneal(c, small_hierarchy(), t, PolicyGrid::standard()), ConfigError);
  c.epoch_ops = 100;
  c.initial = {1, 1, 0.4, 1};
  EXPECT_THROW(anneal(c, small_hierarchy(), t, PolicyGrid::standard()), ConfigError);
}

TEST(Anneal, OnlineModeConsumesSuccessiveWindows) {
  const Trace t = generate({ZipfShape{1.0}, 1000, 10'000, 0.7, 2});
  AnnealingConfig c;
  c.epoch_ops = 500;
  c.mode = TuningMode::Online;
  const TuningResult r = anneal(c, small_hierarchy(), t, PolicyGrid::standard());
  EXPECT_TRUE(r.trace_exhausted);
  EXPECT_EQ(r.simulations, 20u);
  EXPECT_EQ(r.history.size(), 20u);
}

}  // namespace
}  // namespace mtsim
