#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mtsim/device.hpp"
#include "mtsim/engine.hpp"
#include "mtsim/tuner.hpp"

namespace mtsim {

// Candidate device capacities in bytes: 0 (tier absent) or a power-of-two
// number of GB. A set without 0 forces that tier to be present.
struct CandidateSets {
  std::vector<std::uint64_t> dram_bytes;
  std::vector<std::uint64_t> nvm_bytes;
  std::vector<std::uint64_t> ssd_bytes;

  // Throws ConfigError on an empty set or an invalid capacity.
  void validate() const;
};

// "0,4GB,8GB"; throws UsageError on malformed sizes.
std::vector<std::uint64_t> parse_capacity_list(std::string_view text);

struct HierarchyChoice {
  std::uint64_t dram_bytes = 0;
  std::uint64_t nvm_bytes = 0;
  std::uint64_t ssd_bytes = 0;
  double cost = 0.0;

  friend bool operator==(const HierarchyChoice&, const HierarchyChoice&) = default;
};

// Every (DRAM, NVM, SSD) triple with total device cost within budget, SSD
// large enough for the footprint, and at least one buffer tier present.
// Enumeration order: DRAM outermost, SSD innermost, each set in the given
// order.
std::vector<HierarchyChoice> enumerate(const CandidateSets& sets, const DeviceCatalog& catalog, double budget,
                                       std::uint64_t footprint_bytes);

struct PolicySource {
  std::optional<MigrationPolicy> fixed = MigrationPolicy::eager();
  std::optional<AnnealingConfig> tuned;  // set to anneal per candidate
  PolicyGrid grid = PolicyGrid::standard();

  static PolicySource fixed_policy(const MigrationPolicy& p) { return {p, std::nullopt, PolicyGrid::standard()}; }
  static PolicySource tuned_policy(const AnnealingConfig& c, PolicyGrid g = PolicyGrid::standard()) {
    return {std::nullopt, c, std::move(g)};
  }
};

struct RecommendOptions {
  std::uint64_t block_size = kDefaultBlockSize;
  double warmup_fraction = 0.5;
  std::uint64_t seed = 0;
  unsigned parallel = 1;
};

struct RankedHierarchy {
  std::size_t rank = 0;
  HierarchyChoice choice;
  MigrationPolicy policy;
  double throughput = 0.0;
  double perf_per_price = 0.0;
  SimMetrics metrics;
  std::string error;  // non-empty when the candidate failed to simulate
};

struct Recommendation {
  std::vector<RankedHierarchy> ranking;
};

// Simulates each feasible hierarchy and ranks by throughput per dollar,
// descending; ties go to the cheaper hierarchy, then to the smaller
// (dram, nvm, ssd) capacities. Candidates run on up to options.parallel
// threads; the ranking does not depend on the thread count.
Recommendation recommend(const CandidateSets& sets, const DeviceCatalog& catalog, double budget,
                         const Trace& trace, const PolicySource& policy_source, const RecommendOptions& options);

// Ranks already-evaluated entries in place and assigns rank numbers.
void rank_entries(std::vector<RankedHierarchy>& entries);

void write_recommendation_csv(std::ostream& out, const Recommendation& rec);
void write_recommendation_json(std::ostream& out, const Recommendation& rec);

// Hit fraction as a function of capacity, piecewise linear between the
// recorded points, flat beyond the last one, H(0) = 0.
class HitRatioCurve {
 public:
  HitRatioCurve() = default;
  // Points need not include capacity 0. Throws ModelError unless the curve
  // is monotone non-decreasing with values in [0,1].
  explicit HitRatioCurve(std::vector<std::pair<double, double>> points);

  double at(double capacity) const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;  // sorted by capacity, starts at (0,0)
};

struct LevelTiming {
  double capacity = 0.0;
  double access_time = 0.0;
};

struct AccessTimeEstimate {
  double by_level_hits = 0.0;   // sum_i h_i * (t_1 + ... + t_i)
  double by_miss_chain = 0.0;   // sum_i (1 - H(C_{i-1})) * t_i
};

// Effective average access time of a linear hierarchy under the inclusive
// model. Computes both closed forms and throws ModelError if they disagree
// beyond 1e-9 relative, if H at the last level is below 1, or if
// capacities decrease.
AccessTimeEstimate effective_access_time_both(const HitRatioCurve& curve, const std::vector<LevelTiming>& levels);
double effective_access_time(const HitRatioCurve& curve, const std::vector<LevelTiming>& levels);

// Hit fraction of a single LRU pool of each capacity (in blocks) over the
// whole trace.
HitRatioCurve lru_hit_ratio_curve(const Trace& trace, const std::vector<std::uint64_t>& capacities_blocks);

// Screening estimate of per-request access time for a hierarchy: the LRU
// curve at the DRAM and NVM capacities, with the SSD level holding
// everything. Access time per level is the block read time.
double estimate_access_time(const Trace& trace, const Hierarchy& hierarchy);

}  // namespace mtsim
