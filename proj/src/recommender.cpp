#include "mtsim/recommender.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "mtsim/error.hpp"

namespace mtsim {

namespace {

bool valid_capacity(std::uint64_t bytes) {
  if (bytes == 0) return true;
  if (bytes % kGiB != 0) return false;
  const std::uint64_t gb = bytes / kGiB;
  return (gb & (gb - 1)) == 0;
}

void validate_set(const std::vector<std::uint64_t>& set, const char* name) {
  if (set.empty()) throw ConfigError(std::string(name) + " candidate set is empty");
  for (std::uint64_t c : set) {
    if (!valid_capacity(c))
      throw ConfigError(std::string(name) + " capacity " + format_size(c) + " is not a power-of-two number of GB");
  }
}

std::string num(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

double gib(std::uint64_t bytes) { return static_cast<double>(bytes) / static_cast<double>(kGiB); }

}  // namespace

void CandidateSets::validate() const {
  validate_set(dram_bytes, "DRAM");
  validate_set(nvm_bytes, "NVM");
  validate_set(ssd_bytes, "SSD");
}

std::vector<std::uint64_t> parse_capacity_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  while (true) {
    const std::size_t comma = text.find(',');
    out.push_back(parse_size(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<HierarchyChoice> enumerate(const CandidateSets& sets, const DeviceCatalog& catalog, double budget,
                                       std::uint64_t footprint_bytes) {
  if (!(budget > 0.0)) throw ConfigError("budget must be positive");
  sets.validate();
  const double dram_price = catalog.get("dram").cost_per_gb;
  const double nvm_price = catalog.get("nvm").cost_per_gb;
  const double ssd_price = catalog.get("ssd").cost_per_gb;

  std::vector<HierarchyChoice> out;
  for (std::uint64_t d : sets.dram_bytes) {
    for (std::uint64_t n : sets.nvm_bytes) {
      if (d == 0 && n == 0) continue;
      for (std::uint64_t s : sets.ssd_bytes) {
        if (s < footprint_bytes || s == 0) continue;
        const double cost = dram_price * gib(d) + nvm_price * gib(n) + ssd_price * gib(s);
        // Relative slack absorbs decimal prices that are inexact in binary.
        if (cost <= budget * (1.0 + 1e-12)) out.push_back({d, n, s, cost});
      }
    }
  }
  return out;
}

void rank_entries(std::vector<RankedHierarchy>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const RankedHierarchy& a, const RankedHierarchy& b) {
    if (a.perf_per_price != b.perf_per_price) return a.perf_per_price > b.perf_per_price;
    if (a.choice.cost != b.choice.cost) return a.choice.cost < b.choice.cost;
    return std::tie(a.choice.dram_bytes, a.choice.nvm_bytes, a.choice.ssd_bytes) <
           std::tie(b.choice.dram_bytes, b.choice.nvm_bytes, b.choice.ssd_bytes);
  });
  for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = i + 1;
}

Recommendation recommend(const CandidateSets& sets, const DeviceCatalog& catalog, double budget,
                         const Trace& trace, const PolicySource& policy_source, const RecommendOptions& options) {
  if (!policy_source.fixed && !policy_source.tuned) throw ConfigError("policy source needs a policy or a tuner");
  const std::vector<HierarchyChoice> choices =
      enumerate(sets, catalog, budget, trace.footprint_blocks * options.block_size);

  std::vector<RankedHierarchy> entries(choices.size());
  auto evaluate = [&](std::size_t i) {
    RankedHierarchy& e = entries[i];
    e.choice = choices[i];
    try {
      const Hierarchy h =
          make_hierarchy(catalog, e.choice.dram_bytes, e.choice.nvm_bytes, e.choice.ssd_bytes, options.block_size);
      if (policy_source.tuned) {
        AnnealingConfig cfg = *policy_source.tuned;
        e.policy = anneal(cfg, h, trace, policy_source.grid).best_policy;
      } else {
        e.policy = *policy_source.fixed;
      }
      e.metrics = run_trace(EngineConfig{e.policy, options.warmup_fraction, options.seed}, h, trace);
      e.throughput = e.metrics.throughput_ops_per_s;
    } catch (const Error& err) {
      e.error = err.what();
      e.throughput = 0.0;
    }
    e.perf_per_price = e.choice.cost > 0.0 ? e.throughput / e.choice.cost : 0.0;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.parallel, static_cast<unsigned>(choices.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < choices.size(); ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < choices.size();) evaluate(i);
      });
    }
  }

  Recommendation rec{std::move(entries)};
  rank_entries(rec.ranking);
  return rec;
}

void write_recommendation_csv(std::ostream& out, const Recommendation& rec) {
  out << "rank,dram_gb,nvm_gb,ssd_gb,cost_usd,throughput_ops_s,perf_per_price," << metrics_csv_header()
      << ",d_r,d_w,n_r,n_w,error\n";
  for (const auto& e : rec.ranking) {
    out << e.rank << ',' << num(gib(e.choice.dram_bytes)) << ',' << num(gib(e.choice.nvm_bytes)) << ','
        << num(gib(e.choice.ssd_bytes)) << ',' << num(e.choice.cost) << ',' << num(e.throughput) << ','
        << num(e.perf_per_price) << ',' << metrics_csv_row(e.metrics) << ',' << num(e.policy.d_r) << ','
        << num(e.policy.d_w) << ',' << num(e.policy.n_r) << ',' << num(e.policy.n_w) << ',';
    if (!e.error.empty()) {
      std::string quoted = e.error;
      std::replace(quoted.begin(), quoted.end(), '"', '\'');
      out << '"' << quoted << '"';
    }
    out << '\n';
  }
}

void write_recommendation_json(std::ostream& out, const Recommendation& rec) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : rec.ranking) {
    nlohmann::ordered_json j;
    j["rank"] = e.rank;
    j["dram_gb"] = gib(e.choice.dram_bytes);
    j["nvm_gb"] = gib(e.choice.nvm_bytes);
    j["ssd_gb"] = gib(e.choice.ssd_bytes);
    j["cost_usd"] = e.choice.cost;
    j["throughput_ops_s"] = e.throughput;
    j["perf_per_price"] = e.perf_per_price;
    j["policy"] = {e.policy.d_r, e.policy.d_w, e.policy.n_r, e.policy.n_w};
    const auto& m = e.metrics;
    j["metrics"] = {{"ops_total", m.ops_total},
                    {"ops_measured", m.ops_measured},
                    {"sim_time_ns", m.sim_time_ns},
                    {"throughput_ops_per_s", m.throughput_ops_per_s},
                    {"nvm_writes", m.nvm_writes},
                    {"ssd_reads", m.ssd_reads},
                    {"ssd_writes", m.ssd_writes},
                    {"dram_hits", m.dram_hits},
                    {"nvm_hits", m.nvm_hits},
                    {"dram_evictions", m.dram_evictions},
                    {"nvm_evictions", m.nvm_evictions},
                    {"dram_reads", m.dram_reads},
                    {"dram_writes", m.dram_writes},
                    {"nvm_reads", m.nvm_reads}};
    if (!e.error.empty()) j["error"] = e.error;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

HitRatioCurve::HitRatioCurve(std::vector<std::pair<double, double>> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  if (points_.empty() || points_.front().first > 0.0) points_.insert(points_.begin(), {0.0, 0.0});
  if (points_.front().first < 0.0) throw ModelError("hit-ratio curve has a negative capacity");
  if (points_.front().second != 0.0) throw ModelError("hit-ratio curve must satisfy H(0) = 0");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double h = points_[i].second;
    if (!(h >= 0.0 && h <= 1.0)) throw ModelError("hit ratio outside [0,1]");
    if (i > 0 && h < points_[i - 1].second) throw ModelError("hit-ratio curve must be non-decreasing");
  }
}

double HitRatioCurve::at(double capacity) const {
  if (points_.empty() || capacity <= 0.0) return 0.0;
  const auto it = std::upper_bound(points_.begin(), points_.end(), capacity,
                                   [](double c, const auto& p) { return c < p.first; });
  if (it == points_.end()) return points_.back().second;
  const auto& [c1, h1] = *it;
  const auto& [c0, h0] = *std::prev(it);
  if (c1 == c0) return h1;
  return h0 + (h1 - h0) * (capacity - c0) / (c1 - c0);
}

AccessTimeEstimate effective_access_time_both(const HitRatioCurve& curve, const std::vector<LevelTiming>& levels) {
  if (levels.empty()) throw ModelError("hierarchy needs at least one level");
  AccessTimeEstimate est;
  double h_prev = 0.0;
  double cumulative_time = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && levels[i].capacity < levels[i - 1].capacity)
      throw ModelError("level capacities must be non-decreasing");
    const double h = curve.at(levels[i].capacity);
    cumulative_time += levels[i].access_time;
    est.by_level_hits += (h - h_prev) * cumulative_time;
    est.by_miss_chain += (1.0 - h_prev) * levels[i].access_time;
    h_prev = h;
  }
  if (h_prev < 1.0 - 1e-12) throw ModelError("the lowest level must hold every block (H(C_n) = 1)");
  const double scale = std::max(std::abs(est.by_level_hits), std::abs(est.by_miss_chain));
  if (std::abs(est.by_level_hits - est.by_miss_chain) > 1e-9 * scale)
    throw ModelError("access-time forms disagree");
  return est;
}

double effective_access_time(const HitRatioCurve& curve, const std::vector<LevelTiming>& levels) {
  return effective_access_time_both(curve, levels).by_level_hits;
}

HitRatioCurve lru_hit_ratio_curve(const Trace& trace, const std::vector<std::uint64_t>& capacities_blocks) {
  std::vector<std::pair<double, double>> points;
  for (std::uint64_t cap : capacities_blocks) {
    BufferPool pool(TierKind::Dram, cap);
    std::uint64_t hits = 0;
    for (const auto& op : trace.ops) {
      if (pool.lookup(op.block)) ++hits;
      else pool.insert(op.block, false);
    }
    const double h = trace.ops.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(trace.ops.size());
    points.emplace_back(static_cast<double>(cap), h);
  }
  return HitRatioCurve(std::move(points));
}

double estimate_access_time(const Trace& trace, const Hierarchy& hierarchy) {
  std::vector<std::uint64_t> caps;
  std::vector<LevelTiming> levels;
  for (const TierKind k : {TierKind::Dram, TierKind::Nvm}) {
    const DeviceSpec& d = hierarchy.tier(k);
    if (!d.present()) continue;
    const std::uint64_t slots = hierarchy.slots(k);
    caps.push_back(slots);
    levels.push_back({static_cast<double>(slots),
                      static_cast<double>(block_transfer_time(d, Direction::Read, hierarchy.block_size))});
  }
  const HitRatioCurve lru = lru_hit_ratio_curve(trace, caps);
  std::vector<std::pair<double, double>> points = lru.points();
  const double bottom = std::max<double>(static_cast<double>(hierarchy.slots(TierKind::Ssd)),
                                         levels.empty() ? 1.0 : levels.back().capacity);
  points.emplace_back(bottom, 1.0);
  levels.push_back({bottom, static_cast<double>(block_transfer_time(hierarchy.ssd, Direction::Read,
                                                                    hierarchy.block_size))});
  return effective_access_time(HitRatioCurve(std::move(points)), levels);
}

}  // namespace mtsim
