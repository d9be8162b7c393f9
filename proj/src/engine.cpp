#include "mtsim/engine.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "mtsim/error.hpp"

namespace mtsim {

void MigrationPolicy::validate() const {
  for (double p : {d_r, d_w, n_r, n_w}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("policy probabilities must be in [0,1], got " + to_string());
  }
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
  return std::string(buf, end);
}

}  // namespace

std::string MigrationPolicy::to_string() const {
  return format_double(d_r) + "," + format_double(d_w) + "," + format_double(n_r) + "," + format_double(n_w);
}

MigrationPolicy parse_policy(std::string_view text) {
  double v[4];
  std::size_t i = 0;
  while (true) {
    const std::size_t comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    if (i == 4) throw UsageError("policy takes exactly four values 'dr,dw,nr,nw'");
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v[i]);
    if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty())
      throw UsageError("invalid policy value '" + std::string(item) + "'");
    ++i;
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (i != 4) throw UsageError("policy takes exactly four values 'dr,dw,nr,nw'");
  MigrationPolicy p{v[0], v[1], v[2], v[3]};
  for (double x : v) {
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("policy probabilities must be in [0,1]");
  }
  return p;
}

void SimMetrics::finalize_throughput() {
  throughput_ops_per_s =
      sim_time_ns == 0 ? 0.0 : static_cast<double>(ops_measured) / (static_cast<double>(sim_time_ns) * 1e-9);
}

namespace {

nlohmann::ordered_json metrics_object(const SimMetrics& m) {
  nlohmann::ordered_json j;
  j["ops_total"] = m.ops_total;
  j["ops_measured"] = m.ops_measured;
  j["sim_time_ns"] = m.sim_time_ns;
  j["throughput_ops_per_s"] = m.throughput_ops_per_s;
  j["nvm_writes"] = m.nvm_writes;
  j["ssd_reads"] = m.ssd_reads;
  j["ssd_writes"] = m.ssd_writes;
  j["dram_hits"] = m.dram_hits;
  j["nvm_hits"] = m.nvm_hits;
  j["dram_evictions"] = m.dram_evictions;
  j["nvm_evictions"] = m.nvm_evictions;
  j["dram_reads"] = m.dram_reads;
  j["dram_writes"] = m.dram_writes;
  j["nvm_reads"] = m.nvm_reads;
  return j;
}

}  // namespace

void write_metrics_json(std::ostream& out, const SimMetrics& m) { out << metrics_object(m).dump(2) << '\n'; }

std::string metrics_csv_header() {
  std::string h;
  for (const char* k : kMetricKeys) {
    if (!h.empty()) h += ',';
    h += k;
  }
  return h;
}

std::string metrics_csv_row(const SimMetrics& m) {
  std::ostringstream row;
  row << m.ops_total << ',' << m.ops_measured << ',' << m.sim_time_ns << ',' << format_double(m.throughput_ops_per_s)
      << ',' << m.nvm_writes << ',' << m.ssd_reads << ',' << m.ssd_writes << ',' << m.dram_hits << ','
      << m.nvm_hits << ',' << m.dram_evictions << ',' << m.nvm_evictions << ',' << m.dram_reads << ','
      << m.dram_writes << ',' << m.nvm_reads;
  return row.str();
}

void write_metrics_csv(std::ostream& out, const SimMetrics& m, bool header) {
  if (header) out << metrics_csv_header() << '\n';
  out << metrics_csv_row(m) << '\n';
}

void EngineConfig::validate() const {
  policy.validate();
  if (!(warmup_fraction >= 0.0 && warmup_fraction <= 1.0)) throw ConfigError("warm-up fraction must be in [0,1]");
}

MigrationEngine::MigrationEngine(const EngineConfig& config, const Hierarchy& hierarchy)
    : hierarchy_(hierarchy),
      policy_(config.policy),
      has_dram_(hierarchy.dram.present()),
      has_nvm_(hierarchy.nvm.present()),
      dram_(TierKind::Dram, hierarchy.slots(TierKind::Dram)),
      nvm_(TierKind::Nvm, hierarchy.slots(TierKind::Nvm)),
      rng_(config.rng_seed) {
  config.validate();
  hierarchy.validate();
  const auto times = [&](const DeviceSpec& d) {
    return TierTimes{block_transfer_time(d, Direction::Read, hierarchy.block_size),
                     block_transfer_time(d, Direction::Write, hierarchy.block_size)};
  };
  dram_time_ = times(hierarchy.dram);
  nvm_time_ = times(hierarchy.nvm);
  ssd_time_ = times(hierarchy.ssd);
}

void MigrationEngine::load_snapshot(const Snapshot& snapshot) { mtsim::load_snapshot(dram_, nvm_, snapshot); }

void MigrationEngine::set_policy(const MigrationPolicy& policy) {
  policy.validate();
  policy_ = policy;
}

Nanoseconds MigrationEngine::charge_dram_read() {
  if (measuring_) ++metrics_.dram_reads, metrics_.sim_time_ns += dram_time_.read;
  return dram_time_.read;
}

Nanoseconds MigrationEngine::charge_dram_write() {
  if (measuring_) ++metrics_.dram_writes, metrics_.sim_time_ns += dram_time_.write;
  return dram_time_.write;
}

Nanoseconds MigrationEngine::charge_nvm_read() {
  if (measuring_) ++metrics_.nvm_reads, metrics_.sim_time_ns += nvm_time_.read;
  return nvm_time_.read;
}

Nanoseconds MigrationEngine::charge_nvm_write() {
  if (measuring_) ++metrics_.nvm_writes, metrics_.sim_time_ns += nvm_time_.write;
  return nvm_time_.write;
}

Nanoseconds MigrationEngine::charge_ssd_read() {
  if (measuring_) ++metrics_.ssd_reads, metrics_.sim_time_ns += ssd_time_.read;
  return ssd_time_.read;
}

Nanoseconds MigrationEngine::charge_ssd_write() {
  if (measuring_) ++metrics_.ssd_writes, metrics_.sim_time_ns += ssd_time_.write;
  return ssd_time_.write;
}

Nanoseconds MigrationEngine::install_dram(BlockId b, bool dirty) {
  Nanoseconds t = charge_dram_write();
  if (const auto ev = dram_.insert(b, dirty)) {
    if (measuring_) ++metrics_.dram_evictions;
    t += evict_from_dram(ev->block, ev->was_dirty);
  }
  return t;
}

Nanoseconds MigrationEngine::install_nvm(BlockId b, bool dirty) {
  Nanoseconds t = charge_nvm_write();
  if (const auto ev = nvm_.insert(b, dirty)) {
    if (measuring_) ++metrics_.nvm_evictions;
    t += evict_from_nvm(ev->block, ev->was_dirty);
  }
  return t;
}

Nanoseconds MigrationEngine::handle_read(BlockId b) {
  if (dram_.lookup(b)) {
    ++paths_.read_dram_hit;
    if (measuring_) ++metrics_.dram_hits;
    return charge_dram_read();
  }
  if (nvm_.lookup(b)) {
    ++paths_.read_nvm_hit;
    if (measuring_) ++metrics_.nvm_hits;
    Nanoseconds t = charge_nvm_read();
    if (rng_.chance(has_dram_ ? policy_.d_r : 0.0)) t += install_dram(b, false);
    return t;
  }

  ++paths_.read_miss;
  Nanoseconds t = charge_ssd_read();
  const bool to_dram = rng_.chance(has_dram_ ? policy_.d_r : 0.0);
  const bool to_nvm = rng_.chance(has_nvm_ ? policy_.n_r : 0.0);
  if (to_nvm) {
    t += install_nvm(b, false);
    if (to_dram) t += install_dram(b, false);
  } else if (has_dram_) {
    // SSD -> DRAM directly; the CPU cannot operate on SSD-resident data.
    t += install_dram(b, false);
  }
  return t;
}

Nanoseconds MigrationEngine::handle_write(BlockId b) {
  if (dram_.contains(b)) {
    ++paths_.write_dram_hit;
    dram_.mark_dirty(b);
    return charge_dram_write();
  }
  if (rng_.chance(has_dram_ ? policy_.d_w : 0.0)) {
    ++paths_.write_dram_install;
    return install_dram(b, true);
  }
  if (has_nvm_) {
    ++paths_.write_nvm;
    if (nvm_.contains(b)) {
      nvm_.mark_dirty(b);
      return charge_nvm_write();
    }
    return install_nvm(b, true);
  }
  ++paths_.write_ssd;
  return charge_ssd_write();
}

Nanoseconds MigrationEngine::evict_from_dram(BlockId victim, bool was_dirty) {
  if (!was_dirty) return 0;
  if (nvm_.contains(victim)) {
    nvm_.mark_dirty(victim);
    return charge_nvm_write();
  }
  if (rng_.chance(has_nvm_ ? policy_.n_w : 0.0)) return install_nvm(victim, true);
  return charge_ssd_write();
}

Nanoseconds MigrationEngine::evict_from_nvm(BlockId /*victim*/, bool was_dirty) {
  return was_dirty ? charge_ssd_write() : 0;
}

void MigrationEngine::replay(std::span<const TraceOperation> ops) {
  for (const auto& op : ops) {
    ++metrics_.ops_total;
    if (measuring_) {
      ++metrics_.ops_measured;
      ++(op.kind == OpKind::Read ? metrics_.read_ops : metrics_.write_ops);
    }
    handle(op);
  }
}

SimMetrics MigrationEngine::metrics() const {
  SimMetrics m = metrics_;
  m.finalize_throughput();
  return m;
}

std::size_t warmup_boundary(std::size_t ops, double warmup_fraction) {
  const double x = std::ceil(warmup_fraction * static_cast<double>(ops));
  return std::min(ops, static_cast<std::size_t>(x));
}

SimMetrics run_trace(const EngineConfig& config, const Hierarchy& hierarchy, const Trace& trace,
                     const Snapshot* snapshot) {
  config.validate();
  hierarchy.validate();
  if (trace.footprint_blocks > hierarchy.slots(TierKind::Ssd))
    throw ConfigError("trace footprint of " + std::to_string(trace.footprint_blocks) +
                      " blocks does not fit on the SSD tier (" + std::to_string(hierarchy.slots(TierKind::Ssd)) +
                      " blocks)");
  MigrationEngine engine(config, hierarchy);
  if (snapshot) {
    for (const auto* tier : {&snapshot->dram, &snapshot->nvm}) {
      for (const auto& e : *tier) {
        if (e.block >= trace.footprint_blocks)
          throw ConfigError("snapshot block " + std::to_string(e.block) + " is outside the trace footprint");
      }
    }
    engine.load_snapshot(*snapshot);
  }
  const std::size_t boundary = warmup_boundary(trace.ops.size(), config.warmup_fraction);
  engine.set_measuring(false);
  engine.replay(trace.window(0, boundary));
  engine.set_measuring(true);
  engine.replay(trace.window(boundary, trace.ops.size() - boundary));
  return engine.metrics();
}

}  // namespace mtsim
