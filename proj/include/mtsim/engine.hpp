#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "mtsim/buffer_pool.hpp"
#include "mtsim/device.hpp"
#include "mtsim/random.hpp"
#include "mtsim/workload.hpp"

namespace mtsim {

// Probabilities of the four migration knobs:
//   d_r  copy into DRAM on a read served from NVM or SSD
//   d_w  install a written, non-DRAM-resident block into DRAM
//   n_r  copy into NVM when a read fetches from SSD
//   n_w  admit a dirty DRAM victim into NVM instead of writing it to SSD
struct MigrationPolicy {
  double d_r = 1.0;
  double d_w = 1.0;
  double n_r = 1.0;
  double n_w = 1.0;

  static constexpr MigrationPolicy eager() { return {1.0, 1.0, 1.0, 1.0}; }

  // Throws ConfigError unless every field is in [0,1].
  void validate() const;
  std::string to_string() const;  // "d_r,d_w,n_r,n_w"

  friend bool operator==(const MigrationPolicy&, const MigrationPolicy&) = default;
  friend auto operator<=>(const MigrationPolicy&, const MigrationPolicy&) = default;
};

// "dr,dw,nr,nw"; throws UsageError on malformed input.
MigrationPolicy parse_policy(std::string_view text);

struct SimMetrics {
  std::uint64_t ops_total = 0;
  std::uint64_t ops_measured = 0;
  std::uint64_t read_ops = 0;   // measured
  std::uint64_t write_ops = 0;  // measured
  Nanoseconds sim_time_ns = 0;
  double throughput_ops_per_s = 0.0;

  std::uint64_t dram_reads = 0;
  std::uint64_t dram_writes = 0;
  std::uint64_t nvm_reads = 0;
  std::uint64_t nvm_writes = 0;
  std::uint64_t ssd_reads = 0;
  std::uint64_t ssd_writes = 0;
  std::uint64_t dram_hits = 0;
  std::uint64_t nvm_hits = 0;
  std::uint64_t dram_evictions = 0;
  std::uint64_t nvm_evictions = 0;

  // ops_measured / sim_time in seconds, 0 when nothing was timed.
  void finalize_throughput();

  friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

// Emitted keys, in order.
inline constexpr const char* kMetricKeys[] = {
    "ops_total",   "ops_measured", "sim_time_ns",    "throughput_ops_per_s", "nvm_writes",
    "ssd_reads",   "ssd_writes",   "dram_hits",      "nvm_hits",             "dram_evictions",
    "nvm_evictions", "dram_reads", "dram_writes",    "nvm_reads"};

void write_metrics_json(std::ostream& out, const SimMetrics& m);
void write_metrics_csv(std::ostream& out, const SimMetrics& m, bool header = true);
std::string metrics_csv_header();
std::string metrics_csv_row(const SimMetrics& m);

// Which branch served each operation. Counted for every operation,
// including warm-up, so the sum always equals the number of replayed ops.
struct PathCounts {
  std::uint64_t read_dram_hit = 0;
  std::uint64_t read_nvm_hit = 0;
  std::uint64_t read_miss = 0;
  std::uint64_t write_dram_hit = 0;
  std::uint64_t write_dram_install = 0;
  std::uint64_t write_nvm = 0;
  std::uint64_t write_ssd = 0;

  std::uint64_t total() const {
    return read_dram_hit + read_nvm_hit + read_miss + write_dram_hit + write_dram_install + write_nvm + write_ssd;
  }
};

struct EngineConfig {
  MigrationPolicy policy = MigrationPolicy::eager();
  double warmup_fraction = 0.5;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Replays operations against a DRAM and an NVM buffer pool on top of SSD.
//
// Tiers are non-inclusive: promotions copy, bypass paths skip tiers, and an
// NVM eviction never recalls a DRAM copy. A tier with capacity 0 is absent
// and the knobs that would install into it behave as probability 0.
//
// Random draws, one uniform per probabilistic branch, in this order:
//   read, NVM hit          one draw (d_r)
//   read, double miss      two draws: d_r first, then n_r
//   write, not in DRAM     one draw (d_w)
//   dirty DRAM victim not resident in NVM   one draw (n_w)
// Draws are consumed even when a probability is 0 or 1, so runs whose
// probabilities are all 0 or 1 do not depend on the seed.
//
// Time and counters accumulate only while measuring() is true. The engine
// is a value type; copying it forks the full simulation state.
class MigrationEngine {
 public:
  MigrationEngine(const EngineConfig& config, const Hierarchy& hierarchy);

  void load_snapshot(const Snapshot& snapshot);

  Nanoseconds handle_read(BlockId b);
  Nanoseconds handle_write(BlockId b);
  Nanoseconds handle(const TraceOperation& op) {
    return op.kind == OpKind::Read ? handle_read(op.block) : handle_write(op.block);
  }
  Nanoseconds evict_from_dram(BlockId victim, bool was_dirty);
  Nanoseconds evict_from_nvm(BlockId victim, bool was_dirty);

  // Replays ops; each counts toward ops_total, and toward ops_measured when
  // measuring.
  void replay(std::span<const TraceOperation> ops);

  void set_policy(const MigrationPolicy& policy);
  const MigrationPolicy& policy() const { return policy_; }
  void reseed(std::uint64_t seed) { rng_.reseed(seed); }

  void set_measuring(bool on) { measuring_ = on; }
  bool measuring() const { return measuring_; }

  // Current counters with throughput filled in.
  SimMetrics metrics() const;
  void reset_metrics() { metrics_ = {}; }

  const PathCounts& paths() const { return paths_; }
  const BufferPool& dram() const { return dram_; }
  const BufferPool& nvm() const { return nvm_; }
  const Hierarchy& hierarchy() const { return hierarchy_; }

 private:
  struct TierTimes {
    Nanoseconds read = 0;
    Nanoseconds write = 0;
  };

  Nanoseconds charge_dram_read();
  Nanoseconds charge_dram_write();
  Nanoseconds charge_nvm_read();
  Nanoseconds charge_nvm_write();
  Nanoseconds charge_ssd_read();
  Nanoseconds charge_ssd_write();

  Nanoseconds install_dram(BlockId b, bool dirty);
  Nanoseconds install_nvm(BlockId b, bool dirty);

  Hierarchy hierarchy_;
  MigrationPolicy policy_;
  TierTimes dram_time_, nvm_time_, ssd_time_;
  bool has_dram_ = false;
  bool has_nvm_ = false;
  BufferPool dram_;
  BufferPool nvm_;
  Random rng_;
  bool measuring_ = true;
  SimMetrics metrics_;
  PathCounts paths_;
};

// Index of the first measured operation: ceil(warmup_fraction * ops).
std::size_t warmup_boundary(std::size_t ops, double warmup_fraction);

// Full replay with warm-up. Throws ConfigError when the trace footprint
// does not fit on the SSD tier or the snapshot is inconsistent.
SimMetrics run_trace(const EngineConfig& config, const Hierarchy& hierarchy, const Trace& trace,
                     const Snapshot* snapshot = nullptr);

}  // namespace mtsim
