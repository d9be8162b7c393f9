#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mtsim/buffer_pool.hpp"

namespace mtsim {

enum class OpKind : std::uint8_t { Read, Write };

struct TraceOperation {
  OpKind kind = OpKind::Read;
  BlockId block = 0;

  friend bool operator==(const TraceOperation&, const TraceOperation&) = default;
};

struct Trace {
  std::uint64_t footprint_blocks = 0;  // id space; every op's block is below it
  std::vector<TraceOperation> ops;

  std::size_t size() const { return ops.size(); }
  std::span<const TraceOperation> window(std::size_t begin, std::size_t count) const {
    return std::span<const TraceOperation>(ops).subspan(begin, count);
  }
  // Distinct blocks referenced at least once.
  std::uint64_t referenced_blocks() const;
  std::uint64_t read_count() const;

  // Throws ParseError (line 0) if an op references a block >= footprint_blocks.
  void validate() const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct ZipfShape {
  double theta = 1.0;
};

// Zipf data accesses interleaved with sequential log-block writes.
struct LogAppendShape {
  double log_fraction = 0.2;
  // Size of the log region at the top of the id space; 0 picks blocks / 4.
  std::uint64_t log_blocks = 0;
};

struct ShiftingHotSetShape {
  std::uint64_t hot_set_blocks = 100;
  std::uint64_t shift_period = 10'000;
  double hot_probability = 0.9;
};

using WorkloadShape = std::variant<ZipfShape, LogAppendShape, ShiftingHotSetShape>;

struct WorkloadSpec {
  WorkloadShape shape = ZipfShape{};
  std::uint64_t blocks = 1000;
  std::uint64_t ops = 100'000;
  double read_ratio = 0.9;
  std::uint64_t seed = 0;

  // Throws UsageError when a field is out of range.
  void validate() const;
};

// Skew of the data accesses in LogAppend traces.
inline constexpr double kLogAppendDataTheta = 1.0;

// Exact Zipf sampler: rank r in [0, n) has probability (r+1)^-theta / H.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double theta);

  std::uint64_t size() const { return cdf_.size(); }
  // Maps a uniform draw in [0,1) to a rank.
  std::uint64_t rank_for(double u) const;
  double probability(std::uint64_t rank) const;

 private:
  std::vector<double> cdf_;
};

Trace generate(const WorkloadSpec& spec);

// Blocks in descending expected popularity under the generator's
// distribution at time zero.
std::vector<BlockId> hotness_order(const WorkloadSpec& spec);

// Hottest blocks into DRAM, the next hottest into NVM, each tier filled to
// fill_fraction of its slots (clean). Within a tier the hottest block is
// listed last so it is the most recently used after loading.
Snapshot make_snapshot(const WorkloadSpec& spec, std::uint64_t dram_slots, std::uint64_t nvm_slots,
                       double fill_fraction = 1.0);

struct CdfPoint {
  double block_fraction = 0.0;
  double access_fraction = 0.0;
};

using SkewCdf = std::vector<CdfPoint>;

// Per-block access-count CDF: blocks sorted by ascending count, point k is
// (k / referenced, cumulative accesses / total). Throws ConfigError on an
// empty trace.
SkewCdf characterize(const Trace& trace);

// Access fraction of the last point whose block fraction is <= x.
double access_fraction_at(const SkewCdf& cdf, double block_fraction);

void write_skew_cdf(std::ostream& out, const SkewCdf& cdf);

// "MTSIM v1 blocks=<n> ops=<m>" header then "R <id>" / "W <id>" lines.
void write_trace(std::ostream& out, const Trace& trace);
void write_trace_file(const std::string& path, const Trace& trace);
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);

}  // namespace mtsim
