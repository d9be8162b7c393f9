#include "mtsim/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "mtsim/error.hpp"
#include "mtsim/random.hpp"

namespace mtsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw UsageError(std::string(name) + " must be in [0,1]");
}

std::uint64_t log_region_blocks(const WorkloadSpec& spec, const LogAppendShape& s) {
  return s.log_blocks != 0 ? s.log_blocks : std::max<std::uint64_t>(1, spec.blocks / 4);
}

}  // namespace

std::uint64_t Trace::referenced_blocks() const {
  std::vector<bool> seen(footprint_blocks, false);
  std::uint64_t n = 0;
  for (const auto& op : ops) {
    if (op.block < footprint_blocks && !seen[op.block]) {
      seen[op.block] = true;
      ++n;
    }
  }
  return n;
}

std::uint64_t Trace::read_count() const {
  return static_cast<std::uint64_t>(
      std::count_if(ops.begin(), ops.end(), [](const TraceOperation& op) { return op.kind == OpKind::Read; }));
}

void Trace::validate() const {
  for (const auto& op : ops) {
    if (op.block >= footprint_blocks)
      throw ValidationError("block id " + std::to_string(op.block) + " >= footprint " +
                                std::to_string(footprint_blocks),
                            0);
  }
}

void WorkloadSpec::validate() const {
  if (blocks < 1) throw UsageError("workload needs at least one block");
  if (ops < 1) throw UsageError("workload needs at least one operation");
  require_fraction(read_ratio, "read ratio");
  std::visit(Overloaded{
                 [](const ZipfShape& z) {
                   if (!(z.theta >= 0.0) || !std::isfinite(z.theta)) throw UsageError("theta must be >= 0");
                 },
                 [this](const LogAppendShape& l) {
                   require_fraction(l.log_fraction, "log fraction");
                   if (blocks < 2) throw UsageError("log workload needs at least two blocks");
                   if (log_region_blocks(*this, l) >= blocks)
                     throw UsageError("log region must leave at least one data block");
                 },
                 [this](const ShiftingHotSetShape& h) {
                   require_fraction(h.hot_probability, "hot probability");
                   if (h.hot_set_blocks < 1 || h.hot_set_blocks > blocks)
                     throw UsageError("hot set size must be in [1, blocks]");
                   if (h.shift_period < 1) throw UsageError("shift period must be >= 1");
                 },
             },
             shape);
}

ZipfSampler::ZipfSampler(std::uint64_t n, double theta) : cdf_(n) {
  MTSIM_EXPECTS(n > 0, "Zipf sampler over an empty domain");
  double sum = 0.0;
  for (std::uint64_t r = 0; r < n; ++r) {
    sum += std::pow(static_cast<double>(r + 1), -theta);
    cdf_[r] = sum;
  }
  for (double& c : cdf_) c /= sum;
  cdf_.back() = 1.0;
}

std::uint64_t ZipfSampler::rank_for(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return it == cdf_.end() ? cdf_.size() - 1 : static_cast<std::uint64_t>(it - cdf_.begin());
}

double ZipfSampler::probability(std::uint64_t rank) const {
  return rank == 0 ? cdf_[0] : cdf_[rank] - cdf_[rank - 1];
}

Trace generate(const WorkloadSpec& spec) {
  spec.validate();
  Trace trace;
  trace.footprint_blocks = spec.blocks;
  trace.ops.reserve(spec.ops);
  Random rng(spec.seed);

  auto kind = [&] { return rng.chance(spec.read_ratio) ? OpKind::Read : OpKind::Write; };

  std::visit(Overloaded{
                 [&](const ZipfShape& z) {
                   const ZipfSampler zipf(spec.blocks, z.theta);
                   for (std::uint64_t i = 0; i < spec.ops; ++i) {
                     const OpKind k = kind();
                     trace.ops.push_back({k, zipf.rank_for(rng.uniform())});
                   }
                 },
                 [&](const LogAppendShape& l) {
                   const std::uint64_t log_blocks = log_region_blocks(spec, l);
                   const std::uint64_t data_blocks = spec.blocks - log_blocks;
                   const ZipfSampler zipf(data_blocks, kLogAppendDataTheta);
                   std::uint64_t cursor = 0;
                   for (std::uint64_t i = 0; i < spec.ops; ++i) {
                     if (rng.chance(l.log_fraction)) {
                       trace.ops.push_back({OpKind::Write, data_blocks + cursor});
                       cursor = (cursor + 1) % log_blocks;
                     } else {
                       const OpKind k = kind();
                       trace.ops.push_back({k, zipf.rank_for(rng.uniform())});
                     }
                   }
                 },
                 [&](const ShiftingHotSetShape& h) {
                   std::uint64_t start = 0;
                   for (std::uint64_t i = 0; i < spec.ops; ++i) {
                     if (i > 0 && i % h.shift_period == 0) start = (start + h.hot_set_blocks) % spec.blocks;
                     const OpKind k = kind();
                     const BlockId b = rng.chance(h.hot_probability)
                                           ? (start + rng.below(h.hot_set_blocks)) % spec.blocks
                                           : rng.below(spec.blocks);
                     trace.ops.push_back({k, b});
                   }
                 },
             },
             spec.shape);
  return trace;
}

std::vector<BlockId> hotness_order(const WorkloadSpec& spec) {
  spec.validate();
  std::vector<BlockId> order(spec.blocks);
  // Identity order covers all three shapes: Zipf ranks map to ids, the log
  // region sits above the data region, and the first hot window is [0, H).
  for (std::uint64_t i = 0; i < spec.blocks; ++i) order[i] = i;
  return order;
}

Snapshot make_snapshot(const WorkloadSpec& spec, std::uint64_t dram_slots, std::uint64_t nvm_slots,
                       double fill_fraction) {
  require_fraction(fill_fraction, "fill fraction");
  const std::vector<BlockId> order = hotness_order(spec);
  const auto fill = [&](std::uint64_t slots) {
    return static_cast<std::uint64_t>(std::floor(static_cast<double>(slots) * fill_fraction));
  };
  const std::uint64_t n_dram = std::min<std::uint64_t>(fill(dram_slots), order.size());
  const std::uint64_t n_nvm = std::min<std::uint64_t>(fill(nvm_slots), order.size() - n_dram);

  Snapshot snap;
  for (std::uint64_t i = n_dram; i-- > 0;) snap.dram.push_back({order[i], false});
  for (std::uint64_t i = n_dram + n_nvm; i-- > n_dram;) snap.nvm.push_back({order[i], false});
  return snap;
}

SkewCdf characterize(const Trace& trace) {
  if (trace.ops.empty()) throw ConfigError("cannot characterize an empty trace");
  trace.validate();
  std::vector<std::uint64_t> counts(trace.footprint_blocks, 0);
  for (const auto& op : trace.ops) ++counts[op.block];
  counts.erase(std::remove(counts.begin(), counts.end(), 0), counts.end());
  std::sort(counts.begin(), counts.end());

  const double n = static_cast<double>(counts.size());
  const double total = static_cast<double>(trace.ops.size());
  SkewCdf cdf;
  cdf.reserve(counts.size());
  std::uint64_t cumulative = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    cumulative += counts[k];
    cdf.push_back({static_cast<double>(k + 1) / n, static_cast<double>(cumulative) / total});
  }
  cdf.back() = {1.0, 1.0};
  return cdf;
}

double access_fraction_at(const SkewCdf& cdf, double block_fraction) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), block_fraction,
                                   [](double x, const CdfPoint& p) { return x < p.block_fraction; });
  return it == cdf.begin() ? 0.0 : std::prev(it)->access_fraction;
}

void write_skew_cdf(std::ostream& out, const SkewCdf& cdf) {
  char buf[64];
  out << "block_fraction,access_fraction\n";
  for (const auto& p : cdf) {
    auto end = std::to_chars(buf, buf + sizeof buf, p.block_fraction).ptr;
    *end++ = ',';
    end = std::to_chars(end, buf + sizeof buf, p.access_fraction).ptr;
    *end++ = '\n';
    out.write(buf, end - buf);
  }
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "MTSIM v1 blocks=" << trace.footprint_blocks << " ops=" << trace.ops.size() << '\n';
  char buf[32];
  for (const auto& op : trace.ops) {
    buf[0] = op.kind == OpKind::Read ? 'R' : 'W';
    buf[1] = ' ';
    char* end = std::to_chars(buf + 2, buf + sizeof buf, op.block).ptr;
    *end++ = '\n';
    out.write(buf, end - buf);
  }
}

void write_trace_file(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trace '" + path + "'");
  write_trace(out, trace);
  if (!out) throw ConfigError("error writing trace '" + path + "'");
}

namespace {

bool parse_u64(std::string_view s, std::uint64_t& v) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

bool take_field(std::string_view& line, std::string_view key, std::uint64_t& v) {
  if (!line.starts_with(key)) return false;
  line.remove_prefix(key.size());
  const std::size_t sp = line.find(' ');
  const bool ok = parse_u64(line.substr(0, sp), v);
  line = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
  return ok;
}

}  // namespace

Trace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing trace header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Trace trace;
  std::uint64_t declared_ops = 0;
  {
    std::string_view h = line;
    if (!h.starts_with("MTSIM v1 ")) throw ParseError("header must start with 'MTSIM v1'", 1);
    h.remove_prefix(9);
    if (!take_field(h, "blocks=", trace.footprint_blocks) || !take_field(h, "ops=", declared_ops) || !h.empty())
      throw ParseError("header must be 'MTSIM v1 blocks=<n> ops=<m>'", 1);
  }
  trace.ops.reserve(declared_ops);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() < 3 || (line[0] != 'R' && line[0] != 'W') || line[1] != ' ')
      throw ParseError("expected 'R <id>' or 'W <id>'", lineno);
    TraceOperation op;
    op.kind = line[0] == 'R' ? OpKind::Read : OpKind::Write;
    if (!parse_u64(std::string_view(line).substr(2), op.block))
      throw ParseError("invalid block id '" + line.substr(2) + "'", lineno);
    if (op.block >= trace.footprint_blocks)
      throw ValidationError("block id " + std::to_string(op.block) + " >= footprint " +
                                std::to_string(trace.footprint_blocks),
                            lineno);
    trace.ops.push_back(op);
  }
  if (trace.ops.size() != declared_ops)
    throw ParseError("header declares " + std::to_string(declared_ops) + " ops but file has " +
                         std::to_string(trace.ops.size()),
                     lineno);
  return trace;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace '" + path + "'");
  return read_trace(in);
}

}  // namespace mtsim
