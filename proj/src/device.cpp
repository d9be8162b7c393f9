#include "mtsim/device.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mtsim/error.hpp"

namespace mtsim {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(TierKind kind) {
  switch (kind) {
    case TierKind::Dram: return "dram";
    case TierKind::Nvm: return "nvm";
    case TierKind::Ssd: return "ssd";
    case TierKind::Hdd: return "hdd";
  }
  return "?";
}

TierKind parse_tier_kind(std::string_view text) {
  const std::string s = lower(text);
  if (s == "dram") return TierKind::Dram;
  if (s == "nvm") return TierKind::Nvm;
  if (s == "ssd") return TierKind::Ssd;
  if (s == "hdd") return TierKind::Hdd;
  throw ConfigError("unknown tier kind '" + std::string(text) + "'");
}

void DeviceSpec::validate() const {
  if (!(read_latency_ns > 0) || !(write_latency_ns > 0))
    throw ConfigError("device latency must be positive");
  if (!(bandwidth_bytes_per_s > 0)) throw ConfigError("device bandwidth must be positive");
  if (!(cost_per_gb >= 0)) throw ConfigError("device cost per GB must be non-negative");
}

Nanoseconds block_transfer_time(const DeviceSpec& spec, Direction dir, std::uint64_t block_size) {
  MTSIM_EXPECTS(block_size > 0, "block size must be positive");
  const double ns = spec.latency_ns(dir) + static_cast<double>(block_size) * 1e9 / spec.bandwidth_bytes_per_s;
  return static_cast<Nanoseconds>(std::llround(ns));
}

double device_cost(const DeviceSpec& spec) {
  return spec.cost_per_gb * (static_cast<double>(spec.capacity_bytes) / static_cast<double>(kGiB));
}

DeviceCatalog DeviceCatalog::defaults() {
  DeviceCatalog c;
  c.add("dram", {TierKind::Dram, 50.0, 50.0, 60e9, 10.0, 0});
  c.add("nvm", {TierKind::Nvm, 50.0, 200.0, 10e9, 1.0, 0});
  c.add("rram", {TierKind::Nvm, 100.0, 100.0, 10e9, 1.0, 0});
  c.add("ssd", {TierKind::Ssd, 25'000.0, 300'000.0, 1e9, 0.2, 0});
  c.add("hdd", {TierKind::Hdd, 10'000'000.0, 10'000'000.0, 0.1e9, 0.02, 0});
  return c;
}

DeviceCatalog DeviceCatalog::parse(std::istream& in) {
  DeviceCatalog c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::istringstream fields{std::string(body)};
    std::string name, kind;
    DeviceSpec spec;
    if (!(fields >> name >> kind >> spec.read_latency_ns >> spec.write_latency_ns >>
          spec.bandwidth_bytes_per_s >> spec.cost_per_gb >> spec.capacity_bytes))
      throw ParseError("expected '<name> <kind> <read_ns> <write_ns> <bw> <cost_per_gb> <capacity>'",
                       lineno);
    std::string extra;
    if (fields >> extra) throw ParseError("trailing field '" + extra + "'", lineno);
    try {
      spec.kind = parse_tier_kind(kind);
      spec.validate();
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), lineno);
    }
    c.add(std::move(name), spec);
  }
  return c;
}

DeviceCatalog DeviceCatalog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open catalog '" + path + "'");
  return parse(in);
}

void DeviceCatalog::write(std::ostream& out) const {
  out << "# name kind read_ns write_ns bw_bytes_per_s cost_per_gb capacity_bytes\n";
  for (const auto& [name, s] : profiles_) {
    out << name << ' ' << to_string(s.kind) << ' ' << std::setprecision(17) << s.read_latency_ns << ' '
        << s.write_latency_ns << ' ' << s.bandwidth_bytes_per_s << ' ' << s.cost_per_gb << ' '
        << s.capacity_bytes << '\n';
  }
}

void DeviceCatalog::add(std::string name, DeviceSpec spec) {
  spec.validate();
  profiles_.insert_or_assign(std::move(name), spec);
}

bool DeviceCatalog::contains(std::string_view name) const { return profiles_.find(name) != profiles_.end(); }

const DeviceSpec& DeviceCatalog::raw(std::string_view name) const {
  const auto it = profiles_.find(name);
  if (it == profiles_.end()) throw ConfigError("catalog has no device '" + std::string(name) + "'");
  return it->second;
}

DeviceSpec DeviceCatalog::get(std::string_view name) const {
  DeviceSpec spec = raw(name);
  if (spec.kind == TierKind::Nvm && nvm_multiplier_) {
    const DeviceSpec& dram = raw("dram");
    spec.read_latency_ns = *nvm_multiplier_ * dram.read_latency_ns;
    spec.write_latency_ns = *nvm_multiplier_ * dram.write_latency_ns;
  }
  return spec;
}

void DeviceCatalog::set_nvm_multiplier(std::optional<double> multiplier) {
  if (multiplier && !(*multiplier > 0)) throw ConfigError("NVM latency multiplier must be positive");
  nvm_multiplier_ = multiplier;
}

const DeviceSpec& Hierarchy::tier(TierKind kind) const {
  switch (kind) {
    case TierKind::Dram: return dram;
    case TierKind::Nvm: return nvm;
    case TierKind::Ssd: return ssd;
    case TierKind::Hdd: break;
  }
  throw ConfigError("hierarchy has no HDD tier");
}

void Hierarchy::validate() const {
  if (block_size == 0) throw ConfigError("block size must be positive");
  for (const DeviceSpec* d : {&dram, &nvm, &ssd}) {
    d->validate();
    if (d->capacity_bytes % block_size != 0)
      throw ConfigError(std::string(to_string(d->kind)) + " capacity " + std::to_string(d->capacity_bytes) +
                        " is not a multiple of the block size " + std::to_string(block_size));
  }
}

Hierarchy make_hierarchy(const DeviceCatalog& catalog, std::uint64_t dram_bytes, std::uint64_t nvm_bytes,
                         std::uint64_t ssd_bytes, std::uint64_t block_size) {
  Hierarchy h;
  h.dram = catalog.get("dram");
  h.nvm = catalog.get("nvm");
  h.ssd = catalog.get("ssd");
  h.dram.capacity_bytes = dram_bytes;
  h.nvm.capacity_bytes = nvm_bytes;
  h.ssd.capacity_bytes = ssd_bytes;
  h.block_size = block_size;
  h.validate();
  return h;
}

Hierarchy make_hierarchy_blocks(const DeviceCatalog& catalog, std::uint64_t dram_blocks,
                                std::uint64_t nvm_blocks, std::uint64_t ssd_blocks, std::uint64_t block_size) {
  return make_hierarchy(catalog, dram_blocks * block_size, nvm_blocks * block_size, ssd_blocks * block_size,
                        block_size);
}

std::uint64_t parse_size(std::string_view text) {
  const std::string_view s = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr == s.data()) throw UsageError("invalid size '" + std::string(text) + "'");
  std::string unit = lower(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr)));
  if (unit.size() > 1 && unit.ends_with("ib")) unit.erase(unit.size() - 2, 1);  // "gib" -> "gb"
  std::uint64_t mult = 0;
  if (unit.empty() || unit == "b") mult = 1;
  else if (unit == "k" || unit == "kb") mult = kKiB;
  else if (unit == "m" || unit == "mb") mult = kMiB;
  else if (unit == "g" || unit == "gb") mult = kGiB;
  else if (unit == "t" || unit == "tb") mult = kTiB;
  else throw UsageError("invalid size unit in '" + std::string(text) + "'");
  if (value != 0 && value > UINT64_MAX / mult) throw UsageError("size overflows: '" + std::string(text) + "'");
  return value * mult;
}

std::string format_size(std::uint64_t bytes) {
  if (bytes == 0) return "0";
  for (const auto& [mult, unit] : {std::pair{kTiB, "TB"}, {kGiB, "GB"}, {kMiB, "MB"}, {kKiB, "KB"}}) {
    if (bytes % mult == 0) return std::to_string(bytes / mult) + unit;
  }
  return std::to_string(bytes) + "B";
}

HierarchyCapacities parse_hierarchy_spec(std::string_view text) {
  HierarchyCapacities caps;
  bool seen[3] = {false, false, false};
  std::string_view rest = trim(text);
  if (rest.empty()) throw UsageError("empty hierarchy spec");
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      throw UsageError("hierarchy item '" + std::string(item) + "' is not <tier>:<size>");
    const std::string tier = lower(trim(item.substr(0, colon)));
    const std::uint64_t bytes = parse_size(item.substr(colon + 1));
    int idx = -1;
    if (tier == "dram") idx = 0, caps.dram_bytes = bytes;
    else if (tier == "nvm") idx = 1, caps.nvm_bytes = bytes;
    else if (tier == "ssd") idx = 2, caps.ssd_bytes = bytes;
    else throw UsageError("unknown tier '" + tier + "' in hierarchy spec");
    if (seen[idx]) throw UsageError("tier '" + tier + "' given twice in hierarchy spec");
    seen[idx] = true;
  }
  return caps;
}

}  // namespace mtsim
