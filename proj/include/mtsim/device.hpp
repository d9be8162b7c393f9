#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace mtsim {

// Ordered fastest to slowest.
enum class TierKind : std::uint8_t { Dram = 0, Nvm = 1, Ssd = 2, Hdd = 3 };

enum class Direction : std::uint8_t { Read, Write };

using Nanoseconds = std::uint64_t;

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * kKiB;
inline constexpr std::uint64_t kGiB = 1024 * kMiB;
inline constexpr std::uint64_t kTiB = 1024 * kGiB;

inline constexpr std::uint64_t kDefaultBlockSize = 4096;

std::string_view to_string(TierKind kind);
TierKind parse_tier_kind(std::string_view text);

struct DeviceSpec {
  TierKind kind = TierKind::Dram;
  double read_latency_ns = 1.0;
  double write_latency_ns = 1.0;
  double bandwidth_bytes_per_s = 1.0;
  double cost_per_gb = 0.0;
  std::uint64_t capacity_bytes = 0;  // 0 = tier absent

  double latency_ns(Direction dir) const {
    return dir == Direction::Read ? read_latency_ns : write_latency_ns;
  }
  bool present() const { return capacity_bytes > 0; }

  // Throws ConfigError if any field breaks the device invariants.
  void validate() const;

  friend bool operator==(const DeviceSpec&, const DeviceSpec&) = default;
};

// latency + block_size / bandwidth, rounded to the nearest nanosecond.
Nanoseconds block_transfer_time(const DeviceSpec& spec, Direction dir, std::uint64_t block_size);

// cost_per_gb x capacity in GiB.
double device_cost(const DeviceSpec& spec);

// Named device profiles plus an optional NVM latency multiplier.
//
// The default profiles come from the published technology comparison:
//
//   name  kind  read     write    bandwidth  $/GB
//   dram  dram  50 ns    50 ns    60 GB/s    10
//   nvm   nvm   50 ns    200 ns   10 GB/s    1      (PCM-class)
//   rram  nvm   100 ns   100 ns   10 GB/s    1
//   ssd   ssd   25 us    300 us   1 GB/s     0.2
//   hdd   hdd   10 ms    10 ms    0.1 GB/s   0.02
//
// When a multiplier m is set, every NVM-kind profile resolves with read and
// write latency equal to m times the corresponding "dram" latency. Setting a
// new multiplier replaces the old one.
class DeviceCatalog {
 public:
  static DeviceCatalog defaults();

  // Catalog file: one device per line,
  //   <name> <kind> <read_ns> <write_ns> <bw_bytes_per_s> <cost_per_gb> <capacity_bytes>
  // '#' starts a comment line. Entries override same-named defaults only
  // when the caller starts from defaults() and merges.
  static DeviceCatalog parse(std::istream& in);
  static DeviceCatalog load(const std::string& path);
  void write(std::ostream& out) const;

  void add(std::string name, DeviceSpec spec);
  bool contains(std::string_view name) const;

  // Profile after the NVM multiplier is applied. Throws ConfigError when
  // the name is unknown.
  DeviceSpec get(std::string_view name) const;
  const DeviceSpec& raw(std::string_view name) const;

  void set_nvm_multiplier(std::optional<double> multiplier);
  std::optional<double> nvm_multiplier() const { return nvm_multiplier_; }

  const std::map<std::string, DeviceSpec, std::less<>>& profiles() const { return profiles_; }

 private:
  std::map<std::string, DeviceSpec, std::less<>> profiles_;
  std::optional<double> nvm_multiplier_;
};

// One DRAM/NVM/SSD stack. A tier with capacity 0 is absent.
struct Hierarchy {
  DeviceSpec dram;
  DeviceSpec nvm;
  DeviceSpec ssd;
  std::uint64_t block_size = kDefaultBlockSize;

  const DeviceSpec& tier(TierKind kind) const;
  std::uint64_t slots(TierKind kind) const { return tier(kind).capacity_bytes / block_size; }
  double total_cost() const { return device_cost(dram) + device_cost(nvm) + device_cost(ssd); }

  // Throws ConfigError when a capacity is not a whole multiple of the block
  // size or a device spec is invalid.
  void validate() const;
};

// Profiles "dram", "nvm" and "ssd" from the catalog, with the given
// capacities in bytes.
Hierarchy make_hierarchy(const DeviceCatalog& catalog, std::uint64_t dram_bytes,
                         std::uint64_t nvm_bytes, std::uint64_t ssd_bytes,
                         std::uint64_t block_size = kDefaultBlockSize);

// Same, with capacities in blocks.
Hierarchy make_hierarchy_blocks(const DeviceCatalog& catalog, std::uint64_t dram_blocks,
                                std::uint64_t nvm_blocks, std::uint64_t ssd_blocks,
                                std::uint64_t block_size = kDefaultBlockSize);

// "16GB", "512MB", "4096", "0", "1TB". Binary units; optional trailing 'B'/'iB'.
std::uint64_t parse_size(std::string_view text);
std::string format_size(std::uint64_t bytes);

struct HierarchyCapacities {
  std::uint64_t dram_bytes = 0;
  std::uint64_t nvm_bytes = 0;
  std::uint64_t ssd_bytes = 0;
};

// "dram:<size>,nvm:<size>,ssd:<size>"; missing tiers are 0, unknown tier
// names or repeated tiers raise UsageError.
HierarchyCapacities parse_hierarchy_spec(std::string_view text);

}  // namespace mtsim
