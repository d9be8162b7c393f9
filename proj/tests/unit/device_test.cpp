#include <gtest/gtest.h>

#include <sstream>

#include "mtsim/device.hpp"
#include "mtsim/error.hpp"

namespace mtsim {
namespace {

TEST(BlockTransferTime, DramRead4K) {
  // 50 ns + 4096 B / 60e9 B/s = 50 + 68.27 ns
  const DeviceSpec dram = DeviceCatalog::defaults().get("dram");
  EXPECT_EQ(block_transfer_time(dram, Direction::Read, 4096), 118u);
}

TEST(BlockTransferTime, LatencyDominatedLimit) {
  const DeviceSpec dram = DeviceCatalog::defaults().get("dram");
  EXPECT_EQ(block_transfer_time(dram, Direction::Read, 1), 50u);
}

TEST(BlockTransferTime, SsdWrite4K) {
  const DeviceSpec ssd = DeviceCatalog::defaults().get("ssd");
  EXPECT_EQ(block_transfer_time(ssd, Direction::Write, 4096), 304'096u);
}

TEST(BlockTransferTime, MonotoneInSizeAndLatency) {
  DeviceSpec d = DeviceCatalog::defaults().get("nvm");
  Nanoseconds prev = 0;
  for (std::uint64_t size = 1024; size <= 1 << 20; size *= 2) {
    const Nanoseconds t = block_transfer_time(d, Direction::Write, size);
    EXPECT_GT(t, prev);
    prev = t;
  }
  const Nanoseconds base = block_transfer_time(d, Direction::Read, 4096);
  d.read_latency_ns += 10;
  EXPECT_GT(block_transfer_time(d, Direction::Read, 4096), base);
}

TEST(DeviceCost, Examples) {
  DeviceSpec dram = DeviceCatalog::defaults().get("dram");
  dram.capacity_bytes = 16 * kGiB;
  EXPECT_DOUBLE_EQ(device_cost(dram), 160.0);
  dram.capacity_bytes = 0;
  EXPECT_EQ(device_cost(dram), 0.0);
  DeviceSpec ssd = DeviceCatalog::defaults().get("ssd");
  ssd.capacity_bytes = 2 * kTiB;
  EXPECT_NEAR(device_cost(ssd), 409.60, 1e-9);
}

TEST(DeviceCost, LinearInCapacity) {
  const DeviceCatalog catalog = DeviceCatalog::defaults();
  for (const auto& [name, spec] : catalog.profiles()) {
    DeviceSpec d = spec;
    d.capacity_bytes = 3 * kGiB;
    const double one = device_cost(d);
    d.capacity_bytes = 6 * kGiB;
    EXPECT_DOUBLE_EQ(device_cost(d), 2 * one) << name;
  }
}

TEST(DeviceCatalog, DefaultsMatchTechnologyTable) {
  const DeviceCatalog c = DeviceCatalog::defaults();
  const DeviceSpec& dram = c.raw("dram");
  EXPECT_EQ(dram.read_latency_ns, 50);
  EXPECT_EQ(dram.write_latency_ns, 50);
  EXPECT_EQ(dram.bandwidth_bytes_per_s, 60e9);
  EXPECT_EQ(dram.cost_per_gb, 10);
  const DeviceSpec& nvm = c.raw("nvm");
  EXPECT_EQ(nvm.kind, TierKind::Nvm);
  EXPECT_EQ(nvm.read_latency_ns, 50);
  EXPECT_EQ(nvm.write_latency_ns, 200);
  EXPECT_EQ(nvm.bandwidth_bytes_per_s, 10e9);
  EXPECT_EQ(nvm.cost_per_gb, 1);
  const DeviceSpec& ssd = c.raw("ssd");
  EXPECT_EQ(ssd.read_latency_ns, 25'000);
  EXPECT_EQ(ssd.write_latency_ns, 300'000);
  EXPECT_EQ(ssd.bandwidth_bytes_per_s, 1e9);
  EXPECT_DOUBLE_EQ(ssd.cost_per_gb, 0.2);
  const DeviceSpec& hdd = c.raw("hdd");
  EXPECT_EQ(hdd.read_latency_ns, 10'000'000);
  EXPECT_EQ(hdd.write_latency_ns, 10'000'000);
  EXPECT_DOUBLE_EQ(hdd.bandwidth_bytes_per_s, 0.1e9);
  EXPECT_DOUBLE_EQ(hdd.cost_per_gb, 0.02);
}

TEST(DeviceCatalog, MultiplierOverridesNvmLatency) {
  DeviceCatalog c = DeviceCatalog::defaults();
  c.set_nvm_multiplier(2.0);
  EXPECT_EQ(c.get("nvm").read_latency_ns, 100);
  EXPECT_EQ(c.get("nvm").write_latency_ns, 100);
  EXPECT_EQ(c.get("rram").write_latency_ns, 100);
  EXPECT_EQ(c.get("dram").read_latency_ns, 50);  // non-NVM untouched

  // m then m' equals m' directly.
  c.set_nvm_multiplier(8.0);
  DeviceCatalog direct = DeviceCatalog::defaults();
  direct.set_nvm_multiplier(8.0);
  EXPECT_EQ(c.get("nvm"), direct.get("nvm"));
  EXPECT_EQ(c.get("nvm").read_latency_ns, 400);

  c.set_nvm_multiplier(std::nullopt);
  EXPECT_EQ(c.get("nvm").write_latency_ns, 200);
  EXPECT_THROW(c.set_nvm_multiplier(0.0), ConfigError);
}

TEST(DeviceCatalog, ParsesFileFormat) {
  std::istringstream in(
      "# custom devices\n"
      "\n"
      "dram dram 60 60 50e9 8 0\n"
      "optane nvm 300 300 5e9 2.5 137438953472\n");
  const DeviceCatalog c = DeviceCatalog::parse(in);
  EXPECT_EQ(c.raw("dram").bandwidth_bytes_per_s, 50e9);
  EXPECT_EQ(c.raw("optane").capacity_bytes, 128 * kGiB);
  EXPECT_EQ(c.raw("optane").kind, TierKind::Nvm);

  std::ostringstream out;
  c.write(out);
  std::istringstream again(out.str());
  EXPECT_EQ(DeviceCatalog::parse(again).profiles(), c.profiles());
}

TEST(DeviceCatalog, RejectsMalformedLines) {
  std::istringstream short_line("dram dram 50 50\n");
  EXPECT_THROW(DeviceCatalog::parse(short_line), ParseError);
  std::istringstream bad_kind("x tape 1 1 1 1 0\n");
  try {
    DeviceCatalog::parse(bad_kind);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  std::istringstream zero_bw("# c\nx ssd 1 1 0 1 0\n");
  try {
    DeviceCatalog::parse(zero_bw);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(DeviceCatalog::defaults().get("tape"), ConfigError);
}

TEST(Hierarchy, CapacityMustBeWholeBlocks) {
  const DeviceCatalog c = DeviceCatalog::defaults();
  EXPECT_NO_THROW(make_hierarchy(c, 16 * kGiB, 0, 2 * kTiB));
  EXPECT_THROW(make_hierarchy(c, 4097, 0, 2 * kTiB), ConfigError);
  const Hierarchy h = make_hierarchy_blocks(c, 256, 8192, 65536);
  EXPECT_EQ(h.slots(TierKind::Dram), 256u);
  EXPECT_EQ(h.slots(TierKind::Nvm), 8192u);
  EXPECT_EQ(h.slots(TierKind::Ssd), 65536u);
}

TEST(ParseSize, Units) {
  EXPECT_EQ(parse_size("0"), 0u);
  EXPECT_EQ(parse_size("4096"), 4096u);
  EXPECT_EQ(parse_size("16GB"), 16 * kGiB);
  EXPECT_EQ(parse_size("1TB"), kTiB);
  EXPECT_EQ(parse_size("512MiB"), 512 * kMiB);
  EXPECT_EQ(parse_size("4k"), 4 * kKiB);
  EXPECT_THROW(parse_size("12XB"), UsageError);
  EXPECT_THROW(parse_size("GB"), UsageError);
  EXPECT_EQ(format_size(16 * kGiB), "16GB");
  EXPECT_EQ(format_size(2 * kTiB), "2TB");
}

TEST(ParseHierarchySpec, TiersAndErrors) {
  const auto caps = parse_hierarchy_spec("dram:16GB,nvm:1TB,ssd:2TB");
  EXPECT_EQ(caps.dram_bytes, 16 * kGiB);
  EXPECT_EQ(caps.nvm_bytes, kTiB);
  EXPECT_EQ(caps.ssd_bytes, 2 * kTiB);

  const auto missing = parse_hierarchy_spec("nvm:1TB,ssd:2TB");
  EXPECT_EQ(missing.dram_bytes, 0u);

  EXPECT_THROW(parse_hierarchy_spec("l3:1MB,ssd:2TB"), UsageError);
  EXPECT_THROW(parse_hierarchy_spec("dram:1GB,dram:2GB"), UsageError);
  EXPECT_THROW(parse_hierarchy_spec("dram=1GB"), UsageError);
}

}  // namespace
}  // namespace mtsim
