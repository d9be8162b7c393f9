#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtsim/device.hpp"

namespace mtsim {

using BlockId = std::uint64_t;
using Timestamp = std::uint64_t;

struct PoolEntry {
  BlockId block = 0;
  bool dirty = false;
  Timestamp last_use = 0;
};

struct Eviction {
  BlockId block = 0;
  bool was_dirty = false;

  friend bool operator==(const Eviction&, const Eviction&) = default;
};

// Fixed-slot pool for one tier with strict LRU replacement.
//
// Entries live in a slot vector linked into a recency list by index, so the
// whole pool is a value type: copying it copies the full residency state.
// Victim selection is isolated in pick_victim().
class BufferPool {
 public:
  BufferPool() = default;
  BufferPool(TierKind tier, std::uint64_t capacity_slots);

  TierKind tier() const { return tier_; }
  std::uint64_t capacity() const { return capacity_; }
  std::size_t size() const { return index_.size(); }
  bool full() const { return index_.size() >= capacity_; }
  Timestamp clock() const { return clock_; }

  // Residency test without touching recency.
  bool contains(BlockId b) const { return index_.count(b) != 0; }
  std::optional<PoolEntry> entry(BlockId b) const;

  // Hit refreshes last_use.
  bool lookup(BlockId b);

  // b must not be resident. Returns the LRU victim when the pool was full.
  // A zero-capacity pool hands b straight back.
  std::optional<Eviction> insert(BlockId b, bool dirty);

  // b must be resident.
  void mark_dirty(BlockId b);

  // Drops every entry and resets the clock.
  void clear();

  // Resident blocks from least to most recently used.
  std::vector<PoolEntry> entries_lru_order() const;

 private:
  static constexpr std::uint32_t kNil = UINT32_MAX;

  struct Node {
    PoolEntry entry;
    std::uint32_t prev = kNil;
    std::uint32_t next = kNil;
  };

  void unlink(std::uint32_t slot);
  void push_mru(std::uint32_t slot);
  void touch(std::uint32_t slot);
  std::uint32_t pick_victim() const { return head_; }

  TierKind tier_ = TierKind::Dram;
  std::uint64_t capacity_ = 0;
  std::vector<Node> nodes_;
  std::unordered_map<BlockId, std::uint32_t> index_;
  std::uint32_t head_ = kNil;  // LRU end
  std::uint32_t tail_ = kNil;  // MRU end
  Timestamp clock_ = 0;
};

struct SnapshotEntry {
  BlockId block = 0;
  bool dirty = false;

  friend bool operator==(const SnapshotEntry&, const SnapshotEntry&) = default;
};

// Initial DRAM/NVM residency. SSD implicitly holds every block. Within a
// tier, entries are listed oldest first: load order assigns last_use.
struct Snapshot {
  std::vector<SnapshotEntry> dram;
  std::vector<SnapshotEntry> nvm;

  bool empty() const { return dram.empty() && nvm.empty(); }
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

// Replaces both pools' contents with the snapshot. Throws CapacityError if a
// tier's set exceeds its pool, ConfigError on a duplicate block in one tier.
// Pools are untouched when an error is thrown.
void load_snapshot(BufferPool& dram, BufferPool& nvm, const Snapshot& snapshot);

// Text format, one resident block per line: "<D|N> <block_id> <0|1>".
// '#' lines and blank lines are skipped.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot_file(const std::string& path);
void write_snapshot(std::ostream& out, const Snapshot& snapshot);
void write_snapshot_file(const std::string& path, const Snapshot& snapshot);

}  // namespace mtsim
