#include "mtsim/buffer_pool.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "mtsim/error.hpp"

namespace mtsim {

BufferPool::BufferPool(TierKind tier, std::uint64_t capacity_slots) : tier_(tier), capacity_(capacity_slots) {
  if (capacity_slots >= kNil) throw ConfigError("buffer pool capacity exceeds slot index range");
}

std::optional<PoolEntry> BufferPool::entry(BlockId b) const {
  const auto it = index_.find(b);
  if (it == index_.end()) return std::nullopt;
  return nodes_[it->second].entry;
}

void BufferPool::unlink(std::uint32_t slot) {
  Node& n = nodes_[slot];
  if (n.prev != kNil) nodes_[n.prev].next = n.next;
  else head_ = n.next;
  if (n.next != kNil) nodes_[n.next].prev = n.prev;
  else tail_ = n.prev;
  n.prev = n.next = kNil;
}

void BufferPool::push_mru(std::uint32_t slot) {
  Node& n = nodes_[slot];
  n.prev = tail_;
  n.next = kNil;
  if (tail_ != kNil) nodes_[tail_].next = slot;
  else head_ = slot;
  tail_ = slot;
}

void BufferPool::touch(std::uint32_t slot) {
  nodes_[slot].entry.last_use = ++clock_;
  if (slot != tail_) {
    unlink(slot);
    push_mru(slot);
  }
}

bool BufferPool::lookup(BlockId b) {
  const auto it = index_.find(b);
  if (it == index_.end()) return false;
  touch(it->second);
  return true;
}

std::optional<Eviction> BufferPool::insert(BlockId b, bool dirty) {
  MTSIM_EXPECTS(!contains(b), "insert of a block that is already resident");
  if (capacity_ == 0) return Eviction{b, dirty};

  std::optional<Eviction> evicted;
  std::uint32_t slot;
  if (index_.size() >= capacity_) {
    slot = pick_victim();
    const PoolEntry& victim = nodes_[slot].entry;
    evicted = Eviction{victim.block, victim.dirty};
    index_.erase(victim.block);
    unlink(slot);
  } else {
    slot = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
  }
  nodes_[slot].entry = PoolEntry{b, dirty, ++clock_};
  push_mru(slot);
  index_.emplace(b, slot);
  return evicted;
}

void BufferPool::mark_dirty(BlockId b) {
  const auto it = index_.find(b);
  MTSIM_EXPECTS(it != index_.end(), "mark_dirty of a block that is not resident");
  nodes_[it->second].entry.dirty = true;
  touch(it->second);
}

void BufferPool::clear() {
  nodes_.clear();
  index_.clear();
  head_ = tail_ = kNil;
  clock_ = 0;
}

std::vector<PoolEntry> BufferPool::entries_lru_order() const {
  std::vector<PoolEntry> out;
  out.reserve(index_.size());
  for (std::uint32_t s = head_; s != kNil; s = nodes_[s].next) out.push_back(nodes_[s].entry);
  return out;
}

namespace {

void check_tier(const BufferPool& pool, const std::vector<SnapshotEntry>& entries, const char* name) {
  if (entries.size() > pool.capacity())
    throw CapacityError(std::string("snapshot holds ") + std::to_string(entries.size()) + " " + name +
                        " blocks but the pool has " + std::to_string(pool.capacity()) + " slots");
  std::unordered_set<BlockId> seen;
  seen.reserve(entries.size());
  for (const auto& e : entries) {
    if (!seen.insert(e.block).second)
      throw ConfigError(std::string("snapshot lists ") + name + " block " + std::to_string(e.block) + " twice");
  }
}

}  // namespace

void load_snapshot(BufferPool& dram, BufferPool& nvm, const Snapshot& snapshot) {
  check_tier(dram, snapshot.dram, "DRAM");
  check_tier(nvm, snapshot.nvm, "NVM");
  dram.clear();
  nvm.clear();
  for (const auto& e : snapshot.dram) dram.insert(e.block, e.dirty);
  for (const auto& e : snapshot.nvm) nvm.insert(e.block, e.dirty);
}

Snapshot read_snapshot(std::istream& in) {
  Snapshot snap;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string tier, extra;
    BlockId block = 0;
    int dirty = -1;
    if (!(fields >> tier >> block >> dirty) || (dirty != 0 && dirty != 1) || (fields >> extra))
      throw ParseError("expected '<D|N> <block_id> <0|1>'", lineno);
    if (tier == "D") snap.dram.push_back({block, dirty == 1});
    else if (tier == "N") snap.nvm.push_back({block, dirty == 1});
    else throw ParseError("unknown snapshot tier '" + tier + "'", lineno);
  }
  return snap;
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
  return read_snapshot(in);
}

void write_snapshot(std::ostream& out, const Snapshot& snapshot) {
  for (const auto& e : snapshot.dram) out << "D " << e.block << ' ' << (e.dirty ? 1 : 0) << '\n';
  for (const auto& e : snapshot.nvm) out << "N " << e.block << ' ' << (e.dirty ? 1 : 0) << '\n';
}

void write_snapshot_file(const std::string& path, const Snapshot& snapshot) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write snapshot '" + path + "'");
  write_snapshot(out, snapshot);
}

}  // namespace mtsim
