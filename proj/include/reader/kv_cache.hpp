#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "reader/core.hpp"

namespace reader {

// Per-batch-row cached per-token state with explicit PAD slots.
// Batched appends write each row's new entries at the same column offset,
// padding shorter rows, so internal PADs accumulate until rearrange()
// compacts every row's valid slots into a contiguous prefix.
//
// Each valid slot keeps the absolute position of its token, so compaction
// never changes what a later attention pass computes.
class PaddedKVCache {
 public:
  struct Entry {
    int position = -1;
    std::vector<float> state;
  };

  struct Slot {
    bool valid = false;
    int position = -1;
    std::vector<float> state;
  };

  PaddedKVCache() = default;
  PaddedKVCache(int num_rows, std::size_t capacity)
      : rows_(num_rows), capacity_(capacity) {}

  int num_rows() const { return static_cast<int>(rows_.size()); }
  std::size_t width() const { return rows_.empty() ? 0 : rows_[0].size(); }
  std::size_t capacity() const { return capacity_; }

  std::size_t valid_count(int row) const {
    std::size_t c = 0;
    for (const Slot& s : rows_[row])
      if (s.valid) ++c;
    return c;
  }

  // Batched append: row r's entries occupy columns [width, width+|entries_r|),
  // every row is padded out to the new common width.
  void append(const std::vector<std::vector<Entry>>& per_row) {
    if (per_row.size() != rows_.size())
      throw structural_error("cache append: row count mismatch");
    std::size_t longest = 0;
    for (const auto& e : per_row) longest = std::max(longest, e.size());
    if (longest == 0) return;
    const std::size_t new_width = width() + longest;
    if (capacity_ != 0 && new_width > capacity_)
      throw capacity_error("cache append: capacity exceeded");
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      auto& row = rows_[r];
      for (const Entry& e : per_row[r]) {
        Slot s;
        s.valid = true;
        s.position = e.position;
        s.state = e.state;
        row.push_back(std::move(s));
      }
      row.resize(new_width);  // trailing default slots are PADs
    }
  }

  void append_row(int row, std::vector<Entry> entries) {
    std::vector<std::vector<Entry>> per_row(rows_.size());
    per_row[row] = std::move(entries);
    append(per_row);
  }

  // Drops the row's valid slots beyond new_valid_count (slots become PAD).
  void truncate(int row, std::size_t new_valid_count) {
    std::size_t seen = 0;
    for (Slot& s : rows_[row]) {
      if (!s.valid) continue;
      if (seen >= new_valid_count) {
        s = Slot{};
      }
      ++seen;
    }
  }

  // Stable per-row compaction; width shrinks to the longest row.
  void rearrange() {
    std::size_t new_width = 0;
    for (int r = 0; r < num_rows(); ++r) new_width = std::max(new_width, valid_count(r));
    for (auto& row : rows_) {
      std::vector<Slot> compact;
      compact.reserve(new_width);
      for (Slot& s : row)
        if (s.valid) compact.push_back(std::move(s));
      compact.resize(new_width);
      row = std::move(compact);
    }
  }

  bool has_internal_pads() const {
    for (const auto& row : rows_) {
      bool seen_pad = false;
      for (const Slot& s : row) {
        if (!s.valid) seen_pad = true;
        else if (seen_pad) return true;
      }
    }
    return false;
  }

  // valid slots / total slots; 1.0 for an empty cache
  double occupancy() const {
    const std::size_t total = width() * rows_.size();
    if (total == 0) return 1.0;
    std::size_t valid = 0;
    for (int r = 0; r < num_rows(); ++r) valid += valid_count(r);
    return static_cast<double>(valid) / static_cast<double>(total);
  }

  const std::vector<Slot>& row(int r) const { return rows_[r]; }

 private:
  std::vector<std::vector<Slot>> rows_;
  std::size_t capacity_ = 0;  // 0 = unbounded
};

}  // namespace reader
