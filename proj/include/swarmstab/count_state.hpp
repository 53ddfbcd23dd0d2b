#pragma once

#include "swarmstab/piece_set.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace swarmstab {

// Number of peers of each collection type. Only nonzero counts are stored.
class CountState {
 public:
  explicit CountState(int K = 1);

  int K() const { return K_; }
  std::int64_t n() const { return n_; }
  std::int64_t count(const PieceSet& C) const;
  void add(const PieceSet& C, std::int64_t delta = 1);
  void set(const PieceSet& C, std::int64_t value);
  const std::map<PieceSet, std::int64_t>& counts() const { return counts_; }

  std::string str() const;

  friend bool operator==(const CountState&, const CountState&) = default;
  friend bool operator<(const CountState& a, const CountState& b) { return a.counts_ < b.counts_; }

 private:
  std::map<PieceSet, std::int64_t> counts_;
  std::int64_t n_ = 0;
  int K_ = 1;
};

}  // namespace swarmstab
