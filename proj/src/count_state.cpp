#include "swarmstab/count_state.hpp"

#include <stdexcept>

namespace swarmstab {

CountState::CountState(int K) : K_(K) {
  if (K < 1 || K > kMaxPieces) throw std::invalid_argument("bad piece count for CountState");
}

std::int64_t CountState::count(const PieceSet& C) const {
  auto it = counts_.find(C);
  return it == counts_.end() ? 0 : it->second;
}

void CountState::add(const PieceSet& C, std::int64_t delta) {
  if (delta == 0) return;
  set(C, count(C) + delta);
}

void CountState::set(const PieceSet& C, std::int64_t value) {
  if (C.universe() != K_) throw std::invalid_argument("type " + C.str() + " has wrong piece count");
  if (value < 0) throw std::invalid_argument("negative count for type " + C.str());
  std::int64_t old = count(C);
  if (value == 0)
    counts_.erase(C);
  else
    counts_[C] = value;
  n_ += value - old;
}

std::string CountState::str() const {
  std::string s = "[";
  bool first = true;
  for (const auto& [C, c] : counts_) {
    if (!first) s += ' ';
    s += C.str() + ":" + std::to_string(c);
    first = false;
  }
  return s + "]";
}

}  // namespace swarmstab
