#include "swarmstab/piece_set.hpp"

#include <bit>
#include <stdexcept>

namespace swarmstab {

PieceSet::PieceSet(int K) : K_(K) {
  if (K < 1 || K > kMaxPieces)
    throw std::invalid_argument("piece count must be in [1, 256], got " + std::to_string(K));
}

PieceSet PieceSet::full(int K) {
  PieceSet s(K);
  for (int w = 0; w < 4; ++w) {
    int lo = 64 * w;
    if (K <= lo) break;
    int bits = std::min(64, K - lo);
    s.words_[w] = bits == 64 ? ~0ULL : ((1ULL << bits) - 1);
  }
  return s;
}

PieceSet PieceSet::of(int K, std::initializer_list<int> pieces) {
  return of(K, std::span<const int>(pieces.begin(), pieces.size()));
}

PieceSet PieceSet::of(int K, std::span<const int> pieces) {
  PieceSet s(K);
  for (int p : pieces) s = s.with(p);
  return s;
}

PieceSet PieceSet::from_mask(int K, std::uint64_t mask) {
  if (K > 64) throw std::invalid_argument("from_mask needs K <= 64");
  PieceSet s(K);
  if (K < 64 && (mask >> K) != 0) throw std::invalid_argument("mask has bits beyond K");
  s.words_[0] = mask;
  return s;
}

void PieceSet::check(int piece) const {
  if (piece < 1 || piece > K_)
    throw std::out_of_range("piece " + std::to_string(piece) + " outside 1.." + std::to_string(K_));
}

bool PieceSet::contains(int piece) const {
  check(piece);
  int b = piece - 1;
  return (words_[b >> 6] >> (b & 63)) & 1ULL;
}

int PieceSet::size() const {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

bool PieceSet::empty() const { return (words_[0] | words_[1] | words_[2] | words_[3]) == 0; }

bool PieceSet::is_subset_of(const PieceSet& o) const {
  for (int w = 0; w < 4; ++w)
    if (words_[w] & ~o.words_[w]) return false;
  return true;
}

PieceSet PieceSet::with(int piece) const {
  check(piece);
  PieceSet s = *this;
  int b = piece - 1;
  s.words_[b >> 6] |= 1ULL << (b & 63);
  return s;
}

PieceSet PieceSet::without(int piece) const {
  check(piece);
  PieceSet s = *this;
  int b = piece - 1;
  s.words_[b >> 6] &= ~(1ULL << (b & 63));
  return s;
}

PieceSet PieceSet::complement() const { return full(K_) - *this; }

PieceSet PieceSet::operator|(const PieceSet& o) const {
  PieceSet s = *this;
  for (int w = 0; w < 4; ++w) s.words_[w] |= o.words_[w];
  return s;
}

PieceSet PieceSet::operator&(const PieceSet& o) const {
  PieceSet s = *this;
  for (int w = 0; w < 4; ++w) s.words_[w] &= o.words_[w];
  return s;
}

PieceSet PieceSet::operator-(const PieceSet& o) const {
  PieceSet s = *this;
  for (int w = 0; w < 4; ++w) s.words_[w] &= ~o.words_[w];
  return s;
}

std::vector<int> PieceSet::pieces() const {
  std::vector<int> out;
  for (int w = 0; w < 4; ++w) {
    auto bits = words_[w];
    while (bits) {
      int b = std::countr_zero(bits);
      out.push_back(64 * w + b + 1);
      bits &= bits - 1;
    }
  }
  return out;
}

int PieceSet::min_piece() const {
  for (int w = 0; w < 4; ++w)
    if (words_[w]) return 64 * w + std::countr_zero(words_[w]) + 1;
  return 0;
}

int PieceSet::nth_piece(int idx) const {
  for (int w = 0; w < 4; ++w) {
    int c = std::popcount(words_[w]);
    if (idx >= c) {
      idx -= c;
      continue;
    }
    auto bits = words_[w];
    for (int j = 0; j < idx; ++j) bits &= bits - 1;
    return 64 * w + std::countr_zero(bits) + 1;
  }
  throw std::out_of_range("nth_piece index past the end");
}

std::uint64_t PieceSet::mask() const {
  if (K_ > 64) throw std::logic_error("mask() needs K <= 64");
  return words_[0];
}

std::size_t PieceSet::hash() const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(K_);
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::string PieceSet::str() const {
  std::string s = "{";
  bool first = true;
  for (int p : pieces()) {
    if (!first) s += ',';
    s += std::to_string(p);
    first = false;
  }
  return s + "}";
}

std::string PieceSet::bitstring() const {
  std::string s(static_cast<std::size_t>(K_), '0');
  for (int p : pieces()) s[static_cast<std::size_t>(p - 1)] = '1';
  return s;
}

}  // namespace swarmstab
