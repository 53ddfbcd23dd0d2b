#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace swarmstab {

inline constexpr int kMaxPieces = 256;
// Dense type-lattice operations (2^K types) are limited to this many pieces.
inline constexpr int kMaxLatticePieces = 24;

// Subset of the pieces {1..K}. Pieces are 1-based everywhere in the API.
class PieceSet {
 public:
  PieceSet() = default;
  explicit PieceSet(int K);  // empty set over K pieces

  static PieceSet full(int K);
  static PieceSet of(int K, std::initializer_list<int> pieces);
  static PieceSet of(int K, std::span<const int> pieces);
  // Bit i-1 of mask is piece i. Requires K <= 64.
  static PieceSet from_mask(int K, std::uint64_t mask);

  int universe() const { return K_; }
  bool contains(int piece) const;
  int size() const;
  bool empty() const;
  bool is_full() const { return size() == K_; }
  bool is_subset_of(const PieceSet& other) const;

  PieceSet with(int piece) const;
  PieceSet without(int piece) const;
  PieceSet complement() const;
  PieceSet operator|(const PieceSet& o) const;
  PieceSet operator&(const PieceSet& o) const;
  PieceSet operator-(const PieceSet& o) const;

  std::vector<int> pieces() const;
  // Smallest piece, or 0 for the empty set.
  int min_piece() const;
  // idx-th smallest piece, 0-based. Requires idx < size().
  int nth_piece(int idx) const;
  std::uint64_t mask() const;
  std::size_t hash() const;

  // "{1,2}" style.
  std::string str() const;
  // K characters, '1' where the piece is held, piece 1 first.
  std::string bitstring() const;

  friend bool operator==(const PieceSet&, const PieceSet&) = default;
  friend std::strong_ordering operator<=>(const PieceSet& a, const PieceSet& b) {
    if (auto c = a.K_ <=> b.K_; c != 0) return c;
    for (int w = 3; w >= 0; --w)
      if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
    return std::strong_ordering::equal;
  }

 private:
  void check(int piece) const;
  std::array<std::uint64_t, 4> words_{};
  int K_ = 0;
};

}  // namespace swarmstab

template <>
struct std::hash<swarmstab::PieceSet> {
  std::size_t operator()(const swarmstab::PieceSet& s) const noexcept { return s.hash(); }
};
