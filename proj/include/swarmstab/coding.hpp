#pragma once

#include "swarmstab/params.hpp"
#include "swarmstab/rng.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace swarmstab::coding {

using FieldElem = std::uint8_t;
using CodingVector = std::vector<FieldElem>;

// F_q for a prime power q <= 256, stored as full operation tables. Prime
// fields use residues; extension fields use polynomials over F_p reduced
// modulo an irreducible polynomial, with elements encoded in base p.
class GaloisField {
 public:
  // Shared instance; tables are built once per q.
  static const GaloisField& get(int q);
  explicit GaloisField(int q);

  int q() const { return q_; }
  int characteristic() const { return p_; }
  int degree() const { return m_; }

  FieldElem add(FieldElem a, FieldElem b) const { return add_[idx(a, b)]; }
  FieldElem sub(FieldElem a, FieldElem b) const { return add_[idx(a, neg_[b])]; }
  FieldElem mul(FieldElem a, FieldElem b) const { return mul_[idx(a, b)]; }
  FieldElem neg(FieldElem a) const { return neg_[a]; }
  // Throws for zero.
  FieldElem inv(FieldElem a) const;

 private:
  std::size_t idx(FieldElem a, FieldElem b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(q_) + b;
  }
  int q_, p_, m_;
  std::vector<FieldElem> add_, mul_, neg_, inv_;
};

// Subspace of F_q^K kept in reduced row echelon form, so equal subspaces have
// identical bases.
class Subspace {
 public:
  Subspace() = default;
  Subspace(int q, int K);  // the zero subspace

  static Subspace full(int q, int K);
  static Subspace span(int q, int K, const std::vector<CodingVector>& vectors);
  // Span of the unit vectors e_i for the given pieces.
  static Subspace of_pieces(int q, const PieceSet& pieces);
  // {v : v_k = 0}, the hyperplane missing coordinate k (1-based).
  static Subspace coordinate_hyperplane(int q, int K, int k);

  int q() const { return q_; }
  int K() const { return K_; }
  int dim() const { return static_cast<int>(rows_.size()); }
  bool is_full() const { return dim() == K_; }
  const std::vector<CodingVector>& basis() const { return rows_; }
  const GaloisField& field() const { return GaloisField::get(q_); }

  // Span of this subspace and v; the flag is true iff the dimension grew.
  std::pair<Subspace, bool> insert_vector(const CodingVector& v) const;
  // In-place variant used by the simulator.
  bool insert(const CodingVector& v);
  bool contains(const CodingVector& v) const;
  bool is_subspace_of(const Subspace& other) const;
  Subspace sum(const Subspace& other) const;
  int intersection_dim(const Subspace& other) const;

  // sum_j theta_j b_j with theta_j iid uniform on F_q.
  CodingVector random_combination(Rng& rng) const;

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.q_ == b.q_ && a.K_ == b.K_ && a.rows_ == b.rows_;
  }
  friend bool operator<(const Subspace& a, const Subspace& b) {
    if (a.K_ != b.K_) return a.K_ < b.K_;
    if (a.rows_.size() != b.rows_.size()) return a.rows_.size() < b.rows_.size();
    return a.rows_ < b.rows_;
  }

 private:
  // Reduces v against the basis in place; returns the pivot of the remainder or -1.
  int reduce(CodingVector& v) const;
  void check_width(const CodingVector& v) const;

  int q_ = 2;
  int K_ = 0;
  std::vector<CodingVector> rows_;
  std::vector<int> pivots_;
};

CodingVector uniform_vector(int q, int K, Rng& rng);
CodingVector unit_vector(int K, int i);

// 1 - q^(dim(A cap B) - dim B): chance a uniform combination from B is useful to A.
double useful_probability(const Subspace& A, const Subspace& B);

// Every subspace of F_q^K, ordered by dimension. Only for tiny q^K.
std::vector<Subspace> enumerate_subspaces(int q, int K);
// Every vector of F_q^K in lexicographic order. Only for tiny q^K.
std::vector<CodingVector> enumerate_vectors(int q, int K);

// Coded-mode checks that need the field (full-rank explicit arrivals under
// gamma = inf); throws std::invalid_argument.
void validate_coded(const SwarmParams& p);

}  // namespace swarmstab::coding
