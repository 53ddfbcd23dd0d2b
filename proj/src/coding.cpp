#include "swarmstab/coding.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace swarmstab::coding {

namespace {

std::vector<int> digits(int v, int p, int m) {
  std::vector<int> d(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    d[static_cast<std::size_t>(i)] = v % p;
    v /= p;
  }
  return d;
}

int undigits(const std::vector<int>& d, int p) {
  int v = 0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) v = v * p + *it;
  return v;
}

// Product of a and b modulo the monic polynomial x^m + low(x), all over F_p.
int poly_mul(int a, int b, int p, int m, const std::vector<int>& low) {
  auto da = digits(a, p, m), db = digits(b, p, m);
  std::vector<int> prod(static_cast<std::size_t>(2 * m - 1), 0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      prod[static_cast<std::size_t>(i + j)] =
          (prod[static_cast<std::size_t>(i + j)] + da[static_cast<std::size_t>(i)] * db[static_cast<std::size_t>(j)]) % p;
  // x^m = -low(x)
  for (int k = 2 * m - 2; k >= m; --k) {
    int c = prod[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    prod[static_cast<std::size_t>(k)] = 0;
    for (int i = 0; i < m; ++i) {
      auto& t = prod[static_cast<std::size_t>(k - m + i)];
      t = ((t - c * low[static_cast<std::size_t>(i)]) % p + p) % p;
    }
  }
  prod.resize(static_cast<std::size_t>(m));
  return undigits(prod, p);
}

}  // namespace

const GaloisField& GaloisField::get(int q) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaloisField>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[q];
  if (!slot) slot = std::make_unique<GaloisField>(q);
  return *slot;
}

GaloisField::GaloisField(int q) : q_(q), p_(0), m_(0) {
  if (!is_prime_power(q) || q > 256)
    throw std::invalid_argument("field size must be a prime power <= 256, got " + std::to_string(q));
  p_ = 2;
  while (q % p_ != 0) ++p_;
  for (int t = q; t > 1; t /= p_) ++m_;

  const auto qq = static_cast<std::size_t>(q);
  add_.assign(qq * qq, 0);
  mul_.assign(qq * qq, 0);
  neg_.assign(qq, 0);
  inv_.assign(qq, 0);

  for (int a = 0; a < q; ++a) {
    auto da = digits(a, p_, m_);
    std::vector<int> dn(da.size());
    for (std::size_t i = 0; i < da.size(); ++i) dn[i] = (p_ - da[i]) % p_;
    neg_[static_cast<std::size_t>(a)] = static_cast<FieldElem>(undigits(dn, p_));
    for (int b = 0; b < q; ++b) {
      auto db = digits(b, p_, m_);
      std::vector<int> ds(da.size());
      for (std::size_t i = 0; i < da.size(); ++i) ds[i] = (da[i] + db[i]) % p_;
      add_[idx(static_cast<FieldElem>(a), static_cast<FieldElem>(b))] = static_cast<FieldElem>(undigits(ds, p_));
    }
  }

  // Try monic polynomials of degree m until the product table is a field.
  const int candidates = m_ == 1 ? 1 : q;
  for (int c = 0; c < candidates; ++c) {
    std::vector<int> low = m_ == 1 ? std::vector<int>{0} : digits(c, p_, m_);
    bool ok = true;
    for (int a = 0; a < q && ok; ++a)
      for (int b = a; b < q; ++b) {
        int v = m_ == 1 ? (a * b) % p_ : poly_mul(a, b, p_, m_, low);
        mul_[idx(static_cast<FieldElem>(a), static_cast<FieldElem>(b))] = static_cast<FieldElem>(v);
        mul_[idx(static_cast<FieldElem>(b), static_cast<FieldElem>(a))] = static_cast<FieldElem>(v);
      }
    for (int a = 1; a < q && ok; ++a) {
      int found = 0;
      for (int b = 1; b < q; ++b)
        if (mul_[idx(static_cast<FieldElem>(a), static_cast<FieldElem>(b))] == 1) found = b;
      if (found == 0) ok = false;
      inv_[static_cast<std::size_t>(a)] = static_cast<FieldElem>(found);
    }
    if (ok) return;
  }
  throw std::logic_error("no irreducible polynomial found for q=" + std::to_string(q));
}

FieldElem GaloisField::inv(FieldElem a) const {
  if (a == 0) throw std::domain_error("zero has no inverse");
  return inv_[a];
}

Subspace::Subspace(int q, int K) : q_(q), K_(K) {
  if (K < 1 || K > kMaxPieces) throw std::invalid_argument("bad vector width");
  GaloisField::get(q);
}

Subspace Subspace::full(int q, int K) {
  Subspace s(q, K);
  for (int i = 1; i <= K; ++i) s.insert(unit_vector(K, i));
  return s;
}

Subspace Subspace::span(int q, int K, const std::vector<CodingVector>& vectors) {
  Subspace s(q, K);
  for (const auto& v : vectors) s.insert(v);
  return s;
}

Subspace Subspace::of_pieces(int q, const PieceSet& pieces) {
  Subspace s(q, pieces.universe());
  for (int i : pieces.pieces()) s.insert(unit_vector(pieces.universe(), i));
  return s;
}

Subspace Subspace::coordinate_hyperplane(int q, int K, int k) {
  return of_pieces(q, PieceSet::full(K).without(k));
}

void Subspace::check_width(const CodingVector& v) const {
  if (static_cast<int>(v.size()) != K_)
    throw std::invalid_argument("vector width " + std::to_string(v.size()) + " does not match K=" +
                                std::to_string(K_));
  for (auto e : v)
    if (e >= q_) throw std::invalid_argument("vector entry outside the field");
}

int Subspace::reduce(CodingVector& v) const {
  const auto& F = field();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    auto c = v[static_cast<std::size_t>(pivots_[r])];
    if (c == 0) continue;
    const auto& row = rows_[r];
    for (int j = pivots_[r]; j < K_; ++j)
      v[static_cast<std::size_t>(j)] = F.sub(v[static_cast<std::size_t>(j)], F.mul(c, row[static_cast<std::size_t>(j)]));
  }
  for (int j = 0; j < K_; ++j)
    if (v[static_cast<std::size_t>(j)] != 0) return j;
  return -1;
}

bool Subspace::insert(const CodingVector& v0) {
  check_width(v0);
  CodingVector v = v0;
  int piv = reduce(v);
  if (piv < 0) return false;
  const auto& F = field();
  auto inv = F.inv(v[static_cast<std::size_t>(piv)]);
  for (int j = piv; j < K_; ++j) v[static_cast<std::size_t>(j)] = F.mul(inv, v[static_cast<std::size_t>(j)]);
  // Clear the new pivot column from the existing rows.
  for (auto& row : rows_) {
    auto c = row[static_cast<std::size_t>(piv)];
    if (c == 0) continue;
    for (int j = piv; j < K_; ++j)
      row[static_cast<std::size_t>(j)] = F.sub(row[static_cast<std::size_t>(j)], F.mul(c, v[static_cast<std::size_t>(j)]));
  }
  auto pos = std::lower_bound(pivots_.begin(), pivots_.end(), piv) - pivots_.begin();
  pivots_.insert(pivots_.begin() + pos, piv);
  rows_.insert(rows_.begin() + pos, std::move(v));
  return true;
}

std::pair<Subspace, bool> Subspace::insert_vector(const CodingVector& v) const {
  Subspace s = *this;
  bool useful = s.insert(v);
  return {std::move(s), useful};
}

bool Subspace::contains(const CodingVector& v0) const {
  check_width(v0);
  CodingVector v = v0;
  return reduce(v) < 0;
}

bool Subspace::is_subspace_of(const Subspace& other) const {
  if (other.K_ != K_ || other.q_ != q_) throw std::invalid_argument("subspaces from different spaces");
  for (const auto& row : rows_)
    if (!other.contains(row)) return false;
  return true;
}

Subspace Subspace::sum(const Subspace& other) const {
  if (other.K_ != K_ || other.q_ != q_) throw std::invalid_argument("subspaces from different spaces");
  Subspace s = *this;
  for (const auto& row : other.rows_) s.insert(row);
  return s;
}

int Subspace::intersection_dim(const Subspace& other) const {
  return dim() + other.dim() - sum(other).dim();
}

CodingVector Subspace::random_combination(Rng& rng) const {
  const auto& F = field();
  CodingVector out(static_cast<std::size_t>(K_), 0);
  for (const auto& row : rows_) {
    auto theta = static_cast<FieldElem>(rng.below(static_cast<std::uint64_t>(q_)));
    if (theta == 0) continue;
    for (int j = 0; j < K_; ++j)
      out[static_cast<std::size_t>(j)] = F.add(out[static_cast<std::size_t>(j)], F.mul(theta, row[static_cast<std::size_t>(j)]));
  }
  return out;
}

CodingVector uniform_vector(int q, int K, Rng& rng) {
  CodingVector v(static_cast<std::size_t>(K));
  for (auto& e : v) e = static_cast<FieldElem>(rng.below(static_cast<std::uint64_t>(q)));
  return v;
}

CodingVector unit_vector(int K, int i) {
  if (i < 1 || i > K) throw std::out_of_range("unit vector index");
  CodingVector v(static_cast<std::size_t>(K), 0);
  v[static_cast<std::size_t>(i - 1)] = 1;
  return v;
}

double useful_probability(const Subspace& A, const Subspace& B) {
  int gap = B.dim() - A.intersection_dim(B);
  if (gap == 0) return 0.0;
  double miss = 1.0;
  for (int i = 0; i < gap; ++i) miss /= B.q();
  return 1.0 - miss;
}

std::vector<CodingVector> enumerate_vectors(int q, int K) {
  double total = 1;
  for (int i = 0; i < K; ++i) total *= q;
  if (total > 1 << 20) throw std::invalid_argument("too many vectors to enumerate");
  std::vector<CodingVector> out;
  CodingVector v(static_cast<std::size_t>(K), 0);
  for (;;) {
    out.push_back(v);
    int j = K - 1;
    while (j >= 0 && v[static_cast<std::size_t>(j)] == q - 1) v[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
    ++v[static_cast<std::size_t>(j)];
  }
  return out;
}

std::vector<Subspace> enumerate_subspaces(int q, int K) {
  auto vectors = enumerate_vectors(q, K);
  std::vector<Subspace> found{Subspace(q, K)};
  // Breadth-first closure under adding one vector.
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (const auto& v : vectors) {
      auto [s, grew] = found[i].insert_vector(v);
      if (grew && std::find(found.begin(), found.end(), s) == found.end()) found.push_back(s);
    }
  }
  std::stable_sort(found.begin(), found.end(), [](const Subspace& a, const Subspace& b) {
    return a.dim() < b.dim() || (a.dim() == b.dim() && a < b);
  });
  return found;
}

void validate_coded(const SwarmParams& p) {
  p.validate();
  if (!p.coded) return;
  if (!p.gamma.is_inf()) return;
  for (const auto& a : p.coded_arrivals) {
    if (a.rate.is_zero()) continue;
    std::vector<CodingVector> vs;
    for (const auto& v : a.vectors) vs.emplace_back(v.begin(), v.end());
    if (Subspace::span(p.q, p.K, vs).is_full())
      throw std::invalid_argument("gamma = inf requires no arrivals spanning the whole space");
  }
}

}  // namespace swarmstab::coding
