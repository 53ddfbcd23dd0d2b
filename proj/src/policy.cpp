#include "swarmstab/policy.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace swarmstab {

PolicyKind parse_policy(std::string_view name) {
  if (name == "random-useful") return PolicyKind::RandomUseful;
  if (name == "rarest-first") return PolicyKind::RarestFirst;
  if (name == "sequential") return PolicyKind::Sequential;
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected random-useful, rarest-first or sequential)");
}

const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::RandomUseful: return "random-useful";
    case PolicyKind::RarestFirst: return "rarest-first";
    case PolicyKind::Sequential: return "sequential";
  }
  return "?";
}

std::vector<std::int64_t> replica_counts(const CountState& x) {
  std::vector<std::int64_t> r(static_cast<std::size_t>(x.K()) + 1, 0);
  for (const auto& [C, c] : x.counts())
    for (int i : C.pieces()) r[static_cast<std::size_t>(i)] += c;
  return r;
}

std::optional<int> random_useful(const PieceSet& A, const PieceSet& B, Rng& rng) {
  PieceSet useful = B - A;
  int m = useful.size();
  if (m == 0) return std::nullopt;
  return useful.nth_piece(static_cast<int>(rng.below(static_cast<std::uint64_t>(m))));
}

std::optional<int> rarest_first(const PieceSet& A, const PieceSet& B,
                                const std::vector<std::int64_t>& replicas, Rng& rng) {
  PieceSet useful = B - A;
  if (useful.empty()) return std::nullopt;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  int ties = 0, pick = 0;
  // Reservoir sampling over the minimizers gives a uniform tie-break in one pass.
  for (int i : useful.pieces()) {
    auto r = replicas.at(static_cast<std::size_t>(i));
    if (r < best) {
      best = r;
      ties = 1;
      pick = i;
    } else if (r == best) {
      ++ties;
      if (rng.below(static_cast<std::uint64_t>(ties)) == 0) pick = i;
    }
  }
  return pick;
}

std::optional<int> sequential(const PieceSet& A, const PieceSet& B) {
  PieceSet useful = B - A;
  if (useful.empty()) return std::nullopt;
  return useful.min_piece();
}

std::optional<int> Policy::select(const PieceSet& A, const PieceSet& B,
                                  const std::vector<std::int64_t>& replicas, Rng& rng) const {
  switch (kind_) {
    case PolicyKind::RandomUseful: return random_useful(A, B, rng);
    case PolicyKind::RarestFirst: return rarest_first(A, B, replicas, rng);
    case PolicyKind::Sequential: return sequential(A, B);
  }
  return std::nullopt;
}

std::optional<int> Policy::select(const PieceSet& A, const PieceSet& B, const CountState& view,
                                  Rng& rng) const {
  if (!needs_replicas()) return select(A, B, std::vector<std::int64_t>{}, rng);
  return select(A, B, replica_counts(view), rng);
}

std::vector<double> Policy::distribution(const PieceSet& A, const PieceSet& B,
                                         const std::vector<std::int64_t>& replicas) const {
  std::vector<double> h(static_cast<std::size_t>(A.universe()) + 1, 0.0);
  PieceSet useful = B - A;
  if (useful.empty()) return h;
  auto pieces = useful.pieces();
  switch (kind_) {
    case PolicyKind::RandomUseful:
      for (int i : pieces) h[static_cast<std::size_t>(i)] = 1.0 / static_cast<double>(pieces.size());
      break;
    case PolicyKind::Sequential: h[static_cast<std::size_t>(pieces.front())] = 1.0; break;
    case PolicyKind::RarestFirst: {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (int i : pieces) best = std::min(best, replicas.at(static_cast<std::size_t>(i)));
      int ties = 0;
      for (int i : pieces) ties += replicas.at(static_cast<std::size_t>(i)) == best;
      for (int i : pieces)
        if (replicas.at(static_cast<std::size_t>(i)) == best)
          h[static_cast<std::size_t>(i)] = 1.0 / ties;
      break;
    }
  }
  return h;
}

}  // namespace swarmstab
