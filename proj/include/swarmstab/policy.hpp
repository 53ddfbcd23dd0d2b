#pragma once

#include "swarmstab/count_state.hpp"
#include "swarmstab/rng.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace swarmstab {

enum class PolicyKind { RandomUseful, RarestFirst, Sequential };

PolicyKind parse_policy(std::string_view name);
const char* policy_name(PolicyKind k);

// replicas[i] = number of peers holding piece i (index 0 unused).
std::vector<std::int64_t> replica_counts(const CountState& x);

// Uploader holds B (pass the full set for the fixed seed), downloader holds A.
// Every selector returns a piece of B - A, or nothing when B is a subset of A.
std::optional<int> random_useful(const PieceSet& A, const PieceSet& B, Rng& rng);
std::optional<int> rarest_first(const PieceSet& A, const PieceSet& B,
                                const std::vector<std::int64_t>& replicas, Rng& rng);
std::optional<int> sequential(const PieceSet& A, const PieceSet& B);

class Policy {
 public:
  explicit Policy(PolicyKind kind = PolicyKind::RandomUseful) : kind_(kind) {}
  PolicyKind kind() const { return kind_; }
  bool needs_replicas() const { return kind_ == PolicyKind::RarestFirst; }

  std::optional<int> select(const PieceSet& A, const PieceSet& B,
                            const std::vector<std::int64_t>& replicas, Rng& rng) const;
  std::optional<int> select(const PieceSet& A, const PieceSet& B, const CountState& view,
                            Rng& rng) const;
  // Selection probabilities h_i, indexed by piece (entry 0 unused). All zero
  // when no piece is useful.
  std::vector<double> distribution(const PieceSet& A, const PieceSet& B,
                                   const std::vector<std::int64_t>& replicas) const;

 private:
  PolicyKind kind_;
};

}  // namespace swarmstab
