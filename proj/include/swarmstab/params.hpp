#pragma once

#include "swarmstab/piece_set.hpp"
#include "swarmstab/rate.hpp"

#include <string>
#include <vector>

namespace swarmstab {

struct Arrival {
  PieceSet type;
  Rate rate;
};

// Coded-mode arrival. The peer's subspace is spanned by `uniform_vectors`
// independent uniform draws from F_q^K together with the explicit vectors.
struct CodedArrival {
  Rate rate;
  int uniform_vectors = 0;
  std::vector<std::vector<int>> vectors;
};

struct SwarmParams {
  int K = 1;
  Rate Us;
  Rate mu{1};
  Rate gamma = Rate::infinity();
  // Arrivals by piece collection. In coded mode a collection stands for the
  // span of the matching unit vectors.
  std::vector<Arrival> arrivals;

  bool coded = false;
  int q = 0;
  std::vector<CodedArrival> coded_arrivals;

  PieceSet empty_set() const { return PieceSet(K); }
  PieceSet full_set() const { return PieceSet::full(K); }

  // Arrival rate of one collection, summing duplicates.
  Rational lambda_exact(const PieceSet& C) const;
  double lambda(const PieceSet& C) const;
  Rational lambda_total_exact() const;
  double lambda_total() const;
  // mu/gamma, zero when gamma is infinite.
  Rational rho_exact() const;
  double rho() const;

  // Duplicate collections folded together, zero rates dropped, sorted.
  std::vector<Arrival> merged_arrivals() const;

  // Throws std::invalid_argument describing the first violated assumption.
  void validate() const;
};

bool is_prime_power(int q);

}  // namespace swarmstab
