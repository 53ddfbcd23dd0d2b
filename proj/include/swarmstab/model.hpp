#pragma once

#include "swarmstab/count_state.hpp"
#include "swarmstab/params.hpp"

#include <map>
#include <vector>

namespace swarmstab {

enum class TransitionKind { Arrival, Upgrade, SeedDeparture, CompletionDeparture };

const char* transition_kind_name(TransitionKind k);

// One off-diagonal generator entry out of a given state.
//   Arrival:             +e_to
//   Upgrade:             -e_from + e_to, to = from + {piece}
//   SeedDeparture:       -e_from, from = full set
//   CompletionDeparture: -e_from, the download of `piece` completes the file
struct Transition {
  TransitionKind kind;
  PieceSet from;
  PieceSet to;
  int piece = 0;
  double rate = 0.0;

  CountState apply(const CountState& x) const;
  // Change in the total peer count.
  int dn() const;
  // Change in the count of type C.
  int delta(const PieceSet& C) const;
};

struct RateTable {
  std::vector<Transition> entries;
  // Aggregate rate at which type-C peers leave their type, for every present C
  // (gamma * x_F for the full set when gamma is finite).
  std::map<PieceSet, double> departure;

  double total_rate() const;
  double departure_total() const;
};

// Aggregate rate at which type-C peers download piece i (i not in C).
double gamma_rate(const CountState& x, const SwarmParams& p, const PieceSet& C, int piece);

// Closed form of sum_i gamma_rate(x, p, C, i) for C != F.
double departure_rate(const CountState& x, const SwarmParams& p, const PieceSet& C);

RateTable neighbors(const CountState& x, const SwarmParams& p);

// Q(F)(x) = sum over neighbors of rate * (F(x') - F(x)).
template <class F>
double drift(const CountState& x, const SwarmParams& p, F&& f) {
  const double base = f(x);
  double acc = 0.0;
  for (const auto& t : neighbors(x, p).entries) acc += t.rate * (f(t.apply(x)) - base);
  return acc;
}

// Same as drift, but the caller supplies the increment F(x') - F(x) directly,
// which avoids cancellation for large F.
template <class G>
double drift_increments(const CountState& x, const SwarmParams& p, G&& increment) {
  double acc = 0.0;
  for (const auto& t : neighbors(x, p).entries) acc += t.rate * increment(t);
  return acc;
}

}  // namespace swarmstab
