#include "swarmstab/model.hpp"

#include <stdexcept>

namespace swarmstab {

const char* transition_kind_name(TransitionKind k) {
  switch (k) {
    case TransitionKind::Arrival: return "arrival";
    case TransitionKind::Upgrade: return "upgrade";
    case TransitionKind::SeedDeparture: return "seed-departure";
    case TransitionKind::CompletionDeparture: return "completion-departure";
  }
  return "?";
}

CountState Transition::apply(const CountState& x) const {
  CountState y = x;
  switch (kind) {
    case TransitionKind::Arrival: y.add(to, 1); break;
    case TransitionKind::Upgrade:
      y.add(from, -1);
      y.add(to, 1);
      break;
    case TransitionKind::SeedDeparture:
    case TransitionKind::CompletionDeparture: y.add(from, -1); break;
  }
  return y;
}

int Transition::dn() const {
  switch (kind) {
    case TransitionKind::Arrival: return 1;
    case TransitionKind::Upgrade: return 0;
    default: return -1;
  }
}

int Transition::delta(const PieceSet& C) const {
  int d = 0;
  if (kind == TransitionKind::Arrival || kind == TransitionKind::Upgrade)
    if (to == C) ++d;
  if (kind != TransitionKind::Arrival && from == C) --d;
  return d;
}

double RateTable::total_rate() const {
  double s = 0;
  for (const auto& t : entries) s += t.rate;
  return s;
}

double RateTable::departure_total() const {
  double s = 0;
  for (const auto& [C, r] : departure) s += r;
  return s;
}

namespace {

void check_piece(const PieceSet& C, int piece) {
  if (C.contains(piece))
    throw std::invalid_argument("piece " + std::to_string(piece) + " already held by type " + C.str());
}

}  // namespace

double gamma_rate(const CountState& x, const SwarmParams& p, const PieceSet& C, int piece) {
  check_piece(C, piece);
  const auto n = x.n();
  const auto xc = x.count(C);
  if (n == 0 || xc == 0) return 0.0;
  double help = 0.0;
  for (const auto& [S, xs] : x.counts()) {
    if (!S.contains(piece)) continue;
    help += static_cast<double>(xs) / (S - C).size();
  }
  const double seed = p.Us.value() / (p.K - C.size());
  return static_cast<double>(xc) / static_cast<double>(n) * (seed + p.mu.value() * help);
}

double departure_rate(const CountState& x, const SwarmParams& p, const PieceSet& C) {
  if (C.is_full()) throw std::invalid_argument("departure_rate is for proper collections");
  const auto n = x.n();
  const auto xc = x.count(C);
  if (n == 0 || xc == 0) return 0.0;
  double helpers = 0.0;
  for (const auto& [S, xs] : x.counts())
    if (!S.is_subset_of(C)) helpers += static_cast<double>(xs);
  return static_cast<double>(xc) / static_cast<double>(n) * (p.Us.value() + p.mu.value() * helpers);
}

RateTable neighbors(const CountState& x, const SwarmParams& p) {
  RateTable t;
  for (const auto& a : p.merged_arrivals())
    t.entries.push_back({TransitionKind::Arrival, PieceSet(p.K), a.type, 0, a.rate.value()});

  const auto n = x.n();
  if (n == 0) return t;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double mu = p.mu.value();
  const double us = p.Us.value();
  const bool gamma_inf = p.gamma.is_inf();

  for (const auto& [C, xc] : x.counts()) {
    if (C.is_full()) {
      if (!gamma_inf) {
        double r = p.gamma.value() * static_cast<double>(xc);
        t.entries.push_back({TransitionKind::SeedDeparture, C, C, 0, r});
        t.departure[C] = r;
      }
      continue;
    }
    const double share = static_cast<double>(xc) * inv_n;
    const double seed = us / (p.K - C.size());
    double dep = 0.0;
    for (int i : C.complement().pieces()) {
      double help = 0.0;
      for (const auto& [S, xs] : x.counts())
        if (S.contains(i)) help += static_cast<double>(xs) / (S - C).size();
      double r = share * (seed + mu * help);
      if (r <= 0.0) continue;
      dep += r;
      PieceSet to = C.with(i);
      auto kind = (to.is_full() && gamma_inf) ? TransitionKind::CompletionDeparture : TransitionKind::Upgrade;
      t.entries.push_back({kind, C, to, i, r});
    }
    if (dep > 0.0) t.departure[C] = dep;
  }
  return t;
}

}  // namespace swarmstab
