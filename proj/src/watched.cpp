#include "swarmstab/watched.hpp"

#include "swarmstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmstab {

namespace {

SwarmParams exchange_only(int K) {
  SwarmParams p;
  p.K = K;
  p.Us = 0;
  p.mu = 1;
  p.gamma = Rate::infinity();
  return p;
}

// One-club departures in a fast phase started from n one-club peers plus a
// newcomer: the newcomer leaves too unless it outlasts the whole club.
std::int64_t club_departures(std::int64_t n, const PieceSet& club, const FastPhaseOutcome& out) {
  if (out.state.n > 0 && out.state.collection == club) return n - out.state.n;
  return n;
}

void check_k(int K) {
  if (K < 2 || K > kMaxLatticePieces) throw std::invalid_argument("watched chain needs 2 <= K <= 24");
}

}  // namespace

FastPhaseOutcome resolve_fast_phase(const CountState& x0, Rng& rng, std::int64_t max_jumps) {
  const SwarmParams p = exchange_only(x0.K());
  CountState x = x0;
  FastPhaseOutcome out;
  while (x.counts().size() > 1) {
    if (out.jumps >= max_jumps) throw std::runtime_error("fast phase did not settle");
    auto table = neighbors(x, p);
    const double total = table.total_rate();
    double u = rng.uniform() * total;
    const Transition* pick = &table.entries.back();
    for (const auto& t : table.entries) {
      if (u < t.rate) {
        pick = &t;
        break;
      }
      u -= t.rate;
    }
    x = pick->apply(x);
    if (pick->dn() < 0) ++out.departures;
    ++out.jumps;
  }
  out.state.n = x.n();
  out.state.collection = x.counts().empty() ? PieceSet(x0.K()) : x.counts().begin()->first;
  return out;
}

WatchedState watched_step(const WatchedState& s, int K, Rng& rng, FastPhaseOutcome* phase) {
  const int j = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
  if (s.n == 0) return {1, PieceSet::of(K, {j})};
  if (s.collection.contains(j)) return {s.n + 1, s.collection};
  CountState x(K);
  x.add(s.collection, s.n);
  x.add(PieceSet::of(K, {j}), 1);
  auto out = resolve_fast_phase(x, rng);
  if (phase) *phase = out;
  return out.state;
}

WatchedResult run_watched(int K, double lambda, double horizon, std::uint64_t seed) {
  check_k(K);
  if (!(lambda > 0)) throw std::invalid_argument("arrival rate must be positive");
  if (!(horizon > 0)) throw std::invalid_argument("horizon must be positive");
  Rng rng(seed);
  WatchedResult r;
  WatchedState s{0, PieceSet(K)};
  double t = 0.0;
  r.path.push_back({0.0, 0, 0});

  // Doubling windows starting at 1 for the recurrence report.
  double wstart = 0.0, wend = std::min(1.0, horizon);
  RecurrenceRow row{wstart, wend, 1, 0, 0.0};
  auto close_window = [&]() {
    row.mean_n /= (row.window_end - row.window_start);
    r.recurrence.push_back(row);
  };
  // Accrues time [a, b) at population n into the window rows.
  auto accrue = [&](double a, double b, std::int64_t n) {
    while (a < b) {
      double hi = std::min(b, row.window_end);
      row.mean_n += static_cast<double>(n) * (hi - a);
      row.max_n = std::max(row.max_n, n);
      a = hi;
      if (a >= row.window_end && row.window_end < horizon) {
        close_window();
        wstart = row.window_end;
        wend = std::min(2 * wstart, horizon);
        row = RecurrenceRow{wstart, wend, 0, n, 0.0};
      } else if (a >= row.window_end) {
        break;
      }
    }
  };

  const double rate = K * lambda;
  for (;;) {
    const double dt = rng.exponential(rate);
    if (t + dt >= horizon) {
      accrue(t, horizon, s.n);
      break;
    }
    accrue(t, t + dt, s.n);
    t += dt;
    const bool top = s.n > 0 && s.collection.size() == K - 1;
    FastPhaseOutcome phase;
    phase.jumps = -1;
    WatchedState next = watched_step(s, K, rng, &phase);
    ++r.arrivals;
    if (phase.jumps >= 0) ++r.fast_phases;
    if (top) {
      if (phase.jumps >= 0) r.z_samples.push_back(club_departures(s.n, s.collection, phase));
      if (next.n > 0 && next.collection.size() == K - 1) r.top_increments.push_back(next.n - s.n);
    }
    s = next;
    if (s.n <= 1) ++row.low_visits;
    r.path.push_back({t, s.n, s.k()});
  }
  close_window();
  return r;
}

std::vector<std::int64_t> sample_top_layer_z(int K, std::int64_t n, int count, std::uint64_t seed) {
  check_k(K);
  if (n < 1) throw std::invalid_argument("top layer needs n >= 1");
  Rng rng(seed);
  std::vector<std::int64_t> z;
  z.reserve(static_cast<std::size_t>(count));
  const PieceSet club = PieceSet::full(K).without(1);
  for (int i = 0; i < count; ++i) {
    CountState x(K);
    x.add(club, n);
    x.add(PieceSet::of(K, {1}), 1);
    z.push_back(club_departures(n, club, resolve_fast_phase(x, rng)));
  }
  return z;
}

std::vector<std::int64_t> sample_top_layer_increments(int K, std::int64_t n, int count, std::uint64_t seed) {
  check_k(K);
  Rng rng(seed);
  std::vector<std::int64_t> inc;
  inc.reserve(static_cast<std::size_t>(count));
  const WatchedState top{n, PieceSet::full(K).without(1)};
  for (int i = 0; i < count; ++i) inc.push_back(watched_step(top, K, rng).n - n);
  return inc;
}

}  // namespace swarmstab
