#pragma once

#include "swarmstab/count_state.hpp"
#include "swarmstab/rng.hpp"

#include <cstdint>
#include <vector>

namespace swarmstab {

// Instant-exchange limit of the swarm (contact rate -> infinity, no fixed
// seed, immediate departure) with single-piece arrivals at rate lambda per
// piece. Between arrivals every peer holds the same collection, so the chain
// is watched only in slow states (n, collection).

struct WatchedState {
  std::int64_t n = 0;
  PieceSet collection;
  int k() const { return n == 0 ? 0 : collection.size(); }
};

struct FastPhaseOutcome {
  WatchedState state;
  std::int64_t jumps = 0;
  std::int64_t departures = 0;
};

// Runs the embedded jump chain of useful contacts (random useful selection,
// completed peers leave) from x until one collection remains or nobody does.
FastPhaseOutcome resolve_fast_phase(const CountState& x, Rng& rng, std::int64_t max_jumps = 100'000'000);

struct WatchedSample {
  double t = 0.0;
  std::int64_t n = 0;
  int k = 0;
};

struct RecurrenceRow {
  double window_start = 0.0;
  double window_end = 0.0;
  std::int64_t low_visits = 0;  // slow-state entries with n <= 1
  std::int64_t max_n = 0;
  double mean_n = 0.0;          // time average in the window
};

struct WatchedResult {
  std::vector<WatchedSample> path;
  std::vector<std::int64_t> z_samples;       // from fast phases started in the top layer
  std::vector<std::int64_t> top_increments;  // n' - n for top-layer arrivals staying on top
  std::vector<RecurrenceRow> recurrence;
  std::int64_t arrivals = 0;
  std::int64_t fast_phases = 0;
};

// Requires K >= 2 and lambda > 0.
WatchedResult run_watched(int K, double lambda, double horizon, std::uint64_t seed);

// One slow step from `s`: an arrival carrying piece j (uniform), followed by
// fast-phase resolution when needed.
WatchedState watched_step(const WatchedState& s, int K, Rng& rng, FastPhaseOutcome* phase = nullptr);

// Z = number of one-club departures during a fast phase started from
// (n, K-1) plus a peer holding the missing piece only.
std::vector<std::int64_t> sample_top_layer_z(int K, std::int64_t n, int count, std::uint64_t seed);
// n' - n over one slow step from (n, K-1).
std::vector<std::int64_t> sample_top_layer_increments(int K, std::int64_t n, int count, std::uint64_t seed);

}  // namespace swarmstab
