#pragma once

#include "swarmstab/coding.hpp"
#include "swarmstab/count_state.hpp"
#include "swarmstab/params.hpp"
#include "swarmstab/policy.hpp"
#include "swarmstab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace swarmstab {

struct RunOptions {
  double horizon = 100.0;
  std::uint64_t seed = 1;
  PolicyKind policy = PolicyKind::RandomUseful;
  // Sample every `sample_stride` events (0 disables) ...
  std::int64_t sample_stride = 0;
  // ... and on a fixed time grid (<= 0 means horizon / 1000).
  double sample_interval = 0.0;
  bool record_trajectory = true;
  // Piece whose absence defines the one-club; coded mode uses the hyperplane
  // {v : v_k = 0} unless `designated_hyperplane` is set.
  int designated_piece = 1;
  std::optional<coding::Subspace> designated_hyperplane;
  // Safety valve against runaway populations.
  std::int64_t max_peers = 20'000'000;
};

// Peer groups relative to the designated piece:
//   a  normal young (missing it, not one-club, never held it)
//   b  infected (got it after arriving without it, before being one-club)
//   g  gifted (had it at arrival)
//   e  one-club (holds everything except it)
//   f  former one-club (was one-club, now complete)
struct Census {
  std::int64_t a = 0, b = 0, g = 0, e = 0, f = 0;
  std::int64_t total() const { return a + b + g + e + f; }
  friend bool operator==(const Census&, const Census&) = default;
};

struct TrajectorySample {
  double t = 0.0;
  std::int64_t n = 0;
  std::vector<std::int64_t> columns;
  double one_club_frac = 0.0;
  Census census;
  std::int64_t A = 0;  // arrivals missing the designated piece
  std::int64_t D = 0;  // downloads of the designated piece
};

struct Trajectory {
  std::vector<std::string> column_names;
  std::vector<TrajectorySample> samples;

  std::vector<std::string> header() const;
  void write_csv(std::ostream& out) const;
};

struct RunSummary {
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::int64_t initial_n = 0;
  std::int64_t final_n = 0;
  double mean_n = 0.0;       // time average over [0, T]
  double late_mean_n = 0.0;  // time average over [T/2, T]
  double growth_slope = 0.0; // least-squares slope of n(t) over [T/2, T]
  std::int64_t late_min_n = 0;
  double final_one_club_frac = 0.0;
  std::int64_t arrivals = 0;
  std::int64_t departures = 0;
  std::int64_t A = 0;
  std::int64_t D = 0;
  std::int64_t useful_transfers = 0;
  std::int64_t noop_contacts = 0;
  std::int64_t events = 0;
  Census final_census;

  static std::vector<std::string> csv_header();
  std::vector<std::string> csv_row() const;
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
  // Final per-type counts (uncoded runs only).
  std::optional<CountState> final_state;
  // Final dimension histogram in coded runs, size histogram otherwise.
  std::vector<std::int64_t> final_levels;
};

enum class EventKind { Arrival, SeedContact, PeerContact, SeedDeparture };

// What one call to step() did.
struct StepRecord {
  EventKind kind = EventKind::Arrival;
  double dt = 0.0;
  bool useful = false;       // a transfer increased the downloader's holding
  bool departed = false;     // somebody left
  PieceSet before;           // uncoded: downloader or departing type, or arrival type
  PieceSet after;            // uncoded: downloader type after the event
  int piece = 0;             // uncoded: transferred piece
};

template <class Content>
struct Peer {
  std::uint64_t id = 0;
  Content content;
  Content arrival;
  double arrived_at = 0.0;
  double seed_since = std::numeric_limits<double>::quiet_NaN();
  bool gifted = false;
  bool infected = false;
  bool was_one_club = false;
};

// Event-driven simulator over either piece collections (PieceSet) or coded
// subspaces (coding::Subspace).
template <class Content>
class Engine {
 public:
  Engine(const SwarmParams& params, const RunOptions& options);
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  // Adds a peer present at time zero, counted as an arrival of that content.
  void add_initial(const Content& content);
  void add_initial(const CountState& state);

  StepRecord step();
  RunResult run_to(double horizon);

  double time() const;
  std::int64_t n() const;
  const std::vector<Peer<Content>>& roster() const;
  Census census() const;
  // Recomputes the census from the roster tags (used to cross-check the
  // incrementally maintained counters).
  Census recount_census() const;
  CountState count_state() const;  // uncoded only
  std::int64_t arrivals() const;
  std::int64_t departures() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

using UncodedEngine = Engine<PieceSet>;
using CodedEngine = Engine<coding::Subspace>;

// Runs the uncoded or coded engine according to params.coded.
RunResult run(const SwarmParams& params, const RunOptions& options);
RunResult run(const SwarmParams& params, const RunOptions& options, const CountState& initial);

// Group of one peer; exposed for tests.
Census census_of(const std::vector<Peer<PieceSet>>& roster, int designated_piece);
Census census_of(const std::vector<Peer<coding::Subspace>>& roster, const coding::Subspace& hyperplane);

}  // namespace swarmstab
