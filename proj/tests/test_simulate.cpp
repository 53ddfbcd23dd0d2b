#include "swarmstab/replicate.hpp"
#include "swarmstab/simulate.hpp"
#include "swarmstab/watched.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace swarmstab;

namespace {

SwarmParams example2(double l12, double l34) {
  SwarmParams p;
  p.K = 4;
  p.arrivals = {{PieceSet::of(4, {1, 2}), Rate(l12)}, {PieceSet::of(4, {3, 4}), Rate(l34)}};
  return p;
}

std::string csv(const Trajectory& t) {
  std::ostringstream s;
  t.write_csv(s);
  return s.str();
}

}  // namespace

TEST_CASE("first event from empty is an exponential arrival") {
  SwarmParams p;
  p.K = 2;
  p.arrivals = {{PieceSet(2), Rate(2)}};
  RunOptions o;
  double sum = 0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    o.seed = static_cast<std::uint64_t>(i + 1);
    Engine<PieceSet> e(p, o);
    auto rec = e.step();
    CHECK(rec.kind == EventKind::Arrival);
    sum += rec.dt;
  }
  // Exp(2): mean 1/2, sd 1/2.
  CHECK(std::abs(sum / N - 0.5) < 4 * 0.5 / std::sqrt(N));
}

TEST_CASE("runs are reproducible") {
  auto p = example2(1, 1);
  RunOptions o;
  o.horizon = 200;
  o.seed = 99;
  auto a = run(p, o), b = run(p, o);
  CHECK(csv(a.trajectory) == csv(b.trajectory));
  CHECK(a.summary.csv_row() == b.summary.csv_row());
  o.seed = 100;
  CHECK(csv(run(p, o).trajectory) != csv(a.trajectory));
}

TEST_CASE("census of initial rosters") {
  auto p = example2(1, 1);
  RunOptions o;
  o.designated_piece = 2;
  Engine<PieceSet> e(p, o);
  for (int i = 0; i < 5; ++i) e.add_initial(PieceSet::full(4).without(2));
  CHECK(e.census() == Census{0, 0, 0, 5, 0});
  Engine<PieceSet> g(p, o);
  g.add_initial(PieceSet::of(4, {2}));
  CHECK(g.census() == Census{0, 0, 1, 0, 0});
}

TEST_CASE("infected tag is sticky") {
  SwarmParams p;
  p.K = 3;
  p.Us = Rate(1);
  p.arrivals = {{PieceSet(3), Rate(1e-9)}};
  RunOptions o;
  o.policy = PolicyKind::Sequential;
  o.designated_piece = 1;
  Engine<PieceSet> e(p, o);
  e.add_initial(PieceSet(3));
  CHECK(e.census().a == 1);
  int guard = 0;
  while (e.roster().front().content.size() < 2 && guard++ < 1000) {
    e.step();
    if (e.roster().front().content.contains(1)) CHECK(e.census().b == 1);
  }
  CHECK(e.roster().front().content == PieceSet::of(3, {1, 2}));
  CHECK(e.census() == Census{0, 1, 0, 0, 0});
  CHECK(e.roster().front().infected);
}

TEST_CASE("engine invariants along a run") {
  auto p = example2(2, 1);
  p.Us = Rate(0.5);
  RunOptions o;
  o.seed = 3;
  o.designated_piece = 3;
  Engine<PieceSet> e(p, o);
  for (int i = 0; i < 20000; ++i) {
    auto rec = e.step();
    if (rec.kind == EventKind::PeerContact || rec.kind == EventKind::SeedContact) {
      CHECK(rec.before.is_subset_of(rec.after));
      if (rec.useful) CHECK(rec.after == rec.before.with(rec.piece));
    }
    if (i % 1000 == 0) {
      CHECK(e.census() == e.recount_census());
      CHECK(e.count_state().n() == e.n());
      CHECK(e.count_state().count(PieceSet::full(4)) == 0);
      CHECK(e.arrivals() - e.departures() == e.n());
    }
  }
}

TEST_CASE("dwelling seeds leave at rate gamma") {
  SwarmParams p;
  p.K = 1;
  p.Us = Rate(2);
  p.gamma = Rate(2);
  p.arrivals = {{PieceSet(1), Rate(1)}};
  RunOptions o;
  o.horizon = 500;
  o.seed = 5;
  auto r = run(p, o);
  REQUIRE(r.final_state.has_value());
  CHECK(r.final_state->n() == r.summary.final_n);
  CHECK(r.summary.arrivals - r.summary.departures == r.summary.final_n);
}

TEST_CASE("replicate with one seed reduces to run") {
  auto p = example2(1, 1);
  RunOptions o;
  o.horizon = 100;
  auto seeds = replication_seeds(4, 1);
  auto rep = replicate(p, o, seeds, 1);
  o.seed = seeds[0];
  auto single = run(p, o);
  REQUIRE(rep.runs.size() == 1);
  CHECK(rep.runs[0].csv_row() == single.summary.csv_row());
  CHECK(rep.bands.at("final_n").p50 == static_cast<double>(single.summary.final_n));
}

TEST_CASE("replication order does not depend on threads") {
  auto p = example2(1, 1);
  RunOptions o;
  o.horizon = 100;
  auto seeds = replication_seeds(8, 6);
  auto a = replicate(p, o, seeds, 1), b = replicate(p, o, seeds, 3);
  for (std::size_t i = 0; i < seeds.size(); ++i) CHECK(a.runs[i].csv_row() == b.runs[i].csv_row());
}

TEST_CASE("disjoint seed lists give uncorrelated outputs") {
  auto p = example2(1, 1);
  RunOptions o;
  o.horizon = 50;
  const int R = 200;
  auto s1 = replication_seeds(1000, R), s2 = replication_seeds(2000, R);
  auto a = replicate(p, o, s1), b = replicate(p, o, s2);
  std::vector<double> x, y;
  for (int i = 0; i < R; ++i) {
    x.push_back(a.runs[static_cast<std::size_t>(i)].mean_n);
    y.push_back(b.runs[static_cast<std::size_t>(i)].mean_n);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / R;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / R;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < R; ++i) {
    sxy += (x[static_cast<std::size_t>(i)] - mx) * (y[static_cast<std::size_t>(i)] - my);
    sxx += (x[static_cast<std::size_t>(i)] - mx) * (x[static_cast<std::size_t>(i)] - mx);
    syy += (y[static_cast<std::size_t>(i)] - my) * (y[static_cast<std::size_t>(i)] - my);
  }
  // Under independence the correlation is about N(0, 1/R).
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 4 / std::sqrt(R));
}

TEST_CASE("coded engine grows subspaces") {
  SwarmParams p;
  p.K = 4;
  p.Us = Rate(1);
  p.coded = true;
  p.q = 16;
  p.arrivals = {{PieceSet(4), Rate(1)}};
  p.coded_arrivals = {{Rate(0.5), 1, {}}};
  RunOptions o;
  o.seed = 12;
  Engine<coding::Subspace> e(p, o);
  for (int i = 0; i < 5000; ++i) {
    e.step();
    for (const auto& peer : e.roster()) {
      CHECK(peer.arrival.is_subspace_of(peer.content));
      CHECK_FALSE(peer.content.is_full());
    }
  }
  CHECK(e.census() == e.recount_census());
}

TEST_CASE("watched chain top layer") {
  // K=3: Z is the number of heads before the second tail.
  auto z = sample_top_layer_z(3, 40, 20000, 6);
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  // Var Z = (K-1) * 2 for a fair coin.
  CHECK(std::abs(mean - 2.0) < 3 * std::sqrt(4.0 / static_cast<double>(z.size())));
  auto inc = sample_top_layer_increments(2, 40, 20000, 7);
  const double m = std::accumulate(inc.begin(), inc.end(), 0.0) / static_cast<double>(inc.size());
  double v = 0;
  for (auto d : inc) v += (static_cast<double>(d) - m) * (static_cast<double>(d) - m);
  v /= static_cast<double>(inc.size() - 1);
  CHECK(std::abs(m) < 3 * std::sqrt(v / static_cast<double>(inc.size())));
  auto res = run_watched(3, 1.0, 200, 9);
  CHECK(res.arrivals > 0);
  CHECK_FALSE(res.recurrence.empty());
  CHECK_THROWS(run_watched(1, 1.0, 10, 1));
}
