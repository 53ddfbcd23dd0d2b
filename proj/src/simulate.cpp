#include "swarmstab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace swarmstab {

using coding::CodingVector;
using coding::Subspace;

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr int kMaxTypeColumns = 10;

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Designation of the rare piece (uncoded) or the rare hyperplane (coded).
struct Designation {
  int piece = 1;
  PieceSet one_club;
  std::optional<Subspace> hyperplane;
};

int level(const PieceSet& c) { return c.size(); }
int level(const Subspace& c) { return c.dim(); }
bool complete(const PieceSet& c) { return c.is_full(); }
bool complete(const Subspace& c) { return c.is_full(); }
bool holds_designated(const PieceSet& c, const Designation& d) { return c.contains(d.piece); }
bool holds_designated(const Subspace& c, const Designation& d) { return !c.is_subspace_of(*d.hyperplane); }
bool one_club(const PieceSet& c, const Designation& d) { return c == d.one_club; }
bool one_club(const Subspace& c, const Designation& d) { return c == *d.hyperplane; }

enum Group { kA, kB, kG, kE, kF };

template <class Content>
Group group_of(const Peer<Content>& p, const Designation& d) {
  if (one_club(p.content, d)) return kE;
  if (p.was_one_club) return kF;
  if (p.gifted) return kG;
  if (p.infected) return kB;
  return kA;
}

void bump(Census& c, Group g, std::int64_t by) {
  switch (g) {
    case kA: c.a += by; break;
    case kB: c.b += by; break;
    case kG: c.g += by; break;
    case kE: c.e += by; break;
    case kF: c.f += by; break;
  }
}

template <class Content>
Census census_with(const std::vector<Peer<Content>>& roster, const Designation& d) {
  Census c;
  for (const auto& p : roster) bump(c, group_of(p, d), 1);
  return c;
}

// Generates the holdings of arriving peers.
struct ArrivalSource {
  double rate = 0.0;
  PieceSet pieces;                    // uncoded
  std::optional<Subspace> fixed;      // coded, no random part
  int uniform_vectors = 0;            // coded, random part
  std::vector<CodingVector> vectors;  // coded, explicit part
};

}  // namespace

template <class Content>
struct Engine<Content>::Impl {
  SwarmParams params;
  RunOptions opts;
  Policy policy;
  Rng rng;
  Designation des;
  std::vector<ArrivalSource> sources;
  double lambda_total = 0.0;

  std::vector<Peer<Content>> peers;
  std::vector<std::size_t> seed_pos;  // per peer, index into seeds or kNone
  std::vector<std::size_t> seeds;
  std::uint64_t next_id = 0;

  double t = 0.0;
  Census cen;
  std::vector<std::int64_t> levels;
  std::vector<std::int64_t> type_counts;  // uncoded, K <= 10
  std::vector<std::int64_t> replicas;     // uncoded
  std::int64_t arrivals = 0, departures = 0, A = 0, D = 0, useful = 0, noop = 0, events = 0;

  // Run bookkeeping.
  double horizon = 0.0;
  double area = 0.0, late_area = 0.0, late_t_area = 0.0;
  std::int64_t late_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t initial_n = 0;
  Trajectory traj;

  Impl(const SwarmParams& p, const RunOptions& o) : params(p), opts(o), policy(o.policy), rng(o.seed) {
    if constexpr (std::is_same_v<Content, Subspace>) {
      if (!p.coded) throw std::invalid_argument("coded engine needs coded params");
      coding::validate_coded(p);
    } else {
      if (p.coded) throw std::invalid_argument("uncoded engine given coded params");
      p.validate();
    }
    if (o.designated_piece < 1 || o.designated_piece > p.K)
      throw std::invalid_argument("designated piece outside 1..K");
    des.piece = o.designated_piece;
    des.one_club = PieceSet::full(p.K).without(o.designated_piece);
    if constexpr (std::is_same_v<Content, Subspace>) {
      des.hyperplane = o.designated_hyperplane
                           ? *o.designated_hyperplane
                           : Subspace::coordinate_hyperplane(p.q, p.K, o.designated_piece);
      if (des.hyperplane->K() != p.K || des.hyperplane->q() != p.q || des.hyperplane->dim() != p.K - 1)
        throw std::invalid_argument("designated subspace must be a hyperplane of F_q^K");
    }
    for (const auto& a : p.merged_arrivals()) {
      ArrivalSource s;
      s.rate = a.rate.value();
      s.pieces = a.type;
      if constexpr (std::is_same_v<Content, Subspace>) s.fixed = Subspace::of_pieces(p.q, a.type);
      sources.push_back(std::move(s));
    }
    if constexpr (std::is_same_v<Content, Subspace>) {
      for (const auto& a : p.coded_arrivals) {
        if (a.rate.is_zero()) continue;
        ArrivalSource s;
        s.rate = a.rate.value();
        s.uniform_vectors = a.uniform_vectors;
        for (const auto& v : a.vectors) s.vectors.emplace_back(v.begin(), v.end());
        if (s.uniform_vectors == 0) s.fixed = Subspace::span(p.q, p.K, s.vectors);
        sources.push_back(std::move(s));
      }
    }
    for (const auto& s : sources) lambda_total += s.rate;
    levels.assign(static_cast<std::size_t>(p.K) + 1, 0);
    if constexpr (std::is_same_v<Content, PieceSet>) {
      if (p.K <= kMaxTypeColumns) type_counts.assign(std::size_t{1} << p.K, 0);
      replicas.assign(static_cast<std::size_t>(p.K) + 1, 0);
    }
  }

  bool is_seed(std::size_t i) const { return seed_pos[i] != kNone; }

  // Bookkeeping for a peer entering or leaving a holding.
  void account(const Content& c, std::int64_t by) {
    levels[static_cast<std::size_t>(level(c))] += by;
    if constexpr (std::is_same_v<Content, PieceSet>) {
      if (!type_counts.empty()) type_counts[c.mask()] += by;
      for (int i : c.pieces()) replicas[static_cast<std::size_t>(i)] += by;
    }
  }

  void make_seed(std::size_t i) {
    seed_pos[i] = seeds.size();
    seeds.push_back(i);
    peers[i].seed_since = t;
  }

  void remove_peer(std::size_t i) {
    auto& p = peers[i];
    bump(cen, group_of(p, des), -1);
    account(p.content, -1);
    if (is_seed(i)) {
      std::size_t pos = seed_pos[i];
      std::size_t moved = seeds.back();
      seeds[pos] = moved;
      seed_pos[moved] = pos;
      seeds.pop_back();
      seed_pos[i] = kNone;
    }
    std::size_t last = peers.size() - 1;
    if (i != last) {
      peers[i] = std::move(peers[last]);
      seed_pos[i] = seed_pos[last];
      if (seed_pos[i] != kNone) seeds[seed_pos[i]] = i;
    }
    peers.pop_back();
    seed_pos.pop_back();
    ++departures;
  }

  // Returns true if the peer stayed.
  bool insert_peer(Content c) {
    Peer<Content> p;
    p.id = next_id++;
    p.arrival = c;
    p.content = std::move(c);
    p.arrived_at = t;
    p.gifted = holds_designated(p.content, des);
    p.was_one_club = one_club(p.content, des);
    ++arrivals;
    if (!p.gifted) ++A;
    const bool done = complete(p.content);
    if (done && params.gamma.is_inf()) {
      // Arrived already complete with nowhere to dwell: leaves at once.
      ++departures;
      return false;
    }
    bump(cen, group_of(p, des), 1);
    account(p.content, 1);
    peers.push_back(std::move(p));
    seed_pos.push_back(kNone);
    if (done) make_seed(peers.size() - 1);
    if (static_cast<std::int64_t>(peers.size()) > opts.max_peers)
      throw std::runtime_error("peer population exceeded max_peers");
    return true;
  }

  Content draw_arrival() {
    double u = rng.uniform() * lambda_total;
    std::size_t k = 0;
    for (; k + 1 < sources.size(); ++k) {
      if (u < sources[k].rate) break;
      u -= sources[k].rate;
    }
    const auto& s = sources[k];
    if constexpr (std::is_same_v<Content, PieceSet>) {
      return s.pieces;
    } else {
      if (s.fixed) return *s.fixed;
      Subspace sub = Subspace::span(params.q, params.K, s.vectors);
      for (int j = 0; j < s.uniform_vectors; ++j) sub.insert(coding::uniform_vector(params.q, params.K, rng));
      return sub;
    }
  }

  // Uploads from `from` (or the fixed seed when from == kNone) to peer `to`.
  // Returns the record of what happened.
  void transfer(std::size_t from, std::size_t to, StepRecord& rec) {
    auto& down = peers[to];
    if (complete(down.content)) {
      ++noop;
      return;
    }
    const Group g0 = group_of(down, des);
    Content before = down.content;
    bool grew = false;
    if constexpr (std::is_same_v<Content, PieceSet>) {
      const PieceSet up = from == kNone ? PieceSet::full(params.K) : peers[from].content;
      auto piece = policy.select(down.content, up, replicas, rng);
      if (piece) {
        down.content = down.content.with(*piece);
        rec.piece = *piece;
        grew = true;
      }
      rec.before = before;
      rec.after = down.content;
    } else {
      CodingVector v = from == kNone ? coding::uniform_vector(params.q, params.K, rng)
                                     : peers[from].content.random_combination(rng);
      grew = down.content.insert(v);
    }
    if (!grew) {
      ++noop;
      return;
    }
    ++useful;
    rec.useful = true;
    // Re-tag and re-count the downloader.
    bump(cen, g0, -1);
    account(before, -1);
    const bool got_designated = !holds_designated(before, des) && holds_designated(down.content, des);
    if (got_designated) {
      ++D;
      if (!down.gifted && !one_club(before, des)) down.infected = true;
    }
    if (one_club(down.content, des)) down.was_one_club = true;
    bump(cen, group_of(down, des), 1);
    account(down.content, 1);
    if (complete(down.content)) {
      if (params.gamma.is_inf()) {
        remove_peer(to);
        rec.departed = true;
      } else {
        make_seed(to);
      }
    }
  }

  double total_rate() const {
    const auto n = static_cast<double>(peers.size());
    double r = lambda_total + n * params.mu.value();
    if (!peers.empty()) r += params.Us.value();
    if (!params.gamma.is_inf()) r += params.gamma.value() * static_cast<double>(seeds.size());
    return r;
  }

  void advance(double dt) {
    const double t1 = t + dt;
    const auto n = static_cast<double>(peers.size());
    area += n * dt;
    if (horizon > 0) {
      const double lo = std::max(t, horizon / 2), hi = std::min(t1, horizon);
      if (hi > lo) {
        late_area += n * (hi - lo);
        late_t_area += n * (hi * hi - lo * lo) / 2;
      }
    }
    t = t1;
  }

  StepRecord apply_event(double dt) {
    StepRecord rec;
    rec.dt = dt;
    advance(dt);
    ++events;
    const double n = static_cast<double>(peers.size());
    double u = rng.uniform() * total_rate();
    if (u < lambda_total) {
      rec.kind = EventKind::Arrival;
      Content c = draw_arrival();
      if constexpr (std::is_same_v<Content, PieceSet>) rec.after = c;
      rec.departed = !insert_peer(std::move(c));
      return rec;
    }
    u -= lambda_total;
    if (!peers.empty() && u < params.Us.value()) {
      rec.kind = EventKind::SeedContact;
      transfer(kNone, static_cast<std::size_t>(rng.below(peers.size())), rec);
      return rec;
    }
    if (!peers.empty()) u -= params.Us.value();
    if (u < n * params.mu.value() || params.gamma.is_inf() || seeds.empty()) {
      rec.kind = EventKind::PeerContact;
      auto from = static_cast<std::size_t>(rng.below(peers.size()));
      auto to = static_cast<std::size_t>(rng.below(peers.size()));
      if (from == to) {
        ++noop;
        return rec;
      }
      transfer(from, to, rec);
      return rec;
    }
    rec.kind = EventKind::SeedDeparture;
    auto i = seeds[static_cast<std::size_t>(rng.below(seeds.size()))];
    if constexpr (std::is_same_v<Content, PieceSet>) rec.before = peers[i].content;
    remove_peer(i);
    rec.departed = true;
    return rec;
  }

  void init_columns() {
    traj.column_names.clear();
    if constexpr (std::is_same_v<Content, PieceSet>) {
      if (!type_counts.empty()) {
        for (std::uint64_t m = 0; m < type_counts.size(); ++m)
          traj.column_names.push_back("x_" + PieceSet::from_mask(params.K, m).bitstring());
        return;
      }
    }
    for (int d = 0; d <= params.K; ++d) traj.column_names.push_back("d" + std::to_string(d));
  }

  void record(double at) {
    if (!opts.record_trajectory) return;
    TrajectorySample s;
    s.t = at;
    s.n = static_cast<std::int64_t>(peers.size());
    s.columns = type_counts.empty() ? levels : type_counts;
    s.census = cen;
    s.one_club_frac = peers.empty() ? 0.0 : static_cast<double>(cen.e) / static_cast<double>(peers.size());
    s.A = A;
    s.D = D;
    traj.samples.push_back(std::move(s));
  }
};

template <class Content>
Engine<Content>::Engine(const SwarmParams& params, const RunOptions& options)
    : impl_(std::make_unique<Impl>(params, options)) {}
template <class Content>
Engine<Content>::~Engine() = default;
template <class Content>
Engine<Content>::Engine(Engine&&) noexcept = default;
template <class Content>
Engine<Content>& Engine<Content>::operator=(Engine&&) noexcept = default;

template <class Content>
void Engine<Content>::add_initial(const Content& content) {
  if constexpr (std::is_same_v<Content, PieceSet>) {
    if (content.universe() != impl_->params.K) throw std::invalid_argument("initial peer has wrong K");
    if (content.is_full() && impl_->params.gamma.is_inf())
      throw std::invalid_argument("gamma = inf allows no complete peers");
  } else {
    if (content.K() != impl_->params.K || content.q() != impl_->params.q)
      throw std::invalid_argument("initial subspace has wrong shape");
    if (content.is_full() && impl_->params.gamma.is_inf())
      throw std::invalid_argument("gamma = inf allows no complete peers");
  }
  impl_->insert_peer(content);
}

template <class Content>
void Engine<Content>::add_initial(const CountState& state) {
  if (state.K() != impl_->params.K) throw std::invalid_argument("initial state has wrong K");
  for (const auto& [C, c] : state.counts())
    for (std::int64_t j = 0; j < c; ++j) {
      if constexpr (std::is_same_v<Content, PieceSet>)
        add_initial(C);
      else
        add_initial(Subspace::of_pieces(impl_->params.q, C));
    }
}

template <class Content>
StepRecord Engine<Content>::step() {
  auto& s = *impl_;
  return s.apply_event(s.rng.exponential(s.total_rate()));
}

template <class Content>
RunResult Engine<Content>::run_to(double horizon) {
  auto& s = *impl_;
  if (!(horizon > s.t)) throw std::invalid_argument("horizon must exceed the current time");
  s.horizon = horizon;
  s.area = s.late_area = s.late_t_area = 0.0;
  s.initial_n = static_cast<std::int64_t>(s.peers.size());
  s.late_min = std::numeric_limits<std::int64_t>::max();
  s.traj = Trajectory{};
  s.init_columns();
  const double start = s.t;
  const double grid = s.opts.sample_interval > 0 ? s.opts.sample_interval : (horizon - start) / 1000.0;
  double next_grid = start;
  const double half = start + (horizon - start) / 2;
  if (half <= start) s.late_min = s.initial_n;

  auto grid_until = [&](double upto) {
    while (next_grid <= upto && next_grid <= horizon) {
      s.record(next_grid);
      next_grid += grid;
    }
  };

  for (;;) {
    double dt = s.rng.exponential(s.total_rate());
    if (s.t + dt >= horizon) {
      if (s.t < half) s.late_min = std::min<std::int64_t>(s.late_min, static_cast<std::int64_t>(s.peers.size()));
      grid_until(horizon);
      s.advance(horizon - s.t);
      break;
    }
    const double at = s.t + dt;
    if (s.t < half && at >= half)
      s.late_min = std::min<std::int64_t>(s.late_min, static_cast<std::int64_t>(s.peers.size()));
    grid_until(at);
    s.apply_event(dt);
    if (s.t >= half) s.late_min = std::min<std::int64_t>(s.late_min, static_cast<std::int64_t>(s.peers.size()));
    if (s.opts.sample_stride > 0 && s.events % s.opts.sample_stride == 0) s.record(s.t);
  }
  if (s.opts.record_trajectory && (s.traj.samples.empty() || s.traj.samples.back().t < horizon)) s.record(horizon);

  RunResult r;
  auto& sum = r.summary;
  sum.seed = s.opts.seed;
  sum.horizon = horizon;
  sum.initial_n = s.initial_n;
  sum.final_n = static_cast<std::int64_t>(s.peers.size());
  const double len = horizon - start;
  sum.mean_n = s.area / len;
  const double late_len = horizon - half;
  sum.late_mean_n = s.late_area / late_len;
  // Continuous least squares of n(t) against t over the late window.
  const double tbar = (half + horizon) / 2;
  const double sxx = late_len * late_len * late_len / 12.0;
  sum.growth_slope = (s.late_t_area - tbar * s.late_area) / sxx;
  sum.late_min_n = s.late_min;
  sum.final_one_club_frac = s.peers.empty() ? 0.0 : static_cast<double>(s.cen.e) / static_cast<double>(s.peers.size());
  sum.arrivals = s.arrivals;
  sum.departures = s.departures;
  sum.A = s.A;
  sum.D = s.D;
  sum.useful_transfers = s.useful;
  sum.noop_contacts = s.noop;
  sum.events = s.events;
  sum.final_census = s.cen;
  r.trajectory = std::move(s.traj);
  if constexpr (std::is_same_v<Content, PieceSet>) r.final_state = count_state();
  r.final_levels = s.levels;
  return r;
}

template <class Content>
double Engine<Content>::time() const { return impl_->t; }
template <class Content>
std::int64_t Engine<Content>::n() const { return static_cast<std::int64_t>(impl_->peers.size()); }
template <class Content>
const std::vector<Peer<Content>>& Engine<Content>::roster() const { return impl_->peers; }
template <class Content>
Census Engine<Content>::census() const { return impl_->cen; }
template <class Content>
Census Engine<Content>::recount_census() const { return census_with(impl_->peers, impl_->des); }
template <class Content>
std::int64_t Engine<Content>::arrivals() const { return impl_->arrivals; }
template <class Content>
std::int64_t Engine<Content>::departures() const { return impl_->departures; }

template <class Content>
CountState Engine<Content>::count_state() const {
  if constexpr (std::is_same_v<Content, PieceSet>) {
    CountState x(impl_->params.K);
    for (const auto& p : impl_->peers) x.add(p.content, 1);
    return x;
  } else {
    throw std::logic_error("count_state is only defined for uncoded runs");
  }
}

template class Engine<PieceSet>;
template class Engine<Subspace>;

RunResult run(const SwarmParams& params, const RunOptions& options) {
  return run(params, options, CountState(params.K));
}

RunResult run(const SwarmParams& params, const RunOptions& options, const CountState& initial) {
  if (!(options.horizon > 0)) throw std::invalid_argument("horizon must be positive");
  if (params.coded) {
    CodedEngine e(params, options);
    e.add_initial(initial);
    return e.run_to(options.horizon);
  }
  UncodedEngine e(params, options);
  e.add_initial(initial);
  return e.run_to(options.horizon);
}

Census census_of(const std::vector<Peer<PieceSet>>& roster, int designated_piece) {
  if (roster.empty()) return {};
  Designation d;
  d.piece = designated_piece;
  d.one_club = PieceSet::full(roster.front().content.universe()).without(designated_piece);
  return census_with(roster, d);
}

Census census_of(const std::vector<Peer<Subspace>>& roster, const Subspace& hyperplane) {
  Designation d;
  d.hyperplane = hyperplane;
  return census_with(roster, d);
}

std::vector<std::string> Trajectory::header() const {
  std::vector<std::string> h{"t", "n"};
  h.insert(h.end(), column_names.begin(), column_names.end());
  for (const char* c : {"one_club_frac", "ya", "yb", "yg", "ye", "yf", "A", "D"}) h.emplace_back(c);
  return h;
}

void Trajectory::write_csv(std::ostream& out) const {
  auto h = header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
  for (const auto& s : samples) {
    out << fmt9(s.t) << ',' << s.n;
    for (auto c : s.columns) out << ',' << c;
    out << ',' << fmt9(s.one_club_frac) << ',' << s.census.a << ',' << s.census.b << ',' << s.census.g << ','
        << s.census.e << ',' << s.census.f << ',' << s.A << ',' << s.D << '\n';
  }
}

std::vector<std::string> RunSummary::csv_header() {
  return {"seed",          "horizon",    "initial_n", "final_n",  "mean_n",           "late_mean_n",
          "growth_slope",  "late_min_n", "one_club_frac", "arrivals", "departures", "A", "D",
          "useful_transfers", "noop_contacts", "events"};
}

std::vector<std::string> RunSummary::csv_row() const {
  return {std::to_string(seed),
          fmt9(horizon),
          std::to_string(initial_n),
          std::to_string(final_n),
          fmt9(mean_n),
          fmt9(late_mean_n),
          fmt9(growth_slope),
          std::to_string(late_min_n),
          fmt9(final_one_club_frac),
          std::to_string(arrivals),
          std::to_string(departures),
          std::to_string(A),
          std::to_string(D),
          std::to_string(useful_transfers),
          std::to_string(noop_contacts),
          std::to_string(events)};
}

}  // namespace swarmstab
