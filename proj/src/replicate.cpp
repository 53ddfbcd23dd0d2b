#include "swarmstab/replicate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace swarmstab {

namespace {

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.size() == 1) return sorted.front();
  double pos = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1 - w) + sorted[hi] * w;
}

}  // namespace

Band band_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("band of an empty sample");
  Band b;
  double s = 0;
  for (double x : v) s += x;
  b.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - b.mean) * (x - b.mean);
    b.variance = ss / static_cast<double>(v.size() - 1);
  }
  std::sort(v.begin(), v.end());
  b.p05 = quantile(v, 0.05);
  b.p50 = quantile(v, 0.50);
  b.p95 = quantile(v, 0.95);
  return b;
}

std::vector<std::uint64_t> replication_seeds(std::uint64_t seed, int R) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < R; ++i) out.push_back(stream_seed(seed, static_cast<std::uint64_t>(i)));
  return out;
}

ReplicationReport replicate(const SwarmParams& params, const RunOptions& base,
                            const std::vector<std::uint64_t>& seeds, int threads,
                            const CountState* initial) {
  if (seeds.empty()) throw std::invalid_argument("need at least one replication");
  ReplicationReport rep;
  rep.runs.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next++;
      if (i >= seeds.size()) return;
      try {
        RunOptions o = base;
        o.seed = seeds[i];
        o.record_trajectory = false;
        rep.runs[i] = initial ? run(params, o, *initial).summary : run(params, o).summary;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  auto collect = [&](const char* name, auto get) {
    std::vector<double> v;
    for (const auto& r : rep.runs) v.push_back(static_cast<double>(get(r)));
    rep.bands[name] = band_of(std::move(v));
  };
  collect("final_n", [](const RunSummary& r) { return r.final_n; });
  collect("mean_n", [](const RunSummary& r) { return r.mean_n; });
  collect("late_mean_n", [](const RunSummary& r) { return r.late_mean_n; });
  collect("growth_slope", [](const RunSummary& r) { return r.growth_slope; });
  collect("late_min_n", [](const RunSummary& r) { return r.late_min_n; });
  collect("one_club_frac", [](const RunSummary& r) { return r.final_one_club_frac; });
  collect("arrivals", [](const RunSummary& r) { return r.arrivals; });
  collect("departures", [](const RunSummary& r) { return r.departures; });
  return rep;
}

}  // namespace swarmstab
