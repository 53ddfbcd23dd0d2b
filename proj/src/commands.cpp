#include "swarmstab/commands.hpp"

#include "swarmstab/analyze.hpp"
#include "swarmstab/lyapunov.hpp"
#include "swarmstab/replicate.hpp"
#include "swarmstab/simulate.hpp"
#include "swarmstab/watched.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

namespace swarmstab {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

std::ofstream open_out(const Scenario& s, const std::string& name) {
  fs::create_directories(s.out);
  std::ofstream f(fs::path(s.out) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (fs::path(s.out) / name).string());
  return f;
}

RunOptions run_options(const Scenario& s) {
  RunOptions o;
  o.horizon = s.horizon;
  o.seed = s.seed;
  o.policy = s.policy;
  o.designated_piece = s.designated_piece;
  return o;
}

void write_margins(std::ostream& out, const StabilityVerdict& v) {
  out << "label,piece,exact,value,binding\n";
  for (const auto& m : v.margins)
    out << m.label << ',' << m.piece << ',' << format_rational(m.exact) << ',' << fmt(m.value) << ','
        << (m.binding ? 1 : 0) << '\n';
}

double median(std::vector<double> v) { return band_of(std::move(v)).p50; }

}  // namespace

int cmd_simulate(const Scenario& s, std::ostream& log) {
  const auto seeds = replication_seeds(s.seed, s.replications);
  auto base = run_options(s);
  const auto rep = replicate(s.params, base, seeds, s.threads);
  {
    auto f = open_out(s, "runs.csv");
    f << join(RunSummary::csv_header()) << '\n';
    for (const auto& r : rep.runs) f << join(r.csv_row()) << '\n';
  }
  {
    auto f = open_out(s, "bands.csv");
    f << "observable,mean,variance,p05,p50,p95\n";
    for (const auto& [name, b] : rep.bands)
      f << name << ',' << fmt(b.mean) << ',' << fmt(b.variance) << ',' << fmt(b.p05) << ',' << fmt(b.p50) << ','
        << fmt(b.p95) << '\n';
  }
  base.seed = seeds.front();
  const auto first = run(s.params, base);
  {
    auto f = open_out(s, "trajectory.csv");
    first.trajectory.write_csv(f);
  }
  log << "replications " << s.replications << ", horizon " << fmt(s.horizon) << '\n';
  for (const auto& [name, b] : rep.bands)
    log << "  " << name << ": median " << fmt(b.p50) << " [" << fmt(b.p05) << ", " << fmt(b.p95) << "]\n";
  return kExitOk;
}

int cmd_analyze(const Scenario& s, std::ostream& log) {
  const auto v = classify(s.params);
  log << "verdict: " << verdict_name(v.verdict) << '\n';
  log << "binding:";
  if (v.binding.empty()) log << " none";
  for (int k : v.binding) log << ' ' << k;
  log << '\n';
  if (!v.reason.empty()) log << "reason: " << v.reason << '\n';
  std::size_t w = 5;
  for (const auto& m : v.margins) w = std::max(w, m.label.size());
  char line[256];
  std::snprintf(line, sizeof line, "%-*s %20s %14s %s\n", static_cast<int>(w), "label", "exact", "value", "binding");
  log << line;
  for (const auto& m : v.margins) {
    std::snprintf(line, sizeof line, "%-*s %20s %14s %s\n", static_cast<int>(w), m.label.c_str(),
                  format_rational(m.exact).c_str(), fmt(m.value).c_str(), m.binding ? "*" : "");
    log << line;
  }
  {
    auto f = open_out(s, "analyze.csv");
    write_margins(f, v);
  }
  {
    auto f = open_out(s, "verdict.csv");
    f << "verdict,binding\n" << verdict_name(v.verdict) << ',';
    for (std::size_t i = 0; i < v.binding.size(); ++i) f << (i ? " " : "") << v.binding[i];
    f << '\n';
  }
  return kExitOk;
}

int cmd_lyapunov(const Scenario& s, std::ostream& log) {
  const auto v = classify(s.params);
  log << "verdict: " << verdict_name(v.verdict) << '\n';
  lyapunov::SearchOptions o;
  o.samples = s.lyap_samples;
  o.pilot_samples = s.lyap_pilot;
  o.seed = s.seed;
  o.threads = s.threads;
  const auto res = lyapunov::find_consts(s.params, o);
  const auto lat = lyapunov::TypeLattice::for_params(s.params);
  const auto& c = res.found ? res.consts : res.best;
  {
    auto f = open_out(s, "lyapunov.csv");
    f << "found,form,r,d,beta,alpha,eps,n_o,xi,p,samples,max_ratio,tried\n";
    f << (res.found ? 1 : 0) << ',' << (lat.form() == lyapunov::Form::W ? "W" : "W'") << ',' << fmt(c.r) << ','
      << fmt(c.d) << ',' << fmt(c.beta) << ',' << fmt(c.alpha) << ',' << fmt(c.eps) << ',' << fmt(c.n_o) << ','
      << fmt(c.xi) << ',' << fmt(c.p) << ',' << res.certificate.samples << ','
      << fmt(res.found ? res.certificate.max_ratio : res.best_ratio) << ',' << res.tried << '\n';
  }
  // Worst sampled state: the certified one, or a fresh probe at the best tuple.
  lyapunov::Certificate worst = res.certificate;
  if (!res.found && res.tried > 0) {
    auto probe = res.best;
    probe.xi = 0;
    worst = lyapunov::certify_drift(lat, probe, s.lyap_samples, s.seed, s.threads);
  }
  if (!worst.worst.empty()) {
    auto f = open_out(s, "worst_state.csv");
    f << "type,count\n";
    for (int t = 0; t < lat.size(); ++t)
      if (worst.worst[static_cast<std::size_t>(t)] > 0)
        f << lat.name(t) << ',' << worst.worst[static_cast<std::size_t>(t)] << '\n';
  }
  if (!res.found) {
    log << "certification failed: " << res.reason << '\n';
    if (res.tried > 0)
      log << "  best max drift/n " << fmt(res.best_ratio) << "; worst state class "
          << lyapunov::sample_class_name(worst.worst_class) << " has drift/n " << fmt(worst.max_ratio) << '\n';
    return kExitCertification;
  }
  log << "certified with " << res.certificate.samples << " samples, n in [" << fmt(c.n_o) << ", " << fmt(32 * c.n_o)
      << "]\n";
  log << "  r=" << fmt(c.r) << " d=" << fmt(c.d) << " beta=" << fmt(c.beta) << " alpha=" << fmt(c.alpha)
      << " eps=" << fmt(c.eps) << " p=" << fmt(c.p) << '\n';
  log << "  xi=" << fmt(c.xi) << " max drift/n=" << fmt(res.certificate.max_ratio) << '\n';
  return kExitOk;
}

int cmd_sweep(const Scenario& s, std::ostream& log) {
  if (!s.sweep) {
    log << "sweep: the config has no sweep section\n";
    return kExitUsage;
  }
  const auto seeds = replication_seeds(s.seed, s.replications);
  auto f = open_out(s, "sweep.csv");
  f << "value,verdict,growth_slope,mean_n\n";
  for (const auto& v : s.sweep->values) {
    const auto p = apply_sweep(s.params, s.sweep->param, v);
    const auto verdict = classify(p);
    const auto rep = replicate(p, run_options(s), seeds, s.threads);
    std::vector<double> slope, mean;
    for (const auto& r : rep.runs) {
      slope.push_back(r.growth_slope);
      mean.push_back(r.mean_n);
    }
    const std::string row = join({format_rational(v), verdict_name(verdict.verdict), fmt(median(slope)),
                                  fmt(median(mean))});
    f << row << '\n';
    log << row << '\n';
  }
  return kExitOk;
}

int cmd_watched(const Scenario& s, std::ostream& log) {
  const int K = s.params.K;
  const double lambda = s.params.lambda_total();
  const auto res = run_watched(K, lambda, s.horizon, s.seed);
  const auto z = sample_top_layer_z(K, s.watched_n, s.watched_z_samples, s.seed);
  std::map<std::int64_t, std::int64_t> hist;
  for (auto v : z) ++hist[v];
  double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  {
    auto f = open_out(s, "z_hist.csv");
    f << "z,count\n";
    for (const auto& [v, c] : hist) f << v << ',' << c << '\n';
  }
  {
    auto f = open_out(s, "watched_path.csv");
    f << "t,n,k\n";
    for (const auto& w : res.path) f << fmt(w.t) << ',' << w.n << ',' << w.k << '\n';
  }
  {
    auto f = open_out(s, "recurrence.csv");
    f << "window_start,window_end,low_visits,max_n,mean_n\n";
    for (const auto& r : res.recurrence)
      f << fmt(r.window_start) << ',' << fmt(r.window_end) << ',' << r.low_visits << ',' << r.max_n << ','
        << fmt(r.mean_n) << '\n';
  }
  log << "Z samples " << z.size() << ": mean " << fmt(mean) << " (expected " << K - 1 << "), P(Z=0) "
      << fmt(static_cast<double>(hist[0]) / static_cast<double>(z.size())) << '\n';
  log << "path: " << res.arrivals << " arrivals, " << res.fast_phases << " fast phases\n";
  return kExitOk;
}

}  // namespace swarmstab
