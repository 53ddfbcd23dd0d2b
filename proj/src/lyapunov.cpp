#include "swarmstab/lyapunov.hpp"

#include "swarmstab/rng.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

namespace swarmstab::lyapunov {

double phi(double x, double d, double beta) {
  if (x < 0) throw std::invalid_argument("phi is defined for x >= 0");
  if (x <= 2 * d) return 2 * d + 1 / (2 * beta) - x;
  const double end = 2 * d + 1 / beta;
  if (x <= end) return beta / 2 * (x - end) * (x - end);
  return 0.0;
}

double phi_prime(double x, double d, double beta) {
  if (x < 0) throw std::invalid_argument("phi is defined for x >= 0");
  if (x <= 2 * d) return -1.0;
  const double end = 2 * d + 1 / beta;
  if (x <= end) return beta * (x - end);
  return 0.0;
}

double m_phi(const LyapConsts& c) { return 3 * c.d + 1 / c.beta; }

namespace {

constexpr int kMaxUncodedK = 8;

bool mu_below_gamma(const SwarmParams& p, double factor) {
  if (p.gamma.is_inf()) return true;
  return factor * p.mu.value() < p.gamma.value();
}

}  // namespace

TypeLattice TypeLattice::uncoded(const SwarmParams& p) {
  p.validate();
  if (p.coded) throw std::invalid_argument("uncoded lattice given coded params");
  if (p.K > kMaxUncodedK) throw std::invalid_argument("Lyapunov lattice supports K <= 8");
  TypeLattice L;
  L.params_ = p;
  const int T = 1 << p.K;
  L.full_ = T - 1;
  L.rho_ = p.rho();
  L.form_ = mu_below_gamma(p, 1.0) ? Form::W : Form::WPrime;
  L.help_scale_ = L.form_ == Form::W ? 1.0 / (1.0 - L.rho_) : 1.0;
  for (int t = 0; t < T; ++t) {
    L.rank_.push_back(std::popcount(static_cast<unsigned>(t)));
    L.names_.push_back(PieceSet::from_mask(p.K, static_cast<std::uint64_t>(t)).str());
  }
  L.leq_.resize(static_cast<std::size_t>(T) * static_cast<std::size_t>(T));
  for (int a = 0; a < T; ++a)
    for (int b = 0; b < T; ++b) L.leq_[static_cast<std::size_t>(a) * T + static_cast<std::size_t>(b)] = (a & ~b) == 0;
  return L;
}

TypeLattice TypeLattice::coded(const SwarmParams& p) {
  coding::validate_coded(p);
  if (!p.coded) throw std::invalid_argument("coded lattice needs coded params");
  if (p.q != 2 || p.K > 3) throw std::invalid_argument("coded Lyapunov lattice supports q = 2, K <= 3 only");
  TypeLattice L;
  L.params_ = p;
  L.coded_ = true;
  const double frac = 1.0 - 1.0 / p.q;
  L.rho_ = p.rho();
  L.form_ = mu_below_gamma(p, frac) ? Form::W : Form::WPrime;
  L.help_scale_ = L.form_ == Form::W ? frac / (1.0 - frac * L.rho_) : 1.0;
  L.spaces_ = coding::enumerate_subspaces(p.q, p.K);
  const int T = static_cast<int>(L.spaces_.size());
  auto index_of = [&](const coding::Subspace& s) {
    return static_cast<int>(std::find(L.spaces_.begin(), L.spaces_.end(), s) - L.spaces_.begin());
  };
  L.full_ = index_of(coding::Subspace::full(p.q, p.K));
  L.leq_.resize(static_cast<std::size_t>(T) * static_cast<std::size_t>(T));
  for (int a = 0; a < T; ++a) {
    const auto& s = L.spaces_[static_cast<std::size_t>(a)];
    L.rank_.push_back(s.dim());
    std::string nm = "<";
    for (std::size_t i = 0; i < s.basis().size(); ++i) {
      if (i) nm += ' ';
      for (auto e : s.basis()[i]) nm += static_cast<char>('0' + e);
    }
    L.names_.push_back(nm + ">");
    for (int b = 0; b < T; ++b)
      L.leq_[static_cast<std::size_t>(a) * T + static_cast<std::size_t>(b)] =
          s.is_subspace_of(L.spaces_[static_cast<std::size_t>(b)]);
  }
  const auto all = coding::enumerate_vectors(p.q, p.K);
  // Uploads: a uniform combination from B is a uniform element of B.
  L.upgrade_.resize(static_cast<std::size_t>(T) * T + static_cast<std::size_t>(T));
  for (int a = 0; a < T; ++a) {
    const auto& A = L.spaces_[static_cast<std::size_t>(a)];
    auto fill = [&](std::vector<std::pair<int, double>>& out, const std::vector<coding::CodingVector>& vs) {
      std::map<int, double> acc;
      for (const auto& v : vs) {
        auto [s, grew] = A.insert_vector(v);
        if (grew) acc[index_of(s)] += 1.0 / static_cast<double>(vs.size());
      }
      out.assign(acc.begin(), acc.end());
    };
    for (int b = 0; b < T; ++b) {
      std::vector<coding::CodingVector> members;
      for (const auto& v : all)
        if (L.spaces_[static_cast<std::size_t>(b)].contains(v)) members.push_back(v);
      fill(L.upgrade_[static_cast<std::size_t>(a) * T + static_cast<std::size_t>(b)], members);
    }
    fill(L.upgrade_[static_cast<std::size_t>(T) * T + static_cast<std::size_t>(a)], all);
  }
  // Arrival distribution over subspaces.
  std::map<int, double> arr;
  for (const auto& a : p.merged_arrivals()) arr[index_of(coding::Subspace::of_pieces(p.q, a.type))] += a.rate.value();
  for (const auto& a : p.coded_arrivals) {
    if (a.rate.is_zero()) continue;
    std::vector<coding::CodingVector> base;
    for (const auto& v : a.vectors) base.emplace_back(v.begin(), v.end());
    std::vector<std::pair<coding::Subspace, double>> dist{{coding::Subspace::span(p.q, p.K, base), 1.0}};
    for (int j = 0; j < a.uniform_vectors; ++j) {
      std::vector<std::pair<coding::Subspace, double>> next;
      for (const auto& [s, w] : dist)
        for (const auto& v : all) next.emplace_back(s.insert_vector(v).first, w / static_cast<double>(all.size()));
      dist = std::move(next);
    }
    for (const auto& [s, w] : dist) arr[index_of(s)] += w * a.rate.value();
  }
  L.arrivals_.assign(arr.begin(), arr.end());
  return L;
}

TypeLattice TypeLattice::for_params(const SwarmParams& p) { return p.coded ? coded(p) : uncoded(p); }

TypeCounts TypeLattice::from_state(const CountState& x) const {
  if (coded_) throw std::logic_error("from_state is for uncoded lattices");
  TypeCounts c(static_cast<std::size_t>(size()), 0);
  for (const auto& [C, v] : x.counts()) c[C.mask()] = v;
  return c;
}

CountState TypeLattice::to_state(const TypeCounts& x) const {
  if (coded_) throw std::logic_error("to_state is for uncoded lattices");
  CountState s(K());
  for (int t = 0; t < size(); ++t)
    if (x[static_cast<std::size_t>(t)] > 0)
      s.set(PieceSet::from_mask(K(), static_cast<std::uint64_t>(t)), x[static_cast<std::size_t>(t)]);
  return s;
}

std::vector<IndexedTransition> TypeLattice::transitions(const TypeCounts& x) const {
  std::vector<IndexedTransition> out;
  if (!coded_) {
    for (const auto& t : neighbors(to_state(x), params_).entries) {
      IndexedTransition it;
      it.rate = t.rate;
      switch (t.kind) {
        case TransitionKind::Arrival: it.to = static_cast<int>(t.to.mask()); break;
        case TransitionKind::Upgrade:
          it.from = static_cast<int>(t.from.mask());
          it.to = static_cast<int>(t.to.mask());
          break;
        default: it.from = static_cast<int>(t.from.mask()); break;
      }
      out.push_back(it);
    }
    return out;
  }
  const int T = size();
  const bool ginf = params_.gamma.is_inf();
  for (const auto& [t, r] : arrivals_) {
    if (t == full_ && ginf) continue;  // arrives complete and leaves at once
    out.push_back({-1, t, r});
  }
  std::int64_t n = 0;
  for (auto v : x) n += v;
  if (n == 0) return out;
  const double mu = params_.mu.value(), us = params_.Us.value();
  for (int a = 0; a < T; ++a) {
    const auto xa = x[static_cast<std::size_t>(a)];
    if (xa == 0) continue;
    if (a == full_) {
      if (!ginf) out.push_back({a, -1, params_.gamma.value() * static_cast<double>(xa)});
      continue;
    }
    const double share = static_cast<double>(xa) / static_cast<double>(n);
    std::map<int, double> acc;
    for (int b = 0; b < T; ++b) {
      const auto xb = x[static_cast<std::size_t>(b)];
      if (xb == 0) continue;
      for (const auto& [to, pr] : upgrade_[static_cast<std::size_t>(a) * T + static_cast<std::size_t>(b)])
        acc[to] += share * mu * static_cast<double>(xb) * pr;
    }
    if (us > 0)
      for (const auto& [to, pr] : upgrade_[static_cast<std::size_t>(T) * T + static_cast<std::size_t>(a)])
        acc[to] += share * us * pr;
    for (const auto& [to, r] : acc) out.push_back({a, (to == full_ && ginf) ? -1 : to, r});
  }
  return out;
}

namespace {

double weight_h(const TypeLattice& L, int t) {
  return L.form() == Form::W ? L.K() - L.rank(t) + L.rho() : L.K() + 1.0 - L.rank(t);
}

double weight_w(const TypeLattice& L, int t) { return L.K() - L.rank(t) + L.rho(); }

void require_form(const TypeLattice& L, Form f) {
  if (L.form() != f)
    throw std::domain_error(f == Form::W ? "W needs mu < gamma" : "W' needs gamma <= mu");
}

double help_coef(const TypeLattice& L, const LyapConsts& c) { return L.form() == Form::W ? c.alpha : c.p; }

// E and the H used by the lattice's form.
void eh(const TypeLattice& L, const TypeCounts& x, std::vector<double>& E, std::vector<double>& H) {
  const int T = L.size();
  E.assign(static_cast<std::size_t>(T), 0.0);
  H.assign(static_cast<std::size_t>(T), 0.0);
  const double scale = L.help_scale();
  for (int t = 0; t < T; ++t) {
    const auto v = static_cast<double>(x[static_cast<std::size_t>(t)]);
    if (v == 0) continue;
    const double w = scale * weight_h(L, t) * v;
    for (int C = 0; C < T; ++C) {
      if (L.leq(t, C))
        E[static_cast<std::size_t>(C)] += v;
      else
        H[static_cast<std::size_t>(C)] += w;
    }
  }
}

double total(const TypeCounts& x) {
  double n = 0;
  for (auto v : x) n += static_cast<double>(v);
  return n;
}

double lyap_impl(const TypeLattice& L, const TypeCounts& x, const LyapConsts& c) {
  std::vector<double> E, H;
  eh(L, x, E, H);
  const double a = help_coef(L, c);
  long double w = 0;
  for (int C = 0; C < L.size(); ++C) {
    const double rp = std::pow(c.r, L.rank(C));
    if (C == L.full()) {
      if (!L.params().gamma.is_inf()) {
        const double n = total(x);
        w += rp * 0.5L * n * n;
      }
      continue;
    }
    const double e = E[static_cast<std::size_t>(C)];
    w += rp * (0.5L * e * e + static_cast<long double>(a) * e * phi(H[static_cast<std::size_t>(C)], c.d, c.beta));
  }
  return static_cast<double>(w);
}

}  // namespace

Aggregates aggregates(const TypeLattice& L, const TypeCounts& x) {
  Aggregates ag;
  const int T = L.size();
  ag.E.assign(static_cast<std::size_t>(T), 0.0);
  ag.H.assign(static_cast<std::size_t>(T), 0.0);
  ag.Hp.assign(static_cast<std::size_t>(T), 0.0);
  const double frac = L.params().coded ? 1.0 - 1.0 / L.params().q : 1.0;
  const double rho = L.rho();
  // H is only meaningful when mu (or mu~) < gamma.
  const bool has_h = L.params().gamma.is_inf() || frac * L.params().mu.value() < L.params().gamma.value();
  const double scale = has_h ? frac / (1.0 - frac * rho) : std::numeric_limits<double>::quiet_NaN();
  for (int t = 0; t < T; ++t) {
    const auto v = static_cast<double>(x[static_cast<std::size_t>(t)]);
    if (v == 0) continue;
    for (int C = 0; C < T; ++C) {
      if (L.leq(t, C)) {
        ag.E[static_cast<std::size_t>(C)] += v;
      } else {
        ag.H[static_cast<std::size_t>(C)] += scale * weight_w(L, t) * v;
        ag.Hp[static_cast<std::size_t>(C)] += (L.K() + 1.0 - L.rank(t)) * v;
      }
    }
  }
  return ag;
}

Aggregates aggregates(const CountState& x, const SwarmParams& p) {
  auto L = TypeLattice::uncoded(p);
  return aggregates(L, L.from_state(x));
}

double W(const TypeLattice& L, const TypeCounts& x, const LyapConsts& c) {
  require_form(L, Form::W);
  return lyap_impl(L, x, c);
}

double W_prime(const TypeLattice& L, const TypeCounts& x, const LyapConsts& c) {
  require_form(L, Form::WPrime);
  return lyap_impl(L, x, c);
}

double W(const CountState& x, const SwarmParams& p, const LyapConsts& c) {
  auto L = TypeLattice::uncoded(p);
  return W(L, L.from_state(x), c);
}

double W_prime(const CountState& x, const SwarmParams& p, const LyapConsts& c) {
  auto L = TypeLattice::uncoded(p);
  return W_prime(L, L.from_state(x), c);
}

double lyap(const TypeLattice& L, const TypeCounts& x, const LyapConsts& c) { return lyap_impl(L, x, c); }

double drift(const TypeLattice& L, const TypeCounts& x, const LyapConsts& c) {
  std::vector<double> E, H;
  eh(L, x, E, H);
  const auto trs = L.transitions(x);
  const double a = help_coef(L, c);
  const double scale = L.help_scale();
  const double n = total(x);
  const bool ginf = L.params().gamma.is_inf();
  long double q = 0;
  for (int C = 0; C < L.size(); ++C) {
    const double rp = std::pow(c.r, L.rank(C));
    if (C == L.full()) {
      if (ginf) continue;
      long double s = 0;
      for (const auto& t : trs) {
        const int dn = (t.from < 0) - (t.to < 0);
        s += t.rate * dn * (n + 0.5L * dn);
      }
      q += rp * s;
      continue;
    }
    const double e = E[static_cast<std::size_t>(C)], h = H[static_cast<std::size_t>(C)];
    const double ph = phi(h, c.d, c.beta);
    long double s = 0;
    for (const auto& t : trs) {
      int de = 0;
      double dh = 0;
      if (t.to >= 0) {
        if (L.leq(t.to, C))
          de += 1;
        else
          dh += scale * weight_h(L, t.to);
      }
      if (t.from >= 0) {
        if (L.leq(t.from, C))
          de -= 1;
        else
          dh -= scale * weight_h(L, t.from);
      }
      if (de == 0 && dh == 0) continue;
      const double ph2 = phi(std::max(0.0, h + dh), c.d, c.beta);
      s += t.rate * (de * (e + 0.5L * de) + static_cast<long double>(a) * (e * (ph2 - ph) + de * ph2));
    }
    q += rp * s;
  }
  return static_cast<double>(q);
}

namespace {

long double approx_term(const TypeLattice& L, const std::vector<IndexedTransition>& trs, const std::vector<double>& E,
                        const std::vector<double>& H, double n, const LyapConsts& c, int C) {
  if (C == L.full()) {
    if (L.params().gamma.is_inf()) return 0;
    long double qn = 0;
    for (const auto& t : trs) qn += t.rate * ((t.from < 0) - (t.to < 0));
    return n * qn;
  }
  const double a = help_coef(L, c);
  const double scale = L.help_scale();
  const double e = E[static_cast<std::size_t>(C)], h = H[static_cast<std::size_t>(C)];
  const double ph = phi(h, c.d, c.beta);
  long double qe = 0, qphi = 0;
  for (const auto& t : trs) {
    int de = 0;
    double dh = 0;
    if (t.to >= 0) {
      if (L.leq(t.to, C))
        de += 1;
      else
        dh += scale * weight_h(L, t.to);
    }
    if (t.from >= 0) {
      if (L.leq(t.from, C))
        de -= 1;
      else
        dh -= scale * weight_h(L, t.from);
    }
    qe += t.rate * de;
    if (dh != 0) qphi += t.rate * (phi(std::max(0.0, h + dh), c.d, c.beta) - ph);
  }
  return e * qe + static_cast<long double>(a) * e * qphi;
}

}  // namespace

double approx_drift_LW(const TypeLattice& L, const TypeCounts& x, const LyapConsts& c) {
  std::vector<double> E, H;
  eh(L, x, E, H);
  const auto trs = L.transitions(x);
  const double n = total(x);
  long double lw = 0;
  for (int C = 0; C < L.size(); ++C) lw += std::pow(c.r, L.rank(C)) * approx_term(L, trs, E, H, n, c, C);
  return static_cast<double>(lw);
}

double approx_drift_T(const TypeLattice& L, const TypeCounts& x, const LyapConsts& c, int C) {
  std::vector<double> E, H;
  eh(L, x, E, H);
  return static_cast<double>(approx_term(L, L.transitions(x), E, H, total(x), c, C));
}

double approx_drift_LW(const CountState& x, const SwarmParams& p, const LyapConsts& c) {
  auto L = TypeLattice::uncoded(p);
  return approx_drift_LW(L, L.from_state(x), c);
}

double departure_total(const TypeLattice& L, const TypeCounts& x) {
  double s = 0;
  for (const auto& t : L.transitions(x))
    if (t.from >= 0) s += t.rate;
  return s;
}

namespace {

std::vector<double> type_lambda(const TypeLattice& L) {
  std::vector<double> lam(static_cast<std::size_t>(L.size()), 0.0);
  TypeCounts empty(static_cast<std::size_t>(L.size()), 0);
  for (const auto& t : L.transitions(empty))
    if (t.from < 0 && t.to >= 0) lam[static_cast<std::size_t>(t.to)] += t.rate;
  return lam;
}

// lambda(E_C) - p (Us + lambda*(H_C)) for every proper C; returns the max.
double worst_p_gap(const TypeLattice& L, double p) {
  const auto lam = type_lambda(L);
  double worst = -std::numeric_limits<double>::infinity();
  for (int C = 0; C < L.size(); ++C) {
    if (C == L.full()) continue;
    double e = 0, hs = 0;
    for (int t = 0; t < L.size(); ++t) {
      if (L.leq(t, C))
        e += lam[static_cast<std::size_t>(t)];
      else
        hs += lam[static_cast<std::size_t>(t)] * weight_w(L, t);
    }
    worst = std::max(worst, e - p * (L.params().Us.value() + hs));
  }
  return worst;
}

}  // namespace

double default_p(const TypeLattice& L) {
  const auto lam = type_lambda(L);
  double best = 0;
  for (int C = 0; C < L.size(); ++C) {
    if (C == L.full()) continue;
    double e = 0, hs = 0;
    for (int t = 0; t < L.size(); ++t) {
      if (L.leq(t, C))
        e += lam[static_cast<std::size_t>(t)];
      else
        hs += lam[static_cast<std::size_t>(t)] * weight_w(L, t);
    }
    const double den = L.params().Us.value() + hs;
    if (den <= 0) return std::numeric_limits<double>::infinity();
    best = std::max(best, e / den);
  }
  return best > 0 ? 2 * best : 1.0;
}

std::string check_consts(const TypeLattice& L, const LyapConsts& c) {
  if (!(c.r > 0 && c.r < 0.5)) return "r must lie in (0, 1/2)";
  if (!(c.d > 1)) return "d must exceed 1";
  if (!(c.beta > 0 && c.beta < 0.5)) return "beta must lie in (0, 1/2)";
  if (!(c.eps > 0 && c.eps < 0.5)) return "eps must lie in (0, 1/2)";
  if (!(c.n_o >= 1)) return "n_o must be at least 1";
  if (!(m_phi(c) > 1)) return "M_phi must exceed 1";
  if (L.form() == Form::W) {
    if (!(c.alpha > 0.5 && c.alpha < 1)) return "alpha must lie in (1/2, 1)";
    const double jump = L.help_scale() * (L.K() + L.rho());
    if (c.beta * jump * jump > 1 / c.alpha - 1 + 1e-15) return "beta too large for alpha";
  } else {
    if (!(c.p > 0) || !std::isfinite(c.p)) return "p must be positive and finite";
    if (!(worst_p_gap(L, c.p) < 0)) return "p does not dominate the arrival rates";
  }
  return {};
}

const char* sample_class_name(SampleClass k) {
  switch (k) {
    case SampleClass::Dominant: return "dominant";
    case SampleClass::TwoLarge: return "two-large";
    case SampleClass::Uniform: return "uniform";
  }
  return "?";
}

namespace {

// Spreads m peers over the candidate types with random weights.
void spread(TypeCounts& x, std::int64_t m, const std::vector<int>& types, Rng& rng) {
  if (m <= 0 || types.empty()) return;
  if (rng.bernoulli(0.5)) {
    x[static_cast<std::size_t>(types[rng.below(types.size())])] += m;
    return;
  }
  std::vector<double> w(types.size());
  double s = 0;
  for (auto& v : w) s += (v = rng.exponential(1.0));
  std::int64_t used = 0;
  for (std::size_t i = 0; i < types.size(); ++i) {
    auto k = static_cast<std::int64_t>(std::floor(static_cast<double>(m) * w[i] / s));
    x[static_cast<std::size_t>(types[i])] += k;
    used += k;
  }
  for (; used < m; ++used) x[static_cast<std::size_t>(types[rng.below(types.size())])] += 1;
}

}  // namespace

TypeCounts sample_state(const TypeLattice& L, const LyapConsts& c, SampleClass kind, std::uint64_t seed,
                        double window) {
  Rng rng(seed);
  TypeCounts x(static_cast<std::size_t>(L.size()), 0);
  std::vector<int> allowed;
  for (int t = 0; t < L.size(); ++t)
    if (L.allowed(t)) allowed.push_back(t);
  const double lo = std::log(c.n_o), hi = std::log(c.n_o * window);
  const auto n = static_cast<std::int64_t>(std::ceil(std::exp(lo + (hi - lo) * rng.uniform())));
  switch (kind) {
    case SampleClass::Dominant: {
      std::vector<int> proper;
      for (int t : allowed)
        if (t != L.full()) proper.push_back(t);
      const int S = proper[rng.below(proper.size())];
      // Minority mass log-uniform in [0, eps n).
      const double cap = c.eps * static_cast<double>(n);
      auto m = static_cast<std::int64_t>(std::floor(std::exp(rng.uniform() * std::log1p(cap)) - 1));
      m = std::clamp<std::int64_t>(m, 0, std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(cap)) - 1));
      std::vector<int> others;
      for (int t : allowed)
        if (t != S) others.push_back(t);
      spread(x, m, others, rng);
      x[static_cast<std::size_t>(S)] += n - m;
      break;
    }
    case SampleClass::TwoLarge: {
      const double floor_frac = c.eps / std::pow(2.0, L.K());
      auto draw_frac = [&]() { return floor_frac * std::exp(rng.uniform() * std::log(0.5 / floor_frac)); };
      int c1 = allowed[rng.below(allowed.size())];
      int c2 = allowed[rng.below(allowed.size())];
      if (c1 == c2 && c1 != L.full() && allowed.size() > 1)
        while (c2 == c1) c2 = allowed[rng.below(allowed.size())];
      auto k1 = static_cast<std::int64_t>(std::floor(draw_frac() * static_cast<double>(n))) + 1;
      auto k2 = c1 == c2 ? 0 : static_cast<std::int64_t>(std::floor(draw_frac() * static_cast<double>(n))) + 1;
      k1 = std::min(k1, n);
      k2 = std::min(k2, n - k1);
      x[static_cast<std::size_t>(c1)] += k1;
      x[static_cast<std::size_t>(c2)] += k2;
      spread(x, n - k1 - k2, allowed, rng);
      break;
    }
    case SampleClass::Uniform: {
      std::vector<double> w(allowed.size());
      double s = 0;
      for (auto& v : w) s += (v = rng.exponential(1.0));
      std::int64_t used = 0;
      for (std::size_t i = 0; i < allowed.size(); ++i) {
        auto k = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * w[i] / s));
        x[static_cast<std::size_t>(allowed[i])] += k;
        used += k;
      }
      for (; used < n; ++used) x[static_cast<std::size_t>(allowed[rng.below(allowed.size())])] += 1;
      break;
    }
  }
  return x;
}

Certificate certify_drift(const TypeLattice& L, const LyapConsts& c, int count, std::uint64_t seed, int threads) {
  Certificate cert;
  cert.xi = c.xi;
  if (auto err = check_consts(L, c); !err.empty()) {
    cert.error = err;
    return cert;
  }
  if (count < 1) throw std::invalid_argument("need at least one sample");
  std::vector<double> ratio(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      int i = next++;
      if (i >= count) return;
      auto kind = static_cast<SampleClass>(i % 3);
      auto x = sample_state(L, c, kind, stream_seed(seed, static_cast<std::uint64_t>(i)));
      ratio[static_cast<std::size_t>(i)] = drift(L, x, c) / total(x);
    }
  };
  const int nt = std::max(1, std::min(threads, count));
  if (nt == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  cert.samples = count;
  cert.class_max.fill(-std::numeric_limits<double>::infinity());
  int worst = 0;
  for (int i = 0; i < count; ++i) {
    auto& cm = cert.class_max[static_cast<std::size_t>(i % 3)];
    cm = std::max(cm, ratio[static_cast<std::size_t>(i)]);
    if (ratio[static_cast<std::size_t>(i)] > ratio[static_cast<std::size_t>(worst)]) worst = i;
  }
  cert.max_ratio = ratio[static_cast<std::size_t>(worst)];
  cert.worst_class = static_cast<SampleClass>(worst % 3);
  cert.worst = sample_state(L, c, cert.worst_class, stream_seed(seed, static_cast<std::uint64_t>(worst)));
  cert.passed = c.xi > 0 ? cert.max_ratio <= -c.xi : cert.max_ratio < 0;
  return cert;
}

SearchResult find_consts(const SwarmParams& p, const SearchOptions& opts) {
  SearchResult res;
  res.best_ratio = std::numeric_limits<double>::infinity();
  const auto L = TypeLattice::for_params(p);
  const double jump = L.help_scale() * (L.K() + L.rho());
  const double pw = L.form() == Form::WPrime ? default_p(L) : 1.0;
  if (L.form() == Form::WPrime && !std::isfinite(pw)) {
    res.reason = "some piece can never enter; no W' weight exists";
    return res;
  }
  const double d0 = std::floor(L.form() == Form::W ? jump : L.K() + 1.0) + 1;
  const std::vector<double> alphas = L.form() == Form::W ? std::vector<double>{0.75, 0.9, 0.95, 0.99}
                                                          : std::vector<double>{0.75};
  for (double dmul : {1.0, 2.0, 4.0}) {
    for (double alpha : alphas) {
      LyapConsts c;
      c.d = d0 * dmul;
      c.alpha = alpha;
      c.p = pw;
      c.beta = L.form() == Form::W ? std::min((1 / alpha - 1) / (jump * jump), 1 / (4 * jump))
                                   : 1 / (4.0 * (L.K() + 1));
      c.beta = std::min(c.beta, 0.49);
      const double M = m_phi(c);
      for (double rf : {0.5, 0.1, 0.01}) {
        c.r = std::min(0.49, rf / M);
        for (double ef : {0.5, 0.05}) {
          c.eps = std::min(0.49, ef * std::pow(c.r, L.K()) / M);
          for (double nmul : {10.0, 1000.0, 100000.0}) {
            c.n_o = std::ceil(nmul * std::pow(2.0, L.K()) * M / c.eps);
            if (c.n_o > 1e15) continue;
            ++res.tried;
            c.xi = 0;
            auto pilot = certify_drift(L, c, opts.pilot_samples, opts.seed + 1, opts.threads);
            if (!pilot.error.empty()) continue;
            if (pilot.max_ratio < res.best_ratio) {
              res.best_ratio = pilot.max_ratio;
              res.best = c;
            }
            if (!pilot.passed) continue;
            c.xi = -pilot.max_ratio / 2;
            auto full = certify_drift(L, c, opts.samples, opts.seed, opts.threads);
            if (full.passed) {
              res.found = true;
              res.consts = c;
              res.certificate = full;
              return res;
            }
          }
        }
      }
    }
  }
  res.reason = "no tuple on the ladder certified negative drift";
  return res;
}

}  // namespace swarmstab::lyapunov
