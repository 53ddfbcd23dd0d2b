#include "swarmstab/analyze.hpp"

#include "swarmstab/coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace swarmstab {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PositiveRecurrent: return "PositiveRecurrent";
    case Verdict::Transient: return "Transient";
    case Verdict::Borderline: return "Borderline";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

Rational delta_S(const SwarmParams& p, const PieceSet& S) {
  if (S.universe() != p.K) throw std::invalid_argument("set has wrong piece count");
  if (S.is_full()) throw std::invalid_argument("margin is defined for proper sets only");
  if (!(p.mu < p.gamma)) throw std::domain_error("margin needs mu < gamma");
  const Rational rho = p.rho_exact();
  Rational inside = 0, help = p.Us.exact();
  for (const auto& a : p.arrivals) {
    if (a.type.is_subset_of(S))
      inside += a.rate.exact();
    else
      help += a.rate.exact() * (Rational(p.K - a.type.size()) + rho);
  }
  return inside - help / (1 - rho);
}

StabilityVerdict classify(const SwarmParams& p) {
  if (p.coded) return classify_coded(p);
  p.validate();
  StabilityVerdict v;
  const PieceSet full = p.full_set();
  if (p.gamma <= p.mu) {
    // Peer seeds linger at least as long as they take to upload a piece, so
    // only a piece that can never enter the system stalls it.
    for (int k = 1; k <= p.K; ++k) {
      bool enters = !p.Us.is_zero();
      for (const auto& a : p.arrivals)
        if (!a.rate.is_zero() && a.type.contains(k)) enters = true;
      if (!enters) v.binding.push_back(k);
    }
    if (v.binding.empty()) {
      v.verdict = Verdict::PositiveRecurrent;
      v.reason = "gamma <= mu and every piece can enter";
    } else {
      v.verdict = Verdict::Transient;
      v.reason = "gamma <= mu and some piece can never enter (Us = 0, no arrival holds it)";
    }
    return v;
  }

  bool any_pos = false, any_zero = false;
  for (int k = 1; k <= p.K; ++k) {
    Margin m;
    m.S = full.without(k);
    m.piece = k;
    m.label = "F-{" + std::to_string(k) + "}";
    m.exact = delta_S(p, m.S);
    m.value = to_double(m.exact);
    any_pos |= m.exact > 0;
    any_zero |= m.exact == 0;
    v.margins.push_back(std::move(m));
  }
  if (any_pos) {
    v.verdict = Verdict::Transient;
    v.reason = "margin positive for some full-minus-one set";
    for (auto& m : v.margins)
      if (m.exact > 0) m.binding = true;
  } else if (any_zero) {
    v.verdict = Verdict::Borderline;
    v.reason = "largest margin is exactly zero";
    for (auto& m : v.margins)
      if (m.exact == 0) m.binding = true;
  } else {
    v.verdict = Verdict::PositiveRecurrent;
    v.reason = "every full-minus-one margin is negative";
    Rational best = v.margins.front().exact;
    for (const auto& m : v.margins) best = std::max(best, m.exact);
    for (auto& m : v.margins)
      if (m.exact == best) m.binding = true;
  }
  for (const auto& m : v.margins)
    if (m.binding) v.binding.push_back(m.piece);
  return v;
}

namespace {

Rational qpow(int q, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= q;
  return r;
}

// Distribution of dim after adding m uniform vectors of an N-dimensional space
// to a d0-dimensional subspace of it.
std::vector<Rational> rank_distribution(int q, int N, int d0, int m) {
  std::vector<Rational> P(static_cast<std::size_t>(N) + 1, 0);
  P[static_cast<std::size_t>(d0)] = 1;
  for (int step = 0; step < m; ++step) {
    std::vector<Rational> next(P.size(), 0);
    for (int d = 0; d <= N; ++d) {
      const auto& pd = P[static_cast<std::size_t>(d)];
      if (pd == 0) continue;
      if (d == N) {
        next[static_cast<std::size_t>(d)] += pd;
        continue;
      }
      Rational stay = 1 / qpow(q, N - d);
      next[static_cast<std::size_t>(d)] += pd * stay;
      next[static_cast<std::size_t>(d) + 1] += pd * (1 - stay);
    }
    P = std::move(next);
  }
  return P;
}

// One arrival stream seen through a hyperplane H: its contribution to
// sum_{V not in H} l_V (K - dim V + c) is rate*(total - [W0 in H] * inside).
struct CodedSource {
  Rational rate;
  coding::Subspace base;  // W0, the deterministic part of the subspace
  int uniform = 0;
};

struct Contribution {
  Rational total;   // rate * E[K - dim V + c]
  Rational inside;  // rate * E[(K - dim V + c) 1{V in H}] given W0 in H
};

Contribution contribution(const CodedSource& s, int q, int K, const Rational& c) {
  Contribution out;
  const int d0 = s.base.dim();
  auto full = rank_distribution(q, K, d0, s.uniform);
  for (int d = 0; d <= K; ++d) out.total += full[static_cast<std::size_t>(d)] * (Rational(K - d) + c);
  if (d0 <= K - 1) {
    auto in = rank_distribution(q, K - 1, d0, s.uniform);
    Rational e = 0;
    for (int d = 0; d < K; ++d) e += in[static_cast<std::size_t>(d)] * (Rational(K - d) + c);
    out.inside = e / qpow(q, s.uniform);
  }
  out.total *= s.rate;
  out.inside *= s.rate;
  return out;
}

// max over hyperplanes H of sum_{sources with W0 in H} weight: the best
// family of bases whose sum is still a proper subspace.
Rational best_hyperplane_mass(const std::vector<std::pair<coding::Subspace, Rational>>& groups, int q, int K) {
  if (groups.size() > 24) throw std::invalid_argument("too many distinct arrival subspaces to classify");
  Rational best = 0;
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rational remaining_total = 0;
  for (const auto& g : groups) remaining_total += g.second;
  std::vector<Rational> suffix(groups.size() + 1, 0);
  for (std::size_t i = groups.size(); i-- > 0;) suffix[i] = suffix[i + 1] + groups[i].second;

  auto dfs = [&](auto&& self, std::size_t i, const coding::Subspace& acc, const Rational& mass) -> void {
    if (mass + suffix[i] <= best) return;
    if (i == groups.size()) {
      best = std::max(best, mass);
      return;
    }
    auto with = acc.sum(groups[i].first);
    if (!with.is_full()) self(self, i + 1, with, mass + groups[i].second);
    self(self, i + 1, acc, mass);
  };
  dfs(dfs, 0, coding::Subspace(q, K), Rational(0));
  return best;
}

// min over hyperplanes H of sum_{V not in H} l_V (K - dim V + c).
Rational min_outside_mass(const std::vector<CodedSource>& sources, int q, int K, const Rational& c) {
  Rational total = 0;
  std::map<coding::Subspace, Rational> by_base;
  for (const auto& s : sources) {
    auto ctb = contribution(s, q, K, c);
    total += ctb.total;
    if (s.base.dim() <= K - 1 && ctb.inside > 0) by_base[s.base] += ctb.inside;
  }
  std::vector<std::pair<coding::Subspace, Rational>> groups(by_base.begin(), by_base.end());
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return total - best_hyperplane_mass(groups, q, K);
}

}  // namespace

StabilityVerdict classify_coded(const SwarmParams& p) {
  if (!p.coded) throw std::invalid_argument("classify_coded needs coded params");
  coding::validate_coded(p);
  const int q = p.q, K = p.K;

  std::vector<CodedSource> sources;
  bool spans_random = false;
  coding::Subspace span(q, K);
  for (const auto& a : p.merged_arrivals()) {
    CodedSource s{a.rate.exact(), coding::Subspace::of_pieces(q, a.type), 0};
    span = span.sum(s.base);
    sources.push_back(std::move(s));
  }
  for (const auto& a : p.coded_arrivals) {
    if (a.rate.is_zero()) continue;
    std::vector<coding::CodingVector> vs;
    for (const auto& v : a.vectors) vs.emplace_back(v.begin(), v.end());
    CodedSource s{a.rate.exact(), coding::Subspace::span(q, K, vs), a.uniform_vectors};
    span = span.sum(s.base);
    if (s.uniform > 0) spans_random = true;
    sources.push_back(std::move(s));
  }
  const bool spans = spans_random || span.is_full();

  const Rational lt = p.lambda_total_exact();
  const Rational rho = p.rho_exact();
  const Rational frac = 1 - Rational(1, q);  // 1 - 1/q
  const Rational rho_t = frac * rho;          // mu~/gamma
  const bool mu_lt_gamma = p.mu < p.gamma;
  const bool mut_lt_gamma = p.gamma.is_inf() || rho_t < 1;
  const Rational Us = p.Us.exact();

  StabilityVerdict v;
  bool transient = false, recurrent = false;

  if (mu_lt_gamma) {
    Margin m;
    m.label = "transience";
    Rational outside = min_outside_mass(sources, q, K, Rational(1));
    m.exact = lt - (Us + outside) / (1 - rho);
    m.value = to_double(m.exact);
    transient = m.exact > 0;
    m.binding = transient;
    v.margins.push_back(std::move(m));
  } else if (Us == 0 && !spans) {
    transient = true;
    v.reason = "gamma <= mu, Us = 0 and the arrival subspaces do not span";
  }

  if (!transient && mut_lt_gamma) {
    Margin m;
    m.label = "recurrence";
    const Rational c = Rational(q, q - 1);
    Rational outside = min_outside_mass(sources, q, K, c);
    m.exact = lt - (Us + outside) * frac / (1 - rho_t);
    m.value = to_double(m.exact);
    recurrent = m.exact < 0;
    m.binding = recurrent;
    v.margins.push_back(std::move(m));
  } else if (!transient && (Us > 0 || spans)) {
    recurrent = true;
    v.reason = "gamma <= mu~ and every direction can enter";
  }

  if (transient) {
    v.verdict = Verdict::Transient;
    if (v.reason.empty()) v.reason = "transience condition holds for some hyperplane";
  } else if (recurrent) {
    v.verdict = Verdict::PositiveRecurrent;
    if (v.reason.empty()) v.reason = "recurrence condition holds for every hyperplane";
  } else {
    v.verdict = Verdict::Unknown;
    v.reason = "between the coded transience and recurrence conditions";
  }
  return v;
}

double BranchingMoments::m_g(int size) const {
  if (!finite) return std::numeric_limits<double>::infinity();
  return (static_cast<double>(K - size) / (1 - xi) + rho) * s;
}

BranchingMoments branching_moments(int K, double mu, double gamma, double xi) {
  if (K < 1) throw std::invalid_argument("K must be positive");
  if (!(mu > 0) || !(mu < gamma)) throw std::invalid_argument("need 0 < mu < gamma");
  if (!(xi >= 0) || !(xi < 1)) throw std::invalid_argument("need 0 <= xi < 1");
  BranchingMoments b;
  b.K = K;
  b.xi = xi;
  b.rho = std::isinf(gamma) ? 0.0 : mu / gamma;
  const double a = (K - 1) / (1 - xi) + b.rho;
  const double denom = 1 - xi * a - b.rho;
  b.finite = denom > 0;
  if (!b.finite) {
    b.m_b = b.m_f = b.s = std::numeric_limits<double>::infinity();
    return b;
  }
  // Rank-one system: with s = xi m_b + m_f, m_b = 1 + a s and m_f = 1 + rho s.
  b.s = (1 + xi) / denom;
  b.m_b = 1 + a * b.s;
  b.m_f = 1 + b.rho * b.s;
  return b;
}

double kingman_bound(double alpha, double m1, double m2, double B, double eps) {
  if (!(B > 0)) throw std::invalid_argument("need B > 0");
  if (!(eps > alpha * m1)) throw std::invalid_argument("need eps > alpha * m1");
  return std::max(0.0, 1 - alpha * m2 / (2 * B * (eps - alpha * m1)));
}

double mginfty_bound(double lambda, double m, double B, double eps) {
  if (!(B >= 0)) throw std::invalid_argument("need B >= 0");
  if (!(eps > 0)) throw std::invalid_argument("need eps > 0");
  return std::min(1.0, std::exp(lambda * (m + 1)) * std::exp2(-B) / (1 - std::exp2(-eps)));
}

}  // namespace swarmstab
