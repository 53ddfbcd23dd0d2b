#pragma once

#include "swarmstab/coding.hpp"
#include "swarmstab/count_state.hpp"
#include "swarmstab/model.hpp"
#include "swarmstab/params.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace swarmstab::lyapunov {

struct LyapConsts {
  double r = 0.1;
  double d = 2.0;
  double beta = 0.1;
  double alpha = 0.9;
  double eps = 0.1;
  double n_o = 100.0;
  double xi = 0.0;  // certified slope, filled in by certification
  double p = 1.0;   // weight of the help term in W' (slow departure regime)
};

// Three-piece penalty: linear 2d + 1/(2 beta) - x up to 2d, a quadratic that
// flattens out by 2d + 1/beta, zero afterwards.
double phi(double x, double d, double beta);
double phi_prime(double x, double d, double beta);
// 3d + 1/beta, bounds phi and its support.
double m_phi(const LyapConsts& c);

// Which Lyapunov function fits the parameters: W when peer seeds leave faster
// than they upload (mu < gamma), W' otherwise.
enum class Form { W, WPrime };

struct IndexedTransition {
  int from = -1;  // -1 for an arrival
  int to = -1;    // -1 for a departure
  double rate = 0.0;
};

using TypeCounts = std::vector<std::int64_t>;

// The finite type set with its containment order and generator. Uncoded
// types are piece sets indexed by bit mask; coded types are the subspaces of
// F_2^K for K <= 3.
class TypeLattice {
 public:
  static TypeLattice uncoded(const SwarmParams& p);
  static TypeLattice coded(const SwarmParams& p);
  static TypeLattice for_params(const SwarmParams& p);

  const SwarmParams& params() const { return params_; }
  int K() const { return params_.K; }
  int size() const { return static_cast<int>(rank_.size()); }
  int rank(int t) const { return rank_[static_cast<std::size_t>(t)]; }
  bool leq(int a, int b) const { return leq_[static_cast<std::size_t>(a) * rank_.size() + static_cast<std::size_t>(b)]; }
  int full() const { return full_; }
  bool allowed(int t) const { return t != full_ || !params_.gamma.is_inf(); }
  const std::string& name(int t) const { return names_[static_cast<std::size_t>(t)]; }
  Form form() const { return form_; }
  // Multiplier in front of the help sum in H_C.
  double help_scale() const { return help_scale_; }
  double rho() const { return rho_; }

  std::vector<IndexedTransition> transitions(const TypeCounts& x) const;

  TypeCounts from_state(const CountState& x) const;  // uncoded only
  CountState to_state(const TypeCounts& x) const;    // uncoded only

 private:
  TypeLattice() = default;
  SwarmParams params_;
  bool coded_ = false;
  Form form_ = Form::W;
  double help_scale_ = 1.0;
  double rho_ = 0.0;
  int full_ = 0;
  std::vector<int> rank_;
  std::vector<char> leq_;
  std::vector<std::string> names_;
  // Coded generator tables.
  std::vector<coding::Subspace> spaces_;
  // upgrade_[a * size + b]: targets and probabilities when type b uploads a
  // uniform combination to type a; index size*size is the fixed seed.
  std::vector<std::vector<std::pair<int, double>>> upgrade_;
  std::vector<std::pair<int, double>> arrivals_;
};

struct Aggregates {
  std::vector<double> E;   // peers that are or can become type C
  std::vector<double> H;   // weighted help available to type C
  std::vector<double> Hp;  // H' (unit-free version used by W')
};

Aggregates aggregates(const TypeLattice& lat, const TypeCounts& x);
Aggregates aggregates(const CountState& x, const SwarmParams& p);  // indexed by mask

// W requires mu < gamma, W' requires gamma <= mu; both throw otherwise.
double W(const TypeLattice& lat, const TypeCounts& x, const LyapConsts& c);
double W_prime(const TypeLattice& lat, const TypeCounts& x, const LyapConsts& c);
double W(const CountState& x, const SwarmParams& p, const LyapConsts& c);
double W_prime(const CountState& x, const SwarmParams& p, const LyapConsts& c);
// W or W' according to lat.form().
double lyap(const TypeLattice& lat, const TypeCounts& x, const LyapConsts& c);

// Exact generator drift of lyap(), summed from per-transition increments.
double drift(const TypeLattice& lat, const TypeCounts& x, const LyapConsts& c);
// First-order approximation: sum r^|C| [E_C Q(E_C) + a E_C Q(phi(H_C))]
// (+ r^K n Q(n) for finite gamma), with a = alpha for W and p for W'.
double approx_drift_LW(const TypeLattice& lat, const TypeCounts& x, const LyapConsts& c);
double approx_drift_LW(const CountState& x, const SwarmParams& p, const LyapConsts& c);
// The unweighted term for one type C: E_C Q(E_C) + a E_C Q(phi(H_C)).
double approx_drift_T(const TypeLattice& lat, const TypeCounts& x, const LyapConsts& c, int C);
// sum of all departure-type rates, D_total.
double departure_total(const TypeLattice& lat, const TypeCounts& x);

// p = 2 max_C lambda(E_C) / (Us + lambda*(H_C)) over proper C.
double default_p(const TypeLattice& lat);

// Empty string when valid, otherwise the violated constraint.
std::string check_consts(const TypeLattice& lat, const LyapConsts& c);

enum class SampleClass { Dominant, TwoLarge, Uniform };
const char* sample_class_name(SampleClass k);

// Random state with n in [n_o, window * n_o].
TypeCounts sample_state(const TypeLattice& lat, const LyapConsts& c, SampleClass kind, std::uint64_t seed,
                        double window = 32.0);

struct Certificate {
  bool passed = false;
  int samples = 0;
  double max_ratio = 0.0;  // max of drift / n over the samples
  double xi = 0.0;         // slope that was tested
  TypeCounts worst;
  SampleClass worst_class = SampleClass::Dominant;
  std::array<double, 3> class_max{};
  std::string error;  // set when the constants were rejected
};

// Passes iff every sampled state has drift <= -xi * n (xi taken from c.xi;
// xi <= 0 means "strictly negative").
Certificate certify_drift(const TypeLattice& lat, const LyapConsts& c, int count, std::uint64_t seed,
                          int threads = 1);

struct SearchOptions {
  int pilot_samples = 600;
  int samples = 10000;
  std::uint64_t seed = 7;
  int threads = 1;
};

struct SearchResult {
  bool found = false;
  LyapConsts consts;
  Certificate certificate;
  int tried = 0;
  // Best (lowest) pilot max ratio seen and its constants, for failure reports.
  double best_ratio = 0.0;
  LyapConsts best;
  std::string reason;
};

// Staged ladder over (d, alpha, beta, r, eps, n_o); returns the first tuple
// whose full certification passes.
SearchResult find_consts(const SwarmParams& p, const SearchOptions& opts = {});

// Checks Q V(f) <= V'(f) Q f + (M/2) sum q (f' - f)^2 at x.
template <class F, class V, class VP>
bool composed_drift_bound_check(const CountState& x, const SwarmParams& p, F&& f, V&& v, VP&& vprime, double M,
                                double tol = 1e-9) {
  const double fx = f(x);
  double lhs = 0, qf = 0, sq = 0;
  for (const auto& t : neighbors(x, p).entries) {
    const double fy = f(t.apply(x));
    lhs += t.rate * (v(fy) - v(fx));
    qf += t.rate * (fy - fx);
    sq += t.rate * (fy - fx) * (fy - fx);
  }
  const double rhs = vprime(fx) * qf + M / 2 * sq;
  return lhs <= rhs + tol * (1 + std::abs(rhs));
}

}  // namespace swarmstab::lyapunov
