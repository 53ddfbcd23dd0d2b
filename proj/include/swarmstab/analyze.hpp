#pragma once

#include "swarmstab/params.hpp"

#include <string>
#include <vector>

namespace swarmstab {

enum class Verdict { PositiveRecurrent, Transient, Borderline, Unknown };

const char* verdict_name(Verdict v);

struct Margin {
  std::string label;  // "F-{k}" style set name or the coded test name
  PieceSet S;         // uncoded only
  int piece = 0;      // k when S is the full set minus k
  Rational exact;
  double value = 0.0;
  bool binding = false;
};

struct StabilityVerdict {
  Verdict verdict = Verdict::Unknown;
  std::vector<Margin> margins;
  std::vector<int> binding;  // pieces
  std::string reason;
};

// Arrivals that can still become type S minus the guaranteed help rate for S:
//   sum_{C in S} l_C - [Us + sum_{C not in S} l_C (K - |C| + rho)] / (1 - rho)
// with rho = mu/gamma. Throws std::domain_error unless mu < gamma.
Rational delta_S(const SwarmParams& p, const PieceSet& S);

// Stability verdict for uncoded params (coded params are forwarded to
// classify_coded).
StabilityVerdict classify(const SwarmParams& p);

// Verdict for random linear network coding. Unknown between the transience
// and recurrence conditions.
StabilityVerdict classify_coded(const SwarmParams& p);

// Mean family sizes of the two-type branching bound: a b-peer downloads K-1
// pieces at rate mu(1-xi) then dwells Exp(gamma); an f-peer dwells Exp(gamma);
// both spawn b-peers at rate xi*mu and f-peers at rate mu while present.
struct BranchingMoments {
  int K = 0;
  double xi = 0.0;
  double rho = 0.0;
  bool finite = false;
  double m_b = 0.0;  // one plus mean descendants of a b-peer
  double m_f = 0.0;  // one plus mean descendants of an f-peer
  double s = 0.0;    // xi * m_b + m_f

  // Mean descendants (excluding itself) of a gifted peer arriving with
  // `size` pieces.
  double m_g(int size) const;
};

// Requires 0 < mu < gamma <= inf and 0 <= xi < 1.
BranchingMoments branching_moments(int K, double mu, double gamma, double xi);

// Lower bound on P{C_t < B + eps t for all t} for a compound Poisson process
// with rate alpha and jump moments m1, m2. Requires B > 0 and eps > alpha m1.
double kingman_bound(double alpha, double m1, double m2, double B, double eps);

// Upper bound on P{N_t >= B + eps t for some t} for an M/GI/inf queue started
// empty, arrival rate lambda, mean service m.
double mginfty_bound(double lambda, double m, double B, double eps);

}  // namespace swarmstab
