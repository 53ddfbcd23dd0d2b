#include "swarmstab/params.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace swarmstab {

Rational SwarmParams::lambda_exact(const PieceSet& C) const {
  Rational s = 0;
  for (const auto& a : arrivals)
    if (a.type == C) s += a.rate.exact();
  return s;
}

double SwarmParams::lambda(const PieceSet& C) const {
  double s = 0;
  for (const auto& a : arrivals)
    if (a.type == C) s += a.rate.value();
  return s;
}

Rational SwarmParams::lambda_total_exact() const {
  Rational s = 0;
  for (const auto& a : arrivals) s += a.rate.exact();
  for (const auto& a : coded_arrivals) s += a.rate.exact();
  return s;
}

double SwarmParams::lambda_total() const {
  double s = 0;
  for (const auto& a : arrivals) s += a.rate.value();
  for (const auto& a : coded_arrivals) s += a.rate.value();
  return s;
}

Rational SwarmParams::rho_exact() const {
  if (gamma.is_inf()) return 0;
  return mu.exact() / gamma.exact();
}

double SwarmParams::rho() const { return gamma.is_inf() ? 0.0 : mu.value() / gamma.value(); }

std::vector<Arrival> SwarmParams::merged_arrivals() const {
  std::map<PieceSet, Rational> acc;
  for (const auto& a : arrivals) acc[a.type] += a.rate.exact();
  std::vector<Arrival> out;
  for (auto& [C, r] : acc)
    if (r > 0) out.push_back({C, Rate(r)});
  return out;
}

bool is_prime_power(int q) {
  if (q < 2) return false;
  int p = 2;
  while (q % p != 0) ++p;
  while (q % p == 0) q /= p;
  return q == 1;
}

void SwarmParams::validate() const {
  if (K < 1 || K > kMaxPieces)
    throw std::invalid_argument("K must be in [1, 256], got " + std::to_string(K));
  if (Us.is_inf()) throw std::invalid_argument("Us must be finite");
  if (mu.is_inf() || mu.is_zero()) throw std::invalid_argument("mu must be positive and finite");
  if (gamma.is_zero()) throw std::invalid_argument("gamma must be positive");
  for (const auto& a : arrivals) {
    if (a.type.universe() != K)
      throw std::invalid_argument("arrival collection " + a.type.str() + " has wrong piece count");
    if (a.rate.is_inf()) throw std::invalid_argument("arrival rates must be finite");
  }
  if (lambda_total_exact() <= 0) throw std::invalid_argument("total arrival rate must be positive");
  if (gamma.is_inf() && lambda_exact(full_set()) > 0)
    throw std::invalid_argument("gamma = inf requires no arrivals holding every piece");
  if (!coded) {
    if (!coded_arrivals.empty())
      throw std::invalid_argument("coded arrivals given but coded mode is off");
    return;
  }
  if (q == 0) throw std::invalid_argument("coded mode needs q");
  if (!is_prime_power(q) || q > 256)
    throw std::invalid_argument("q must be a prime power <= 256, got " + std::to_string(q));
  for (const auto& a : coded_arrivals) {
    if (a.rate.is_inf()) throw std::invalid_argument("arrival rates must be finite");
    if (a.uniform_vectors < 0) throw std::invalid_argument("uniform vector count must be >= 0");
    for (const auto& v : a.vectors) {
      if (static_cast<int>(v.size()) != K)
        throw std::invalid_argument("coding vector width must equal K");
      for (int e : v)
        if (e < 0 || e >= q) throw std::invalid_argument("coding vector entry outside F_q");
    }
  }
}

}  // namespace swarmstab
