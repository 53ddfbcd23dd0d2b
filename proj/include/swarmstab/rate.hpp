#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace swarmstab {

using Rational = boost::multiprecision::cpp_rational;

// Parses "3", "0.25", "-1.5e-3" or "2/3" without rounding.
Rational parse_rational(std::string_view text);
double to_double(const Rational& r);
std::string format_rational(const Rational& r);

// A nonnegative rate that may be +infinity. Keeps the exact value next to a
// cached double so hot loops never touch the rational.
class Rate {
 public:
  Rate() = default;
  Rate(const Rational& v);  // NOLINT(implicit)
  Rate(double v);           // NOLINT(implicit) exact binary value
  Rate(int v) : Rate(Rational(v)) {}  // NOLINT(implicit)

  static Rate infinity();
  // Accepts anything parse_rational does, plus "inf".
  static Rate parse(std::string_view text);

  bool is_inf() const { return inf_; }
  bool is_zero() const { return !inf_ && value_ == 0.0 && exact_ == 0; }
  double value() const { return value_; }
  // Throws std::domain_error for infinity.
  const Rational& exact() const;
  std::string str() const;

  friend bool operator==(const Rate& a, const Rate& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.exact_ == b.exact_);
  }
  friend bool operator<(const Rate& a, const Rate& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.exact_ < b.exact_;
  }
  friend bool operator<=(const Rate& a, const Rate& b) { return !(b < a); }

 private:
  Rational exact_{0};
  double value_ = 0.0;
  bool inf_ = false;
};

}  // namespace swarmstab
