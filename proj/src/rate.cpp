#include "swarmstab/rate.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace swarmstab {

namespace {

Rational pow10(int e) {
  Rational r(1);
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("empty number");
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  boost::multiprecision::cpp_int mant = 0;
  int frac_digits = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mant = mant * 10 + (c - '0');
      any = true;
      if (dot) ++frac_digits;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
  int exp10 = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E')
      throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
    std::string rest(s.substr(i + 1));
    std::size_t used = 0;
    try {
      exp10 = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size() || std::abs(exp10) > 4000)
      throw std::invalid_argument("bad exponent in '" + std::string(whole) + "'");
  }
  Rational r(mant);
  int e = exp10 - frac_digits;
  if (e > 0) r *= pow10(e);
  if (e < 0) r /= pow10(-e);
  return neg ? Rational(-r) : r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s, text);
  Rational num = parse_decimal(trim(s.substr(0, slash)), text);
  Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rate::Rate(const Rational& v) : exact_(v), value_(to_double(v)) {
  if (v < 0) throw std::invalid_argument("rate must be nonnegative");
}

Rate::Rate(double v) {
  if (std::isnan(v) || v < 0) throw std::invalid_argument("rate must be nonnegative");
  if (std::isinf(v)) {
    inf_ = true;
    value_ = v;
    return;
  }
  exact_ = Rational(v);
  value_ = v;
}

Rate Rate::infinity() {
  Rate r;
  r.inf_ = true;
  r.value_ = std::numeric_limits<double>::infinity();
  return r;
}

Rate Rate::parse(std::string_view text) {
  auto s = trim(text);
  if (s == "inf" || s == "infinity" || s == "+inf") return infinity();
  return Rate(parse_rational(s));
}

const Rational& Rate::exact() const {
  if (inf_) throw std::domain_error("infinite rate has no exact value");
  return exact_;
}

std::string Rate::str() const { return inf_ ? "inf" : format_rational(exact_); }

}  // namespace swarmstab
