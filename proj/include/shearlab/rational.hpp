#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace shearlab {

// Exact p/q with 64-bit parts, always reduced with q > 0. Overflow throws.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  // 2^{-n}
  static Rational pow2_inv(int n);
  // continued-fraction recovery; nullopt unless |x - p/q| <= tol with q <= max_den
  static std::optional<Rational> from_double(double x, std::int64_t max_den = 1000000, double tol = 1e-13);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational abs(const Rational& r);

// Exact when both operands are exact, real otherwise.
class Exponent {
 public:
  Exponent() : exact_(Rational(0)), value_(0.0) {}
  Exponent(const Rational& r) : exact_(r), value_(r.to_double()) {}
  Exponent(std::int64_t n) : Exponent(Rational(n)) {}
  static Exponent real(double x) {
    Exponent e;
    e.exact_.reset();
    e.value_ = x;
    return e;
  }
  // recovers a rational when x is one, else real
  static Exponent from_double(double x);

  bool is_exact() const { return exact_.has_value(); }
  const std::optional<Rational>& exact() const { return exact_; }
  double value() const { return value_; }
  std::string str() const;

  friend Exponent operator+(const Exponent& a, const Exponent& b);
  friend Exponent operator-(const Exponent& a, const Exponent& b);
  friend Exponent operator*(const Exponent& a, const Exponent& b);
  Exponent operator-() const;
  friend bool operator==(const Exponent& a, const Exponent& b);
  friend bool operator<(const Exponent& a, const Exponent& b);
  friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }
  friend bool operator>(const Exponent& a, const Exponent& b) { return b < a; }
  friend bool operator<=(const Exponent& a, const Exponent& b) { return !(b < a); }
  friend bool operator>=(const Exponent& a, const Exponent& b) { return !(a < b); }
  friend std::ostream& operator<<(std::ostream& os, const Exponent& e) { return os << e.str(); }

 private:
  std::optional<Rational> exact_;
  double value_;
};

}  // namespace shearlab
