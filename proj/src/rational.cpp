#include "shearlab/rational.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace shearlab {

namespace {

std::int64_t checked(__int128 v) {
  if (v > INT64_MAX || v < -INT64_MAX) throw std::overflow_error("Rational: 64-bit overflow");
  return static_cast<std::int64_t>(v);
}

Rational make(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  return Rational(checked(n), checked(d));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational& Rational::operator+=(const Rational& o) {
  *this = make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
               static_cast<__int128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  *this = make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
  *this = make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
  return *this;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

Rational Rational::pow2_inv(int n) {
  if (n < 0 || n > 62) throw std::domain_error("Rational::pow2_inv: exponent out of range");
  return Rational(1, std::int64_t{1} << n);
}

std::optional<Rational> Rational::from_double(double x, std::int64_t max_den, double tol) {
  if (!std::isfinite(x) || std::abs(x) > 1e15) return std::nullopt;
  // convergents h/k of the continued fraction of x
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const __int128 h2 = static_cast<__int128>(ai) * h1 + h0;
    const __int128 k2 = static_cast<__int128>(ai) * k1 + k0;
    if (k2 > max_den || h2 > INT64_MAX || h2 < -INT64_MAX) break;
    h0 = h1;
    h1 = static_cast<std::int64_t>(h2);
    k0 = k1;
    k1 = static_cast<std::int64_t>(k2);
    if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol * std::max(1.0, std::abs(x)))
      return Rational(h1, k1);
    const double frac = r - a;
    if (frac <= 0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

Exponent Exponent::from_double(double x) {
  if (auto r = Rational::from_double(x)) return Exponent(*r);
  return real(x);
}

std::string Exponent::str() const {
  if (exact_) return exact_->str();
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

namespace {
template <typename Op, typename ROp>
Exponent combine(const Exponent& a, const Exponent& b, Op op, ROp rop) {
  if (a.is_exact() && b.is_exact()) {
    try {
      return Exponent(rop(*a.exact(), *b.exact()));
    } catch (const std::overflow_error&) {
    }
  }
  return Exponent::real(op(a.value(), b.value()));
}
}  // namespace

Exponent operator+(const Exponent& a, const Exponent& b) {
  return combine(a, b, std::plus<double>(), std::plus<Rational>());
}
Exponent operator-(const Exponent& a, const Exponent& b) {
  return combine(a, b, std::minus<double>(), std::minus<Rational>());
}
Exponent operator*(const Exponent& a, const Exponent& b) {
  return combine(a, b, std::multiplies<double>(), std::multiplies<Rational>());
}
Exponent Exponent::operator-() const { return is_exact() ? Exponent(-*exact_) : real(-value_); }

bool operator==(const Exponent& a, const Exponent& b) {
  if (a.is_exact() && b.is_exact()) return *a.exact() == *b.exact();
  return a.value() == b.value();
}

bool operator<(const Exponent& a, const Exponent& b) {
  if (a.is_exact() && b.is_exact()) return *a.exact() < *b.exact();
  return a.value() < b.value();
}

}  // namespace shearlab
