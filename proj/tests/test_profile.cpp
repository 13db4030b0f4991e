#include "shearlab/profile.hpp"

#include <doctest.h>

#include <vector>

using namespace shearlab;

namespace {

// fourth-order central difference of derivative k-1
double fd(const ShearProfile& p, int k, double y, double h = 1e-3) {
  auto f = [&](double x) { return p.derivative(k - 1, x); };
  return (-f(y + 2 * h) + 8 * f(y + h) - 8 * f(y - h) + f(y - 2 * h)) / (12 * h);
}

std::vector<ShearProfile> catalog() {
  return {make_gevrey_profile(1.5),          make_gevrey_profile(2.0), make_gevrey_profile(3.0),
          make_two_inflection_profile(1, 3, 1), make_constant_profile(0.7), make_linear_ramp(2.0),
          make_zero_profile(),               make_exponential_profile(), make_cutoff_exponential(1.0)};
}

int sign_changes_of_second_derivative(const ShearProfile& p) {
  int changes = 0;
  double prev = 0.0;
  for (double y = 0.01; y < 20.0; y += 0.01) {
    const double d = p.derivative(2, y);
    if (std::abs(d) < 1e-14) continue;
    if (prev != 0.0 && (d > 0) != (prev > 0)) ++changes;
    prev = d;
  }
  return changes;
}

}  // namespace

TEST_CASE("gevrey closed forms at rho = 2") {
  const ShearProfile p = make_gevrey_profile(2.0);
  CHECK(p(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(p.derivative(1, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(std::abs(p.derivative(2, 0.5)) < 1e-12);
  CHECK(p(0.0) == 0.0);
  // U''' at the inflection point against a five-point difference of U
  const double y0 = 0.5, h = 1e-3;
  auto U = [&](double y) { return p(y); };
  const double d3 = (U(y0 - 3 * h) - 8 * U(y0 - 2 * h) + 13 * U(y0 - h) - 13 * U(y0 + h) + 8 * U(y0 + 2 * h) -
                     U(y0 + 3 * h)) /
                    (8 * h * h * h);
  CHECK(p.derivative(3, y0) == doctest::Approx(-32.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(d3 == doctest::Approx(-32.0 * std::exp(-2.0)).epsilon(1e-5));
  CHECK_THROWS_AS(make_gevrey_profile(1.0), InvalidParameter);
}

TEST_CASE("derivative orders above d_max are refused") {
  const ShearProfile p = make_gevrey_profile(2.0);
  CHECK_THROWS_AS(p.derivative(p.d_max() + 1, 1.0), UnsupportedOrder);
  CHECK_NOTHROW(p.derivative(p.d_max(), 1.0));
}

TEST_CASE("property: analytic derivatives agree with central differences") {
  for (const ShearProfile& p : catalog()) {
    CAPTURE(p.name());
    for (int k = 1; k <= std::min(3, p.d_max()); ++k) {
      double sup = 0.0;
      std::vector<double> ys;
      for (int i = 0; i < 50; ++i) ys.push_back(0.1 + i * (9.9 / 49));
      for (double y : ys) sup = std::max(sup, std::abs(p.derivative(k, y)));
      for (double y : ys) {
        CAPTURE(k);
        CAPTURE(y);
        const double exact = p.derivative(k, y);
        const double scale = std::max(std::abs(exact), 1e-3 * sup);
        if (scale == 0.0) {
          CHECK(std::abs(fd(p, k, y)) < 1e-12);
          continue;
        }
        CHECK(std::abs(fd(p, k, y) - exact) / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("property: gevrey profiles increase on (0, inf)") {
  for (double rho : {1.5, 2.0, 3.0})
    for (double y = 0.1; y < 40.0; y *= 1.1) CHECK(make_gevrey_profile(rho).derivative(1, y) > 0.0);
}

TEST_CASE("two-inflection construction") {
  const ShearProfile p = make_two_inflection_profile(1.0, 3.0, 1.0);
  CHECK(p(0.0) == 0.0);
  CHECK(std::abs(p(kYMax)) < 1e-8);
  CHECK(sign_changes_of_second_derivative(p) == 2);
  // the tail decays like exp(-c cosh) and underflows past y ~ 6
  for (double y = 0.05; y <= 5.0; y += 0.05) CHECK(p(y) > 0.0);
  for (double y = 0.0; y < kYMax; y += 0.25) CHECK(p(y) >= 0.0);
  const InflectionData d = inflection_data(p);
  REQUIRE(d.inflection_points.size() == 2);
  CHECK(std::abs(p(d.inflection_points[0]) - p(d.inflection_points[1])) < 1e-6);
  CHECK(d.unique_value);
  CHECK_THROWS_AS(make_two_inflection_profile(3.0, 1.0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(make_two_inflection_profile(2.0, 2.0, 1.0), InvalidParameter);
}

TEST_CASE("flat catalog profiles vanish at the wall with all derivatives") {
  int flat = 0;
  for (const ShearProfile& p : catalog()) {
    if (!p.flat()) continue;
    ++flat;
    CAPTURE(p.name());
    for (int k = 0; k <= p.d_max(); ++k) CHECK(p.derivative(k, 0.0) == 0.0);
  }
  CHECK(flat >= 5);
}

TEST_CASE("assumption reports") {
  for (double rho : {1.5, 2.0, 3.0}) {
    CAPTURE(rho);
    CHECK(check_assumptions(make_gevrey_profile(rho), GammaRegime::GammaAboveHalf, 4, 1e-10).pass);
  }
  const AssumptionReport below = check_assumptions(make_gevrey_profile(2.0), GammaRegime::GammaBelowHalf, 4, 1e-10);
  CHECK_FALSE(below.pass);
  REQUIRE_FALSE(below.orders.empty());
  CHECK(below.orders.front().order == 0);
  CHECK_FALSE(below.orders.front().integrable);
  CHECK(check_assumptions(make_two_inflection_profile(1, 3, 1), GammaRegime::GammaBelowHalf, 4, 1e-10).pass);
  // not flat at the wall
  CHECK_FALSE(check_assumptions(make_exponential_profile(), GammaRegime::GammaAboveHalf, 2, 1e-10).pass);
}

TEST_CASE("inflection data of the gevrey profile") {
  const ShearProfile p = make_gevrey_profile(2.0);
  const InflectionData d = inflection_data(p);
  REQUIRE(d.inflection_points.size() == 1);
  CHECK(d.inflection_points[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(d.inflection_value == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  CHECK(d.kplus);
  const double K0 = k_function(p, d.inflection_value, 0.5);
  CHECK(K0 > 0.0);
  CHECK(K0 == doctest::Approx(-p.derivative(3, 0.5) / p.derivative(1, 0.5)).epsilon(1e-8));
  // rho^{1 - rho}
  CHECK(inflection_data(make_gevrey_profile(3.0)).inflection_points.at(0) == doctest::Approx(1.0 / 9.0).epsilon(1e-8));
}

TEST_CASE("profiles without a usable inflection point are not in K+") {
  CHECK_FALSE(inflection_data(make_linear_ramp(1.0)).kplus);
  CHECK(inflection_data(make_linear_ramp(1.0)).inflection_points.empty());
  CHECK_FALSE(inflection_data(make_constant_profile(1.0)).kplus);
}

TEST_CASE("property: K+ classification is invariant under positive scaling") {
  for (const ShearProfile& p : {make_gevrey_profile(2.0), make_two_inflection_profile(1, 3, 1), make_linear_ramp(1.0)}) {
    const InflectionData d = inflection_data(p);
    for (double s : {0.01, 0.5, 7.0}) {
      CAPTURE(p.name());
      CAPTURE(s);
      const InflectionData ds = inflection_data(p.scaled(s));
      CHECK(ds.kplus == d.kplus);
      if (!d.inflection_points.empty()) {
        CHECK(ds.inflection_points.front() == doctest::Approx(d.inflection_points.front()).epsilon(1e-9));
        CHECK(k_function(p.scaled(s), ds.inflection_value, 1.3) ==
              doctest::Approx(k_function(p, d.inflection_value, 1.3)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("smooth step derivatives match differences") {
  const double h = 1e-5;
  for (double s : {0.1, 0.2, 0.5, 0.7, 0.93}) {
    double d[4], a[4], b[4];
    smooth_step(s, d);
    smooth_step(s + h, a);
    smooth_step(s - h, b);
    for (int j = 0; j < 3; ++j) CHECK(d[j + 1] == doctest::Approx((a[j] - b[j]) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("smooth step is flat at both ends") {
  double d[4];
  smooth_step(0.0, d);
  CHECK(d[0] == 0.0);
  smooth_step(1.0, d);
  CHECK(d[0] == 1.0);
  smooth_step(0.5, d);
  CHECK(d[0] == doctest::Approx(0.5));
  smooth_step(1e-3, d);
  for (double v : d) CHECK(std::abs(v) < 1e-100);
}
