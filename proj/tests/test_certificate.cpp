#include "shearlab/certificate.hpp"
#include "shearlab/rayleigh.hpp"

#include <doctest.h>

#include <random>

using namespace shearlab;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// y e^{-b y} (1 + c sin(d y))
TestFunction random_test_function(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ub(0.5, 3.0), uc(-0.9, 0.9), ud(0.5, 6.0);
  const double b = ub(rng), c = uc(rng), d = ud(rng);
  TestFunction t;
  t.value = [=](double y) { return y * std::exp(-b * y) * (1.0 + c * std::sin(d * y)); };
  t.derivative = [=](double y) {
    const double e = std::exp(-b * y);
    return e * (1.0 - b * y) * (1.0 + c * std::sin(d * y)) + y * e * c * d * std::cos(d * y);
  };
  t.support_begin = 0.0;
  t.support_end = kYMax;
  return t;
}

double l2_squared(const TestFunction& t) {
  return simpson([&](double y) { return t.value(y) * t.value(y); }, 0.0, kYMax, 40000);
}

}  // namespace

TEST_CASE("quadratic form basics") {
  const ShearProfile p = make_gevrey_profile(2.0);
  TestFunction zero;
  zero.value = [](double) { return 0.0; };
  zero.derivative = [](double) { return 0.0; };
  zero.support_end = kYMax;
  CHECK(quadratic_form(p, zero) == 0.0);

  // narrow bump: the gradient term wins
  TestFunction bump;
  const double c = 2.0, w = 0.01;
  bump.value = [=](double y) { return std::abs(y - c) < w ? std::pow(std::cos(M_PI * (y - c) / (2 * w)), 2) : 0.0; };
  bump.derivative = [=](double y) {
    return std::abs(y - c) < w ? -M_PI / (2 * w) * std::sin(M_PI * (y - c) / w) : 0.0;
  };
  bump.support_begin = c - w;
  bump.support_end = c + w;
  CHECK(quadratic_form(p, bump) > 0.0);
}

TEST_CASE("Q(eta) at the inflection point") {
  const ShearProfile p = make_gevrey_profile(2.0);
  const KContext ctx(p);
  CHECK(ctx.y0() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(q_of_eta(ctx, 0.5)) < 1e-6);
  const double h = 1e-4;
  const double dq = (q_of_eta(ctx, 0.5 + h) - q_of_eta(ctx, 0.5 - h)) / (2 * h);
  const double up = p.derivative(1, 0.5);
  CHECK(up == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-13));
  CHECK(std::abs(dq / (up * up) - 1.0) < 1e-4);
  CHECK(std::abs(dq / (16.0 * std::exp(-4.0)) - 1.0) < 1e-4);
}

TEST_CASE("test functions: continuity, support and the large-n limit") {
  const ShearProfile p = make_gevrey_profile(2.0);
  const KContext ctx(p);
  for (double eta : {0.3, 0.45, 0.5}) {
    const TestFunction w = build_test_function(ctx, eta, 8);
    CHECK(std::abs(w.value(eta)) < 1e-14);
    CHECK(w.value(eta - 0.01) == 0.0);
    CHECK(w.value(16.0) == 0.0);
    CHECK(w.value(25.0) == 0.0);
    CHECK(w.value(10.0) != 0.0);
  }
  // Q(w^n) - Q(eta) ~ (U_inf - U0)^2 int |chi'|^2 / n
  const double chi2 = simpson([](double s) { return std::pow(cutoff_derivative(s), 2); }, 1.0, 2.0, 4000);
  const double C = std::pow(p.u_infinity() - ctx.u0(), 2) * chi2;
  for (double eta : {0.45, 0.5}) {
    const double q = q_of_eta(ctx, eta);
    double prev = HUGE_VAL;
    for (int n : {64, 256, 1024}) {
      const double diff = quadratic_form(ctx, build_test_function(ctx, eta, n)) - q;
      CHECK(diff > 0.0);
      CHECK(diff < prev);
      prev = diff;
      if (n == 1024) {
        CHECK(std::abs(n * diff / C - 1.0) < 0.01);
        CHECK(diff < 1.3e-3);
      }
    }
  }
}

TEST_CASE("cutoff shape") {
  CHECK(cutoff(0.5) == 1.0);
  CHECK(cutoff(1.0) == 1.0);
  CHECK(cutoff(2.0) == 0.0);
  CHECK(cutoff(1.5) == doctest::Approx(0.5));
  const double h = 1e-6;
  for (double s : {1.1, 1.4, 1.8}) CHECK(cutoff_derivative(s) == doctest::Approx((cutoff(s + h) - cutoff(s - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("Schrodinger eigenvalues") {
  const SchrodingerEig lap = min_eig_dirichlet([](double) { return 0.0; });
  CHECK(lap.value == doctest::Approx(std::pow(M_PI / kYMax, 2)).epsilon(1e-6));
  // harmonic well -d_yy + (y - 20)^2 has ground state 1 on a wide interval
  const SchrodingerEig osc = min_eig_dirichlet([](double y) { return -(y - 20.0) * (y - 20.0); });
  CHECK(osc.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(osc.converged);
}

TEST_CASE("certificates") {
  const Certificate g = certify(make_gevrey_profile(2.0));
  CHECK(g.pass);
  CHECK(g.eta0 < 0.5);
  CHECK(g.q_value < 0.0);
  CHECK(g.min_eig < 0.0);
  CHECK(std::abs(g.min_eig - g.min_eig_check) < 1e-4);
  CHECK_THROWS_AS(certify(make_constant_profile(1.0)), CertificateFailed);
  CHECK_THROWS_AS(certify(make_linear_ramp(1.0)), CertificateFailed);
  const Certificate t = certify(make_two_inflection_profile(1, 3, 1));
  CHECK(t.pass);
  CHECK(t.q_value < 0.0);
  CHECK(t.min_eig < 0.0);
}

TEST_CASE("property: min_eig bounds every Rayleigh quotient") {
  const ShearProfile p = make_gevrey_profile(2.0);
  const KContext ctx(p);
  const double lam = min_eig_schrodinger(ctx).value;
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 10; ++i) {
    const TestFunction t = random_test_function(rng);
    CHECK(lam <= quadratic_form(ctx, t) / l2_squared(t) + 1e-6);
  }
  const Certificate c = certify(p);
  const TestFunction w = build_test_function(ctx, c.eta0, c.n);
  CHECK(c.min_eig <= c.q_value / l2_squared(w) + 1e-6);
}

TEST_CASE("property: certificate sign is scale invariant") {
  for (const ShearProfile& p : {make_gevrey_profile(2.0), make_two_inflection_profile(1, 3, 1)}) {
    const Certificate base = certify(p);
    for (double s : {0.1, 3.0}) {
      const Certificate c = certify(p.scaled(s));
      CHECK(c.pass == base.pass);
      CHECK(c.eta0 == doctest::Approx(base.eta0));
      CHECK(c.q_value == doctest::Approx(s * s * base.q_value).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: Q(eta) is Lipschitz below the inflection point") {
  const KContext ctx(make_gevrey_profile(2.0));
  const double y0 = ctx.y0(), d = y0 / 200.0;
  std::vector<double> q;
  for (int i = 0; i <= 100; ++i) q.push_back(q_of_eta(ctx, y0 / 2 + i * d));
  double L = 0.0;
  for (size_t i = 1; i < q.size(); ++i) L = std::max(L, std::abs(q[i] - q[i - 1]) / d);
  // fitted constant; a jump would show up as a slope far above the neighbours
  for (size_t i = 1; i < q.size(); ++i) CHECK(std::abs(q[i] - q[i - 1]) <= L * d * (1 + 1e-12));
  for (size_t i = 2; i < q.size(); ++i) CHECK(std::abs(q[i] - 2 * q[i - 1] + q[i - 2]) < 0.05 * L * d);
}

TEST_CASE("property: a certified profile has an unstable Rayleigh mode") {
  const ShearProfile p = make_gevrey_profile(2.0);
  REQUIRE(certify(p).pass);
  const auto m = try_solve_mode(p, 0.66, cdouble(0.15, 0.05));
  REQUIRE(m.has_value());
  CHECK(m->growth_rate > 0.0);
}
