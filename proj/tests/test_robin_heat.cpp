#include "shearlab/robin_heat.hpp"

#include <doctest.h>

#include <vector>

using namespace shearlab;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double erf_reference(double alpha, double t, double y) {
  const double r = 2.0 * std::sqrt(t);
  return std::erf(y / r) + std::exp(alpha * (alpha * t + y)) * std::erfc((2.0 * alpha * t + y) / r);
}

// u_t = u_yy + e^{-y} on [0, L], u = 0 at both ends and at t = 0; Crank-Nicolson with two backward Euler
// start-up steps, Thomas algorithm
std::vector<double> cn_source_oracle(double T, double L, int n, int steps) {
  const double h = L / n, dt = T / steps;
  std::vector<double> u(n + 1, 0.0), r(n + 1);
  for (int i = 0; i <= n; ++i) r[i] = std::exp(-i * h);
  auto step = [&](double theta, double k) {
    const double lam = k / (h * h);
    const int m = n - 1;
    std::vector<double> a(m, -theta * lam), b(m, 1.0 + 2.0 * theta * lam), c(m, -theta * lam), d(m);
    for (int i = 1; i <= m; ++i)
      d[i - 1] = u[i] + (1.0 - theta) * lam * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + k * r[i];
    for (int i = 1; i < m; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    u[m] = d[m - 1] / b[m - 1];
    for (int i = m - 1; i >= 1; --i) u[i] = (d[i - 1] - c[i - 1] * u[i + 1]) / b[i - 1];
  };
  step(1.0, 0.5 * dt);
  step(1.0, 0.5 * dt);
  for (int s = 1; s < steps; ++s) step(0.5, dt);
  return u;
}

}  // namespace

TEST_CASE("extension limits and the raw exponential example") {
  const ShearProfile g = make_gevrey_profile(2.0);
  const ExtendedProfile even(g, RobinCoefficient::finite(0.0));
  const ExtendedProfile odd(g, RobinCoefficient::dirichlet());
  for (double y : {0.3, 1.0, 4.0}) {
    CHECK(even(-y) == doctest::Approx(g(y)).epsilon(1e-12));
    CHECK(odd(-y) == doctest::Approx(-g(y)).epsilon(1e-12));
    CHECK(odd(y) == doctest::Approx(g(y)).epsilon(1e-14));
  }
  const ShearProfile e = make_exponential_profile();
  for (double a : {0.3, 2.0, 7.5}) {
    const ExtendedProfile ext(e, RobinCoefficient::finite(a), ExtensionOptions{true});
    for (double y : {-0.2, -1.0, -3.0}) {
      CAPTURE(a);
      CAPTURE(y);
      const double exact = std::exp(y) - (2.0 * a / (a - 1.0)) * (std::exp(y) - std::exp(a * y));
      CHECK(ext(y) == doctest::Approx(exact).epsilon(1e-10));
    }
  }
}

TEST_CASE("extension preconditions") {
  CHECK_THROWS_AS(RobinCoefficient::finite(-1.0), InvalidParameter);
  CHECK_THROWS_AS(ExtendedProfile(make_constant_profile(1.0), RobinCoefficient::finite(1.0)), PreconditionViolation);
  CHECK_NOTHROW(ExtendedProfile(make_constant_profile(1.0), RobinCoefficient::finite(1.0), ExtensionOptions{true}));
}

TEST_CASE("extension derivatives") {
  const ShearProfile g = make_gevrey_profile(2.0);
  for (double y : {-0.4, -1.0, -2.5}) {
    CHECK(extension_derivative(g, RobinCoefficient::finite(3.0), 0, y) ==
          doctest::Approx(extend(g, RobinCoefficient::finite(3.0))(y)).epsilon(1e-12));
    for (int k = 0; k <= 3; ++k) {
      const double sign = (k + 1) % 2 == 0 ? 1.0 : -1.0;
      CHECK(extension_derivative(g, RobinCoefficient::dirichlet(), k, y) ==
            doctest::Approx(sign * g.derivative(k, -y)).epsilon(1e-12));
    }
  }
  const ExtendedProfile ext(g, RobinCoefficient::finite(10.0));
  const double h = 1e-3, y = -1.0;
  const double fd = (-ext(y + 2 * h) + 8 * ext(y + h) - 8 * ext(y - h) + ext(y - 2 * h)) / (12 * h);
  CHECK(std::abs(extension_derivative(g, RobinCoefficient::finite(10.0), 1, y) / fd - 1.0) < 1e-5);
  CHECK_THROWS_AS(extension_derivative(make_exponential_profile(), RobinCoefficient::finite(1.0), 1, -1.0),
                  PreconditionViolation);
}

TEST_CASE("property: d/dy u - a u of the extension is odd") {
  const ShearProfile g = make_gevrey_profile(2.0);
  for (double a : {0.2, 1.0, 5.0}) {
    const ExtendedProfile ext(g, RobinCoefficient::finite(a));
    for (int i = 1; i <= 100; ++i) {
      const double y = 0.06 * i;
      const double gp = ext.derivative(1, y) - a * ext(y);
      const double gm = ext.derivative(1, -y) - a * ext(-y);
      CHECK(std::abs(gp + gm) < 1e-8);
    }
  }
}

TEST_CASE("property: the three extension formulas agree at a = 1") {
  for (const ShearProfile& p : {make_gevrey_profile(2.0), make_two_inflection_profile(1, 3, 1)}) {
    const ExtendedProfile ext(p, RobinCoefficient::finite(1.0));
    for (double y = -0.1; y > -8.0; y -= 0.37) {
      CHECK(std::abs(ext(y) - ext.exponential_form(y)) < 1e-9);
      CHECK(std::abs(ext(y) - ext.primitive_form(y)) < 1e-9);
    }
  }
}

TEST_CASE("property: increasing data interpolate monotonically in a") {
  const ShearProfile g = make_gevrey_profile(2.0);
  const std::vector<double> as{0.0, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0, 1e4};
  for (double y : {-0.3, -1.0, -3.0, -10.0}) {
    double prev = extend(g, RobinCoefficient::finite(0.0))(y);
    for (size_t i = 1; i < as.size(); ++i) {
      const double v = extend(g, RobinCoefficient::finite(as[i]))(y);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
    CHECK(prev >= extend(g, RobinCoefficient::dirichlet())(y) - 1e-12);
  }
}

TEST_CASE("heat solutions: zero data and the erf reference") {
  const HeatField z = solve_robin(make_zero_profile(), RobinCoefficient::finite(1.0), 0.5);
  CHECK(z.values.cwiseAbs().maxCoeff() == 0.0);
  const ShearProfile one = make_constant_profile(1.0);
  for (double alpha : {0.5, 1.0}) {
    const ExtendedProfile ext(one, RobinCoefficient::finite(alpha), ExtensionOptions{true});
    for (double t : {0.5, 1.0})
      for (double y : {0.0, 0.5, 1.0, 2.0}) CHECK(std::abs(robin_heat_value(ext, t, y) - erf_reference(alpha, t, y)) < 1e-6);
  }
  CHECK_THROWS_AS(solve_robin(make_gevrey_profile(2.0), RobinCoefficient::finite(1.0), 0.0), InvalidParameter);
}

TEST_CASE("boundary residuals") {
  const ShearProfile g = make_gevrey_profile(2.0);
  CHECK(bc_residual(solve_robin(g, RobinCoefficient::finite(1.0), 0.1)) < 1e-6);
  CHECK(bc_residual(solve_robin(g, RobinCoefficient::dirichlet(), 0.3)) < 1e-8);
  CHECK(bc_residual(solve_robin(g, RobinCoefficient::finite(0.0), 0.3)) < 1e-8);
  CHECK(bc_residual(solve_robin(make_constant_profile(1.0), RobinCoefficient::finite(1.0), 1.0, default_heat_grid(),
                                ExtensionOptions{true})) < 1e-6);
  Eigen::VectorXd coarse = Eigen::VectorXd::LinSpaced(41, 0.0, 40.0);
  CHECK_THROWS_AS(bc_residual(solve_robin(g, RobinCoefficient::finite(1.0), 0.1, coarse)), InsufficientResolution);
}

TEST_CASE("property: semigroup in time") {
  const ShearProfile g = make_gevrey_profile(2.0);
  const double a = 1.5, t1 = 0.3, t2 = 0.4;
  const ExtendedProfile ext(g, RobinCoefficient::finite(a));
  for (double y : {0.0, 0.5, 1.5}) {
    // heat kernel at t2 applied to the extended state at t1
    const double L = 12.0 * std::sqrt(t2);
    auto integrand = [&](double x) {
      return std::exp(-(y - x) * (y - x) / (4.0 * t2)) / std::sqrt(4.0 * M_PI * t2) * robin_heat_value(ext, t1, x);
    };
    const double two_step = simpson(integrand, y - L, y + L, 800);
    CHECK(std::abs(two_step - robin_heat_value(ext, t1 + t2, y)) < 1e-5);
  }
}

TEST_CASE("property: Dirichlet L2 mass does not increase") {
  const ShearProfile g = make_gevrey_profile(2.0);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(801, 0.0, 40.0);
  double prev = HUGE_VAL;
  for (double t : {0.05, 0.2, 0.5, 1.0, 2.0, 4.0}) {
    const HeatField f = solve_robin(g, RobinCoefficient::dirichlet(), t, grid);
    double m = 0.0;
    for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
      m += 0.5 * (grid[i + 1] - grid[i]) * (f.values[i] * f.values[i] + f.values[i + 1] * f.values[i + 1]);
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("inhomogeneous Dirichlet problem") {
  const ShearProfile g = make_gevrey_profile(2.0);
  Eigen::VectorXd grid(5);
  grid << 0.0, 0.3, 1.0, 2.0, 4.0;
  auto zero_f = [](double) { return 0.0; };
  auto zero_r = [](double, double) { return 0.0; };
  const HeatField a = solve_inhomogeneous_dirichlet(g, zero_f, zero_r, 0.7, grid);
  const HeatField b = solve_robin(g, RobinCoefficient::dirichlet(), 0.7, grid);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-12);

  const ShearProfile z = make_zero_profile();
  for (double t : {0.5, 1.0}) {
    const HeatField w = solve_inhomogeneous_dirichlet(z, [](double s) { return s * s; }, zero_r, t, grid);
    CHECK(std::abs(w.values[0] - t * t) < 1e-5);
  }

  // forcing e^{-y} against a time-stepping oracle
  const double L = 20.0;
  const int n = 4000;
  const std::vector<double> u = cn_source_oracle(1.0, L, n, 2000);
  Eigen::VectorXd probe(6);
  probe << 0.1, 0.5, 1.0, 2.0, 3.0, 5.0;
  const HeatField s = solve_inhomogeneous_dirichlet(z, zero_f, [](double, double y) { return std::exp(-y); }, 1.0, probe);
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    const int j = static_cast<int>(std::lround(probe[i] / (L / n)));
    CAPTURE(probe[i]);
    CHECK(std::abs(s.values[i] - u[j]) < 1e-4);
  }

  std::string warning;
  solve_inhomogeneous_dirichlet(z, [](double s) { return 1.0 + s; }, zero_r, 0.5, grid, &warning);
  CHECK_FALSE(warning.empty());
}

TEST_CASE("convergence rates") {
  const std::vector<double> zero_as{1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  const RateResult cut = rate_experiment(make_cutoff_exponential(1.0), zero_as, Norm::l2(), RateLimit::ToZero, 0.0);
  REQUIRE(cut.fit.has_value());
  CHECK(std::abs(cut.fit->slope - 0.5) < 0.05);
  const RateResult two =
      rate_experiment(make_two_inflection_profile(1, 3, 1), zero_as, Norm::linf(), RateLimit::ToZero, 0.0);
  REQUIRE(two.fit.has_value());
  CHECK(std::abs(two.fit->slope - 1.0) < 0.1);
  // u0 not in L1: advisory, no slope
  const RateResult adv = rate_experiment(make_gevrey_profile(2.0), zero_as, Norm::l1(), RateLimit::ToZero, 0.0);
  CHECK_FALSE(adv.fit.has_value());
  CHECK_FALSE(adv.advisory.empty());
  CHECK_THROWS_AS(rate_experiment(make_gevrey_profile(2.0), {1, 10, 100, 1000, 1e4}, Norm::linf(),
                                  RateLimit::ToInfinity, 0.0),
                  InvalidParameter);
  // the raw exponential: distance sqrt(2a/(1+a)) in closed form
  for (double a : {1e-3, 1e-2, 1e-1})
    CHECK(rate_distance(make_exponential_profile(), a, Norm::l2(), RateLimit::ToZero, 0.0, true) ==
          doctest::Approx(std::sqrt(2.0 * a / (1.0 + a))).epsilon(1e-8));
}

TEST_CASE("envelopes") {
  std::vector<std::pair<double, double>> s1, s2;
  for (double t = 0.0; t <= 20.0; t += 0.25) {
    s1.emplace_back(t, std::exp(t) / std::pow(1.0 + t, 0.25));
    s2.emplace_back(t, t * std::exp(0.5 * t));
  }
  const EnvelopeCheck c1 = envelope_check(s1, Envelope{1.0, 0.25, 1.0});
  CHECK(c1.pass);
  CHECK(c1.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
  // max of t e^{-t/2} is 2/e
  const EnvelopeCheck c2 = envelope_check(s2, Envelope{1.0, 0.0, 10.0});
  CHECK(c2.pass);
  CHECK(c2.worst_ratio == doctest::Approx(2.0 / M_E).epsilon(1e-3));
  CHECK_FALSE(envelope_check(s2, Envelope{1.0, 0.0, 0.5}).pass);
}

TEST_CASE("Gronwall bound and the asymptotic ratio") {
  const GronwallResult g0 = gronwall_bound(0.0, 2.0, 0.0, 1.0, 0.0, 10.0);
  for (const auto& [t, phi] : g0.trajectory) CHECK(phi == doctest::Approx(std::expm1(2.0 * t) / 2.0).epsilon(1e-8));
  CHECK(g0.envelope.constant == doctest::Approx(0.5).epsilon(1e-6));
  const GronwallResult g = gronwall_bound(0.5, 1.0, 0.25, 1.0, 0.0);
  for (const auto& [t, phi] : g.trajectory) CHECK(phi <= g.envelope(t) * (1.0 + 1e-12));
  CHECK(std::abs(asympt_ratio(1.0, 0.25, 30.0) - 1.0) < 0.05);
  CHECK(std::abs(asympt_ratio(2.0, 0.25, 30.0) - 0.5) < 0.025);
  CHECK_THROWS_AS(gronwall_bound(1.0, 1.0, 0.0, 1.0, 0.0), InvalidParameter);
}
