#include "shearlab/rayleigh.hpp"

#include <doctest.h>

using namespace shearlab;

namespace {

const ShearProfile& gevrey() {
  static const ShearProfile p = make_gevrey_profile(2.0);
  return p;
}

const RayleighMode& k0_mode() {
  static const RayleighMode m = solve_mode(gevrey(), 0.658, cdouble(0.15, 0.05));
  return m;
}

// twenty points over [0.05, 5]
std::vector<double> coarse_grid() {
  std::vector<double> k;
  for (double v = 0.05; v < 1.6; v += 0.1) k.push_back(v);
  for (double v : {2.0, 3.0, 4.0, 5.0}) k.push_back(v);
  return k;
}

const DispersionCurve& coarse_curve() {
  static const DispersionCurve c = scan_sigma(gevrey(), coarse_grid());
  return c;
}

// eighth-order central second difference on a uniform grid
double independent_collocation(const ShearProfile& p, const RayleighMode& m) {
  static constexpr double w[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  const double h = m.y[1] - m.y[0];
  double worst = 0.0;
  for (Eigen::Index j = 4; j + 4 < m.y.size(); ++j) {
    cdouble d2 = w[0] * m.phi[j];
    for (int q = 1; q < 5; ++q) d2 += w[q] * (m.phi[j - q] + m.phi[j + q]);
    d2 /= h * h;
    const double y = m.y[j];
    worst = std::max(worst, std::abs((p(y) - m.c) * (d2 - m.k * m.k * m.phi[j]) - p.derivative(2, y) * m.phi[j]));
  }
  return worst / m.phi.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("constant profile: the residual does not depend on c and no mode exists") {
  const ShearProfile p = make_constant_profile(0.5);
  for (double k : {0.3, 1.0}) {
    const cdouble r1 = shoot_residual(p, k, cdouble(0.1, 0.2));
    const cdouble r2 = shoot_residual(p, k, cdouble(0.9, 0.05));
    CHECK(std::abs(r1 - r2) < 1e-12);
    // pure decaying exponential: phi(0)/max|phi| = 1
    CHECK(std::abs(r1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(try_solve_mode(p, k, cdouble(0.4, 0.1)).has_value());
    CHECK_THROWS_AS(solve_mode(p, k, cdouble(0.4, 0.1)), ModeNotFound);
  }
}

TEST_CASE("preconditions on the half plane") {
  CHECK_THROWS_AS(shoot_residual(gevrey(), 0.5, cdouble(0.2, 0.0)), PreconditionViolation);
  CHECK_THROWS_AS(shoot_residual(gevrey(), 0.5, cdouble(0.2, -0.1)), PreconditionViolation);
  CHECK_THROWS_AS(solve_mode(gevrey(), 0.5, cdouble(0.2, -0.1)), PreconditionViolation);
  CHECK_THROWS_AS(shoot_residual(gevrey(), 0.0, cdouble(0.2, 0.1)), InvalidParameter);
}

TEST_CASE("argument principle finds the unstable eigenvalue") {
  const RectangleScan s = scan_rectangle(gevrey(), 0.658);
  CHECK(s.total_winding == 1);
  REQUIRE(s.winding_cells.size() == 1);
  CHECK(std::abs(s.winding_cells[0] - k0_mode().c) < 0.05);
  CHECK(scan_rectangle(make_constant_profile(0.5), 0.658).total_winding == 0);
}

TEST_CASE("residual does not depend on the truncation point") {
  RayleighOptions far;
  far.y_max = 60.0;
  // the phase of the far-field branch at y_max is a gauge; the modulus is not
  for (const cdouble c : {cdouble(0.147, 0.05), cdouble(0.3, 0.1), cdouble(0.6, 0.02)}) {
    CHECK(std::abs(std::abs(shoot_residual(gevrey(), 0.658, c)) - std::abs(shoot_residual(gevrey(), 0.658, c, far))) <
          1e-8);
  }
  CHECK(std::abs(solve_mode(gevrey(), 0.658, cdouble(0.15, 0.05), far).c - k0_mode().c) < 1e-8);
}

TEST_CASE("residual is insensitive to the integration tolerance") {
  RayleighOptions loose, tight;
  loose.rel_tol = 1e-10;
  tight.fixed_steps = 40000;
  const cdouble c(0.147, 0.05);
  CHECK(std::abs(shoot_residual(gevrey(), 0.658, c, loose) - shoot_residual(gevrey(), 0.658, c, tight)) < 1e-8);
}

TEST_CASE("mode at k = 0.658") {
  const RayleighMode& m = k0_mode();
  CHECK(m.c.imag() > 0.0);
  CHECK(m.residual < 1e-10);
  CHECK(m.growth_rate == doctest::Approx(0.658 * m.c.imag()));
  CHECK(m.growth_rate == doctest::Approx(0.03448).epsilon(1e-3));
  CHECK(m.phi.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  CHECK(m.wall_value < 1e-9);
  CHECK(semicircle_check(m, gevrey()));
  CHECK(independent_collocation(gevrey(), m) < 1e-6);
  CHECK(m.collocation_residual < 1e-6);
}

TEST_CASE("property: conjugation symmetry in k") {
  for (double k : {0.3, 0.658, 1.2}) {
    const RayleighMode mp = solve_mode(gevrey(), k, cdouble(0.14, 0.05));
    const RayleighMode mm = solve_mode(gevrey(), -k, std::conj(mp.c));
    CHECK(std::abs(mm.c - std::conj(mp.c)) < 1e-9);
    CHECK(mm.growth_rate == doctest::Approx(mp.growth_rate).epsilon(1e-8));
  }
}

TEST_CASE("property: refining the shooting steps leaves c unchanged") {
  RayleighOptions a, b;
  a.fixed_steps = 20000;
  b.fixed_steps = 40000;
  const cdouble ca = solve_mode(gevrey(), 0.658, cdouble(0.15, 0.05), a).c;
  const cdouble cb = solve_mode(gevrey(), 0.658, cdouble(0.15, 0.05), b).c;
  CHECK(std::abs(ca - cb) < 1e-8);
  CHECK(std::abs(ca - k0_mode().c) < 1e-8);
}

TEST_CASE("property: near-neutral modes are still resolved") {
  const RayleighMode m = solve_mode(gevrey(), 1.6, cdouble(0.137, 0.002));
  CHECK(m.c.imag() < 0.002);
  CHECK(m.c.imag() > 0.0);
  CHECK(independent_collocation(gevrey(), m) < 1e-6);
}

TEST_CASE("semicircle geometry") {
  const ShearProfile& p = gevrey();
  const auto [lo, hi] = profile_range(p);
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi <= 1.0);
  CHECK(hi > 0.97);
  CHECK_FALSE(semicircle_check(cdouble(0.5, 0.6), p));
  CHECK_FALSE(semicircle_check(cdouble(1.2, 0.01), p));
  CHECK(semicircle_check(cdouble(0.3, 1e-12), p));
}

TEST_CASE("velocity field of a single mode") {
  const RayleighMode& m = k0_mode();
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(9, 0.0, 2.0 * M_PI / m.k);
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(2001, 0.0, 10.0);
  const VelocityField f0 = mode_velocity_field(m, 0.0, x, y);
  const VelocityField f5 = mode_velocity_field(m, 5.0, x, y);
  CHECK(f5.norm / f0.norm == doctest::Approx(std::exp(m.growth_rate * 5.0)).epsilon(1e-6));
  const double vmax = f0.v.cwiseAbs().maxCoeff();
  CHECK(f0.v.row(0).cwiseAbs().maxCoeff() < 1e-6 * vmax);
  // d_x u + d_y v with d_x = ik and a fourth-order difference in y
  const double h = y[1] - y[0];
  double div = 0.0;
  for (Eigen::Index i = 2; i + 2 < y.size(); ++i)
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const cdouble dv = (-f0.v(i + 2, j) + 8.0 * f0.v(i + 1, j) - 8.0 * f0.v(i - 1, j) + f0.v(i - 2, j)) / (12.0 * h);
      div = std::max(div, std::abs(cdouble(0.0, m.k) * f0.u(i, j) + dv));
    }
  CHECK(div < 1e-6 * f0.u.cwiseAbs().maxCoeff());
  // interpolation reproduces the stored samples
  for (Eigen::Index j : {Eigen::Index(0), Eigen::Index(37), Eigen::Index(500)}) {
    const auto [phi, dphi] = mode_at(m, m.y[j]);
    CHECK(std::abs(phi - m.phi[j]) < 1e-12);
    CHECK(std::abs(dphi - m.dphi[j]) < 1e-12);
  }
}

TEST_CASE("dispersion curve on a twenty-point grid") {
  const DispersionCurve& c = coarse_curve();
  CHECK_FALSE(c.stable);
  CHECK(c.sigma0 == doctest::Approx(0.03448).epsilon(1e-3));
  CHECK(c.k0 == doctest::Approx(0.658).epsilon(2e-3));
  CHECK(c.sigma_values.front() < 0.25 * c.sigma0);
  CHECK(c.sigma_values.back() == 0.0);
  CHECK(c.curvature < 0.0);
  CHECK(c.curvature_order == 1);
  // local maximum against the neighbouring grid points; k0 itself sits in the curve
  size_t i0 = 0;
  while (i0 + 1 < c.k_values.size() && c.k_values[i0] < c.k0) ++i0;
  REQUIRE(c.k_values[i0] == c.k0);
  REQUIRE(i0 > 0);
  CHECK(c.sigma_values[i0] == c.sigma0);
  CHECK(c.sigma_values[i0 - 1] < c.sigma0);
  CHECK(c.sigma_values[i0 + 1] < c.sigma0);
  for (const auto& m : c.modes)
    if (m) {
      CHECK(semicircle_check(*m, gevrey()));
      CHECK(independent_collocation(gevrey(), *m) < 1e-6);
    }
  CHECK_THROWS_AS(scan_sigma(gevrey(), {0.5, 0.4, 1.0}), InvalidParameter);
}

TEST_CASE("constant profile has a flat zero dispersion curve") {
  const DispersionCurve c = scan_sigma(make_constant_profile(0.5), coarse_grid());
  CHECK(c.stable);
  for (double s : c.sigma_values) CHECK(s == 0.0);
}

TEST_CASE("time-stepping oracle") {
  const double sigma0 = k0_mode().growth_rate;
  const double g = growth_oracle(gevrey(), 0.658, 400.0, 0.01);
  CHECK(std::abs(g - sigma0) / sigma0 < 0.05);
  CHECK(growth_oracle(make_constant_profile(0.5), 0.658, 300.0, 0.01) <= 1e-3);
  CHECK(growth_oracle(gevrey(), 3.0, 300.0, 0.01) < sigma0 / 10);
  // same seed, same numbers
  const GrowthEstimate a = growth_estimate(gevrey(), 1.0, 50.0, 0.02);
  const GrowthEstimate b = growth_estimate(gevrey(), 1.0, 50.0, 0.02);
  CHECK(a.slope == b.slope);
}
