#include "shearlab/acceptance.hpp"

#include "shearlab/certificate.hpp"
#include "shearlab/experiments.hpp"
#include "shearlab/planner.hpp"
#include "shearlab/rayleigh.hpp"
#include "shearlab/robin_heat.hpp"

#include <chrono>
#include <cstdio>
#include <mutex>
#include <sstream>

namespace shearlab {

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail] " << what << "; ";
    } else {
      detail << what << "; ";
    }
  }
};

std::string num(double x, int prec = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

// plain least squares slope, kept separate from the library fit
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const DispersionCurve& gevrey_curve() {
  static std::once_flag once;
  static DispersionCurve curve;
  std::call_once(once, [] { curve = scan_sigma(make_gevrey_profile(2.0)); });
  return curve;
}

void c1(Outcome& o) {
  const ShearProfile u0 = make_gevrey_profile(2.0);
  const Eigen::VectorXd as = geomspace(10.0, 1e4, 7);
  const RateResult r = rate_experiment(u0, std::vector<double>(as.data(), as.data() + as.size()), Norm::linf(),
                                       RateLimit::ToInfinity, 0.0);
  std::vector<double> lx, ly;
  for (size_t i = 1; i + 1 < r.table.size(); ++i) {
    lx.push_back(std::log(r.table[i].a));
    ly.push_back(std::log(r.table[i].norm_value));
  }
  const double s = ols_slope(lx, ly);
  o.check(r.fit.has_value() && std::abs(r.fit->slope - s) < 1e-12, "library fit equals plain OLS");
  o.check(std::abs(s + 1.0) <= 0.1, "slope " + num(s) + " in -1 +- 0.1");
}

void c2(Outcome& o) {
  const ShearProfile u0 = make_exponential_profile();
  for (double a : {1e-3, 1e-2, 1e-1}) {
    const double d = rate_distance(u0, a, Norm::l2(), RateLimit::ToZero, 0.0, true);
    const double rel = d / std::sqrt(2.0 * a) - 1.0;
    o.check(std::abs(rel) < 0.01, "a=" + num(a) + ": ||.||_2 = " + num(d, 8) + ", rel err vs sqrt(2a) " + num(rel, 3));
  }
}

void c3(Outcome& o) {
  const ShearProfile one = make_constant_profile(1.0);
  double worst = 0.0;
  for (double al : {0.5, 1.0}) {
    const ExtendedProfile ext(one, RobinCoefficient::finite(al), ExtensionOptions{true});
    for (double t : {0.5, 1.0})
      for (double y : {0.0, 0.5, 1.0, 2.0}) {
        const double s = 2.0 * std::sqrt(t);
        const double ref = std::erf(y / s) + std::exp(al * (al * t + y)) * std::erfc((2.0 * al * t + y) / s);
        worst = std::max(worst, std::abs(robin_heat_value(ext, t, y) - ref));
      }
  }
  o.check(worst < 1e-6, "max error " + num(worst, 3) + " over 2 x 8 points");
}

void c4(Outcome& o) {
  const ShearProfile u0 = make_gevrey_profile(2.0);
  double worst = 0.0, worst_lib = 0.0;
  const double h = 1e-3;
  for (double a : {0.5, 1.0, 2.0}) {
    const ExtendedProfile ext(u0, RobinCoefficient::finite(a));
    for (double t : {0.1, 1.0}) {
      double u[5];
      for (int i = 0; i < 5; ++i) u[i] = robin_heat_value(ext, t, i * h);
      const double du = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * h);
      worst = std::max(worst, std::abs(du - a * u[0]));
      worst_lib = std::max(worst_lib, bc_residual(solve_robin(u0, RobinCoefficient::finite(a), t)));
    }
  }
  o.check(worst < 1e-6, "one-sided FD residual " + num(worst, 3));
  o.check(worst_lib < 1e-6, "bc_residual on the default grid " + num(worst_lib, 3));
}

void c5(Outcome& o) {
  const Certificate c = certify(make_gevrey_profile(2.0));
  const double target = 16.0 * std::exp(-4.0);
  o.check(std::abs(c.q_at_y0) < 1e-6, "Q(y0) = " + num(c.q_at_y0, 3));
  o.check(std::abs(c.q_prime_at_y0 / target - 1.0) < 1e-3, "Q'(y0) = " + num(c.q_prime_at_y0, 9) + " vs 16e^-4");
  o.check(c.eta0 < c.y0 && c.q_of_eta0 < 0.0, "eta0 = " + num(c.eta0) + ", Q(eta0) = " + num(c.q_of_eta0, 3));
  o.check(c.min_eig < 0.0, "min_eig = " + num(c.min_eig));
}

void c6(Outcome& o) {
  const ShearProfile p = make_gevrey_profile(2.0);
  const DispersionCurve& curve = gevrey_curve();
  o.check(!curve.stable && curve.sigma0 > 0.0, "sigma0 = " + num(curve.sigma0) + " at k0 = " + num(curve.k0));
  o.check(curve.sigma_values.front() < 0.25 * curve.sigma0,
          "sigma(" + num(curve.k_values.front()) + ") = " + num(curve.sigma_values.front()));
  o.check(curve.sigma_values.back() == 0.0, "sigma(" + num(curve.k_values.back()) + ") = " + num(curve.sigma_values.back()));
  // U ranges over [0, 1) for this profile
  bool disc = true;
  double coll = 0.0;
  for (const auto& m : curve.modes) {
    if (!m) continue;
    disc = disc && std::abs(m->c - cdouble(0.5, 0.0)) <= 0.5 + 1e-8;
    const double h = m->y[1] - m->y[0];
    const double k2 = m->k * m->k;
    // eighth-order central second difference
    static constexpr double w[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    for (Eigen::Index j = 4; j + 4 < m->y.size(); ++j) {
      cdouble d2 = w[0] * m->phi[j];
      for (int q = 1; q < 5; ++q) d2 += w[q] * (m->phi[j - q] + m->phi[j + q]);
      d2 /= h * h;
      const double y = m->y[j];
      coll = std::max(coll, std::abs((p(y) - m->c) * (d2 - k2 * m->phi[j]) - p.derivative(2, y) * m->phi[j]));
    }
  }
  o.check(disc, "all modes inside the semicircle");
  o.check(coll < 1e-6, "collocation residual " + num(coll, 3));
  const double g = growth_oracle(p, curve.k0, 600.0, 0.01);
  o.check(std::abs(g - curve.sigma0) / curve.sigma0 < 0.05, "time-stepped slope " + num(g));
}

void c7(Outcome& o) {
  const ShearProfile p = make_gevrey_profile(2.0);
  const DispersionCurve& curve = gevrey_curve();
  const PacketFit f = wave_packet_fit(p, curve, 10.0, 30.0);
  o.check(std::abs(f.sigma - curve.sigma0) / curve.sigma0 < 0.03,
          "fitted rate " + num(f.sigma) + " vs sigma0 " + num(curve.sigma0));
  o.check(std::abs(f.beta - 0.25) <= 0.1, "fitted power " + num(f.beta));
}

void c8(Outcome& o) {
  struct Row {
    double g;
    Rational theta, a;
  };
  const std::vector<Row> table = {{0.0, {0}, {1, 4}},         {0.3, {0}, {1, 4}},        {0.5, {0}, {1, 4}},
                                  {0.6, {1, 10}, {3, 20}},    {0.7, {1, 5}, {1, 20}},    {0.75, {1, 4}, {0}},
                                  {1.0, {1, 4}, {0}},         {2.0, {1, 4}, {0}}};
  bool ok = true;
  for (const auto& r : table) {
    const Exponent th = theta_of_gamma(r.g), a = amplitude_a(r.g);
    ok = ok && th.is_exact() && a.is_exact() && *th.exact() == r.theta && *a.exact() == r.a &&
         *th.exact() + *a.exact() == Rational(1, 4);
  }
  o.check(ok, "theta/a table and a + theta = 1/4 exact at 8 gammas");
  const Rational d(1, 1024);
  bool cont = true;
  for (const Rational knot : {Rational(1, 2), Rational(3, 4)}) {
    const Rational at = *theta_of_gamma(knot.to_double()).exact();
    const Rational up = *theta_of_gamma((knot + d).to_double()).exact();
    const Rational dn = *theta_of_gamma((knot - d).to_double()).exact();
    cont = cont && abs(up - at) <= d && abs(at - dn) <= d;
  }
  o.check(cont, "theta moves by at most 1/1024 across each knot");
  const ExpansionPlan plan = build_plan(1.0, 1, 3);
  bool add = plan.n == 2;
  const int shift = (1 << plan.n) * plan.N;
  for (int j1 = 0; j1 <= plan.M; ++j1)
    for (int j2 = 0; j2 <= plan.M; ++j2) add = add && plan.k(j1) + plan.k(j2) == plan.k(j1 + j2 + shift);
  o.check(add && plan.k(7) == Rational(11, 4), "k-table additivity exact for (1,1,3,2)");
}

void c9(Outcome& o) {
  const InstabilityTime it = instability_time(1e-4, 0.25, 1, 1.0);
  // independent bisection on e^T - 10^3 (1+T)^{1/4}
  auto g = [](double T) { return T - 0.25 * std::log1p(T) - 0.75 * std::log(1e4); };
  double lo = 0.0, hi = 50.0;
  for (int i = 0; i < 200; ++i) (g(0.5 * (lo + hi)) > 0 ? hi : lo) = 0.5 * (lo + hi);
  const double Tb = 0.5 * (lo + hi);
  const double rel = std::abs(std::exp(it.T) / std::pow(1.0 + it.T, 0.25) / std::pow(1e-4, -0.75) - 1.0);
  o.check(rel < 1e-12, "defining-equation residual " + num(rel, 3));
  o.check(std::abs(it.T - 7.44) <= 0.01 && std::abs(it.T - Tb) < 1e-10, "T = " + num(it.T, 10) + ", bisection " + num(Tb, 10));
  double prev = HUGE_VAL;
  bool mono = true;
  for (int e = 2; e <= 8; ++e) {
    const double v = instability_time(std::pow(10.0, -e), 0.25, 1, 1.0).sqrt_nu_T;
    mono = mono && v < prev;
    prev = v;
  }
  o.check(mono && prev < 0.01, "sqrt(nu) T decreasing to " + num(prev));
}

void c10(Outcome& o) {
  const UsboundSweep s = usbound_sweep(make_gevrey_profile(2.0), 1.0, {1e-2, 1e-3, 1e-4, 1e-5});
  std::vector<double> lx, ly;
  for (const auto& r : s.rows) {
    lx.push_back(std::log(r.nu));
    ly.push_back(std::log(r.scaled));
  }
  const double slope = ols_slope(lx, ly);
  o.check(std::abs(slope) <= 0.05, "log-slope " + num(slope) + " (scaled " + num(s.rows.front().scaled) + " .. " +
                                       num(s.rows.back().scaled) + ")");
}

void c11(Outcome& o) {
  const double r = asympt_ratio(1.0, 0.25, 30.0);
  // composite Simpson, 60000 panels
  const int n = 60000;
  const double h = 30.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * std::exp(s - 30.0) * std::pow(31.0 / (1.0 + s), 0.25);
  }
  acc *= h / 3.0;
  o.check(std::abs(r - acc) < 1e-8, "quadrature agrees with Simpson (" + num(acc, 10) + ")");
  o.check(std::abs(r - 1.0) < 0.05, "ratio at t=30: " + num(r));
}

void c12(Outcome& o) {
  const DispersionCurve& curve = gevrey_curve();
  const auto it = std::find(curve.k_values.begin(), curve.k_values.end(), curve.k0);
  const auto& mode = curve.modes[it - curve.k_values.begin()];
  if (!mode) {
    o.check(false, "no mode at k0");
    return;
  }
  const Eigen::VectorXd Y = Eigen::VectorXd::LinSpaced(61, 0.0, 12.0);
  double wall = 0.0, mu = HUGE_VAL, vfar = 0.0;
  for (double t : {1.0, 2.0, 3.0, 4.0, 5.0}) {
    const CorrectorField f = leading_corrector(*mode, 1.0, t, Y);
    wall = std::max(wall, f.wall_residual);
    mu = std::min(mu, f.mu);
    vfar = std::max(vfar, f.vb_far);
  }
  o.check(wall < 1e-5, "wall cancellation " + num(wall, 3));
  o.check(mu > 0.0, "fitted decay rate >= " + num(mu));
  o.check(vfar < 1e-3, "v^b tail " + num(vfar, 3));
}

struct CriterionRow {
  const char* title;
  double budget;
  void (*fn)(Outcome&);
};

const CriterionRow kCriteria[] = {
    {"Robin->Dirichlet rate", 10.0, c1},      {"Robin->Neumann sqrt(2a)", 5.0, c2},
    {"Erf reference", 5.0, c3},               {"Robin boundary residual", 10.0, c4},
    {"instability certificate", 30.0, c5},    {"Rayleigh spectrum cross-check", 300.0, c6},
    {"wave-packet envelope", 120.0, c7},      {"exponent table", 1.0, c8},
    {"instability time", 1.0, c9},            {"uniform layer bound", 60.0, c10},
    {"asympt ratio", 1.0, c11},               {"leading corrector", 60.0, c12},
};

}  // namespace

int acceptance_count() { return static_cast<int>(std::size(kCriteria)); }

CriterionResult run_criterion(int id) {
  if (id < 1 || id > acceptance_count()) throw InvalidParameter("no criterion " + std::to_string(id));
  const CriterionRow& s = kCriteria[id - 1];
  CriterionResult r;
  r.id = id;
  r.title = s.title;
  r.budget = s.budget;
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.fn(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > r.budget) o.check(false, "runtime " + num(r.seconds, 3) + " s over budget " + num(r.budget) + " s");
  r.pass = o.pass;
  r.detail = o.detail.str();
  if (r.detail.size() >= 2) r.detail.resize(r.detail.size() - 2);
  return r;
}

std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= acceptance_count(); ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    out.push_back(run_criterion(id));
    if (opt.on_result) opt.on_result(out.back());
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "[%s] %2d %-30s %8.2f s  ", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                r.seconds);
  return head + r.detail;
}

}  // namespace shearlab
