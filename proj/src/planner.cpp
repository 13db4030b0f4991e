#include "shearlab/planner.hpp"

#include "shearlab/robin_heat.hpp"

#include <cmath>
#include <sstream>

namespace shearlab {

namespace {

const Rational kQuarter(1, 4);
const Rational kHalf(1, 2);
const Rational kThreeQuarters(3, 4);

void require_in_scope(double gamma) {
  if (!std::isfinite(gamma)) throw InvalidParameter("gamma must be finite");
  if (gamma == 0.5) throw OutOfScope("gamma = 1/2 is outside the expansion (treated separately)");
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Dirichlet:
      return "Dirichlet";
    case Regime::Robin:
      return "Robin";
    case Regime::NeumannMid:
      return "Neumann_mid";
    case Regime::NeumannLow:
      return "Neumann_low";
  }
  return "?";
}

Exponent theta_of_gamma(double gamma) {
  if (gamma >= 0.75) return Exponent(kQuarter);
  if (gamma > 0.5) return Exponent::from_double(gamma) - Exponent(kHalf);
  return Exponent(0);
}

Exponent amplitude_a(double gamma) { return Exponent(kQuarter) - theta_of_gamma(gamma); }

int choose_n(double gamma, std::string* note) {
  require_in_scope(gamma);
  const Exponent g = Exponent::from_double(gamma);
  Exponent thr;
  if (gamma > 0.75) {
    thr = g - Exponent(kThreeQuarters);
  } else if (gamma == 0.75) {
    thr = Exponent(kQuarter);
    if (note) *note = "gamma = 3/4: 2^{-n} <= gamma - 3/4 is unsatisfiable; using the middle-branch value n = 2";
  } else if (gamma > 0.5) {
    thr = g - Exponent(kHalf);
  } else {
    thr = Exponent(kHalf) * (Exponent(kHalf) - g);
  }
  for (int n = 2; n <= 62; ++n)
    if (Exponent(Rational::pow2_inv(n)) <= thr) return n;
  throw InvalidParameter("choose_n: gamma too close to a knot (n > 62)");
}

Regime bc_regime(double gamma) {
  require_in_scope(gamma);
  if (gamma > 0.75) return Regime::Dirichlet;
  if (gamma == 0.75) return Regime::Robin;
  if (gamma > 0.5) return Regime::NeumannMid;
  return Regime::NeumannLow;
}

Rational ExpansionPlan::k(int j) const {
  if (j < 0) throw InvalidParameter("k_j: j >= 0");
  return Rational(1) + Rational(j) * Rational::pow2_inv(n) / Rational(N);
}

Exponent ExpansionPlan::nu_order_interior(int j) const {
  return Exponent(Rational(N) + Rational(j) * Rational::pow2_inv(n));
}

Exponent ExpansionPlan::nu_order_boundary(int j) const { return nu_order_interior(j) + amplitude_a; }

std::string ExpansionPlan::dump() const {
  std::ostringstream os;
  auto opt = [](const std::optional<Exponent>& e) { return e ? e->str() : std::string("none"); };
  os << "gamma              " << gamma_exponent.str() << "\n"
     << "N                  " << N << "\n"
     << "M                  " << M << "\n"
     << "n                  " << n << "\n"
     << "theta              " << theta.str() << "\n"
     << "a                  " << amplitude_a.str() << "\n"
     << "regime             " << to_string(regime) << "\n"
     << "P                  " << P.str() << "\n"
     << "k_table            ";
  for (size_t j = 0; j < k_table.size(); ++j) os << (j ? ", " : "") << k_table[j].str();
  os << "\n"
     << "order R^I          " << remainder.interior.str() << "\n"
     << "order R^b          " << remainder.boundary.str() << " (with nu^a: " << remainder.boundary_total.str() << ")\n"
     << "order r1 (printed) " << opt(remainder.r1_printed) << "\n"
     << "order r1 (total)   " << opt(remainder.r1_total) << "\n"
     << "order r2           " << remainder.r2.str() << "\n";
  for (const auto& s : notes) os << "note               " << s << "\n";
  return os.str();
}

ExpansionPlan build_plan(double gamma, int N, int M) {
  if (N < 1) throw InvalidParameter("build_plan: N >= 1");
  if (M < 0) throw InvalidParameter("build_plan: M >= 0");
  ExpansionPlan p;
  p.gamma = gamma;
  p.gamma_exponent = Exponent::from_double(gamma);
  p.N = N;
  p.M = M;
  std::string note;
  p.n = choose_n(gamma, &note);
  if (!note.empty()) p.notes.push_back(note);
  p.theta = theta_of_gamma(gamma);
  p.amplitude_a = amplitude_a(gamma);
  p.regime = bc_regime(gamma);
  for (int j = 0; j <= M; ++j) p.k_table.push_back(p.k(j));
  p.P = p.k(M + 1);
  const Exponent step(Rational::pow2_inv(p.n));
  const Exponent Nn(N), Mm(M);
  p.remainder.interior = Nn + Exponent(M + 1) * step;
  p.remainder.boundary = p.remainder.interior;
  p.remainder.boundary_total = p.remainder.interior + p.amplitude_a;
  const Exponent g = p.gamma_exponent;
  switch (p.regime) {
    case Regime::Dirichlet:
      p.remainder.r1_printed = g - Exponent(kThreeQuarters) - step + Mm * step;
      break;
    case Regime::Robin:
      p.notes.push_back("Robin regime: the boundary condition is met exactly, no r1 remainder");
      break;
    case Regime::NeumannMid:
    case Regime::NeumannLow:
      p.remainder.r1_printed = Exponent(kThreeQuarters) - g - step + Mm * step;
      break;
  }
  if (p.remainder.r1_printed) {
    p.remainder.r1_total = Nn + p.amplitude_a + *p.remainder.r1_printed;
    p.notes.push_back("r1 total order composes N + a with the printed exponent (interpretation)");
  }
  p.remainder.r2 = Nn + p.amplitude_a + Exponent(kQuarter) - step + Mm * step;
  if (!p.gamma_exponent.is_exact()) p.notes.push_back("gamma is not a recoverable rational: exponents are real");
  return p;
}

InstabilityTime instability_time(double nu, double theta, int N, double sigma0, double tau) {
  if (!(sigma0 > 0.0)) throw InvalidParameter("instability_time: sigma0 must be positive");
  if (N < 1) throw InvalidParameter("instability_time: N >= 1");
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidParameter("instability_time: nu must lie in (0, 1]");
  if (!(theta - N < 0.0)) throw InvalidParameter("instability_time: need theta < N");
  if (tau < 0.0) throw InvalidParameter("instability_time: tau >= 0");
  const double rhs_log = (theta - N) * std::log(nu);
  auto F = [&](double T) { return sigma0 * T - 0.25 * std::log1p(T) - rhs_log; };
  InstabilityTime out;
  if (rhs_log == 0.0) {
    out.T = 0.0;
  } else {
    double hi = (N - theta) * std::abs(std::log(nu)) / sigma0 + 10.0;
    // the log(1+T)/4 term can outweigh 10 sigma0 when sigma0 is small
    while (F(hi) <= 0.0) hi *= 2.0;
    out.T = brent_root(F, 0.0, hi, 1e-15);
  }
  out.residual = std::abs(std::expm1(F(out.T)));
  out.T_nu = out.T - tau;
  if (tau > 0.0 && !(out.T_nu > 0.0)) throw TauTooLarge("instability_time: T - tau <= 0");
  out.sqrt_nu_T = std::sqrt(nu) * out.T_nu;
  return out;
}

CorrectorField leading_corrector(const RayleighMode& mode, double gamma, double t, const Eigen::VectorXd& Y_grid) {
  if (!(t > 0.0)) throw InvalidParameter("leading_corrector: t must be positive");
  if (mode.y.size() < 8) throw InvalidParameter("leading_corrector: mode has no eigenfunction samples");
  CorrectorField f;
  f.regime = bc_regime(gamma);
  f.t = t;
  f.k = mode.k;
  f.Y = Y_grid;
  const cdouble I(0.0, 1.0);
  const cdouble lambda = -I * mode.k * mode.c;
  const cdouble d0 = mode.dphi[0];
  const Eigen::VectorXd nodes = mode.y.head(7);
  const Eigen::VectorXd w = fornberg_weights(0.0, nodes, 1).col(1);
  cdouble dd0 = 0.0;
  for (int i = 0; i < 7; ++i) dd0 += w[i] * mode.dphi[i];
  f.trace = d0 * std::exp(lambda * t);
  f.trace_dy = dd0 * std::exp(lambda * t);

  std::function<cdouble(double)> ub;
  switch (f.regime) {
    case Regime::Dirichlet: {
      auto data = [=](double s) { return -d0 * std::exp(lambda * s); };
      ub = [=](double y) { return dirichlet_trace_solution(data, t, y); };
      break;
    }
    case Regime::Robin: {
      auto data = [=](double s) { return d0 * std::exp(lambda * s); };
      ub = [=](double y) { return robin_trace_solution(data, t, y); };
      break;
    }
    case Regime::NeumannMid: {
      auto data = [=](double s) { return d0 * std::exp(lambda * s); };
      ub = [=](double y) { return neumann_trace_solution(data, t, y); };
      break;
    }
    case Regime::NeumannLow: {
      auto data = [=](double s) { return -dd0 * std::exp(lambda * s); };
      ub = [=](double y) { return neumann_trace_solution(data, t, y); };
      break;
    }
  }
  const Eigen::Index n = Y_grid.size();
  f.ub.resize(n);
  f.vb.resize(n);
  parallel_for(static_cast<int>(n), [&](int i) { f.ub[i] = ub(Y_grid[i]); });

  // wall check through the general evaluation path, not the Y = 0 shortcut
  if (f.regime == Regime::Dirichlet) {
    f.wall_residual = std::abs(ub(1e-10) + f.trace);
  } else {
    const double h = 1e-3;
    Eigen::VectorXd st(5);
    for (int i = 0; i < 5; ++i) st[i] = (i == 0 ? 1e-10 : i * h);
    const Eigen::VectorXd wd = fornberg_weights(0.0, st, 1).col(1);
    cdouble u0 = 0.0, du = 0.0;
    for (int i = 0; i < 5; ++i) {
      const cdouble v = ub(st[i]);
      if (i == 0) u0 = v;
      du += wd[i] * v;
    }
    cdouble target = f.regime == Regime::NeumannLow ? -f.trace_dy : f.trace;
    cdouble lhs = f.regime == Regime::Robin ? du - u0 : du;
    f.wall_residual = std::abs(lhs - target);
  }

  // v^b by integrating u^b backwards from infinity between the grid nodes
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return Y_grid[a] < Y_grid[b]; });
  QuadratureOptions qo;
  qo.abs_tol = 1e-11;
  qo.rel_tol = 1e-9;
  std::vector<cdouble> pieces(n);
  parallel_for(static_cast<int>(n), [&](int r) {
    const double lo = Y_grid[order[r]];
    if (r + 1 < n)
      pieces[r] = integrate(ub, lo, Y_grid[order[r + 1]], qo).value;
    else
      pieces[r] = integrate_to_infinity(ub, lo, std::max(1.0, std::sqrt(t)), qo).value;
  });
  cdouble acc = 0.0;
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    acc += pieces[r];
    f.vb[order[r]] = -I * mode.k * acc;
  }
  const double vmax = f.vb.cwiseAbs().maxCoeff();
  f.vb_far = vmax > 0.0 ? std::abs(f.vb[order[n - 1]]) / vmax : 0.0;
  f.mu = fitted_decay_rate(f);
  return f;
}

double fitted_decay_rate(const CorrectorField& f, double y_from) {
  const double umax = f.ub.cwiseAbs().maxCoeff();
  if (!(umax > 0.0)) return HUGE_VAL;
  std::vector<double> xs, ys;
  for (Eigen::Index i = 0; i < f.Y.size(); ++i) {
    const double a = std::abs(f.ub[i]);
    if (f.Y[i] >= y_from && a > 1e-13 * umax) {
      xs.push_back(f.Y[i]);
      ys.push_back(std::log(a));
    }
  }
  if (xs.size() < 3) throw NumericalFailure("fitted_decay_rate: too few resolved nodes");
  return -fit_line(Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size()), Eigen::Map<Eigen::VectorXd>(ys.data(), ys.size()))
              .slope;
}

UsboundSweep usbound_sweep(const ShearProfile& u0, double gamma, const std::vector<double>& nus,
                           const std::vector<double>& s_grid) {
  if (!(gamma > 0.5)) throw InvalidParameter("usbound_sweep: gamma > 1/2");
  if (nus.size() < 2) throw InvalidParameter("usbound_sweep: need at least two nu values");
  UsboundSweep out;
  out.gamma = gamma;
  if (s_grid.empty()) {
    const Eigen::VectorXd s = geomspace(0.01, 2.0, 12);
    out.s_grid.assign(s.data(), s.data() + s.size());
  } else {
    out.s_grid = s_grid;
  }
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(321, 0.0, 8.0);
  std::vector<Eigen::VectorXd> limit;
  for (double s : out.s_grid) limit.push_back(solve_robin(u0, RobinCoefficient::dirichlet(), s, grid).values);
  Eigen::VectorXd lx(nus.size()), ly(nus.size());
  for (size_t i = 0; i < nus.size(); ++i) {
    const double nu = nus[i];
    if (!(nu > 0.0 && nu < 1.0)) throw InvalidParameter("usbound_sweep: nu must lie in (0, 1)");
    const RobinCoefficient a = RobinCoefficient::finite(std::pow(nu, 0.5 - gamma));
    UsboundRow row;
    row.nu = nu;
    for (size_t j = 0; j < out.s_grid.size(); ++j) {
      const HeatField fa = solve_robin(u0, a, out.s_grid[j], grid);
      row.sup_diff = std::max(row.sup_diff, (fa.values - limit[j]).cwiseAbs().maxCoeff());
    }
    row.scaled = row.sup_diff / std::pow(nu, gamma - 0.5);
    out.rows.push_back(row);
    lx[i] = std::log(nu);
    ly[i] = std::log(row.scaled);
  }
  out.slope = fit_line(lx, ly).slope;
  return out;
}

}  // namespace shearlab
