#include "shearlab/rayleigh.hpp"

#include <cmath>
#include <random>

namespace shearlab {

namespace {

using State = Eigen::Vector2cd;

OdeOptions ode_options(const RayleighOptions& opt) {
  OdeOptions o;
  o.rel_tol = opt.rel_tol;
  o.abs_tol = opt.abs_tol;
  o.h_init = 0.05;
  o.h_max = 0.5;
  return o;
}

struct RayleighRhs {
  const ShearProfile& p;
  double k2;
  cdouble c;
  State operator()(double y, const State& x) const {
    const double u = p(y), u2 = p.derivative(2, y);
    State d;
    d[0] = x[1];
    d[1] = (k2 + u2 / (u - c)) * x[0];
    return d;
  }
};

void check_half_plane(double k, cdouble c) {
  if (k == 0.0) throw InvalidParameter("Rayleigh: k must be nonzero");
  if (!(std::copysign(1.0, k) * c.imag() > 0.0))
    throw PreconditionViolation("Rayleigh: need sign(k) Im c > 0 (critical layer on the real axis)");
}

}  // namespace

ShootResult shoot(const ShearProfile& p, double k, cdouble c, const RayleighOptions& opt) {
  check_half_plane(k, c);
  const double ak = std::abs(k);
  RayleighRhs rhs{p, k * k, c};
  State x(cdouble(1.0), cdouble(-ak));
  ShootResult r;
  r.max_abs = 1.0;
  OdeOptions oo = ode_options(opt);
  if (opt.fixed_steps > 0) oo.fixed_steps = opt.fixed_steps;
  Rk78<State> ode(oo);
  // step points bracketing the sampled maximum of |phi|
  double t_prev = opt.y_max, t_before = opt.y_max, t_after = opt.y_max;
  State s_prev = x, s_before = x;
  bool need_after = false;
  ode.integrate(rhs, x, opt.y_max, 0.0, [&](double t, const State& s) {
    if (need_after) {
      t_after = t;
      need_after = false;
    }
    if (std::abs(s[0]) > r.max_abs) {
      r.max_abs = std::abs(s[0]);
      t_before = t_prev;
      s_before = s_prev;
      need_after = true;
    }
    t_prev = t;
    s_prev = s;
  });
  r.phi0 = x[0];
  // the true maximum sits where Re(conj(phi) phi') changes sign
  if (!need_after && t_after < t_before) {
    OdeOptions local = ode_options(opt);
    local.rel_tol = std::min(local.rel_tol, 1e-13);
    auto state_at = [&](double y) {
      State z = s_before;
      Rk78<State>(local).integrate(rhs, z, t_before, y);
      return z;
    };
    auto slope = [&](double y) {
      const State z = state_at(y);
      return std::real(std::conj(z[0]) * z[1]);
    };
    if (slope(t_before) * slope(t_after) < 0.0) {
      const double ym = brent_root(slope, t_after, t_before, 1e-12);
      r.max_abs = std::max(r.max_abs, std::abs(state_at(ym)[0]));
    }
  }
  return r;
}

cdouble shoot_residual(const ShearProfile& p, double k, cdouble c, const RayleighOptions& opt) {
  return shoot(p, k, c, opt).normalized();
}

namespace {

RayleighMode build_mode(const ShearProfile& p, double k, cdouble c, const RayleighOptions& opt) {
  RayleighMode m;
  m.k = k;
  m.c = c;
  double step = opt.grid_step;
  if (opt.layer_resolution > 0.0) {
    double du = 0.0;
    for (double y = 0.0; y <= opt.y_max; y += 0.01) du = std::max(du, std::abs(p.derivative(1, y)));
    // the critical layer has width ~ Im c / U'
    if (du > 0.0) step = std::min(step, opt.layer_resolution * std::abs(c.imag()) / du);
  }
  const int n = static_cast<int>(std::min<double>(std::ceil(opt.y_max / step), opt.max_grid_nodes));
  const double h = opt.y_max / n;
  m.y = Eigen::VectorXd::LinSpaced(n + 1, 0.0, opt.y_max);
  m.phi.resize(n + 1);
  m.dphi.resize(n + 1);
  RayleighRhs rhs{p, k * k, c};
  State x(cdouble(1.0), cdouble(-std::abs(k)));
  m.phi[n] = x[0];
  m.dphi[n] = x[1];
  OdeOptions oo = ode_options(opt);
  if (opt.fixed_steps > 0) oo.fixed_steps = std::max(1, opt.fixed_steps / n);
  Rk78<State> ode(oo);
  for (int j = n - 1; j >= 0; --j) {
    ode.integrate(rhs, x, (j + 1) * h, j * h);
    m.phi[j] = x[0];
    m.dphi[j] = x[1];
  }
  Eigen::Index imax;
  m.phi.cwiseAbs().maxCoeff(&imax);
  const cdouble scale = m.phi[imax];
  m.phi /= scale;
  m.dphi /= scale;
  m.wall_value = std::abs(m.phi[0]);
  m.far_value = std::abs(m.phi[n]);
  m.growth_rate = k * c.imag();
  m.collocation_residual = collocation_residual(p, m);
  return m;
}

}  // namespace

double collocation_residual(const ShearProfile& p, const RayleighMode& m) {
  const Eigen::Index n = m.y.size();
  if (n < 9) return HUGE_VAL;
  const double h = m.y[1] - m.y[0];
  Eigen::VectorXd nodes(9);
  for (int i = 0; i < 9; ++i) nodes[i] = (i - 4) * h;
  const Eigen::VectorXd w = fornberg_weights(0.0, nodes, 2).col(2);
  const double scale = m.phi.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index j = 4; j + 4 < n; ++j) {
    cdouble d2 = 0.0;
    for (int i = 0; i < 9; ++i) d2 += w[i] * m.phi[j - 4 + i];
    const double y = m.y[j];
    const cdouble r = (p(y) - m.c) * (d2 - m.k * m.k * m.phi[j]) - p.derivative(2, y) * m.phi[j];
    worst = std::max(worst, std::abs(r));
  }
  return worst / scale;
}

RayleighMode solve_mode(const ShearProfile& p, double k, cdouble c_init, const RayleighOptions& opt) {
  check_half_plane(k, c_init);
  if (k < 0.0) {
    // equation depends on k^2 only; conjugation maps the k > 0 modes to these
    RayleighMode m = solve_mode(p, -k, std::conj(c_init), opt);
    m.k = k;
    m.c = std::conj(m.c);
    m.phi = m.phi.conjugate();
    m.dphi = m.dphi.conjugate();
    m.growth_rate = k * m.c.imag();
    return m;
  }
  auto D = [&](cdouble c) { return shoot(p, k, c, opt); };
  // Muller iteration on the analytic miss distance phi(0)
  const double d = 1e-3 * (std::abs(c_init) + 1e-2);
  cdouble x0 = c_init + cdouble(d, 0.0), x1 = c_init + cdouble(0.0, -0.5 * d), x2 = c_init;
  if (x1.imag() <= 0.0) x1 = cdouble(x1.real(), 0.5 * c_init.imag());
  cdouble f0 = D(x0).phi0, f1 = D(x1).phi0;
  ShootResult s2 = D(x2);
  cdouble f2 = s2.phi0;
  int it = 0;
  bool ok = std::abs(s2.normalized()) < opt.tol;
  while (!ok && it < opt.max_iter) {
    ++it;
    const cdouble h1 = x1 - x0, h2 = x2 - x1;
    const cdouble d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
    const cdouble a = (d2 - d1) / (h2 + h1);
    const cdouble b = a * h2 + d2;
    const cdouble disc = std::sqrt(b * b - 4.0 * f2 * a);
    const cdouble e = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
    cdouble step = e != 0.0 ? -2.0 * f2 / e : (d2 != 0.0 ? -f2 / d2 : cdouble(d, 0.0));
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) throw ModeNotFound("solve_mode: Muller step blew up");
    cdouble x3 = x2 + step;
    if (x3.imag() <= 0.0) x3 = cdouble(x3.real(), 0.5 * x2.imag());
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
    x2 = x3;
    s2 = D(x2);
    f2 = s2.phi0;
    ok = std::abs(s2.normalized()) < opt.tol;
    if (!ok && std::abs(x2 - x1) < 1e-15 * std::max(1.0, std::abs(x2))) break;
    if (std::abs(x2) > 1e3) break;
  }
  if (!ok) throw ModeNotFound("solve_mode: no convergence");
  if (x2.imag() <= 1e-10) throw ModeNeutral("solve_mode: converged to a neutral phase speed");
  RayleighMode m = build_mode(p, k, x2, opt);
  m.residual = std::abs(s2.normalized());
  m.iterations = it;
  return m;
}

std::optional<RayleighMode> try_solve_mode(const ShearProfile& p, double k, cdouble c_init,
                                           const RayleighOptions& opt) {
  try {
    return solve_mode(p, k, c_init, opt);
  } catch (const NumericalFailure&) {
    return std::nullopt;
  }
}

std::pair<double, double> profile_range(const ShearProfile& p, double y_max) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (int i = 0; i <= 8000; ++i) {
    const double u = p(y_max * i / 8000.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  if (std::isfinite(p.u_infinity())) {
    lo = std::min(lo, p.u_infinity());
    hi = std::max(hi, p.u_infinity());
  }
  return {lo, hi};
}

bool semicircle_check(cdouble c, const ShearProfile& p) {
  const auto [lo, hi] = profile_range(p);
  return std::abs(c - cdouble(0.5 * (lo + hi), 0.0)) <= 0.5 * (hi - lo) + 1e-8;
}

namespace {

// argument change of D along the segment a -> b, bisecting while jumps exceed pi/2
double arg_change(const std::function<cdouble(cdouble)>& D, cdouble a, cdouble fa, cdouble b, cdouble fb, int depth,
                  int& evals) {
  const double d = std::arg(fb / fa);
  if (std::abs(d) <= 0.5 * M_PI || depth >= 8) return d;
  const cdouble m = 0.5 * (a + b);
  const cdouble fm = D(m);
  ++evals;
  return arg_change(D, a, fa, m, fm, depth + 1, evals) + arg_change(D, m, fm, b, fb, depth + 1, evals);
}

}  // namespace

RectangleScan scan_rectangle(const ShearProfile& p, double k, const ScanOptions& opt) {
  RectangleScan out;
  const auto [lo, hi] = profile_range(p, opt.ray.y_max);
  const double H = hi - lo;
  if (!(H > 0.0)) return out;
  const double eps = 1e-3 * H;
  const int nx = opt.nx, ny = opt.ny;
  auto node = [&](int i, int j) { return cdouble(lo + H * i / nx, eps + (H - eps) * j / ny); };
  std::function<cdouble(cdouble)> D = [&](cdouble c) { return shoot(p, std::abs(k), c, opt.ray).phi0; };
  std::vector<cdouble> f((nx + 1) * (ny + 1));
  parallel_for((nx + 1) * (ny + 1), [&](int idx) { f[idx] = D(node(idx % (nx + 1), idx / (nx + 1))); });
  out.evaluations = static_cast<int>(f.size());
  auto F = [&](int i, int j) { return f[j * (nx + 1) + i]; };
  // horizontal edges (i,j)->(i+1,j), vertical edges (i,j)->(i,j+1)
  std::vector<double> hor(nx * (ny + 1)), ver((nx + 1) * ny);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i)
      hor[j * nx + i] = arg_change(D, node(i, j), F(i, j), node(i + 1, j), F(i + 1, j), 0, out.evaluations);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i)
      ver[j * (nx + 1) + i] = arg_change(D, node(i, j), F(i, j), node(i, j + 1), F(i, j + 1), 0, out.evaluations);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double total = hor[j * nx + i] + ver[j * (nx + 1) + i + 1] - hor[(j + 1) * nx + i] - ver[j * (nx + 1) + i];
      const int w = static_cast<int>(std::lround(total / (2.0 * M_PI)));
      out.total_winding += w;
      if (w != 0) {
        out.winding_cells.push_back(0.5 * (node(i, j) + node(i + 1, j + 1)));
        out.windings.push_back(w);
      }
    }
  }
  return out;
}

std::vector<double> default_k_grid() {
  std::vector<double> k;
  for (int i = 1; i <= 40; ++i) k.push_back(0.05 * i);
  for (int i = 1; i <= 12; ++i) k.push_back(2.0 + 0.25 * i);
  return k;
}

namespace {

std::optional<RayleighMode> best_mode(const ShearProfile& p, double k, const std::vector<cdouble>& seeds,
                                      const RayleighOptions& opt) {
  std::optional<RayleighMode> best;
  std::vector<cdouble> found;
  for (const cdouble& s : seeds) {
    if (!(s.imag() > 0.0)) continue;
    auto m = try_solve_mode(p, k, s, opt);
    if (!m || !semicircle_check(m->c, p)) continue;
    bool dup = false;
    for (const cdouble& f : found)
      if (std::abs(f - m->c) < 1e-7) dup = true;
    if (dup) continue;
    found.push_back(m->c);
    if (!best || m->growth_rate > best->growth_rate) best = std::move(m);
  }
  return best;
}

}  // namespace

DispersionCurve scan_sigma(const ShearProfile& p, const std::vector<double>& k_grid, const ScanOptions& opt) {
  if (k_grid.empty()) throw InvalidParameter("scan_sigma: empty k grid");
  for (size_t i = 0; i < k_grid.size(); ++i)
    if (!(k_grid[i] > 0.0) || (i > 0 && !(k_grid[i] > k_grid[i - 1])))
      throw InvalidParameter("scan_sigma: k grid must be positive and increasing");
  const int nk = static_cast<int>(k_grid.size());
  std::vector<RectangleScan> scans(nk);
  parallel_for(nk, [&](int i) { scans[i] = scan_rectangle(p, k_grid[i], opt); });
  DispersionCurve curve;
  curve.k_values = k_grid;
  curve.sigma_values.assign(nk, 0.0);
  curve.modes.resize(nk);
  std::optional<cdouble> prev;
  for (int i = 0; i < nk; ++i) {
    std::vector<cdouble> seeds = scans[i].winding_cells;
    if (prev) seeds.insert(seeds.begin(), *prev);
    auto m = best_mode(p, k_grid[i], seeds, opt.ray);
    if (m) {
      curve.sigma_values[i] = m->growth_rate;
      prev = m->c;
      curve.modes[i] = std::move(m);
    } else {
      prev.reset();
    }
  }
  const auto it = std::max_element(curve.sigma_values.begin(), curve.sigma_values.end());
  const int imax = static_cast<int>(it - curve.sigma_values.begin());
  if (!(*it > 0.0)) {
    curve.stable = true;
    return curve;
  }
  curve.stable = false;
  // refine the peak between the neighbouring grid points
  const cdouble c_peak = curve.modes[imax]->c;
  auto sigma_at = [&](double k) {
    auto m = try_solve_mode(p, k, c_peak, opt.ray);
    return m ? m->growth_rate : 0.0;
  };
  const double a = k_grid[std::max(imax - 1, 0)];
  const double b = k_grid[std::min(imax + 1, nk - 1)];
  double k0 = k_grid[imax];
  if (b > a) k0 = golden_maximize(sigma_at, a, b, 1e-5);
  auto m0 = try_solve_mode(p, k0, c_peak, opt.ray);
  if (m0 && m0->growth_rate >= curve.sigma_values[imax]) {
    const auto pos = std::lower_bound(curve.k_values.begin(), curve.k_values.end(), k0) - curve.k_values.begin();
    if (pos < nk && std::abs(curve.k_values[pos] - k0) < 1e-12) {
      curve.sigma_values[pos] = m0->growth_rate;
      curve.modes[pos] = *m0;
    } else {
      curve.k_values.insert(curve.k_values.begin() + pos, k0);
      curve.sigma_values.insert(curve.sigma_values.begin() + pos, m0->growth_rate);
      curve.modes.insert(curve.modes.begin() + pos, *m0);
    }
    curve.k0 = k0;
    curve.sigma0 = m0->growth_rate;
  } else {
    curve.k0 = k_grid[imax];
    curve.sigma0 = curve.sigma_values[imax];
  }
  // quadratic coefficient from a local least-squares fit
  const double h = 0.5 * (b - a) > 0 ? 0.25 * (b - a) : 0.025;
  Eigen::MatrixXd A(5, 3);
  Eigen::VectorXd s(5);
  for (int j = 0; j < 5; ++j) {
    const double dk = (j - 2) * h;
    A(j, 0) = 1.0;
    A(j, 1) = dk;
    A(j, 2) = dk * dk;
    s[j] = j == 2 ? curve.sigma0 : sigma_at(curve.k0 + dk);
  }
  const Eigen::VectorXd coef = least_squares(A, s);
  curve.curvature = coef[2];
  curve.curvature_order = std::abs(coef[2]) < 1e-6 * curve.sigma0 ? 2 : 1;
  return curve;
}

std::pair<cdouble, cdouble> mode_at(const RayleighMode& m, double y) {
  const Eigen::Index n = m.y.size() - 1;
  const double h = m.y[1] - m.y[0];
  if (y <= 0.0) return {m.phi[0], m.dphi[0]};
  if (y >= m.y[n]) return {m.phi[n], m.dphi[n]};
  Eigen::Index j = std::min<Eigen::Index>(static_cast<Eigen::Index>(y / h), n - 1);
  const double s = (y - m.y[j]) / h;
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  const cdouble phi = h00 * m.phi[j] + h10 * h * m.dphi[j] + h01 * m.phi[j + 1] + h11 * h * m.dphi[j + 1];
  const cdouble dphi = ((6 * s * s - 6 * s) * (m.phi[j] - m.phi[j + 1])) / h + (3 * s * s - 4 * s + 1) * m.dphi[j] +
                       (3 * s * s - 2 * s) * m.dphi[j + 1];
  return {phi, dphi};
}

VelocityField mode_velocity_field(const RayleighMode& m, double t, const Eigen::VectorXd& x_grid,
                                  const Eigen::VectorXd& y_grid) {
  VelocityField f;
  const cdouble I(0.0, 1.0);
  const cdouble lambda = -I * m.k * m.c;
  f.u.resize(y_grid.size(), x_grid.size());
  f.v.resize(y_grid.size(), x_grid.size());
  double acc = 0.0;
  for (Eigen::Index r = 0; r < y_grid.size(); ++r) {
    const auto [phi, dphi] = mode_at(m, y_grid[r]);
    for (Eigen::Index c = 0; c < x_grid.size(); ++c) {
      const cdouble e = std::exp(I * m.k * x_grid[c] + lambda * t);
      f.u(r, c) = e * dphi;
      f.v(r, c) = -I * m.k * e * phi;
      acc += std::norm(f.u(r, c)) + std::norm(f.v(r, c));
    }
  }
  f.norm = std::sqrt(acc);
  return f;
}

GrowthEstimate growth_estimate(const ShearProfile& p, double k, double T, double dt, const GrowthOracleOptions& opt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw InvalidParameter("growth_oracle: T and dt must be positive");
  const int n = opt.n;
  const double Y = opt.y_max, beta = opt.stretch;
  Eigen::VectorXd y(n + 2);
  for (int j = 0; j < n + 2; ++j) {
    const double s = static_cast<double>(j) / (n + 1);
    y[j] = Y * std::expm1(beta * s) / std::expm1(beta);
  }
  Vector<cdouble> lsub(n - 1), ldiag(n), lsup(n - 1);
  Eigen::VectorXd U(n), U2(n), w(n);
  for (int i = 0; i < n; ++i) {
    const double h0 = y[i + 1] - y[i], h1 = y[i + 2] - y[i + 1];
    ldiag[i] = -2.0 / (h0 * h1) - k * k;
    if (i > 0) lsub[i - 1] = 2.0 / (h0 * (h0 + h1));
    if (i + 1 < n) lsup[i] = 2.0 / (h1 * (h0 + h1));
    U[i] = p(y[i + 1]);
    U2[i] = p.derivative(2, y[i + 1]);
    w[i] = 0.5 * (h0 + h1);
  }
  const cdouble z(0.0, 0.5 * k * dt);
  // A = U L - U'': row i scaled by U_i
  Vector<cdouble> asub(n - 1), adiag(n), asup(n - 1);
  for (int i = 0; i < n; ++i) {
    adiag[i] = U[i] * ldiag[i] - U2[i];
    if (i > 0) asub[i - 1] = U[i] * lsub[i - 1];
    if (i + 1 < n) asup[i] = U[i] * lsup[i];
  }
  const Vector<cdouble> psub = lsub + z * asub, pdiag = ldiag + z * adiag, psup = lsup + z * asup;
  const Vector<cdouble> msub = lsub - z * asub, mdiag = ldiag - z * adiag, msup = lsup - z * asup;
  const TridiagonalLU<cdouble> lu(psub, pdiag, psup);
  if (lu.singular()) throw NumericalFailure("growth_oracle: singular Crank-Nicolson matrix");
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<cdouble> psi(n);
  std::vector<cdouble> coef(6);
  for (auto& c : coef) {
    const double re = normal(rng);
    c = cdouble(re, normal(rng));
  }
  for (int i = 0; i < n; ++i) {
    const double yy = y[i + 1];
    cdouble s = 0.0;
    for (int m = 0; m < 6; ++m) s += coef[m] * std::cos(0.5 * m * yy);
    psi[i] = yy * std::exp(-0.5 * yy) * s;
  }
  auto norm = [&](const Vector<cdouble>& v) { return std::sqrt((w.array() * v.cwiseAbs2().array()).sum()); };
  GrowthEstimate est;
  double log_scale = 0.0;
  const long steps = std::lround(T / dt);
  const long every = std::max(1L, std::lround(opt.sample_every / dt));
  {
    const double nv = norm(psi);
    psi /= nv;
    log_scale = std::log(nv);
    est.log_norm.emplace_back(0.0, log_scale);
  }
  for (long s = 1; s <= steps; ++s) {
    psi = lu.solve(tridiagonal_apply<cdouble>(msub, mdiag, msup, psi));
    if (s % every == 0) {
      const double nv = norm(psi);
      if (!(nv > 0.0) || !std::isfinite(nv)) throw NumericalFailure("growth_oracle: state lost");
      psi /= nv;
      log_scale += std::log(nv);
      est.log_norm.emplace_back(s * dt, log_scale);
    }
  }
  auto slope_over = [&](double a, double b) {
    std::vector<double> tx, ly;
    for (const auto& [t, l] : est.log_norm)
      if (t >= a - 1e-9 && t <= b + 1e-9) {
        tx.push_back(t);
        ly.push_back(l);
      }
    return fit_line(Eigen::Map<Eigen::VectorXd>(tx.data(), tx.size()), Eigen::Map<Eigen::VectorXd>(ly.data(), ly.size()))
        .slope;
  };
  est.slope = slope_over(0.5 * T, T);
  est.slope_third_quarter = slope_over(0.5 * T, 0.75 * T);
  est.slope_last_quarter = slope_over(0.75 * T, T);
  const double big = std::max(std::abs(est.slope_third_quarter), std::abs(est.slope_last_quarter));
  // algebraic decay keeps drifting like 1/t; it never threatens a no-growth verdict
  const bool no_growth = std::max(est.slope_third_quarter, est.slope_last_quarter) <= 1e-3;
  est.conclusive = no_growth || std::abs(est.slope_third_quarter - est.slope_last_quarter) <= 0.02 * big;
  return est;
}

double growth_oracle(const ShearProfile& p, double k, double T, double dt, const GrowthOracleOptions& opt) {
  if (dt > 0.01) throw InvalidParameter("growth_oracle: dt must be <= 0.01");
  const GrowthEstimate e = growth_estimate(p, k, T, dt, opt);
  if (!e.conclusive) throw OracleInconclusive("growth_oracle: slope not settled over the final quarters");
  return e.slope;
}

PacketFit wave_packet_fit(const ShearProfile& p, const DispersionCurve& curve, double t_lo, double t_hi,
                          int band_points) {
  if (curve.stable) throw InvalidParameter("wave_packet_fit: stable curve");
  PacketFit fit;
  const auto& ks = curve.k_values;
  const auto& sg = curve.sigma_values;
  const int n = static_cast<int>(ks.size());
  int i0 = static_cast<int>(std::max_element(sg.begin(), sg.end()) - sg.begin());
  int l = i0, r = i0;
  while (l > 0 && sg[l - 1] > 0.0) --l;
  while (r + 1 < n && sg[r + 1] > 0.0) ++r;
  const double ka = l > 0 ? ks[l - 1] : ks[l];
  const double kb = r + 1 < n ? ks[r + 1] : ks[r];
  fit.band_k.resize(band_points);
  fit.band_sigma.assign(band_points, 0.0);
  for (int j = 0; j < band_points; ++j) fit.band_k[j] = ka + (kb - ka) * j / (band_points - 1);
  // continuation outward from the peak
  const int jp = static_cast<int>(std::lround((curve.k0 - ka) / (kb - ka) * (band_points - 1)));
  const cdouble c0 = curve.modes[i0]->c;
  for (int dir : {-1, 1}) {
    cdouble seed = c0;
    for (int j = dir < 0 ? jp : jp + 1; j >= 0 && j < band_points; j += dir) {
      auto m = try_solve_mode(p, fit.band_k[j], seed);
      if (!m) break;
      fit.band_sigma[j] = m->growth_rate;
      seed = m->c;
    }
  }
  const int nt = 81;
  Eigen::MatrixXd A(nt, 3);
  Eigen::VectorXd b(nt);
  for (int i = 0; i < nt; ++i) {
    const double t = t_lo + (t_hi - t_lo) * i / (nt - 1);
    // trapezoid in k of e^{2 sigma t}, factored by the peak for range
    const double smax = *std::max_element(fit.band_sigma.begin(), fit.band_sigma.end());
    double acc = 0.0;
    for (int j = 0; j + 1 < band_points; ++j)
      acc += 0.5 * (fit.band_k[j + 1] - fit.band_k[j]) *
             (std::exp(2.0 * (fit.band_sigma[j] - smax) * t) + std::exp(2.0 * (fit.band_sigma[j + 1] - smax) * t));
    const double ln = 0.5 * (std::log(2.0 * M_PI * acc) + 2.0 * smax * t);
    fit.t.push_back(t);
    fit.log_norm.push_back(ln);
    A(i, 0) = 1.0;
    A(i, 1) = t;
    A(i, 2) = -std::log1p(t);
    b[i] = ln;
  }
  const Eigen::VectorXd c = least_squares(A, b);
  fit.log_c = c[0];
  fit.sigma = c[1];
  fit.beta = c[2];
  return fit;
}

}  // namespace shearlab
