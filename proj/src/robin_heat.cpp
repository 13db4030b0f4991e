#include "shearlab/robin_heat.hpp"

#include <cmath>
#include <sstream>

namespace shearlab {

RobinCoefficient RobinCoefficient::finite(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidParameter("Robin coefficient must be finite and >= 0");
  return RobinCoefficient(false, a);
}

double RobinCoefficient::value() const {
  if (dirichlet_) throw InvalidParameter("Robin coefficient: Dirichlet state has no finite value");
  return a_;
}

std::string RobinCoefficient::str() const {
  if (dirichlet_) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << a_;
  return os.str();
}

namespace {

QuadratureOptions extension_quadrature() {
  QuadratureOptions o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-12;
  return o;
}

// breakpoints at the scales where catalog profiles vary
void add_feature_points(std::vector<double>& pts, double lo, double hi) {
  for (double p = 1.0 / 64.0; p < hi; p *= 2.0)
    if (p > lo) pts.push_back(p);
}

}  // namespace

ExtendedProfile::ExtendedProfile(ShearProfile base, RobinCoefficient a, ExtensionOptions opt)
    : base_(std::move(base)), a_(a), opt_(opt) {
  if (!opt_.allow_nonflat && std::abs(base_(0.0)) > 1e-10)
    throw PreconditionViolation("extend: u0(0) must vanish");
}

double ExtendedProfile::memory_integral(int k, double x) const {
  if (x <= 0.0) return 0.0;
  const double a = a_.value();
  auto f = [&](double z) { return std::exp(-a * (x - z)) * base_.derivative(k, z); };
  std::vector<double> pts{x};
  double lo = 0.0;
  if (a > 0.0) {
    lo = std::max(0.0, x - 60.0 / a);
    for (double m : {20.0, 5.0, 1.0, 0.2})
      if (x - m / a > lo) pts.push_back(x - m / a);
  }
  pts.push_back(lo);
  add_feature_points(pts, lo, x);
  return integrate_pieces(f, pts, extension_quadrature()).value;
}

double ExtendedProfile::operator()(double y) const {
  if (y >= 0.0) return base_(y);
  const double x = -y;
  if (a_.is_dirichlet()) return -base_(x);
  const double a = a_.value();
  if (a == 0.0) return base_(x);
  double v = -base_(x) + 2.0 * memory_integral(1, x);
  if (opt_.allow_nonflat) v += 2.0 * std::exp(-a * x) * base_(0.0);
  return v;
}

double ExtendedProfile::derivative(int k, double y) const {
  if (y >= 0.0 || k == 0) return k == 0 ? (*this)(y) : base_.derivative(k, y);
  return extension_derivative(base_, a_, k, y);
}

double ExtendedProfile::exponential_form(double y) const {
  if (y >= 0.0) return base_(y);
  const double x = -y;
  if (a_.is_dirichlet()) return -base_(x);
  const double a = a_.value();
  auto g = [&](double z) { return base_.derivative(1, z) - a * base_(z); };
  std::vector<double> pts{0.0, x};
  add_feature_points(pts, 0.0, x);
  if (a * x < 600.0) {
    auto f = [&](double z) { return std::exp(a * z) * g(z); };
    return std::exp(-a * x) * (base_(0.0) + integrate_pieces(f, pts, extension_quadrature()).value);
  }
  auto f = [&](double z) { return std::exp(-a * (x - z)) * g(z); };
  return std::exp(-a * x) * base_(0.0) + integrate_pieces(f, pts, extension_quadrature()).value;
}

double ExtendedProfile::primitive_form(double y) const {
  if (y >= 0.0) return base_(y);
  const double x = -y;
  if (a_.is_dirichlet()) return -base_(x);
  const double a = a_.value();
  return base_(x) - 2.0 * a * memory_integral(0, x);
}

ExtendedProfile extend(const ShearProfile& u0, RobinCoefficient a, ExtensionOptions opt) {
  return ExtendedProfile(u0, a, opt);
}

double extension_derivative(const ShearProfile& u0, RobinCoefficient a, int k, double y) {
  if (k < 0) throw InvalidParameter("extension_derivative: negative order");
  if (y >= 0.0) return u0.derivative(k, y);
  if (k == 0) return ExtendedProfile(u0, a)(y);
  if (!u0.flat()) throw PreconditionViolation("extension_derivative: data not flat at 0");
  if (k + 1 > u0.d_max()) throw UnsupportedOrder("extension_derivative: needs order k+1 <= d_max");
  const double x = -y;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  if (a.is_dirichlet()) return -sign * u0.derivative(k, x);
  if (a.value() == 0.0) return sign * u0.derivative(k, x);
  // the memory integral of u0^{(k+1)} against e^{-a(x-z)}
  const double av = a.value();
  auto f = [&](double z) { return std::exp(-av * (x - z)) * u0.derivative(k + 1, z); };
  std::vector<double> pts{x};
  const double lo = std::max(0.0, x - 60.0 / av);
  for (double m : {20.0, 5.0, 1.0, 0.2})
    if (x - m / av > lo) pts.push_back(x - m / av);
  pts.push_back(lo);
  add_feature_points(pts, lo, x);
  const double mem = integrate_pieces(f, pts, extension_quadrature()).value;
  return sign * (-u0.derivative(k, x) + 2.0 * mem);
}

Eigen::VectorXd default_heat_grid(double y_max) {
  std::vector<double> v;
  for (int i = 0; i < 400; ++i) v.push_back(y_max * i / 399.0);
  for (int i = 0; i < 50; ++i) {
    const double s = i / 49.0;
    v.push_back(0.5 * s * s);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double robin_heat_value(const ExtendedProfile& ext, double t, double y) {
  if (!(t > 0.0)) throw InvalidParameter("solve_robin: t must be positive");
  const ShearProfile& u0 = ext.base();
  const RobinCoefficient& a = ext.coefficient();
  const double sq = std::sqrt(t);
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-12;
  // odd part: int_0^inf (K(y-s) - K(y+s)) u0(s) ds, written on the line in Gaussian units
  auto uodd = [&](double x) { return x >= 0.0 ? u0(x) : -u0(-x); };
  auto gauss = [&](double xi) { return std::exp(-xi * xi) * uodd(y + 2.0 * sq * xi); };
  std::vector<double> pts{-6.0, -3.0, 0.0, 3.0, 6.0};
  const double kink = -y / (2.0 * sq);
  if (kink > -6.0) pts.push_back(kink);
  double u = integrate_pieces(gauss, pts, o).value / std::sqrt(M_PI);
  const double tail = 0.5 * std::erfc(6.0);
  u += tail * (uodd(y - 12.0 * sq) + uodd(y + 12.0 * sq));
  if (a.is_dirichlet()) return u;
  // the rest of the extension: 2 int u0'(z) int_z^inf K(y+s) e^{-a(s-z)} ds dz, inner in closed form
  const double av = a.value();
  auto robin_kernel = [&](double z) {
    const double w = y + z;
    return erfcx((w + 2.0 * av * t) / (2.0 * sq)) * std::exp(-w * w / (4.0 * t));
  };
  const double zmax = 12.0 * sq - y;
  if (zmax > 0.0) {
    auto f = [&](double z) { return u0.derivative(1, z) * robin_kernel(z); };
    std::vector<double> zp{0.0, zmax};
    add_feature_points(zp, 0.0, zmax);
    for (double m : {0.5, 1.0, 2.0, 4.0})
      if (m * sq < zmax) zp.push_back(m * sq);
    u += integrate_pieces(f, zp, o).value;
  }
  if (ext.options().allow_nonflat) u += u0(0.0) * robin_kernel(0.0);
  return u;
}

HeatField solve_robin(const ShearProfile& u0, RobinCoefficient a, double t, const Eigen::VectorXd& grid,
                      ExtensionOptions opt) {
  if (!(t > 0.0)) throw InvalidParameter("solve_robin: t must be positive");
  const ExtendedProfile ext(u0, a, opt);
  HeatField field;
  field.time = t;
  field.grid = grid;
  field.values.resize(grid.size());
  field.coefficient = a;
  field.source_kind = SourceKind::RobinHomogeneous;
  parallel_for(static_cast<int>(grid.size()), [&](int i) { field.values[i] = robin_heat_value(ext, t, grid[i]); });
  return field;
}

double bc_residual(const HeatField& field) {
  const auto& g = field.grid;
  if (g.size() < 5 || g[0] != 0.0) throw InsufficientResolution("bc_residual: grid must start at 0");
  if (field.coefficient.is_dirichlet()) return std::abs(field.values[0]);
  int near = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g[i] <= 0.1) ++near;
  if (near < 5) throw InsufficientResolution("bc_residual: fewer than 5 nodes in [0, 0.1]");
  const Eigen::MatrixXd w = fornberg_weights(0.0, g.head(5), 1);
  const double du = w.col(1).dot(field.values.head(5));
  return std::abs(du - field.coefficient.value() * field.values[0]);
}

HeatField solve_inhomogeneous_dirichlet(const ShearProfile& u0, const std::function<double(double)>& f,
                                        const std::function<double(double, double)>& r, double t,
                                        const Eigen::VectorXd& grid, std::string* warning) {
  if (!(t > 0.0)) throw InvalidParameter("solve_inhomogeneous_dirichlet: t must be positive");
  if (warning) warning->clear();
  if ((std::abs(f(0.0)) > 1e-12 || std::abs(u0(0.0)) > 1e-12) && warning)
    *warning = "compatibility f(0) = u0(0) = 0 violated; corner regularity not claimed";
  const ExtendedProfile ext(u0, RobinCoefficient::dirichlet(), ExtensionOptions{true});
  HeatField field;
  field.time = t;
  field.grid = grid;
  field.values.resize(grid.size());
  field.coefficient = RobinCoefficient::dirichlet();
  field.source_kind = SourceKind::InhomogeneousDirichlet;
  parallel_for(static_cast<int>(grid.size()), [&](int i) {
    const double y = grid[i];
    field.values[i] = dirichlet_trace_solution(f, t, y) + robin_heat_value(ext, t, y) + source_solution(r, t, y);
  });
  return field;
}

std::string Norm::str() const {
  switch (kind) {
    case NormKind::Linf:
      return "Linf";
    case NormKind::L1:
      return "L1";
    case NormKind::L2:
      return "L2";
    case NormKind::Wkp: {
      std::ostringstream os;
      os << "W" << k << "," << (std::isinf(p) ? std::string("inf") : std::to_string(static_cast<int>(p)));
      return os.str();
    }
  }
  return "?";
}

namespace {

int norm_order(const Norm& n) { return n.kind == NormKind::Wkp ? n.k : 0; }
double norm_power(const Norm& n) {
  switch (n.kind) {
    case NormKind::Linf:
      return HUGE_VAL;
    case NormKind::L1:
      return 1.0;
    case NormKind::L2:
      return 2.0;
    case NormKind::Wkp:
      return n.p;
  }
  return 2.0;
}

double sup_abs(const std::function<double(double)>& d, double x_end) {
  std::vector<double> xs;
  for (int i = 0; i <= 800; ++i) xs.push_back(kYMax * i / 800.0);
  if (x_end > kYMax) {
    const Eigen::VectorXd g = geomspace(kYMax, x_end, 200);
    xs.insert(xs.end(), g.data(), g.data() + g.size());
  }
  Eigen::VectorXd xsv = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  Eigen::VectorXd vals(xsv.size());
  parallel_for(static_cast<int>(xsv.size()), [&](int i) { vals[i] = std::abs(d(xsv[i])); });
  Eigen::Index imax;
  double best = vals.maxCoeff(&imax);
  const double lo = xsv[std::max<Eigen::Index>(imax - 1, 0)];
  const double hi = xsv[std::min<Eigen::Index>(imax + 1, xsv.size() - 1)];
  if (hi > lo) {
    auto f = [&](double x) { return std::abs(d(x)); };
    const double xm = golden_maximize(f, lo, hi, 1e-10 * std::max(1.0, hi));
    best = std::max(best, f(xm));
  }
  return best;
}

double lp_integral(const std::function<double(double)>& d, double p, double tail_scale) {
  std::vector<double> pts;
  for (int i = 0; i <= 80; ++i) pts.push_back(kYMax * i / 80.0);
  add_feature_points(pts, 0.0, kYMax);
  QuadratureOptions o;
  o.abs_tol = 1e-18;
  o.rel_tol = 1e-10;
  auto f = [&](double x) { return std::pow(std::abs(d(x)), p); };
  double s = integrate_pieces(f, pts, o).value;
  s += integrate_to_infinity(f, kYMax, tail_scale, o).value;
  return s;
}

}  // namespace

double rate_distance(const ShearProfile& u0, double a, Norm norm, RateLimit limit, double t, bool allow_nonflat) {
  const ExtensionOptions eo{allow_nonflat};
  const RobinCoefficient ca = RobinCoefficient::finite(a);
  const RobinCoefficient cl = limit == RateLimit::ToInfinity ? RobinCoefficient::dirichlet() : RobinCoefficient::finite(0.0);
  const int kmax = norm_order(norm);
  const double p = norm_power(norm);
  if (t == 0.0) {
    const ExtendedProfile ea(u0, ca, eo), el(u0, cl, eo);
    const double x_end = limit == RateLimit::ToZero ? kYMax + 60.0 / a : kYMax;
    const double tail_scale = limit == RateLimit::ToZero ? std::max(kYMax, 1.0 / a) : kYMax;
    double acc = 0.0;
    for (int j = 0; j <= kmax; ++j) {
      auto d = [&, j](double x) { return ea.derivative(j, -x) - el.derivative(j, -x); };
      if (std::isinf(p))
        acc = std::max(acc, sup_abs(d, x_end));
      else
        acc += lp_integral(d, p, tail_scale);
    }
    return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
  }
  if (kmax > 0) throw InvalidParameter("rate_distance: derivative norms at t > 0 are not provided");
  const double y_end = kYMax + (limit == RateLimit::ToZero ? 12.0 * std::sqrt(t) : 0.0);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(1601, 0.0, y_end);
  const HeatField fa = solve_robin(u0, ca, t, grid, eo);
  const HeatField fl = solve_robin(u0, cl, t, grid, eo);
  const Eigen::ArrayXd diff = (fa.values - fl.values).array().abs();
  if (std::isinf(p)) return diff.maxCoeff();
  const Eigen::ArrayXd w = diff.pow(p);
  const double h = grid[1] - grid[0];
  return std::pow(h * (w.sum() - 0.5 * (w(0) + w(w.size() - 1))), 1.0 / p);
}

RateResult rate_experiment(const ShearProfile& u0, const std::vector<double>& a_values, Norm norm, RateLimit limit,
                           double t, const RateOptions& opt) {
  if (a_values.size() < 5) throw InvalidParameter("rate_experiment: need at least 5 a-values");
  if (t < 0.0) throw InvalidParameter("rate_experiment: t must be >= 0");
  std::vector<double> as = a_values;
  std::sort(as.begin(), as.end());
  const double lo = limit == RateLimit::ToInfinity ? 10.0 : 1e-4;
  const double hi = limit == RateLimit::ToInfinity ? 1e4 : 1e-1;
  if (as.front() < lo * (1 - 1e-12) || as.back() > hi * (1 + 1e-12))
    throw InvalidParameter("rate_experiment: a-values outside the documented span");
  RateResult res;
  res.norm = norm;
  res.limit = limit;
  res.t = t;
  const bool l1_of_data = limit == RateLimit::ToZero && norm_power(norm) == 1.0 && norm_order(norm) == 0;
  if (l1_of_data) {
    const auto rep = check_assumptions(u0, GammaRegime::GammaBelowHalf, 0, 1e-10);
    if (!rep.orders[0].integrable) {
      res.advisory = "u0 is not in L1: no convergence claimed for this norm";
      return res;
    }
    if (!opt.primitive_in_l1) res.advisory = "L1 rate at order 0 needs the primitive of u0 in L1; slope not claimed";
  }
  res.table.resize(as.size());
  for (size_t i = 0; i < as.size(); ++i) {
    res.table[i].a = as[i];
    res.table[i].norm_value = rate_distance(u0, as[i], norm, limit, t, opt.allow_nonflat);
  }
  if (!res.advisory.empty()) return res;
  const size_t skip = opt.drop_extremes ? 1 : 0;
  const size_t n = as.size() - 2 * skip;
  Eigen::VectorXd lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    lx[i] = std::log(res.table[i + skip].a);
    ly[i] = std::log(res.table[i + skip].norm_value);
  }
  res.fit = fit_line(lx, ly);
  return res;
}

EnvelopeCheck envelope_check(const std::vector<std::pair<double, double>>& samples, const Envelope& env) {
  EnvelopeCheck out;
  double best = -HUGE_VAL;
  for (const auto& [t, v] : samples) {
    if (!(v > 0.0)) continue;
    const double lr = std::log(v) - env.log_shape(t);
    if (lr > best) {
      best = lr;
      out.worst_t = t;
    }
  }
  out.worst_ratio = std::isfinite(best) ? std::exp(best) : 0.0;
  out.pass = out.worst_ratio <= env.constant * (1.0 + 1e-12);
  return out;
}

GronwallResult gronwall_bound(double lambda, double alpha, double beta, double C, double phi0, double t_check) {
  if (lambda < 0.0) throw InvalidParameter("gronwall_bound: lambda must be >= 0");
  if (lambda >= alpha) throw InvalidParameter("gronwall_bound: hypothesis lambda < alpha violated");
  GronwallResult out;
  // psi = phi e^{-alpha t} keeps the state O(1)
  using State = Eigen::Matrix<double, 1, 1>;
  State psi;
  psi << phi0;
  auto rhs = [&](double t, const State& x) {
    State d;
    d << (lambda - alpha) * x[0] + C * std::pow(1.0 + t, -beta);
    return d;
  };
  Rk78<State> ode;
  const int steps = 600;
  double sup = phi0;
  out.trajectory.emplace_back(0.0, phi0);
  for (int i = 1; i <= steps; ++i) {
    const double t0 = t_check * (i - 1) / steps, t1 = t_check * i / steps;
    ode.integrate(rhs, psi, t0, t1);
    sup = std::max(sup, psi[0] * std::pow(1.0 + t1, beta));
    out.trajectory.emplace_back(t1, psi[0] * std::exp(alpha * t1));
  }
  out.envelope = Envelope{alpha, beta, sup};
  out.asympt_ratio = asympt_ratio(alpha, beta, t_check);
  return out;
}

double asympt_ratio(double alpha, double beta, double t) {
  if (!(t > 0.0)) return 0.0;
  auto f = [&](double s) { return std::exp(alpha * (s - t)) * std::pow((1.0 + t) / (1.0 + s), beta); };
  std::vector<double> pts{0.0, t};
  for (double m : {1.0, 5.0, 20.0})
    if (t - m / std::max(alpha, 1e-3) > 0.0) pts.push_back(t - m / std::max(alpha, 1e-3));
  return integrate_pieces(f, pts).value;
}

}  // namespace shearlab
