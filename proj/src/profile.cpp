#include "shearlab/profile.hpp"

#include <cmath>
#include <sstream>

namespace shearlab {

ShearProfile::ShearProfile(std::string name, Analytic f, int analytic_order, int d_max, double u_infinity, bool flat,
                           std::function<double(double)> fd_length)
    : name_(std::move(name)),
      f_(std::make_shared<const Analytic>(std::move(f))),
      analytic_order_(analytic_order),
      d_max_(d_max),
      u_inf_(u_infinity),
      flat_(flat),
      fd_length_(std::move(fd_length)) {
  if (analytic_order_ < 0 || d_max_ < analytic_order_ || d_max_ > analytic_order_ + 2)
    throw InvalidParameter("ShearProfile: finite-difference orders limited to two above the analytic ones");
}

double ShearProfile::derivative(int k, double y) const {
  if (k < 0 || k > d_max_) throw UnsupportedOrder("derivative: order " + std::to_string(k) + " > d_max");
  if (flat_ && y <= 0.0) return 0.0;
  const Analytic& f = *f_;
  if (k <= analytic_order_) return f(k, y);
  const int top = analytic_order_;
  const double len = fd_length_ ? fd_length_(y) : 1.0;
  const double h = 0.02 * len;
  auto g = [&](double x) { return (flat_ && x <= 0.0) ? 0.0 : f(top, x); };
  if (k == top + 1) {
    auto d1 = [&](double s) { return (g(y + s) - g(y - s)) / (2.0 * s); };
    return (4.0 * d1(0.5 * h) - d1(h)) / 3.0;
  }
  const double g0 = g(y);
  auto d2 = [&](double s) { return (g(y + s) - 2.0 * g0 + g(y - s)) / (s * s); };
  return (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
}

ShearProfile ShearProfile::scaled(double s) const {
  auto f = f_;
  std::ostringstream nm;
  nm << s << "*" << name_;
  return ShearProfile(
      nm.str(), [f, s](int k, double y) { return s * (*f)(k, y); }, analytic_order_, d_max_, s * u_inf_, flat_,
      fd_length_);
}

ShearProfile make_gevrey_profile(double rho) {
  if (!(rho > 1.0)) throw InvalidParameter("make_gevrey_profile: rho must exceed 1");
  const double q = 1.0 / (rho - 1.0);
  auto f = [q](int k, double y) -> double {
    if (y < 1e-12) return 0.0;
    const double yq = std::pow(y, -q);
    const double g = -yq;
    if (g < -745.0) return 0.0;
    const double u = std::exp(g);
    if (k == 0) return u;
    const double g1 = q * yq / y;
    if (k == 1) return g1 * u;
    const double g2 = -q * (q + 1.0) * yq / (y * y);
    if (k == 2) return (g2 + g1 * g1) * u;
    const double g3 = q * (q + 1.0) * (q + 2.0) * yq / (y * y * y);
    return (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * u;
  };
  auto len = [q](double y) { return std::max(y, 1e-12) * std::min(1.0, std::pow(std::max(y, 1e-12), q) / (q + 1.0)); };
  std::ostringstream nm;
  nm << "gevrey(rho=" << rho << ")";
  return ShearProfile(nm.str(), f, 3, 5, 1.0, true, len);
}

void smooth_step(double s, double d[4]) {
  d[0] = d[1] = d[2] = d[3] = 0.0;
  if (s <= 0.0) return;
  if (s >= 1.0) {
    d[0] = 1.0;
    return;
  }
  const double t = 1.0 / s - 1.0 / (1.0 - s);
  if (t > 700.0) return;
  if (t < -700.0) {
    d[0] = 1.0;
    return;
  }
  // L(t) = 1/(1+e^t)
  const double L = t > 0 ? std::exp(-t) / (1.0 + std::exp(-t)) : 1.0 / (1.0 + std::exp(t));
  const double M = 1.0 - L;
  const double L1 = -L * M;
  const double L2 = L * M * (1.0 - 2.0 * L);
  const double L3 = -L * M * (1.0 - 6.0 * L + 6.0 * L * L);
  const double r = 1.0 - s;
  const double q1 = -1.0 / (s * s) - 1.0 / (r * r);
  const double q2 = 2.0 / (s * s * s) - 2.0 / (r * r * r);
  const double q3 = -6.0 / (s * s * s * s) - 6.0 / (r * r * r * r);
  d[0] = L;
  d[1] = L1 * q1;
  d[2] = L2 * q1 * q1 + L1 * q2;
  d[3] = L3 * q1 * q1 * q1 + 3.0 * L2 * q1 * q2 + L1 * q3;
}

namespace {

struct TwoInflectionShape {
  double amp, yc, m, w, c;

  // derivatives 0..3 of the cosh-Gaussian factor
  void gauss(double y, double d[4]) const {
    const double z = (y - m) / w;
    const double e = c * (std::cosh(z) - 1.0);
    d[0] = d[1] = d[2] = d[3] = 0.0;
    if (e > 745.0) return;
    const double G = std::exp(-e);
    const double g1 = -c * std::sinh(z), g2 = -c * std::cosh(z), g3 = g1;
    d[0] = G;
    d[1] = G * g1 / w;
    d[2] = G * (g2 + g1 * g1) / (w * w);
    d[3] = G * (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) / (w * w * w);
  }

  double operator()(int k, double y) const {
    if (y <= 0.0) return 0.0;
    double G[4];
    gauss(y, G);
    if (y >= yc) return amp * G[k];
    double S[4];
    smooth_step(y / yc, S);
    for (int j = 1; j < 4; ++j) S[j] /= std::pow(yc, j);
    static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    double acc = 0.0;
    for (int j = 0; j <= k; ++j) acc += binom[k][j] * S[j] * G[k - j];
    return amp * acc;
  }

  double length(double y) const {
    const double s = std::clamp(y / yc, 0.0, 1.0);
    const double edge = std::min(s, 1.0 - s);
    return std::max(std::min(w, yc * (y < yc ? edge * edge : 1.0)), 1e-6 * yc);
  }
};

// sign pattern required of U'': + on (0,y1), - on (y1,y2), + beyond y2
bool two_inflection_valid(const TwoInflectionShape& sh, double y1, double y2) {
  const double hi = std::min(kYMax, sh.m + 40.0 * sh.w);
  const int n = 40000;
  int changes = 0;
  double prev = 0.0;
  std::vector<double> where;
  for (int i = 1; i <= n; ++i) {
    const double y = hi * static_cast<double>(i) / n;
    const double v = sh(2, y);
    if (!std::isfinite(v)) return false;
    if (std::abs(v) < 1e-250) continue;
    if (prev != 0.0 && ((v > 0) != (prev > 0))) {
      ++changes;
      where.push_back(y);
    }
    prev = v;
  }
  if (changes != 2) return false;
  const double step = hi / n;
  return std::abs(where[0] - y1) <= 2 * step && std::abs(where[1] - y2) <= 2 * step;
}

}  // namespace

ShearProfile make_two_inflection_profile(double y1, double y2, double amplitude) {
  if (!(y1 > 0.0) || !(y2 > y1)) throw InvalidParameter("make_two_inflection_profile: need 0 < y1 < y2");
  if (!(amplitude > 0.0)) throw InvalidParameter("make_two_inflection_profile: amplitude must be positive");
  const double m = 0.5 * (y1 + y2);
  const double d = 0.5 * (y2 - y1);
  for (double x : {3.0, 4.0, 6.0, 8.0}) {
    for (double ycf : {0.5, 0.75, 0.25}) {
      TwoInflectionShape sh{amplitude, ycf * y1, m, d / x, std::cosh(x) / (std::sinh(x) * std::sinh(x))};
      if (!two_inflection_valid(sh, y1, y2)) continue;
      std::ostringstream nm;
      nm << "two_inflection(y1=" << y1 << ",y2=" << y2 << ",A=" << amplitude << ")";
      return ShearProfile(
          nm.str(), [sh](int k, double y) { return sh(k, y); }, 3, 5, 0.0, true,
          [sh](double y) { return sh.length(y); });
    }
  }
  throw InvalidParameter("make_two_inflection_profile: no admissible shape for these inflection points");
}

ShearProfile make_constant_profile(double value) {
  std::ostringstream nm;
  nm << "constant(" << value << ")";
  return ShearProfile(nm.str(), [value](int k, double) { return k == 0 ? value : 0.0; }, 5, 5, value, false);
}

ShearProfile make_linear_ramp(double slope) {
  std::ostringstream nm;
  nm << "ramp(" << slope << ")";
  return ShearProfile(
      nm.str(), [slope](int k, double y) { return k == 0 ? slope * y : (k == 1 ? slope : 0.0); }, 5, 5,
      slope == 0.0 ? 0.0 : std::copysign(HUGE_VAL, slope), false);
}

ShearProfile make_zero_profile() {
  return ShearProfile("zero", [](int, double) { return 0.0; }, 5, 5, 0.0, true);
}

ShearProfile make_exponential_profile() {
  return ShearProfile("exp", [](int k, double y) { return (k % 2 == 0 ? 1.0 : -1.0) * std::exp(-y); }, 5, 5, 0.0,
                      false);
}

ShearProfile make_cutoff_exponential(double width) {
  if (!(width > 0.0)) throw InvalidParameter("make_cutoff_exponential: width must be positive");
  auto f = [width](int k, double y) {
    if (y <= 0.0) return 0.0;
    double S[4];
    smooth_step(y / width, S);
    static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    double acc = 0.0;
    for (int j = 0; j <= k; ++j)
      acc += binom[k][j] * S[j] / std::pow(width, j) * ((k - j) % 2 == 0 ? 1.0 : -1.0);
    return acc * std::exp(-y);
  };
  auto len = [width](double y) {
    const double s = std::clamp(y / width, 0.0, 1.0);
    const double edge = std::min(s, 1.0 - s);
    return std::max(std::min(1.0, width * (y < width ? edge * edge : 1.0)), 1e-6 * width);
  };
  std::ostringstream nm;
  nm << "cutoff_exp(width=" << width << ")";
  return ShearProfile(nm.str(), f, 3, 5, 0.0, true, len);
}

AssumptionReport check_assumptions(const ShearProfile& p, GammaRegime regime, int k_max, double tol, double y_max) {
  if (k_max > p.d_max()) throw UnsupportedOrder("check_assumptions: k_max exceeds d_max");
  AssumptionReport rep;
  rep.regime = regime;
  rep.k_max = k_max;
  rep.tolerance = tol;
  rep.derivatives_vanish_at_zero = true;
  rep.l1_integrable = true;
  const int first_required = regime == GammaRegime::GammaAboveHalf ? 1 : 0;
  std::vector<double> pieces;
  for (int i = 0; i <= 160; ++i) pieces.push_back(y_max * i / 160.0);
  QuadratureOptions qo;
  qo.abs_tol = 1e-12;
  qo.rel_tol = 1e-9;
  for (int k = 0; k <= k_max; ++k) {
    OrderReport o;
    o.order = k;
    o.value_at_zero = std::abs(p.derivative(k, 0.0));
    rep.max_value_at_zero = std::max(rep.max_value_at_zero, o.value_at_zero);
    if (o.value_at_zero >= tol) rep.derivatives_vanish_at_zero = false;
    o.l1_window = integrate_pieces([&](double y) { return std::abs(p.derivative(k, y)); }, pieces, qo).value;
    const double f1 = std::abs(p.derivative(k, y_max));
    const double f2 = std::abs(p.derivative(k, 2 * y_max));
    const double f4 = std::abs(p.derivative(k, 4 * y_max));
    if (f1 == 0.0 || f2 == 0.0 || f4 == 0.0) {
      o.decay_power = HUGE_VAL;
      o.tail_estimate = f1 * y_max;
    } else {
      Eigen::Vector3d lx(std::log(y_max), std::log(2 * y_max), std::log(4 * y_max));
      Eigen::Vector3d ly(std::log(f1), std::log(f2), std::log(f4));
      o.decay_power = -fit_line(lx, ly).slope;
      o.tail_estimate = o.decay_power > 1.0 ? y_max * f1 / (o.decay_power - 1.0) : HUGE_VAL;
    }
    o.integrable = o.decay_power > 1.01 || o.tail_estimate < tol;
    o.required = k >= first_required;
    if (o.required && !o.integrable) rep.l1_integrable = false;
    rep.orders.push_back(o);
  }
  rep.pass = rep.derivatives_vanish_at_zero && rep.l1_integrable;
  return rep;
}

double k_function(const ShearProfile& p, double u0, double y) {
  const double du = p(y) - u0;
  if (std::abs(du) < 1e-10) {
    const double d1 = p.derivative(1, y);
    if (d1 == 0.0) return 0.0;
    return -p.derivative(3, y) / d1;
  }
  return -p.derivative(2, y) / du;
}

Eigen::VectorXd default_inflection_grid(double y_max, int n) {
  return Eigen::VectorXd::LinSpaced(n, y_max / n, y_max);
}

InflectionData inflection_data(const ShearProfile& p, const Eigen::VectorXd& grid) {
  InflectionData out;
  out.grid = grid;
  const Eigen::Index n = grid.size();
  Eigen::VectorXd u2 = derivative(p, 2, grid).matrix();
  double prev_y = 0.0, prev_v = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = u2[i];
    if (std::abs(v) < 1e-250 || !std::isfinite(v)) continue;
    if (prev_v != 0.0 && (v > 0) != (prev_v > 0)) {
      const double root = brent_root([&](double y) { return p.derivative(2, y); }, prev_y, grid[i], 1e-14);
      out.inflection_points.push_back(root);
    }
    prev_y = grid[i];
    prev_v = v;
  }
  if (out.inflection_points.empty()) return out;
  const double u0 = p(out.inflection_points.front());
  out.inflection_value = u0;
  out.unique_value = true;
  for (double yi : out.inflection_points)
    if (std::abs(p(yi) - u0) > 1e-6 * std::max(1.0, std::abs(u0))) out.unique_value = false;
  out.k_values = grid.unaryExpr([&](double y) { return k_function(p, u0, y); });
  const double lo = 0.5 * out.inflection_points.front();
  const double hi = 2.0 * out.inflection_points.back() + 1.0;
  out.k_sup = out.k_values.maxCoeff();
  out.k_inf_interior = HUGE_VAL;
  bool positive = true;
  const double tiny = 1e-12 * std::max(1.0, out.k_sup);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = out.k_values[i];
    if (!std::isfinite(k)) {
      positive = false;
      continue;
    }
    // where U'' underflows to exactly 0 the interior test degenerates to K >= 0
    if (grid[i] >= lo && grid[i] <= hi && u2[i] != 0.0) {
      out.k_inf_interior = std::min(out.k_inf_interior, k);
      if (!(k > 0.0)) positive = false;
    } else if (k < -tiny) {
      positive = false;
    }
  }
  out.kplus = out.unique_value && positive && std::isfinite(out.k_sup);
  return out;
}

}  // namespace shearlab
