#include "shearlab/certificate.hpp"

#include <cmath>

namespace shearlab {

namespace {

QuadratureOptions form_quadrature() {
  QuadratureOptions o;
  o.abs_tol = 1e-14;
  o.rel_tol = 1e-12;
  o.max_intervals = 8000;
  return o;
}

void push_scales(std::vector<double>& pts, double lo, double hi) {
  for (double p = 1.0 / 64.0; p < hi; p *= 2.0)
    if (p > lo) pts.push_back(p);
}

}  // namespace

KContext::KContext(ShearProfile p) : p_(std::move(p)), data_(inflection_data(p_)) {
  if (data_.inflection_points.empty()) throw CertificateFailed("profile has no inflection point");
}

double cutoff(double s) {
  double d[4];
  smooth_step(s - 1.0, d);
  return 1.0 - d[0];
}

double cutoff_derivative(double s) {
  double d[4];
  smooth_step(s - 1.0, d);
  return -d[1];
}

double quadratic_form(const KContext& ctx, const TestFunction& phi) {
  const double a = phi.support_begin;
  if (a == 0.0 && std::abs(phi.value(0.0)) > 1e-10) throw PreconditionViolation("quadratic_form: phi(0) != 0");
  auto f = [&](double y) {
    const double v = phi.value(y), d = phi.derivative(y);
    return d * d - ctx.K(y) * v * v;
  };
  std::vector<double> pts = phi.breakpoints;
  pts.push_back(a);
  const double end = std::isfinite(phi.support_end) ? phi.support_end : kYMax;
  pts.push_back(end);
  push_scales(pts, a, end);
  for (double y : ctx.inflection().inflection_points)
    if (y > a && y < end) pts.push_back(y);
  pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double y) { return y < a || y > end; }), pts.end());
  double q = integrate_pieces(f, pts, form_quadrature()).value;
  if (!std::isfinite(phi.support_end)) q += integrate_to_infinity(f, end, end, form_quadrature()).value;
  return q;
}

double quadratic_form(const ShearProfile& p, const TestFunction& phi) { return quadratic_form(KContext(p), phi); }

double q_of_eta(const KContext& ctx, double eta) {
  if (!(eta > 0.0)) throw InvalidParameter("q_of_eta: eta must be positive");
  const ShearProfile& U = ctx.profile();
  const double d = ctx.y0() - eta;
  const double u0 = ctx.u0();
  if (!U.flat() && eta + d < 0.0) throw std::domain_error("q_of_eta: shift leaves the half-line of a non-flat profile");
  auto f = [&](double y) {
    const double du = U.derivative(1, y + d);
    const double w = U(y + d) - u0;
    return du * du - ctx.K(y) * w * w;
  };
  std::vector<double> pts{eta, kYMax};
  push_scales(pts, eta, kYMax);
  for (double y : ctx.inflection().inflection_points) {
    if (y > eta) pts.push_back(y);
    if (y - d > eta) pts.push_back(y - d);
  }
  double q = integrate_pieces(f, pts, form_quadrature()).value;
  // algebraic tails (Gevrey) need the far field, not a truncation
  q += integrate_to_infinity(f, kYMax, kYMax, form_quadrature()).value;
  return q;
}

double q_of_eta(const ShearProfile& p, double eta) { return q_of_eta(KContext(p), eta); }

TestFunction build_test_function(const KContext& ctx, double eta, int n) {
  if (n < 1) throw InvalidParameter("build_test_function: n >= 1");
  const ShearProfile U = ctx.profile();
  const double d = ctx.y0() - eta;
  const double u0 = ctx.u0();
  const double nn = n;
  TestFunction w;
  w.value = [U, d, u0, eta, nn](double y) { return y <= eta ? 0.0 : (U(y + d) - u0) * cutoff(y / nn); };
  w.derivative = [U, d, u0, eta, nn](double y) {
    if (y <= eta) return 0.0;
    return U.derivative(1, y + d) * cutoff(y / nn) + (U(y + d) - u0) * cutoff_derivative(y / nn) / nn;
  };
  w.support_begin = eta;
  w.support_end = std::max(2.0 * nn, eta);
  w.breakpoints = {nn, 1.25 * nn, 1.5 * nn, 1.75 * nn};
  for (double y : ctx.inflection().inflection_points) w.breakpoints.push_back(y - d);
  return w;
}

TestFunction build_test_function(const ShearProfile& p, double eta, int n) {
  return build_test_function(KContext(p), eta, n);
}

namespace {

double smallest_on_grid(const std::function<double(double)>& K, double y_max, int n, Eigen::VectorXd* vec = nullptr,
                        Eigen::VectorXd* grid = nullptr) {
  const double h = y_max / n;
  const int m = n - 1;
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(m, h, y_max - h);
  Eigen::VectorXd diag(m);
  for (int i = 0; i < m; ++i) diag[i] = 2.0 / (h * h) - K(y[i]);
  const Eigen::VectorXd off = Eigen::VectorXd::Constant(m - 1, -1.0 / (h * h));
  const auto ep = smallest_eigenpair(diag, off);
  if (vec) *vec = ep.vector;
  if (grid) *grid = y;
  return ep.value;
}

}  // namespace

SchrodingerEig min_eig_dirichlet(const std::function<double(double)>& K, double y_max, int n) {
  if (n < 8) throw InvalidParameter("min_eig: need at least 8 intervals");
  SchrodingerEig out;
  out.n = n;
  out.lambda_n = smallest_on_grid(K, y_max, n);
  out.lambda_2n = smallest_on_grid(K, y_max, 2 * n, &out.vector, &out.grid);
  out.lambda_4n = smallest_on_grid(K, y_max, 4 * n);
  out.value = (4.0 * out.lambda_2n - out.lambda_n) / 3.0;
  out.check = (4.0 * out.lambda_4n - out.lambda_2n) / 3.0;
  out.converged = std::abs(out.value - out.check) < 1e-4;
  return out;
}

SchrodingerEig min_eig_schrodinger(const KContext& ctx, double y_max, int n) {
  return min_eig_dirichlet([&](double y) { return ctx.K(y); }, y_max, n);
}

SchrodingerEig min_eig_schrodinger(const ShearProfile& p, double y_max, int n) {
  return min_eig_schrodinger(KContext(p), y_max, n);
}

Certificate certify(const ShearProfile& p, const CertifyOptions& opt) {
  const KContext ctx(p);
  Certificate c;
  c.profile = p.name();
  c.y0 = ctx.y0();
  c.u0 = ctx.u0();
  c.q_at_y0 = q_of_eta(ctx, c.y0);
  const double h = 1e-3 * c.y0;
  auto fd = [&](double s) { return (q_of_eta(ctx, c.y0 + s) - q_of_eta(ctx, c.y0 - s)) / (2.0 * s); };
  c.q_prime_at_y0 = (4.0 * fd(0.5 * h) - fd(h)) / 3.0;
  const double up = p.derivative(1, c.y0);
  c.u_prime_sq_at_y0 = up * up;
  if (!(c.q_prime_at_y0 > 0.0)) throw CertificateInconsistent("certify: Q'(y0) <= 0");
  if (std::abs(c.q_at_y0) >= 1e-6 * (1.0 + std::abs(c.q_prime_at_y0)))
    throw CertificateInconsistent("certify: Q(y0) does not vanish");
  bool found = false;
  for (int j = 1; j < opt.eta_steps; ++j) {
    const double eta = c.y0 * (1.0 - static_cast<double>(j) / opt.eta_steps);
    const double q = q_of_eta(ctx, eta);
    c.eta_trace.emplace_back(eta, q);
    if (q < -opt.tol_cert) {
      c.eta0 = eta;
      c.q_of_eta0 = q;
      found = true;
      break;
    }
  }
  if (!found) throw CertificateFailed("certify: no eta0 in (0, y0) with Q(eta0) < 0");
  found = false;
  for (int k = 0, n = 1; k <= opt.max_doublings; ++k, n *= 2) {
    const double q = quadratic_form(ctx, build_test_function(ctx, c.eta0, n));
    c.n_trace.emplace_back(n, q);
    if (q < 0.0) {
      c.n = n;
      c.q_value = q;
      found = true;
      break;
    }
  }
  if (!found) throw CertificateFailed("certify: Q(w^n) stayed nonnegative");
  const SchrodingerEig eig = min_eig_schrodinger(ctx);
  c.min_eig = eig.value;
  c.min_eig_check = eig.check;
  c.pass = c.q_value < 0.0 && c.min_eig < 0.0;
  return c;
}

}  // namespace shearlab
