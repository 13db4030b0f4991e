#pragma once

#include "shearlab/profile.hpp"

#include <optional>
#include <string>

namespace shearlab {

// a in [0, inf); infinity is its own state rather than a large float
class RobinCoefficient {
 public:
  static RobinCoefficient dirichlet() { return RobinCoefficient(true, 0.0); }
  static RobinCoefficient finite(double a);
  bool is_dirichlet() const { return dirichlet_; }
  double value() const;
  std::string str() const;

 private:
  RobinCoefficient(bool d, double a) : dirichlet_(d), a_(a) {}
  bool dirichlet_;
  double a_;
};

struct ExtensionOptions {
  // keeps the 2 e^{-ay} u0(0) term for data that are not flat at 0 (test stubs such as e^{-y} or 1)
  bool allow_nonflat = false;
};

// u0 extended to the line so that d/dy u - a u is odd
class ExtendedProfile {
 public:
  ExtendedProfile(ShearProfile base, RobinCoefficient a, ExtensionOptions opt = {});

  double operator()(double y) const;
  // k-th derivative; for y < 0 needs flat data and k < d_max
  double derivative(int k, double y) const;

  // the same values through the other two integral representations
  double exponential_form(double y) const;  // e^{-ay}(u0(0) + int e^{az}(u0' - a u0))
  double primitive_form(double y) const;    // u0(y) - 2a int e^{-a(y-z)} u0

  const ShearProfile& base() const { return base_; }
  const RobinCoefficient& coefficient() const { return a_; }
  const ExtensionOptions& options() const { return opt_; }

 private:
  // int_0^x e^{-a(x-z)} u0^{(k)}(z) dz
  double memory_integral(int k, double x) const;

  ShearProfile base_;
  RobinCoefficient a_;
  ExtensionOptions opt_;
};

ExtendedProfile extend(const ShearProfile& u0, RobinCoefficient a, ExtensionOptions opt = {});
double extension_derivative(const ShearProfile& u0, RobinCoefficient a, int k, double y);

enum class SourceKind { RobinHomogeneous, InhomogeneousDirichlet };

struct HeatField {
  double time = 0.0;
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  RobinCoefficient coefficient = RobinCoefficient::dirichlet();
  SourceKind source_kind = SourceKind::RobinHomogeneous;
};

// 400 uniform nodes on [0, y_max] merged with 50 nodes clustered quadratically at 0 on [0, 0.5]
Eigen::VectorXd default_heat_grid(double y_max = kYMax);

// u(t, y) = (K(t) * u0~)(y)
double robin_heat_value(const ExtendedProfile& ext, double t, double y);
HeatField solve_robin(const ShearProfile& u0, RobinCoefficient a, double t,
                      const Eigen::VectorXd& grid = default_heat_grid(), ExtensionOptions opt = {});

class InsufficientResolution : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// |d_y u - a u| at y = 0 from a five-node one-sided stencil; |u(t,0)| for the Dirichlet state
double bc_residual(const HeatField& field);

// ---------------------------------------------------------------------------
// boundary-driven and forced heat problems on the half-line, zero initial data.
// Templated so that complex modal traces go through the same code.

namespace heat_detail {
inline QuadratureOptions tight() {
  QuadratureOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-11;
  return o;
}
}  // namespace heat_detail

// u(0, t) = f(t): (2/sqrt(pi)) int_{y/(2 sqrt t)}^inf e^{-v^2} f(t - y^2/(4 v^2)) dv
template <typename F>
auto dirichlet_trace_solution(F&& f, double t, double y) -> std::decay_t<decltype(f(t))> {
  using T = std::decay_t<decltype(f(t))>;
  if (t <= 0.0) return T(0);
  if (y == 0.0) return f(t);
  const double v0 = y / (2.0 * std::sqrt(t));
  if (v0 > 27.0) return T(0);
  auto g = [&](double v) -> T { return f(t - y * y / (4.0 * v * v)) * std::exp(-v * v); };
  std::vector<double> pts{v0};
  for (double s : {0.25, 0.5, 1.0, 2.0, 4.0, 7.0}) pts.push_back(v0 + s);
  return integrate_pieces(g, pts, heat_detail::tight()).value * (2.0 / std::sqrt(M_PI));
}

// d_y u(0, t) = g(t): -(2/sqrt(pi)) int_0^{sqrt t} e^{-y^2/(4 s^2)} g(t - s^2) ds
template <typename G>
auto neumann_trace_solution(G&& g, double t, double y) -> std::decay_t<decltype(g(t))> {
  using T = std::decay_t<decltype(g(t))>;
  if (t <= 0.0) return T(0);
  const double r = std::sqrt(t);
  auto h = [&](double s) -> T {
    if (s <= 0.0) return y == 0.0 ? g(t) : T(0);
    return g(t - s * s) * std::exp(-y * y / (4.0 * s * s));
  };
  std::vector<double> pts{0.0, r};
  for (double f : {0.05, 0.2, 0.5}) pts.push_back(f * r);
  if (y > 0.0 && y / 12.0 < r) pts.push_back(y / 12.0);
  return integrate_pieces(h, pts, heat_detail::tight()).value * (-2.0 / std::sqrt(M_PI));
}

// d_y u(0, t) - u(0, t) = g(t): with w the Dirichlet solution for data g, u = -int_y^inf e^{y-z} w(z) dz
template <typename G>
auto robin_trace_solution(G&& g, double t, double y) -> std::decay_t<decltype(g(t))> {
  using T = std::decay_t<decltype(g(t))>;
  if (t <= 0.0) return T(0);
  auto integrand = [&](double s) -> T { return std::exp(-s) * dirichlet_trace_solution(g, t, y + s); };
  const double L = 12.0 * std::sqrt(t) + 40.0;
  std::vector<double> pts{0.0, L};
  for (double f : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0})
    if (f < L) pts.push_back(f);
  const double sq = std::sqrt(t);
  for (double f : {0.5, 1.0, 2.0, 4.0})
    if (f * sq < L) pts.push_back(f * sq);
  QuadratureOptions o = heat_detail::tight();
  o.abs_tol = 1e-12;
  return -integrate_pieces(integrand, pts, o).value;
}

// forcing r(s, y), odd extension in y: int_0^t ds int e^{-x^2}/sqrt(pi) r~(s, y + 2 sqrt(t-s) x) dx
template <typename R>
auto source_solution(R&& r, double t, double y) -> std::decay_t<decltype(r(t, y))> {
  using T = std::decay_t<decltype(r(t, y))>;
  if (t <= 0.0) return T(0);
  auto rodd = [&](double s, double z) -> T { return z >= 0.0 ? r(s, z) : T(-r(s, -z)); };
  auto outer = [&](double s) -> T {
    const double tau = t - s;
    if (tau <= 0.0) return r(s, y);
    const double q = 2.0 * std::sqrt(tau);
    auto inner = [&](double x) -> T { return std::exp(-x * x) * rodd(s, y + q * x); };
    std::vector<double> pts{-6.0, 6.0, 0.0};
    const double kink = -y / q;
    if (kink > -6.0) pts.push_back(kink);
    return integrate_pieces(inner, pts, heat_detail::tight()).value / std::sqrt(M_PI);
  };
  QuadratureOptions o = heat_detail::tight();
  o.abs_tol = 1e-11;
  o.rel_tol = 1e-9;
  return integrate_pieces(outer, std::vector<double>{0.0, 0.5 * t, 0.9 * t, 0.99 * t, t}, o).value;
}

// u = u1 + u2 + u3: boundary datum f, odd-extended initial data, odd-extended forcing
HeatField solve_inhomogeneous_dirichlet(const ShearProfile& u0, const std::function<double(double)>& f,
                                        const std::function<double(double, double)>& r, double t,
                                        const Eigen::VectorXd& grid = default_heat_grid(),
                                        std::string* warning = nullptr);

// ---------------------------------------------------------------------------
// convergence-rate experiments

enum class NormKind { Linf, L1, L2, Wkp };

struct Norm {
  NormKind kind = NormKind::Linf;
  int k = 0;
  double p = 2.0;
  static Norm linf() { return {NormKind::Linf, 0, HUGE_VAL}; }
  static Norm l1() { return {NormKind::L1, 0, 1.0}; }
  static Norm l2() { return {NormKind::L2, 0, 2.0}; }
  static Norm wkp(int k, double p) { return {NormKind::Wkp, k, p}; }
  std::string str() const;
};

enum class RateLimit { ToInfinity, ToZero };

struct RateRow {
  double a = 0.0;
  double norm_value = 0.0;
};

struct RateOptions {
  bool drop_extremes = true;
  bool allow_nonflat = false;
  // caller vouches that y -> int_0^y u0 is integrable
  bool primitive_in_l1 = false;
};

struct RateResult {
  std::vector<RateRow> table;
  std::optional<LinearFit> fit;
  std::string advisory;
  Norm norm;
  RateLimit limit = RateLimit::ToInfinity;
  double t = 0.0;
};

// ||u^a(t) - u^lim(t)|| on the line (t = 0) or the half-line (t > 0)
double rate_distance(const ShearProfile& u0, double a, Norm norm, RateLimit limit, double t,
                     bool allow_nonflat = false);

RateResult rate_experiment(const ShearProfile& u0, const std::vector<double>& a_values, Norm norm, RateLimit limit,
                           double t, const RateOptions& opt = {});

// ---------------------------------------------------------------------------
// envelopes

struct Envelope {
  double alpha = 1.0;
  double beta = 0.0;
  double constant = 1.0;
  // log of e^{alpha t}/(1+t)^beta, without the constant
  double log_shape(double t) const { return alpha * t - beta * std::log1p(t); }
  double operator()(double t) const { return constant * std::exp(log_shape(t)); }
};

struct EnvelopeCheck {
  bool pass = false;
  double worst_ratio = 0.0;
  double worst_t = 0.0;
};

// sup sample/shape compared with env.constant; ratios formed in log space
EnvelopeCheck envelope_check(const std::vector<std::pair<double, double>>& samples, const Envelope& env);

struct GronwallResult {
  Envelope envelope;
  std::vector<std::pair<double, double>> trajectory;  // (t, phi(t))
  double asympt_ratio = 0.0;                          // at t = t_check
};

// phi' = lambda phi + C e^{alpha t}/(1+t)^beta on [0, t_check]
GronwallResult gronwall_bound(double lambda, double alpha, double beta, double C, double phi0,
                              double t_check = 30.0);

// int_0^t e^{alpha s}(1+s)^{-beta} ds / (e^{alpha t}(1+t)^{-beta})
double asympt_ratio(double alpha, double beta, double t);

}  // namespace shearlab
