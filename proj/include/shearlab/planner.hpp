#pragma once

#include "shearlab/rational.hpp"
#include "shearlab/rayleigh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shearlab {

class OutOfScope : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

class TauTooLarge : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

enum class Regime { Dirichlet, Robin, NeumannMid, NeumannLow };
std::string to_string(Regime r);

// 1/4, gamma - 1/2 or 0; exact when gamma is a recoverable rational
Exponent theta_of_gamma(double gamma);
// 1/4 - theta
Exponent amplitude_a(double gamma);
// smallest n >= 2 with 2^{-n} below the branch threshold; gamma = 3/4 falls through to n = 2
int choose_n(double gamma, std::string* note = nullptr);
Regime bc_regime(double gamma);

struct RemainderOrders {
  Exponent interior;                     // R^I: N + (M+1) 2^{-n}
  Exponent boundary;                     // R^b, relative to the nu^a prefactor
  Exponent boundary_total;               // N + a + (M+1) 2^{-n}
  std::optional<Exponent> r1_printed;    // exponent multiplying the last corrector; none at gamma = 3/4
  std::optional<Exponent> r1_total;      // N + a + printed
  Exponent r2;                           // N + a + 1/4 - 2^{-n} + M 2^{-n}
};

struct ExpansionPlan {
  double gamma = 1.0;
  Exponent gamma_exponent;
  int N = 1;
  int M = 0;
  int n = 2;
  Exponent theta;
  Exponent amplitude_a;
  Regime regime = Regime::Dirichlet;
  std::vector<Rational> k_table;  // k_j, j = 0..M
  Rational P;                     // 1 + (M+1)/(2^n N)
  RemainderOrders remainder;
  std::vector<std::string> notes;

  // 1 + j/(2^n N) for any j >= 0
  Rational k(int j) const;
  Exponent nu_order_interior(int j) const;  // N + j 2^{-n}
  Exponent nu_order_boundary(int j) const;  // N + a + j 2^{-n}
  std::string dump() const;
};

ExpansionPlan build_plan(double gamma, int N, int M);

struct InstabilityTime {
  double T = 0.0;         // root of e^{sigma0 T}/(1+T)^{1/4} = nu^{theta-N}
  double T_nu = 0.0;      // T - tau
  double sqrt_nu_T = 0.0;  // sqrt(nu) T_nu
  double residual = 0.0;  // relative residual of the defining equation
};

InstabilityTime instability_time(double nu, double theta, int N, double sigma0, double tau = 0.0);

struct CorrectorField {
  Regime regime = Regime::Dirichlet;
  double t = 0.0;
  double k = 0.0;
  Eigen::VectorXd Y;
  Vector<cdouble> ub, vb;  // modal amplitudes, e^{ikx} factored out
  cdouble trace;           // u^I(t, 0) modal amplitude
  cdouble trace_dy;        // d_y u^I(t, 0)
  double wall_residual = 0.0;  // boundary condition defect at Y = 0
  double vb_far = 0.0;         // |v^b| at the last grid node over max |v^b|
  double mu = 0.0;             // fitted decay rate of |u^b| in Y
};

// leading tangential corrector: heat equation in Y with the regime's wall data taken from the mode trace,
// zero initial data; v^b = -int_Y^inf ik u^b
CorrectorField leading_corrector(const RayleighMode& mode, double gamma, double t, const Eigen::VectorXd& Y_grid);

// -slope of log|u^b(t, Y)| against Y over the nodes with Y >= y_from
double fitted_decay_rate(const CorrectorField& f, double y_from = 1.0);

struct UsboundRow {
  double nu = 0.0;
  double sup_diff = 0.0;  // sup over s of ||u^a(s) - u^inf(s)||_inf
  double scaled = 0.0;    // sup_diff / nu^{gamma - 1/2}
};

struct UsboundSweep {
  double gamma = 1.0;
  std::vector<UsboundRow> rows;
  std::vector<double> s_grid;
  double slope = 0.0;  // of log(scaled) against log(nu)
};

// a = nu^{1/2 - gamma}; gamma > 1/2
UsboundSweep usbound_sweep(const ShearProfile& u0, double gamma, const std::vector<double>& nus,
                           const std::vector<double>& s_grid = {});

}  // namespace shearlab
