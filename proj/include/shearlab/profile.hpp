#pragma once

#include "shearlab/numerics.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace shearlab {

inline constexpr double kYMax = 40.0;

class UnsupportedOrder : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

// Half-line velocity profile. Orders up to analytic_order come from closed forms,
// the remaining ones (at most two more) from Richardson central differences of the top one.
class ShearProfile {
 public:
  using Analytic = std::function<double(int, double)>;

  ShearProfile(std::string name, Analytic f, int analytic_order, int d_max, double u_infinity, bool flat,
               std::function<double(double)> fd_length = {});

  double operator()(double y) const { return derivative(0, y); }
  double derivative(int k, double y) const;

  const std::string& name() const { return name_; }
  double u_infinity() const { return u_inf_; }
  int d_max() const { return d_max_; }
  int analytic_order() const { return analytic_order_; }
  // all derivatives vanish at 0; evaluation below 0 returns 0
  bool flat() const { return flat_; }

  ShearProfile scaled(double s) const;

 private:
  std::string name_;
  std::shared_ptr<const Analytic> f_;
  int analytic_order_;
  int d_max_;
  double u_inf_;
  bool flat_;
  std::function<double(double)> fd_length_;
};

inline double derivative(const ShearProfile& p, int k, double y) { return p.derivative(k, y); }

template <typename Derived>
Eigen::ArrayXd derivative(const ShearProfile& p, int k, const Eigen::DenseBase<Derived>& y) {
  return y.derived().unaryExpr([&p, k](double v) { return p.derivative(k, v); }).array();
}

ShearProfile make_gevrey_profile(double rho);
ShearProfile make_two_inflection_profile(double y1, double y2, double amplitude);
ShearProfile make_constant_profile(double value);
ShearProfile make_linear_ramp(double slope);
ShearProfile make_zero_profile();
// e^{-y}, not flat at 0
ShearProfile make_exponential_profile();
// e^{-y} S(y/width), S the flat smooth step
ShearProfile make_cutoff_exponential(double width);

// Flat smooth step: 0 for s <= 0, 1 for s >= 1, derivatives 0..3 in d[0..3].
void smooth_step(double s, double d[4]);

enum class GammaRegime { GammaAboveHalf, GammaBelowHalf };

struct OrderReport {
  int order = 0;
  double value_at_zero = 0.0;
  double l1_window = 0.0;
  double decay_power = 0.0;  // fitted p in |f| ~ y^{-p} at the far end, inf when it underflows
  double tail_estimate = 0.0;
  bool required = false;
  bool integrable = false;
};

struct AssumptionReport {
  GammaRegime regime = GammaRegime::GammaAboveHalf;
  bool derivatives_vanish_at_zero = false;
  double max_value_at_zero = 0.0;
  bool l1_integrable = false;
  std::vector<OrderReport> orders;
  int k_max = 0;
  double tolerance = 0.0;
  bool pass = false;
};

AssumptionReport check_assumptions(const ShearProfile& p, GammaRegime regime, int k_max, double tol,
                                   double y_max = kYMax);

struct InflectionData {
  std::vector<double> inflection_points;
  double inflection_value = 0.0;
  bool unique_value = false;
  bool kplus = false;
  double k_sup = 0.0;
  double k_inf_interior = 0.0;
  Eigen::VectorXd grid;
  Eigen::VectorXd k_values;
};

// K(y) = -U''/(U - u0), with -U'''/U' where |U - u0| < 1e-10
double k_function(const ShearProfile& p, double u0, double y);

Eigen::VectorXd default_inflection_grid(double y_max = kYMax, int n = 8000);
InflectionData inflection_data(const ShearProfile& p, const Eigen::VectorXd& grid = default_inflection_grid());

}  // namespace shearlab
