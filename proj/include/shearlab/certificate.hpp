#pragma once

#include "shearlab/profile.hpp"

#include <functional>
#include <string>
#include <vector>

namespace shearlab {

class CertificateFailed : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class CertificateInconsistent : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// phi and phi' on [0, support_end]; phi vanishes beyond
struct TestFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double support_begin = 0.0;
  double support_end = HUGE_VAL;
  std::vector<double> breakpoints;
};

// the profile with its inflection data, K ready to evaluate
class KContext {
 public:
  explicit KContext(ShearProfile p);
  const ShearProfile& profile() const { return p_; }
  const InflectionData& inflection() const { return data_; }
  double y0() const { return data_.inflection_points.front(); }
  double u0() const { return data_.inflection_value; }
  double K(double y) const { return k_function(p_, u0(), y); }

 private:
  ShearProfile p_;
  InflectionData data_;
};

// int (|phi'|^2 - K |phi|^2)
double quadratic_form(const KContext& ctx, const TestFunction& phi);
double quadratic_form(const ShearProfile& p, const TestFunction& phi);

// int_eta^inf |U'(y+d)|^2 - K(y) (U(y+d) - U0)^2, d = y0 - eta, K unshifted
double q_of_eta(const KContext& ctx, double eta);
double q_of_eta(const ShearProfile& p, double eta);

// C-infinity cutoff: 1 on [0,1], 0 on [2,inf)
double cutoff(double s);
double cutoff_derivative(double s);

// w = (U(y + y0 - eta) - U0) chi(y/n) for y >= eta, 0 below
TestFunction build_test_function(const KContext& ctx, double eta, int n);
TestFunction build_test_function(const ShearProfile& p, double eta, int n);

struct SchrodingerEig {
  double value = 0.0;  // Richardson (4 l_{2N} - l_N)/3
  double lambda_n = 0.0, lambda_2n = 0.0, lambda_4n = 0.0;
  double check = 0.0;  // Richardson pair (2N, 4N)
  bool converged = false;
  int n = 0;
  Eigen::VectorXd grid, vector;  // eigenvector at 2N
};

// smallest eigenvalue of -d_yy - K on [0, y_max], Dirichlet ends, three-point stencil with N intervals
SchrodingerEig min_eig_dirichlet(const std::function<double(double)>& K, double y_max = kYMax, int n = 4000);
SchrodingerEig min_eig_schrodinger(const KContext& ctx, double y_max = kYMax, int n = 4000);
SchrodingerEig min_eig_schrodinger(const ShearProfile& p, double y_max = kYMax, int n = 4000);

struct Certificate {
  std::string profile;
  double eta0 = 0.0;
  int n = 0;
  double q_value = 0.0;
  double q_of_eta0 = 0.0;
  double y0 = 0.0;
  double u0 = 0.0;
  double q_at_y0 = 0.0;
  double q_prime_at_y0 = 0.0;
  double u_prime_sq_at_y0 = 0.0;
  double min_eig = 0.0;
  double min_eig_check = 0.0;
  std::vector<std::pair<double, double>> eta_trace;  // (eta, Q(eta)) visited by the line search
  std::vector<std::pair<int, double>> n_trace;        // (n, Q(w^n))
  bool pass = false;
};

struct CertifyOptions {
  int eta_steps = 64;
  double tol_cert = 1e-6;
  int max_doublings = 20;
};

Certificate certify(const ShearProfile& p, const CertifyOptions& opt = {});

}  // namespace shearlab
