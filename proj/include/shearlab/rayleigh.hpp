#pragma once

#include "shearlab/profile.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shearlab {

class ModeNotFound : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class ModeNeutral : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class OracleInconclusive : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

struct RayleighOptions {
  double y_max = kYMax;
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
  int fixed_steps = 0;      // >0: uniform RK steps instead of error control
  double tol = 1e-10;       // on |phi(0)|/max|phi|
  int max_iter = 60;
  double grid_step = 0.005;  // eigenfunction sampling
  // sampling step also kept below layer_resolution * Im c / max|U'|; 0 disables
  double layer_resolution = 0.1;
  int max_grid_nodes = 400000;
};

struct ShootResult {
  cdouble phi0;       // phi(0) from the far-field branch scaled to 1 at y_max
  double max_abs = 0;  // max |phi| seen along the way
  cdouble normalized() const { return phi0 / max_abs; }
};

// d_yy phi = (k^2 + U''/(U - c)) phi integrated from y_max to 0 on the decaying branch
ShootResult shoot(const ShearProfile& p, double k, cdouble c, const RayleighOptions& opt = {});
// phi(0)/max|phi|; needs sign(k) Im c > 0
cdouble shoot_residual(const ShearProfile& p, double k, cdouble c, const RayleighOptions& opt = {});

struct RayleighMode {
  double k = 0.0;
  cdouble c;
  Eigen::VectorXd y;
  Vector<cdouble> phi, dphi;  // max|phi| = 1
  double residual = 0.0;
  double growth_rate = 0.0;
  double collocation_residual = 0.0;  // max |(U-c)(phi''-k^2 phi) - U'' phi| / max|phi|, interior
  double wall_value = 0.0;            // |phi(0)|
  double far_value = 0.0;             // |phi(y_max)|
  int iterations = 0;
};

RayleighMode solve_mode(const ShearProfile& p, double k, cdouble c_init, const RayleighOptions& opt = {});
std::optional<RayleighMode> try_solve_mode(const ShearProfile& p, double k, cdouble c_init,
                                           const RayleighOptions& opt = {});

// max |(U-c)(phi''-k^2 phi) - U'' phi| on interior nodes, phi'' from 9-point stencils
double collocation_residual(const ShearProfile& p, const RayleighMode& m);

struct RectangleScan {
  std::vector<cdouble> winding_cells;  // centres of cells with nonzero winding number
  std::vector<int> windings;
  int total_winding = 0;
  int evaluations = 0;
};

struct ScanOptions {
  int nx = 24;
  int ny = 16;
  RayleighOptions ray;
};

RectangleScan scan_rectangle(const ShearProfile& p, double k, const ScanOptions& opt = {});

struct DispersionCurve {
  std::vector<double> k_values;
  std::vector<double> sigma_values;
  std::vector<std::optional<RayleighMode>> modes;
  double k0 = 0.0;
  double sigma0 = 0.0;
  int curvature_order = 1;
  double curvature = 0.0;  // sigma ~ sigma0 + curvature (k - k0)^2
  bool stable = true;
};

std::vector<double> default_k_grid();
DispersionCurve scan_sigma(const ShearProfile& p, const std::vector<double>& k_grid = default_k_grid(),
                           const ScanOptions& opt = {});

// Howard: |c - (Umin+Umax)/2| <= (Umax-Umin)/2 + 1e-8
bool semicircle_check(cdouble c, const ShearProfile& p);
inline bool semicircle_check(const RayleighMode& m, const ShearProfile& p) { return semicircle_check(m.c, p); }
std::pair<double, double> profile_range(const ShearProfile& p, double y_max = kYMax);

struct VelocityField {
  Eigen::MatrixXcd u, v;  // rows: y, cols: x
  double norm = 0.0;      // discrete L2 over the sample grid
};

// e^{ikx + lambda t}(phi', -ik phi), lambda = -ikc
VelocityField mode_velocity_field(const RayleighMode& m, double t, const Eigen::VectorXd& x_grid,
                                  const Eigen::VectorXd& y_grid);
// phi and phi' anywhere in [0, y_max] by Hermite interpolation of the stored samples
std::pair<cdouble, cdouble> mode_at(const RayleighMode& m, double y);

struct GrowthOracleOptions {
  double y_max = kYMax;
  int n = 2000;
  double stretch = 4.0;
  std::uint64_t seed = 20240611;
  double sample_every = 0.5;
};

struct GrowthEstimate {
  double slope = 0.0;
  double slope_third_quarter = 0.0;
  double slope_last_quarter = 0.0;
  bool conclusive = false;
  std::vector<std::pair<double, double>> log_norm;  // (t, log ||psi||)
};

// Crank-Nicolson on (d_yy - k^2) psi_t = -ik (U (d_yy - k^2) - U'') psi, psi = 0 at both ends
GrowthEstimate growth_estimate(const ShearProfile& p, double k, double T, double dt,
                               const GrowthOracleOptions& opt = {});
// slope of log||psi|| over [T/2, T]; throws OracleInconclusive when the slope has not settled
double growth_oracle(const ShearProfile& p, double k, double T, double dt, const GrowthOracleOptions& opt = {});

struct PacketFit {
  double log_c = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  std::vector<double> t, log_norm;
  std::vector<double> band_k, band_sigma;
};

// ||u(t)||^2 = 2 pi int_band e^{2 sigma(k) t} dk for unit-energy modes; fit log||u|| = log C + sigma t - beta log(1+t)
PacketFit wave_packet_fit(const ShearProfile& p, const DispersionCurve& curve, double t_lo = 10.0, double t_hi = 30.0,
                          int band_points = 161);

}  // namespace shearlab
