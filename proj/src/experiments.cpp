#include "shearlab/experiments.hpp"

#include "shearlab/certificate.hpp"
#include "shearlab/planner.hpp"
#include "shearlab/rayleigh.hpp"
#include "shearlab/robin_heat.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shearlab {

namespace fs = std::filesystem;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

namespace {

const std::vector<ParamSpec> kProfileKeys = {
    {"profile", "gevrey", "gevrey|two-inflection|constant|ramp|zero|exponential|cutoff-exponential"},
    {"rho", "2", "Gevrey index (> 1)"},
    {"y1", "1", "two-inflection: first inflection point"},
    {"y2", "3", "two-inflection: second inflection point"},
    {"amp", "1", "two-inflection: amplitude"},
    {"value", "1", "constant: value"},
    {"slope", "1", "ramp: slope"},
    {"width", "1", "cutoff-exponential: cutoff width"},
};

std::vector<ParamSpec> with_profile(std::vector<ParamSpec> own, const std::string& default_profile = "gevrey") {
  std::vector<ParamSpec> all = kProfileKeys;
  all[0].default_value = default_profile;
  all.insert(all.end(), own.begin(), own.end());
  return all;
}

std::vector<ExperimentInfo> build_registry() {
  return {
      {"robin-rates", "convergence of Robin data/solutions to the Dirichlet (a -> inf) or Neumann (a -> 0) limit",
       with_profile({{"limit", "infinity", "infinity|zero"},
                     {"norm", "linf", "linf|l1|l2"},
                     {"a", "", "comma list; default 7 geometric points over the documented span"},
                     {"t", "0", "time (0 compares the extensions)"},
                     {"allow_nonflat", "0", "keep the u0(0) term for non-flat data"},
                     {"expected_slope", "", "default -1 (infinity), 1 (zero, linf/l1) or 0.5 (zero, l2)"},
                     {"tolerance", "0.1", "allowed |slope - expected|"}}),
       "|slope - expected_slope| <= tolerance"},
      {"erf-reference", "Robin solution for u0 = 1 against erf(y/2sqrt t) + e^{alpha(alpha t + y)} erfc((2 alpha t + y)/2sqrt t)",
       {{"alpha", "0.5,1", "Robin coefficients"},
        {"t", "0.5,1", "times"},
        {"y", "0,0.5,1,2", "positions"},
        {"tolerance", "1e-6", "max abs error"}},
       "max abs error < tolerance"},
      {"envelope", "sup-norm of the Robin solution against C e^{alpha t}/(1+t)^beta",
       with_profile({{"a", "1", "Robin coefficient"},
                     {"alpha", "0.1", "envelope rate"},
                     {"beta", "0.25", "envelope power"},
                     {"constant", "1.25", "envelope constant"},
                     {"t", "0.25,0.5,1,2,4,8,16,30", "sample times"}}),
       "sup samples/shape <= constant"},
      {"gronwall", "phi' = lambda phi + C e^{alpha t}/(1+t)^beta and the asymptotic integral ratio",
       {{"lambda", "0.5", ""},
        {"alpha", "1", ""},
        {"beta", "0.25", ""},
        {"C", "1", ""},
        {"phi0", "0", ""},
        {"t_check", "30", ""}},
       "trajectory under its envelope and |alpha * ratio - 1| <= 0.05"},
      {"profile-check", "assumption report and inflection data of a catalog profile",
       with_profile({{"regime", "above", "above|below (gamma relative to 1/2)"},
                     {"k_max", "4", "highest derivative order checked"},
                     {"tol", "1e-10", "flatness tolerance at 0"}}),
       "assumption report passes"},
      {"certify", "variational instability certificate", with_profile({}), "q_value < 0 and min_eig < 0"},
      {"dispersion", "growth-rate curve sigma(k) from the Rayleigh equation",
       with_profile({{"k", "", "comma list; default 0.05..2 step 0.05, 2.25..5 step 0.25"},
                     {"packet", "1", "also fit the wave-packet envelope"}}),
       "unstable, sigma(k_first) < sigma0/4, sigma(k_last) = 0, all modes in the semicircle with collocation "
       "residual < 1e-6"},
      {"growth-oracle", "time-stepped growth rate against the eigenvalue solver",
       with_profile({{"k", "0.658", "wavenumber"},
                     {"T", "600", "final time"},
                     {"dt", "0.01", "time step"},
                     {"n", "2000", "interior nodes"}}),
       "conclusive slope within 5% of k Im c (or <= 1e-3 when no mode exists)"},
      {"plan", "exponent bookkeeping of the expansion",
       {{"gamma", "1", ""}, {"N", "1", ""}, {"M", "3", ""}},
       "always passes"},
      {"instability-time", "T with e^{sigma0 T}/(1+T)^{1/4} = nu^{theta-N}",
       {{"nu", "1e-2,1e-4,1e-6,1e-8", "viscosities"},
        {"theta", "0.25", ""},
        {"N", "1", ""},
        {"sigma0", "1", ""},
        {"tau", "0", ""}},
       "residual < 1e-12 and sqrt(nu) T decreasing"},
      {"corrector", "leading boundary-layer corrector driven by an unstable mode",
       with_profile({{"gamma", "1", ""},
                     {"k", "0.658", "wavenumber of the driving mode"},
                     {"t", "1,2,3,4,5", "times"},
                     {"y_max", "12", "end of the Y grid"},
                     {"ny", "61", "Y nodes"}}),
       "wall residual < 1e-5 (Dirichlet) and fitted decay rate > 0 at every t"},
      {"usbound-sweep", "uniformity of (u^nu - u^0)/nu^{gamma-1/2} in nu",
       with_profile({{"gamma", "1", ""}, {"nu", "1e-2,1e-3,1e-4,1e-5", "viscosities"}}),
       "|fitted log-slope| <= 0.05"},
  };
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double get_double(const Params& p, const std::string& key) {
  const std::string& v = p.at(key);
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key, "expected a number, got '" + v + "'");
}

int get_int(const Params& p, const std::string& key) {
  const double x = get_double(p, key);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(key, "expected an integer");
  return static_cast<int>(x);
}

bool get_bool(const Params& p, const std::string& key) {
  const std::string& v = p.at(key);
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError(key, "expected a boolean");
}

std::vector<double> get_list(const Params& p, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(p.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    Params one{{key, item}};
    out.push_back(get_double(one, key));
  }
  return out;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : path_(path), os_(path, std::ios::binary) {
    if (!os_) throw std::runtime_error("cannot write " + path.string());
    os_ << header << '\n';
  }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  fs::path path_;
  std::ofstream os_;
};

struct Context {
  const ExperimentConfig& cfg;
  Params p;
  fs::path dir;
  RunReport& report;

  fs::path file(const std::string& name) {
    const fs::path f = dir / name;
    report.artifacts.push_back(f);
    return f;
  }
  void plot(const std::string& name, const std::string& body) {
    std::ofstream os(file(name + ".gp"), std::ios::binary);
    os << "set datafile separator ','\nset key autotitle columnhead\n" << body;
  }
};

void run_robin_rates(Context& c) {
  const ShearProfile u0 = profile_from_params(c.p);
  const std::string lim = c.p.at("limit"), nm = c.p.at("norm");
  RateLimit limit;
  if (lim == "infinity")
    limit = RateLimit::ToInfinity;
  else if (lim == "zero")
    limit = RateLimit::ToZero;
  else
    throw ConfigError("limit", "expected infinity|zero");
  Norm norm;
  if (nm == "linf")
    norm = Norm::linf();
  else if (nm == "l1")
    norm = Norm::l1();
  else if (nm == "l2")
    norm = Norm::l2();
  else
    throw ConfigError("norm", "expected linf|l1|l2");
  std::vector<double> as = get_list(c.p, "a");
  if (as.empty()) {
    const Eigen::VectorXd g = limit == RateLimit::ToInfinity ? geomspace(10.0, 1e4, 7) : geomspace(1e-4, 1e-1, 7);
    as.assign(g.data(), g.data() + g.size());
  }
  double expected;
  if (c.p.at("expected_slope").empty())
    expected = limit == RateLimit::ToInfinity ? -1.0 : (nm == "l2" ? 0.5 : 1.0);
  else
    expected = get_double(c.p, "expected_slope");
  const double tol = get_double(c.p, "tolerance");
  RateOptions ro;
  ro.allow_nonflat = get_bool(c.p, "allow_nonflat");
  const RateResult r = rate_experiment(u0, as, norm, limit, get_double(c.p, "t"), ro);
  CsvWriter rates(c.file("rates.csv"), "a,norm_value,norm_kind,t");
  for (const auto& row : r.table) rates.row(row.a, row.norm_value, norm.str(), r.t);
  CsvWriter slopes(c.file("slopes.csv"), "experiment,slope,intercept,r2,expected_slope,tolerance,pass");
  if (!r.fit) {
    c.report.notes["advisory"] = r.advisory;
    c.report.pass = false;
    slopes.row(std::string("robin-rates"), NAN, NAN, NAN, expected, tol, false);
  } else {
    if (!r.advisory.empty()) c.report.notes["advisory"] = r.advisory;
    c.report.pass = std::abs(r.fit->slope - expected) <= tol;
    c.report.metrics["slope"] = r.fit->slope;
    c.report.metrics["r2"] = r.fit->r2;
    slopes.row(std::string("robin-rates"), r.fit->slope, r.fit->intercept, r.fit->r2, expected, tol, c.report.pass);
  }
  c.report.metrics["expected_slope"] = expected;
  c.plot("rates", "set logscale xy\nset xlabel 'a'\nset ylabel 'distance'\nplot 'rates.csv' using 1:2 with linespoints\n");
}

void run_erf_reference(Context& c) {
  const ShearProfile one = make_constant_profile(1.0);
  double worst = 0.0;
  CsvWriter out(c.file("erf.csv"), "alpha,t,y,value,reference,abs_error");
  for (double al : get_list(c.p, "alpha")) {
    const ExtendedProfile ext(one, RobinCoefficient::finite(al), ExtensionOptions{true});
    for (double t : get_list(c.p, "t")) {
      for (double y : get_list(c.p, "y")) {
        const double u = robin_heat_value(ext, t, y);
        const double s = 2.0 * std::sqrt(t);
        // e^{al(al t + y)} erfc(z) = e^{al(al t + y) - z^2} erfcx(z)
        const double z = (2.0 * al * t + y) / s;
        const double ref = std::erf(y / s) + std::exp(al * (al * t + y) - z * z) * erfcx(z);
        worst = std::max(worst, std::abs(u - ref));
        out.row(al, t, y, u, ref, std::abs(u - ref));
      }
    }
  }
  c.report.metrics["max_abs_error"] = worst;
  c.report.pass = worst < get_double(c.p, "tolerance");
  c.plot("erf", "set xlabel 'y'\nplot 'erf.csv' using 3:6 with points\n");
}

void run_envelope(Context& c) {
  const ShearProfile u0 = profile_from_params(c.p);
  const double a = get_double(c.p, "a");
  const Envelope env{get_double(c.p, "alpha"), get_double(c.p, "beta"), get_double(c.p, "constant")};
  std::vector<std::pair<double, double>> samples;
  CsvWriter out(c.file("envelope.csv"), "t,sup_norm,envelope");
  for (double t : get_list(c.p, "t")) {
    const HeatField f = solve_robin(u0, RobinCoefficient::finite(a), t, default_heat_grid(), {});
    const double s = f.values.cwiseAbs().maxCoeff();
    samples.emplace_back(t, s);
    out.row(t, s, env(t));
  }
  const EnvelopeCheck chk = envelope_check(samples, env);
  c.report.metrics["worst_ratio"] = chk.worst_ratio;
  c.report.metrics["worst_t"] = chk.worst_t;
  c.report.pass = chk.pass;
  c.plot("envelope", "set logscale y\nplot 'envelope.csv' using 1:2 with linespoints, '' using 1:3 with lines\n");
}

void run_gronwall(Context& c) {
  const double alpha = get_double(c.p, "alpha");
  const GronwallResult g = gronwall_bound(get_double(c.p, "lambda"), alpha, get_double(c.p, "beta"),
                                          get_double(c.p, "C"), get_double(c.p, "phi0"), get_double(c.p, "t_check"));
  CsvWriter out(c.file("gronwall.csv"), "t,phi,envelope");
  for (const auto& [t, v] : g.trajectory) out.row(t, v, g.envelope(t));
  const EnvelopeCheck chk = envelope_check(g.trajectory, g.envelope);
  c.report.metrics["envelope_constant"] = g.envelope.constant;
  c.report.metrics["asympt_ratio"] = g.asympt_ratio;
  c.report.pass = chk.pass && std::abs(alpha * g.asympt_ratio - 1.0) <= 0.05;
  c.plot("gronwall", "set logscale y\nplot 'gronwall.csv' using 1:2 with lines, '' using 1:3 with lines\n");
}

void run_profile_check(Context& c) {
  const ShearProfile p = profile_from_params(c.p);
  const std::string reg = c.p.at("regime");
  GammaRegime regime;
  if (reg == "above")
    regime = GammaRegime::GammaAboveHalf;
  else if (reg == "below")
    regime = GammaRegime::GammaBelowHalf;
  else
    throw ConfigError("regime", "expected above|below");
  const AssumptionReport rep = check_assumptions(p, regime, get_int(c.p, "k_max"), get_double(c.p, "tol"));
  CsvWriter out(c.file("assumptions.csv"), "order,value_at_zero,l1_window,decay_power,tail_estimate,required,integrable");
  for (const auto& o : rep.orders)
    out.row(o.order, o.value_at_zero, o.l1_window, o.decay_power, o.tail_estimate, o.required, o.integrable);
  const InflectionData inf = inflection_data(p);
  CsvWriter pts(c.file("inflection.csv"), "y,u,k_sup,kplus");
  for (double y : inf.inflection_points) pts.row(y, p(y), inf.k_sup, inf.kplus);
  c.report.metrics["inflection_points"] = static_cast<double>(inf.inflection_points.size());
  c.report.metrics["inflection_value"] = inf.inflection_value;
  c.report.metrics["kplus"] = inf.kplus ? 1.0 : 0.0;
  c.report.metrics["max_value_at_zero"] = rep.max_value_at_zero;
  c.report.pass = rep.pass;
  std::ofstream os(c.file("profile.csv"), std::ios::binary);
  os << "y,u,du,d2u\n";
  for (int i = 0; i <= 400; ++i) {
    const double y = 10.0 * i / 400.0;
    os << fmt(y) << ',' << fmt(p(y)) << ',' << fmt(p.derivative(1, y)) << ',' << fmt(p.derivative(2, y)) << '\n';
  }
  c.plot("profile", "plot 'profile.csv' using 1:2 with lines, '' using 1:4 with lines\n");
}

void run_certify(Context& c) {
  const ShearProfile p = profile_from_params(c.p);
  const Certificate cert = certify(p);
  CsvWriter out(c.file("certificate.csv"), "profile,eta0,n,q_value,y0,q_at_y0,q_prime_at_y0,min_eig,pass");
  out.row(cert.profile, cert.eta0, cert.n, cert.q_value, cert.y0, cert.q_at_y0, cert.q_prime_at_y0, cert.min_eig,
          cert.pass);
  CsvWriter tr(c.file("eta_trace.csv"), "eta,q");
  for (const auto& [e, q] : cert.eta_trace) tr.row(e, q);
  c.report.metrics["eta0"] = cert.eta0;
  c.report.metrics["n"] = cert.n;
  c.report.metrics["q_value"] = cert.q_value;
  c.report.metrics["q_at_y0"] = cert.q_at_y0;
  c.report.metrics["q_prime_at_y0"] = cert.q_prime_at_y0;
  c.report.metrics["u_prime_sq_at_y0"] = cert.u_prime_sq_at_y0;
  c.report.metrics["min_eig"] = cert.min_eig;
  c.report.metrics["min_eig_check"] = cert.min_eig_check;
  c.report.pass = cert.q_value < 0.0 && cert.min_eig < 0.0;
  c.plot("certificate", "set xlabel 'eta'\nplot 'eta_trace.csv' using 1:2 with linespoints\n");
}

void run_dispersion(Context& c) {
  const ShearProfile p = profile_from_params(c.p);
  std::vector<double> ks = get_list(c.p, "k");
  if (ks.empty()) ks = default_k_grid();
  const DispersionCurve curve = scan_sigma(p, ks);
  CsvWriter out(c.file("dispersion.csv"), "k,sigma,re_c,im_c,residual,found");
  bool modes_ok = true;
  double worst_coll = 0.0;
  for (size_t i = 0; i < curve.k_values.size(); ++i) {
    const auto& m = curve.modes[i];
    if (m) {
      modes_ok = modes_ok && semicircle_check(*m, p) && m->collocation_residual < 1e-6;
      worst_coll = std::max(worst_coll, m->collocation_residual);
      out.row(curve.k_values[i], curve.sigma_values[i], m->c.real(), m->c.imag(), m->residual, true);
    } else {
      out.row(curve.k_values[i], curve.sigma_values[i], NAN, NAN, NAN, false);
    }
  }
  c.report.metrics["k0"] = curve.k0;
  c.report.metrics["sigma0"] = curve.sigma0;
  c.report.metrics["curvature"] = curve.curvature;
  c.report.metrics["curvature_order"] = curve.curvature_order;
  c.report.metrics["max_collocation_residual"] = worst_coll;
  if (curve.stable) {
    c.report.notes["result"] = "stable profile: no unstable wavenumber on the grid";
    c.report.pass = false;
    return;
  }
  const size_t i0 = std::find(curve.k_values.begin(), curve.k_values.end(), curve.k0) - curve.k_values.begin();
  if (i0 < curve.modes.size() && curve.modes[i0]) {
    CsvWriter mode(c.file("mode.csv"), "y,re_phi,im_phi");
    const RayleighMode& m = *curve.modes[i0];
    for (Eigen::Index j = 0; j < m.y.size(); j += 10) mode.row(m.y[j], m.phi[j].real(), m.phi[j].imag());
  }
  c.report.metrics["sigma_first"] = curve.sigma_values.front();
  c.report.metrics["sigma_last"] = curve.sigma_values.back();
  c.report.pass = modes_ok && curve.sigma_values.front() < 0.25 * curve.sigma0 && curve.sigma_values.back() == 0.0;
  if (get_bool(c.p, "packet")) {
    const PacketFit pf = wave_packet_fit(p, curve);
    CsvWriter pk(c.file("packet.csv"), "t,log_norm,fit");
    for (size_t i = 0; i < pf.t.size(); ++i)
      pk.row(pf.t[i], pf.log_norm[i], pf.log_c + pf.sigma * pf.t[i] - pf.beta * std::log1p(pf.t[i]));
    c.report.metrics["packet_sigma"] = pf.sigma;
    c.report.metrics["packet_beta"] = pf.beta;
  }
  c.plot("dispersion", "set xlabel 'k'\nset ylabel 'sigma'\nplot 'dispersion.csv' using 1:2 with linespoints\n");
}

std::optional<RayleighMode> mode_for(const ShearProfile& p, double k) {
  const RectangleScan sc = scan_rectangle(p, k);
  std::optional<RayleighMode> best;
  for (const cdouble& s : sc.winding_cells) {
    auto m = try_solve_mode(p, k, k > 0 ? s : std::conj(s));
    if (m && (!best || m->growth_rate > best->growth_rate)) best = std::move(m);
  }
  return best;
}

void run_growth_oracle(Context& c) {
  const ShearProfile p = profile_from_params(c.p);
  const double k = get_double(c.p, "k");
  GrowthOracleOptions go;
  go.seed = c.cfg.seed;
  go.n = get_int(c.p, "n");
  const GrowthEstimate g = growth_estimate(p, k, get_double(c.p, "T"), get_double(c.p, "dt"), go);
  CsvWriter out(c.file("growth.csv"), "t,log_norm");
  for (const auto& [t, l] : g.log_norm) out.row(t, l);
  const auto m = mode_for(p, k);
  const double sigma = m ? m->growth_rate : 0.0;
  c.report.metrics["slope"] = g.slope;
  c.report.metrics["slope_third_quarter"] = g.slope_third_quarter;
  c.report.metrics["slope_last_quarter"] = g.slope_last_quarter;
  c.report.metrics["sigma_eigen"] = sigma;
  c.report.metrics["conclusive"] = g.conclusive ? 1.0 : 0.0;
  if (!g.conclusive) c.report.notes["oracle"] = "inconclusive: slope drifts over the final quarters";
  c.report.pass = g.conclusive && (sigma > 0.0 ? std::abs(g.slope - sigma) / sigma < 0.05 : g.slope <= 1e-3);
  c.plot("growth", "set xlabel 't'\nplot 'growth.csv' using 1:2 with lines\n");
}

void run_plan(Context& c) {
  const ExpansionPlan plan = build_plan(get_double(c.p, "gamma"), get_int(c.p, "N"), get_int(c.p, "M"));
  {
    std::ofstream os(c.file("plan.txt"), std::ios::binary);
    os << plan.dump();
  }
  CsvWriter out(c.file("orders.csv"), "j,k_j,nu_order_uI,nu_order_ub");
  for (int j = 0; j <= plan.M; ++j)
    out.row(j, plan.k_table[j].str(), plan.nu_order_interior(j).str(), plan.nu_order_boundary(j).str());
  c.report.metrics["n"] = plan.n;
  c.report.metrics["theta"] = plan.theta.value();
  c.report.metrics["a"] = plan.amplitude_a.value();
  c.report.notes["regime"] = to_string(plan.regime);
  c.report.pass = true;
}

void run_instability_time(Context& c) {
  const double theta = get_double(c.p, "theta"), sigma0 = get_double(c.p, "sigma0"), tau = get_double(c.p, "tau");
  const int N = get_int(c.p, "N");
  CsvWriter out(c.file("instability_time.csv"), "nu,T,T_nu,sqrt_nu_T,residual");
  bool ok = true;
  double prev = HUGE_VAL, worst = 0.0;
  std::vector<double> nus = get_list(c.p, "nu");
  std::sort(nus.begin(), nus.end(), std::greater<>());
  for (double nu : nus) {
    const InstabilityTime it = instability_time(nu, theta, N, sigma0, tau);
    out.row(nu, it.T, it.T_nu, it.sqrt_nu_T, it.residual);
    ok = ok && it.sqrt_nu_T < prev;
    prev = it.sqrt_nu_T;
    worst = std::max(worst, it.residual);
  }
  c.report.metrics["max_residual"] = worst;
  c.report.metrics["last_sqrt_nu_T"] = prev;
  c.report.pass = ok && worst < 1e-12;
  c.plot("instability_time", "set logscale x\nplot 'instability_time.csv' using 1:4 with linespoints\n");
}

void run_corrector(Context& c) {
  const ShearProfile p = profile_from_params(c.p);
  const double gamma = get_double(c.p, "gamma"), k = get_double(c.p, "k");
  const auto m = mode_for(p, k);
  if (!m) throw ModeNotFound("corrector: no unstable mode at k = " + fmt(k));
  const Eigen::VectorXd Y = Eigen::VectorXd::LinSpaced(get_int(c.p, "ny"), 0.0, get_double(c.p, "y_max"));
  CsvWriter out(c.file("corrector.csv"), "t,Y,re_ub,im_ub,re_vb,im_vb");
  double wall = 0.0, mu = HUGE_VAL;
  Regime regime = bc_regime(gamma);
  for (double t : get_list(c.p, "t")) {
    const CorrectorField f = leading_corrector(*m, gamma, t, Y);
    for (Eigen::Index i = 0; i < Y.size(); ++i)
      out.row(t, Y[i], f.ub[i].real(), f.ub[i].imag(), f.vb[i].real(), f.vb[i].imag());
    wall = std::max(wall, f.wall_residual);
    mu = std::min(mu, f.mu);
  }
  c.report.metrics["wall_residual"] = wall;
  c.report.metrics["mu_min"] = mu;
  c.report.notes["regime"] = to_string(regime);
  c.report.pass = mu > 0.0 && (regime != Regime::Dirichlet || wall < 1e-5);
  c.plot("corrector", "set xlabel 'Y'\nplot 'corrector.csv' using 2:3 with points\n");
}

void run_usbound(Context& c) {
  const ShearProfile p = profile_from_params(c.p);
  const UsboundSweep s = usbound_sweep(p, get_double(c.p, "gamma"), get_list(c.p, "nu"));
  CsvWriter out(c.file("usbound.csv"), "nu,sup_diff,scaled");
  for (const auto& r : s.rows) out.row(r.nu, r.sup_diff, r.scaled);
  c.report.metrics["slope"] = s.slope;
  c.report.pass = std::abs(s.slope) <= 0.05;
  c.plot("usbound", "set logscale xy\nplot 'usbound.csv' using 1:3 with linespoints\n");
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> reg = build_registry();
  return reg;
}

const ExperimentInfo& experiment_info(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return e;
  throw ConfigError("experiment", "unknown experiment '" + name + "'");
}

Params parse_config_text(const std::string& text) {
  Params out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Params parse_config_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

Params resolve_params(const ExperimentInfo& info, const Params& given) {
  Params out;
  for (const auto& s : info.params) out[s.name] = s.default_value;
  for (const auto& [k, v] : given) {
    if (!out.count(k)) throw ConfigError(k, "unknown key for experiment '" + info.name + "'");
    out[k] = v;
  }
  return out;
}

ShearProfile profile_from_params(const Params& p) {
  const std::string name = p.at("profile");
  if (name == "gevrey") return make_gevrey_profile(get_double(p, "rho"));
  if (name == "two-inflection")
    return make_two_inflection_profile(get_double(p, "y1"), get_double(p, "y2"), get_double(p, "amp"));
  if (name == "constant") return make_constant_profile(get_double(p, "value"));
  if (name == "ramp") return make_linear_ramp(get_double(p, "slope"));
  if (name == "zero") return make_zero_profile();
  if (name == "exponential") return make_exponential_profile();
  if (name == "cutoff-exponential") return make_cutoff_exponential(get_double(p, "width"));
  throw ConfigError("profile", "unknown profile '" + name + "'");
}

RunReport run(const ExperimentConfig& config) {
  const ExperimentInfo& info = experiment_info(config.experiment);
  RunReport report;
  report.experiment = info.name;
  Context c{config, resolve_params(info, config.parameters), config.output_dir / info.name, report};
  // parse everything up front so schema errors surface before any output
  if (c.p.count("profile")) (void)profile_from_params(c.p);
  fs::create_directories(c.dir);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string& e = info.name;
  if (e == "robin-rates")
    run_robin_rates(c);
  else if (e == "erf-reference")
    run_erf_reference(c);
  else if (e == "envelope")
    run_envelope(c);
  else if (e == "gronwall")
    run_gronwall(c);
  else if (e == "profile-check")
    run_profile_check(c);
  else if (e == "certify")
    run_certify(c);
  else if (e == "dispersion")
    run_dispersion(c);
  else if (e == "growth-oracle")
    run_growth_oracle(c);
  else if (e == "plan")
    run_plan(c);
  else if (e == "instability-time")
    run_instability_time(c);
  else if (e == "corrector")
    run_corrector(c);
  else if (e == "usbound-sweep")
    run_usbound(c);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    CsvWriter m(c.file("metrics.csv"), "metric,value");
    for (const auto& [k, v] : report.metrics) m.row(k, v);
    m.row(std::string("pass"), report.pass);
  }
  return report;
}

std::string format_report(const RunReport& r) {
  std::ostringstream os;
  os << r.experiment << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& [k, v] : r.metrics) os << "  " << k << " = " << fmt(v) << "\n";
  for (const auto& [k, v] : r.notes) os << "  " << k << ": " << v << "\n";
  for (const auto& a : r.artifacts) os << "  wrote " << a.string() << "\n";
  os << "  wall_time = " << r.wall_time << " s\n";
  return os.str();
}

}  // namespace shearlab
