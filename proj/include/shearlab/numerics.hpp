#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace shearlab {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using cdouble = std::complex<double>;

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads; results must be
// written by index so the outcome does not depend on scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

// e^{x^2} erfc(x)
double erfcx(double x);

// magnitude used for error control of real and complex values alike
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const cdouble& x) { return std::abs(x); }

namespace detail {
template <typename S>
S pairwise_range(const S* p, Eigen::Index n) {
  if (n <= 8) {
    S s(0);
    for (Eigen::Index i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const Eigen::Index h = n / 2;
  return pairwise_range(p, h) + pairwise_range(p + h, n - h);
}
}  // namespace detail

// Pairwise (cascade) summation; reduction order depends only on the size.
template <typename Derived>
typename Derived::Scalar pairwise_sum(const Eigen::DenseBase<Derived>& v) {
  using S = typename Derived::Scalar;
  const Eigen::Matrix<S, Eigen::Dynamic, 1> tmp = v.derived().reshaped();
  return detail::pairwise_range(tmp.data(), tmp.size());
}

// ---------------------------------------------------------------------------
// adaptive Gauss-Kronrod (10/21 point) quadrature

struct QuadratureOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int intervals = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 11> kGkNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kGkWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <typename T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T, typename F>
Panel<T> gk21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<T, 21> fv;
  fv[20] = f(c);
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kGkNodes[j];
    fv[2 * j] = f(c - dx);
    fv[2 * j + 1] = f(c + dx);
  }
  T kron = fv[20] * kGkWeights[10];
  T gauss = T(0);
  for (int j = 0; j < 10; ++j) {
    kron += (fv[2 * j] + fv[2 * j + 1]) * kGkWeights[j];
    if (j % 2 == 1) gauss += (fv[2 * j] + fv[2 * j + 1]) * kGaussWeights[j / 2];
  }
  const T mean = kron * 0.5;
  double asc = kGkWeights[10] * magnitude(T(fv[20] - mean));
  for (int j = 0; j < 10; ++j)
    asc += kGkWeights[j] * (magnitude(T(fv[2 * j] - mean)) + magnitude(T(fv[2 * j + 1] - mean)));
  asc *= std::abs(h);
  kron *= h;
  gauss *= h;
  double err = magnitude(T(kron - gauss));
  if (asc > 0 && err > 0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * magnitude(kron));
  return {a, b, kron, err};
}

}  // namespace detail

template <typename F>
auto integrate(F&& f, double a, double b, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>> {
  using T = std::decay_t<decltype(f(a))>;
  QuadratureResult<T> res;
  if (a == b) return res;
  std::priority_queue<detail::Panel<T>> heap;
  auto first = detail::gk21<T>(f, a, b);
  T total = first.value;
  double err = first.error;
  heap.push(first);
  int n = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * magnitude(total))) {
    if (n >= opt.max_intervals) {
      res.converged = false;
      break;
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      res.converged = false;
      heap.push(worst);
      break;
    }
    auto left = detail::gk21<T>(f, worst.a, mid);
    auto right = detail::gk21<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  // re-sum from the panels for a reproducible value
  std::vector<detail::Panel<T>> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  Vector<T> vals(static_cast<Eigen::Index>(panels.size()));
  double e = 0;
  for (size_t i = 0; i < panels.size(); ++i) {
    vals[static_cast<Eigen::Index>(i)] = panels[i].value;
    e += panels[i].error;
  }
  res.value = pairwise_sum(vals);
  res.error = e;
  res.intervals = n;
  return res;
}

// integrate over consecutive pieces [p0,p1], [p1,p2], ...
template <typename F>
auto integrate_pieces(F&& f, std::vector<double> points, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(points[0]))>> {
  using T = std::decay_t<decltype(f(points[0]))>;
  QuadratureResult<T> res;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    auto r = integrate(f, points[i], points[i + 1], opt);
    res.value += r.value;
    res.error += r.error;
    res.intervals += r.intervals;
    res.converged = res.converged && r.converged;
  }
  return res;
}

// integral over [a, inf) through y = a + L s/(1-s)
template <typename F>
auto integrate_to_infinity(F&& f, double a, double scale = 1.0, const QuadratureOptions& opt = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>> {
  using T = std::decay_t<decltype(f(a))>;
  auto g = [&](double s) -> T {
    if (s >= 1.0) return T(0);
    const double d = 1.0 - s;
    const double y = a + scale * s / d;
    if (!std::isfinite(y)) return T(0);
    return f(y) * (scale / (d * d));
  };
  return integrate(g, 0.0, 1.0, opt);
}

// ---------------------------------------------------------------------------
// finite differences, fits, roots

// Fornberg weights: column m holds the weights of the m-th derivative at x0.
Eigen::MatrixXd fornberg_weights(double x0, const Eigen::Ref<const Eigen::VectorXd>& nodes, int max_order);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);

// least squares coefficients for y ~ A c
Eigen::VectorXd least_squares(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& y);

double brent_root(const std::function<double(double)>& f, double a, double b, double xtol = 1e-15, int max_iter = 200);

double golden_maximize(const std::function<double(double)>& f, double a, double b, double xtol, int max_iter = 200);

Eigen::VectorXd linspace(double a, double b, int n);
Eigen::VectorXd geomspace(double a, double b, int n);

// ---------------------------------------------------------------------------
// Runge-Kutta-Fehlberg 7(8)

struct OdeOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-14;
  double h_init = 0.0;  // 0: pick from the interval length
  double h_max = 0.0;   // 0: unbounded
  int fixed_steps = 0;  // >0: uniform steps, no error control
  long max_steps = 2000000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

namespace detail {
struct Rk78Table {
  static constexpr double c[13] = {0.0,       2.0 / 27.0, 1.0 / 9.0, 1.0 / 6.0, 5.0 / 12.0, 0.5, 5.0 / 6.0,
                                   1.0 / 6.0, 2.0 / 3.0,  1.0 / 3.0, 1.0,       0.0,        1.0};
  static constexpr double a[13][12] = {
      {},
      {2.0 / 27.0},
      {1.0 / 36.0, 1.0 / 12.0},
      {1.0 / 24.0, 0.0, 1.0 / 8.0},
      {5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0},
      {1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0},
      {-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0},
      {31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0},
      {2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0},
      {-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0},
      {2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0, 2133.0 / 4100.0, 45.0 / 82.0,
       45.0 / 164.0, 18.0 / 41.0},
      {3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0},
      {-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0, 2193.0 / 4100.0, 51.0 / 82.0,
       33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0}};
  static constexpr double b[13] = {0.0,         0.0,         0.0,          0.0,          0.0, 34.0 / 105.0, 9.0 / 35.0,
                                   9.0 / 35.0,  9.0 / 280.0, 9.0 / 280.0,  0.0,          41.0 / 840.0, 41.0 / 840.0};
};
}  // namespace detail

// Integrates x' = rhs(t, x) from t0 to t1 (either direction); obs(t, x) after every accepted step.
template <typename State>
class Rk78 {
 public:
  explicit Rk78(OdeOptions opt = {}) : opt_(opt) {}

  template <typename Rhs, typename Observer>
  OdeStats integrate(Rhs&& rhs, State& x, double t0, double t1, Observer&& obs) {
    using T = detail::Rk78Table;
    OdeStats st;
    const double span = t1 - t0;
    if (span == 0.0) return st;
    const double dir = span > 0 ? 1.0 : -1.0;
    std::array<State, 13> k;
    State tmp = x;
    double t = t0;
    if (opt_.fixed_steps > 0) {
      const double h = span / opt_.fixed_steps;
      for (int s = 0; s < opt_.fixed_steps; ++s) {
        stages(rhs, x, t, h, k, tmp);
        st.rhs_evals += 13;
        State acc = k[0] * T::b[0];
        for (int i = 1; i < 13; ++i)
          if (T::b[i] != 0.0) acc += k[i] * T::b[i];
        x += acc * h;
        t = (s + 1 == opt_.fixed_steps) ? t1 : t0 + (s + 1) * h;
        ++st.accepted;
        obs(t, x);
      }
      return st;
    }
    double h = h_ > 0 ? h_ : (opt_.h_init > 0 ? opt_.h_init : std::abs(span) / 64.0);
    if (opt_.h_max > 0) h = std::min(h, opt_.h_max);
    while (dir * (t1 - t) > 0) {
      if (st.accepted + st.rejected > opt_.max_steps) throw NumericalFailure("rk78: step budget exhausted");
      bool last = false;
      double hs = dir * h;
      if (dir * (t + hs - t1) >= 0) {
        hs = t1 - t;
        last = true;
      }
      stages(rhs, x, t, hs, k, tmp);
      st.rhs_evals += 13;
      State acc = k[0] * T::b[0];
      for (int i = 1; i < 13; ++i)
        if (T::b[i] != 0.0) acc += k[i] * T::b[i];
      State xn = x + acc * hs;
      State err = (k[0] + k[10] - k[11] - k[12]) * (hs * 41.0 / 840.0);
      const double scale_err = error_norm(err, x, xn);
      if (!std::isfinite(scale_err)) {
        h *= 0.25;
        ++st.rejected;
        if (h < 1e-14 * std::abs(span)) throw NumericalFailure("rk78: non-finite state");
        continue;
      }
      if (scale_err <= 1.0) {
        t = last ? t1 : t + hs;
        x = xn;
        ++st.accepted;
        obs(t, x);
        const double fac = scale_err > 0 ? 0.9 * std::pow(scale_err, -1.0 / 8.0) : 5.0;
        const double hn = std::abs(hs) * std::clamp(fac, 0.2, 5.0);
        if (!last || hn > h) h = hn;
      } else {
        ++st.rejected;
        h = std::abs(hs) * std::clamp(0.9 * std::pow(scale_err, -1.0 / 7.0), 0.1, 0.9);
        if (h < 1e-14 * std::abs(span)) throw NumericalFailure("rk78: step size underflow");
      }
      if (opt_.h_max > 0) h = std::min(h, opt_.h_max);
    }
    h_ = h;
    return st;
  }

  template <typename Rhs>
  OdeStats integrate(Rhs&& rhs, State& x, double t0, double t1) {
    return integrate(std::forward<Rhs>(rhs), x, t0, t1, [](double, const State&) {});
  }

  const OdeOptions& options() const { return opt_; }

 private:
  template <typename Rhs>
  static void stages(Rhs& rhs, const State& x, double t, double h, std::array<State, 13>& k, State& tmp) {
    using T = detail::Rk78Table;
    k[0] = rhs(t, x);
    for (int i = 1; i < 13; ++i) {
      tmp = x;
      for (int j = 0; j < i; ++j)
        if (T::a[i][j] != 0.0) tmp += k[j] * (h * T::a[i][j]);
      k[i] = rhs(t + T::c[i] * h, tmp);
    }
  }

  double error_norm(const State& err, const State& x0, const State& x1) const {
    const auto sc = (opt_.abs_tol + opt_.rel_tol * x0.cwiseAbs().cwiseMax(x1.cwiseAbs()).array()).eval();
    return (err.cwiseAbs().array() / sc).maxCoeff();
  }

  OdeOptions opt_;
  double h_ = 0.0;
};

// ---------------------------------------------------------------------------
// tridiagonal systems

// LU with partial pivoting of a tridiagonal matrix (sub, diag, super), LAPACK gttrf layout.
template <typename Scalar>
class TridiagonalLU {
 public:
  TridiagonalLU() = default;
  TridiagonalLU(const Vector<Scalar>& sub, const Vector<Scalar>& diag, const Vector<Scalar>& super) {
    compute(sub, diag, super);
  }

  void compute(const Vector<Scalar>& sub, const Vector<Scalar>& diag, const Vector<Scalar>& super) {
    const Eigen::Index n = diag.size();
    dl_ = sub;
    d_ = diag;
    du_ = super;
    du2_ = Vector<Scalar>::Zero(std::max<Eigen::Index>(n - 2, 0));
    piv_.assign(static_cast<size_t>(n), 0);
    singular_ = false;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        piv_[i] = 0;
        if (d_[i] == Scalar(0)) {
          singular_ = true;
          continue;
        }
        const Scalar f = dl_[i] / d_[i];
        dl_[i] = f;
        d_[i + 1] -= f * du_[i];
      } else {
        piv_[i] = 1;
        const Scalar f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = f;
        const Scalar t = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = t - f * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du_[i + 1];
        }
      }
    }
    if (n > 0 && d_[n - 1] == Scalar(0)) singular_ = true;
  }

  bool singular() const { return singular_; }

  template <typename Derived>
  Vector<Scalar> solve(const Eigen::MatrixBase<Derived>& rhs) const {
    const Eigen::Index n = d_.size();
    Vector<Scalar> b = rhs;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (piv_[i] == 0) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const Scalar t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (Eigen::Index i = n - 3; i >= 0; --i) b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    return b;
  }

 private:
  Vector<Scalar> dl_, d_, du_, du2_;
  std::vector<int> piv_;
  bool singular_ = false;
};

// y = T x for the tridiagonal T = (sub, diag, super)
template <typename Scalar, typename Derived>
Vector<Scalar> tridiagonal_apply(const Vector<Scalar>& sub, const Vector<Scalar>& diag, const Vector<Scalar>& super,
                                 const Eigen::MatrixBase<Derived>& x) {
  const Eigen::Index n = diag.size();
  Vector<Scalar> y = diag.cwiseProduct(x.template cast<Scalar>());
  if (n > 1) {
    y.head(n - 1) += super.cwiseProduct(x.tail(n - 1).template cast<Scalar>());
    y.tail(n - 1) += sub.cwiseProduct(x.head(n - 1).template cast<Scalar>());
  }
  return y;
}

// number of eigenvalues below x of the symmetric tridiagonal (diag, off)
int sturm_count(const Eigen::Ref<const Eigen::VectorXd>& diag, const Eigen::Ref<const Eigen::VectorXd>& off, double x);

struct TridiagonalEigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
  int iterations = 0;
};

// smallest eigenpair of a symmetric tridiagonal matrix: Sturm bisection to isolate,
// then inverse iteration with Rayleigh-quotient shifts
TridiagonalEigenpair smallest_eigenpair(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double tol = 1e-13);

}  // namespace shearlab
