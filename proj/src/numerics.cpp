#include "shearlab/numerics.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace shearlab {

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // continued fraction, converged to double precision this far out
  double f = 0.0;
  for (int k = 60; k >= 1; --k) f = 0.5 * k / (x + f);
  return 1.0 / (std::sqrt(M_PI) * (x + f));
}

Eigen::MatrixXd fornberg_weights(double x0, const Eigen::Ref<const Eigen::VectorXd>& nodes, int max_order) {
  const int n = static_cast<int>(nodes.size());
  if (n == 0 || max_order < 0) throw InvalidParameter("fornberg_weights: empty stencil");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, max_order + 1);
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

LinearFit fit_line(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidParameter("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  if (sxx == 0) throw InvalidParameter("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double ss_tot = (y.array() - my).square().sum();
  const double ss_res = (y.array() - (f.intercept + f.slope * x.array())).square().sum();
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  (void)n;
  return f;
}

Eigen::VectorXd least_squares(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& y) {
  return A.colPivHouseholderQr().solve(y);
}

double brent_root(const std::function<double(double)>& f, double a, double b, double xtol, int max_iter) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericalFailure("brent_root: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  throw NumericalFailure("brent_root: no convergence");
}

double golden_maximize(const std::function<double(double)>& f, double a, double b, double xtol, int max_iter) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

Eigen::VectorXd linspace(double a, double b, int n) { return Eigen::VectorXd::LinSpaced(n, a, b); }

Eigen::VectorXd geomspace(double a, double b, int n) {
  if (a <= 0 || b <= 0) throw InvalidParameter("geomspace: endpoints must be positive");
  return Eigen::VectorXd::LinSpaced(n, std::log(a), std::log(b)).array().exp();
}

int sturm_count(const Eigen::Ref<const Eigen::VectorXd>& diag, const Eigen::Ref<const Eigen::VectorXd>& off, double x) {
  int count = 0;
  double q = diag[0] - x;
  if (q < 0) ++count;
  for (Eigen::Index i = 1; i < diag.size(); ++i) {
    if (q == 0) q = std::numeric_limits<double>::epsilon() * (std::abs(off[i - 1]) + 1e-300);
    q = diag[i] - x - off[i - 1] * off[i - 1] / q;
    if (q < 0) ++count;
  }
  return count;
}

TridiagonalEigenpair smallest_eigenpair(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double tol) {
  const Eigen::Index n = diag.size();
  if (n == 0) throw InvalidParameter("smallest_eigenpair: empty matrix");
  // Gershgorin interval
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = 0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  // bisection until the bracket holds exactly one eigenvalue and is narrow
  for (int it = 0; it < 200 && hi - lo > 1e-9 * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  double shift = 0.5 * (lo + hi);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] += 1e-3 * std::sin(0.37 * static_cast<double>(i));
  v.normalize();
  const Eigen::VectorXd sub = off;
  TridiagonalEigenpair out;
  double rq = shift;
  for (int it = 1; it <= 60; ++it) {
    Eigen::VectorXd d = diag.array() - shift;
    TridiagonalLU<double> lu(sub, d, sub);
    if (lu.singular()) {
      shift += 1e-12 * scale;
      continue;
    }
    Eigen::VectorXd w = lu.solve(v);
    v = w / w.norm();
    const Eigen::VectorXd Tv = tridiagonal_apply<double>(sub, diag, sub, v);
    rq = v.dot(Tv);
    const double res = (Tv - rq * v).norm();
    out.iterations = it;
    // keep the shift inside the isolating bracket so the iteration cannot jump branches
    if (rq > lo - 1e-9 * scale && rq < hi + 1e-9 * scale) shift = rq;
    if (res <= tol * std::max(1.0, scale)) break;
  }
  if (sturm_count(diag, off, rq + 1e-8 * scale) < 1) throw NumericalFailure("smallest_eigenpair: no convergence");
  out.value = rq;
  out.vector = v;
  return out;
}

}  // namespace shearlab
