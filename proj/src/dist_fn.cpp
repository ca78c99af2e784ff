#include "tailclust/dist_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "tailclust/error.hpp"

namespace tailclust::dist {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kCfEps = 1e-16;

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Lentz evaluation of the incomplete-beta continued fraction.
double beta_cf(double x, double a, double b, const Tolerance& tol) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  const double eps = std::min(kCfEps, tol.abs_tol);
  for (std::size_t m = 1; m <= tol.max_iter; ++m) {
    const double md = static_cast<double>(m);
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= eps) return h;
  }
  std::ostringstream os;
  os << "incomplete beta continued fraction did not converge (x=" << x << ", a=" << a << ", b=" << b
     << ", max_iter=" << tol.max_iter << ")";
  throw ConvergenceError(os.str());
}

// I_x(a,b) with y = 1 - x supplied separately so neither side loses digits.
double inc_beta(double x, double y, double a, double b, double lbeta, const Tolerance& tol) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double lx = x < 0.5 ? std::log(x) : std::log1p(-y);
  const double ly = y < 0.5 ? std::log(y) : std::log1p(-x);
  const double front = std::exp(a * lx + b * ly - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b, tol) / a;
  return 1.0 - front * beta_cf(y, b, a, tol) / b;
}

void check_dof(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("degrees of freedom must be positive and finite");
}

}  // namespace

double reg_inc_beta(double x, double a, double b, const Tolerance& tol) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("incomplete beta argument must lie in [0,1]");
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("incomplete beta parameters must be positive");
  return inc_beta(x, 1.0 - x, a, b, log_beta(a, b), tol);
}

StudentT::StudentT(double v) : v_(v) {
  check_dof(v);
  half_v_ = 0.5 * v;
  lbeta_ = log_beta(0.5 * v, 0.5);
  log_norm_ = std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) - 0.5 * std::log(v * std::numbers::pi);
}

// 1 - F(x) for x >= 0.
double StudentT::sf_pos(double x, const Tolerance& tol) const {
  const double r = x / std::sqrt(v_);
  double t, y;
  if (r > 1e100) {
    t = 1.0 / (r * r);
    y = 1.0;
  } else {
    const double r2 = r * r;
    t = 1.0 / (1.0 + r2);
    y = r2 / (1.0 + r2);
  }
  return 0.5 * inc_beta(t, y, half_v_, 0.5, lbeta_, tol);
}

double StudentT::pdf(double x) const {
  return std::exp(log_norm_ - 0.5 * (v_ + 1.0) * std::log1p(x * x / v_));
}

// Solve sf(x) = q for q in (0, 0.5) by Newton on s = log x, where the tail is
// close to linear, guarded by a bisection bracket.
double StudentT::isf_upper(double q, const Tolerance& tol) const {
  const double log_q = std::log(q);
  auto residual = [&](double s) { return std::log(sf_pos(std::exp(s), tol)) - log_q; };

  // Two starting points: the power-law tail and a Cornish-Fisher expansion.
  const double s_tail = (log_norm_ + 0.5 * (v_ - 1.0) * std::log(v_) - log_q) / v_;
  const double z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
  const double x_cf = z + (z * z * z + z) / (4.0 * v_) + (5.0 * std::pow(z, 5) + 16.0 * z * z * z + 3.0 * z) / (96.0 * v_ * v_);
  const double s_cf = std::log(std::max(x_cf, 1e-300));

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  auto narrow = [&](double s, double h) {
    if (h > 0.0) lo = std::max(lo, s);  // sf too large: x too small
    else hi = std::min(hi, s);
  };
  const double h_tail = residual(s_tail);
  const double h_cf = std::isfinite(s_cf) ? residual(s_cf) : std::numeric_limits<double>::infinity();
  narrow(s_tail, h_tail);
  if (std::isfinite(h_cf)) narrow(s_cf, h_cf);
  double s = std::fabs(h_tail) <= std::fabs(h_cf) ? s_tail : s_cf;
  double h = std::fabs(h_tail) <= std::fabs(h_cf) ? h_tail : h_cf;

  for (std::size_t it = 0; it < tol.max_iter; ++it) {
    if (h == 0.0) break;
    const double x = std::exp(s);
    const double sf = sf_pos(x, tol);
    // d/ds log sf(e^s) = -x pdf(x) / sf(x)
    const double slope = -x * pdf(x) / sf;
    double next = s - h / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      if (std::isfinite(lo) && std::isfinite(hi)) next = 0.5 * (lo + hi);
      else if (std::isfinite(lo)) next = lo + 2.0;
      else next = hi - 2.0;
    }
    const double step = next - s;
    s = next;
    h = residual(s);
    narrow(s, h);
    if (std::fabs(step) <= 1e-14 * std::max(1.0, std::fabs(s))) break;
    if (std::isfinite(lo) && std::isfinite(hi) && hi - lo <= 1e-15 * std::max(1.0, std::fabs(s))) break;
  }
  const double x = std::exp(s);
  if (std::fabs(sf_pos(x, tol) - q) > tol.abs_tol) {
    std::ostringstream os;
    os << "Student-t quantile inversion did not converge (q=" << q << ", v=" << v_ << ")";
    throw ConvergenceError(os.str());
  }
  return x;
}

double StudentT::sf(double x) const {
  if (std::isnan(x)) throw InvalidArgument("Student-t argument is NaN");
  return x >= 0.0 ? sf_pos(x, {}) : 1.0 - sf_pos(-x, {});
}

double StudentT::cdf(double x) const {
  if (std::isnan(x)) throw InvalidArgument("Student-t argument is NaN");
  return x >= 0.0 ? 1.0 - sf_pos(x, {}) : sf_pos(-x, {});
}

double StudentT::isf(double q, const Tolerance& tol) const {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("tail probability must lie in (0,1)");
  if (q == 0.5) return 0.0;
  return q < 0.5 ? isf_upper(q, tol) : -isf_upper(1.0 - q, tol);
}

double StudentT::quantile(double u, const Tolerance& tol) const {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("probability must lie in (0,1)");
  if (u == 0.5) return 0.0;
  return u > 0.5 ? isf_upper(1.0 - u, tol) : -isf_upper(u, tol);
}

double student_t_sf(double x, double v) { return StudentT(v).sf(x); }

double student_t_cdf(double x, double v) { return StudentT(v).cdf(x); }

double student_t_pdf(double x, double v) { return StudentT(v).pdf(x); }

double student_t_isf(double q, double v, const Tolerance& tol) { return StudentT(v).isf(q, tol); }

double student_t_quantile(double u, double v, const Tolerance& tol) { return StudentT(v).quantile(u, tol); }

double cauchy_cdf(double x) { return 0.5 + std::atan(x) / std::numbers::pi; }

double cauchy_sf(double x) {
  if (x > 1.0) return std::atan(1.0 / x) / std::numbers::pi;
  return 0.5 - std::atan(x) / std::numbers::pi;
}

double frechet_quantile(double u, double gamma) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("probability must lie in (0,1)");
  if (!(gamma > 0.0)) throw InvalidArgument("Frechet index must be positive");
  return std::pow(-std::log(u), -gamma);
}

double frechet_isf(double q, double gamma) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("tail probability must lie in (0,1)");
  if (!(gamma > 0.0)) throw InvalidArgument("Frechet index must be positive");
  return std::pow(-std::log1p(-q), -gamma);
}

double frechet_cdf(double x, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("Frechet index must be positive");
  if (x <= 0.0) return 0.0;
  return std::exp(-std::pow(x, -1.0 / gamma));
}

double abs_student_t_quantile(double u, double v, const Tolerance& tol) {
  check_dof(v);
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("probability must lie in (0,1)");
  // (1+u)/2 has upper tail (1-u)/2.
  const double q = 0.5 * (1.0 - u);
  if (q >= 0.5) return 0.0;
  return StudentT(v).isf(q, tol);
}

double abs_student_t_cdf(double x, double v) {
  check_dof(v);
  if (x <= 0.0) return 0.0;
  return 1.0 - 2.0 * StudentT(v).sf(x);
}

}  // namespace tailclust::dist
