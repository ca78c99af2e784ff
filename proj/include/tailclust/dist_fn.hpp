#pragma once

// Special functions and quantile transforms used by the data generators.
// Degrees of freedom are real-valued throughout.

#include <cstddef>

namespace tailclust::dist {

struct Tolerance {
  /// Convergence target. The continued fraction uses it as a relative step
  /// bound; quantile inversion requires |F(x) - u| <= abs_tol on exit.
  double abs_tol = 1e-10;
  std::size_t max_iter = 1000;
};

/// Student-t law with real degrees of freedom; caches the log-normalisers so
/// repeated evaluations at one v are cheap.
class StudentT {
 public:
  explicit StudentT(double v);

  double dof() const noexcept { return v_; }
  double pdf(double x) const;
  double cdf(double x) const;
  /// 1 - cdf(x), accurate far into the upper tail.
  double sf(double x) const;
  /// x with sf(x) = q, 0 < q < 1.
  double isf(double q, const Tolerance& tol = {}) const;
  double quantile(double u, const Tolerance& tol = {}) const;

 private:
  double sf_pos(double x, const Tolerance& tol) const;
  double isf_upper(double q, const Tolerance& tol) const;

  double v_;
  double half_v_;
  double lbeta_;
  double log_norm_;
};

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction, using
/// I_x(a,b) = 1 - I_{1-x}(b,a) on the slowly converging side.
double reg_inc_beta(double x, double a, double b, const Tolerance& tol = {});

double student_t_cdf(double x, double v);
/// Upper tail 1 - St_v(x), accurate far into the tail.
double student_t_sf(double x, double v);
double student_t_pdf(double x, double v);

/// St_v^{-1}(u) for 0 < u < 1.
double student_t_quantile(double u, double v, const Tolerance& tol = {});
/// x with 1 - St_v(x) = q, 0 < q < 1. Preferable to student_t_quantile(1 - q)
/// when q is tiny.
double student_t_isf(double q, double v, const Tolerance& tol = {});

double cauchy_cdf(double x);
/// 1 - cauchy_cdf(x) without cancellation for large x.
double cauchy_sf(double x);

/// (-log u)^(-gamma): inverse of exp(-x^(-1/gamma)).
double frechet_quantile(double u, double gamma);
/// Quantile at 1 - q, computed from q.
double frechet_isf(double q, double gamma);
double frechet_cdf(double x, double gamma);

/// Quantile of |T|, T ~ St_v: student_t_quantile((1 + u) / 2, v).
double abs_student_t_quantile(double u, double v, const Tolerance& tol = {});
/// CDF of |T|: 2 St_v(x) - 1 for x >= 0, else 0.
double abs_student_t_cdf(double x, double v);

}  // namespace tailclust::dist
