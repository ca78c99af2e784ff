#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "tailclust/dist_fn.hpp"

using namespace tailclust::dist;
using Catch::Approx;

TEST_CASE("regularised incomplete beta", "[dist]") {
  CHECK(reg_inc_beta(0.0, 2.5, 3.0) == 0.0);
  CHECK(reg_inc_beta(1.0, 2.5, 3.0) == 1.0);
  CHECK(reg_inc_beta(0.5, 1, 1) == Approx(0.5).margin(1e-15));
  CHECK(reg_inc_beta(0.5, 2, 2) == Approx(0.5).margin(1e-15));
  for (double a : {0.05, 0.5, 1.0, 3.3, 40.0}) {
    for (double b : {0.1, 0.5, 2.0, 17.0}) {
      for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
        const double ref = boost::math::ibeta(a, b, x);
        CHECK(reg_inc_beta(x, a, b) == Approx(ref).epsilon(1e-11).margin(1e-300));
        CHECK(reg_inc_beta(x, a, b) + reg_inc_beta(1 - x, b, a) == Approx(1.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("student t distribution function", "[dist]") {
  for (double v : {0.3, 1.0, 2.0, 7.5}) CHECK(student_t_cdf(0.0, v) == 0.5);
  CHECK(student_t_cdf(1.0, 1.0) == Approx(0.75).epsilon(1e-14));
  CHECK(student_t_cdf(std::sqrt(2.0), 2.0) == Approx(0.85355339059327376).epsilon(1e-13));
  for (double v : {0.25, 0.5, 1.0, 1.1, 2.0, 4.0, 10.0, 60.0}) {
    boost::math::students_t_distribution<double> ref(v);
    for (double x : {-50.0, -3.0, -0.4, 0.1, 1.0, 2.5, 12.0, 1e4}) {
      CHECK(student_t_cdf(x, v) == Approx(boost::math::cdf(ref, x)).epsilon(1e-11).margin(1e-300));
      CHECK(student_t_sf(x, v) == Approx(boost::math::cdf(boost::math::complement(ref, x))).epsilon(1e-11).margin(1e-300));
      CHECK(student_t_pdf(x, v) == Approx(boost::math::pdf(ref, x)).epsilon(1e-11).margin(1e-300));
    }
  }
}

TEST_CASE("student t quantiles", "[dist]") {
  for (double v : {0.3, 1.0, 3.0, 25.0}) CHECK(student_t_quantile(0.5, v) == 0.0);
  CHECK(student_t_quantile(0.75, 1.0) == Approx(1.0).epsilon(1e-12));
  for (double v : {0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0}) {
    double prev = -INFINITY;
    for (double u : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.6, 0.9, 0.999, 1 - 1e-9}) {
      const double x = student_t_quantile(u, v);
      CHECK(x > prev);
      prev = x;
      CHECK(student_t_cdf(x, v) == Approx(u).margin(1e-8));
    }
    for (double q : {1e-15, 1e-10, 1e-4, 0.3}) {
      boost::math::students_t_distribution<double> ref(v);
      const double x = student_t_isf(q, v);
      CHECK(x == Approx(boost::math::quantile(boost::math::complement(ref, q))).epsilon(1e-8));
    }
  }
  CHECK_THROWS(student_t_quantile(0.0, 2.0));
  CHECK_THROWS(student_t_quantile(0.5, -1.0));
}

TEST_CASE("cauchy distribution function", "[dist]") {
  CHECK(cauchy_cdf(0.0) == 0.5);
  CHECK(cauchy_cdf(1.0) == Approx(0.75).epsilon(1e-15));
  const double far = cauchy_cdf(1e12);
  CHECK(far > 1 - 1e-11);
  CHECK(far < 1.0);
  CHECK(cauchy_sf(1e12) == Approx(1.0 / (std::numbers::pi * 1e12)).epsilon(1e-10));
}

TEST_CASE("frechet quantile", "[dist]") {
  for (double g : {0.25, 0.5, 1.0, 2.0}) CHECK(frechet_quantile(std::exp(-1.0), g) == Approx(1.0).epsilon(1e-14));
  CHECK(frechet_quantile(std::exp(-0.5), 1.0) == Approx(2.0).epsilon(1e-14));
  for (double g : {0.25, 1.0}) {
    for (double u : {1e-9, 0.1, 0.5, 0.9, 0.999999}) {
      CHECK(frechet_cdf(frechet_quantile(u, g), g) == Approx(u).margin(1e-12));
    }
  }
}

TEST_CASE("frechet upper tail quantile", "[dist]") {
  for (double g : {0.25, 1.0}) {
    for (double q : {1e-300, 1e-12, 0.1, 0.5, 0.875}) {
      const double x = frechet_isf(q, g);
      CHECK(-std::expm1(-std::pow(x, -1 / g)) == Approx(q).epsilon(1e-12));
    }
  }
}

TEST_CASE("absolute student t", "[dist]") {
  CHECK(abs_student_t_quantile(1e-300, 3.0) == Approx(0.0).margin(1e-200));
  CHECK(abs_student_t_quantile(0.5, 1.0) == Approx(1.0).epsilon(1e-12));
  for (double v : {0.5, 1.0, 4.0}) {
    for (double u : {0.01, 0.3, 0.8, 0.9999}) {
      const double q = abs_student_t_quantile(u, v);
      CHECK(2 * student_t_cdf(q, v) - 1 == Approx(u).margin(1e-8));
      CHECK(abs_student_t_cdf(q, v) == Approx(u).margin(1e-8));
    }
  }
  CHECK(abs_student_t_cdf(-1.0, 2.0) == 0.0);
}

TEST_CASE("student t class caches per dof", "[dist]") {
  StudentT t(2.0);
  CHECK(t.dof() == 2.0);
  CHECK(t.cdf(std::sqrt(2.0)) == Approx(student_t_cdf(std::sqrt(2.0), 2.0)).epsilon(1e-15));
  CHECK(t.isf(1e-8) == Approx(student_t_isf(1e-8, 2.0)).epsilon(1e-12));
}
