#pragma once

// Reference values computed independently of the library's quadrature and
// area formulas.

#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

/// Integral of (1 - t^p)^(-1/p) over (0, 1) via the Beta function identity.
inline double beta_identity(double p) {
  using std::numbers::pi;
  return (pi / p) / std::sin(pi / p);
}

/// (p - 1) [2 * beta_identity(p)]^p.
inline double lambda_one(double p) { return (p - 1.0) * std::pow(2.0 * beta_identity(p), p); }

/// A hand-written reaction term: q, f and F = integral of f.
struct Family {
  double q;
  std::function<double(double)> f;
  std::function<double(double)> F;

  double area(double s) const { return std::pow(std::abs(s), q) / q - F(s); }

  /// A(a) - A(t) with |a - t| = delta. Short intervals integrate
  /// A' = |s|^(q-1) - sign(s) f(s) by Gauss-Legendre; long ones subtract.
  double gap(double a, double delta) const {
    if (delta >= 0.25 * std::abs(a)) return area(a) - area(a > 0.0 ? a - delta : a + delta);
    // Integrate over the offset u = |a - s| in [0, delta] so the interval
    // length is exactly delta.
    auto slope = [&](double u) {
      const double s = a > 0.0 ? a - u : a + u;
      return std::pow(std::abs(s), q - 1.0) - std::copysign(1.0, s) * f(s);
    };
    return boost::math::quadrature::gauss<double, 10>::integrate(slope, 0.0, delta);
  }
};

/// f(s) = b+ s^(r-1) for s >= 0, -b- |s|^(r-1) below.
inline Family power_family(double q, double bp, double bm, double r) {
  return {q,
          [=](double s) {
            return s >= 0 ? bp * std::pow(s, r - 1) : -bm * std::pow(-s, r - 1);
          },
          [=](double s) { return (s >= 0 ? bp : bm) * std::pow(std::abs(s), r) / r; }};
}

/// Integral of (A(a) - A(t))^(-1/p) between 0 and a by the composite
/// trapezoid rule after t = a (1 - (1 - v)^m), m = 3p/(p - 1), which
/// turns the endpoint singularity into a factor (1 - v)^2.
inline double arch_integral_trapezoid(const Family& fam, double p, double a,
                                      long panels = 1000000) {
  const double m = 3.0 * p / (p - 1.0);
  const double x = std::abs(a);
  auto integrand = [&](double v) {
    const double w = 1.0 - v;
    if (w <= 0.0) return 0.0;
    const double wm = std::pow(w, m);
    const double delta = x * wm;  // |a - t|
    const double g = fam.gap(a, delta);
    if (!(g > 0.0)) return 0.0;
    return m * x * std::pow(w, m - 1.0) * std::pow(g, -1.0 / p);
  };
  const double h = 1.0 / static_cast<double>(panels);
  double sum = 0.5 * (integrand(0.0) + integrand(1.0));
  for (long i = 1; i < panels; ++i) sum += integrand(static_cast<double>(i) * h);
  return sum * h;
}

/// Integral from the classical formula for lambda~_1 with q = p = 4, f = s^5:
/// integral over (0, 1) of ((t^6 - 1)/6 + (1 - t^4)/4)^(-1/4).
/// With t = 1 - w^2 the bracket is w^4 P(w^2), P expanded exactly.
inline double ty_integral_p4q4r6() {
  auto P = [](double u) {
    return 1.0 - 7.0 / 3.0 * u + 9.0 / 4.0 * u * u - u * u * u + u * u * u * u / 6.0;
  };
  auto g = [&](double w) { return 2.0 * std::pow(P(w * w), -0.25); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 20, 1e-14);
}

}  // namespace oracle
