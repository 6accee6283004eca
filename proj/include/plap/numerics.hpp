#pragma once

// Thin wrappers over Boost.Math: bracketed root finding, 1-D minimization and
// tanh-sinh quadrature, with the library's error types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "plap/errors.hpp"

namespace plap::numerics {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Root of f on a bracket [a, b] with f(a) f(b) <= 0 (TOMS 748).
///
/// Stops once the bracket is narrower than max(rel_tol |x|, abs_tol) + 4 eps |x|.
template <class F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double rel_tol = 4 * kEps, double abs_tol = 0.0,
                  std::uintmax_t max_iter = 300) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw std::invalid_argument("brent_root: interval does not bracket a root");
  }
  if (a > b) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  auto done = [&](double lo, double hi) {
    const double x = std::max(std::abs(lo), std::abs(hi));
    return hi - lo <= std::max(rel_tol * x, abs_tol) + 4 * kEps * x;
  };
  const auto br = boost::math::tools::toms748_solve(f, a, b, fa, fb, done, max_iter);
  if (br.first == br.second) return br.first;
  // Return the bracket end with the smaller residual.
  const double f1 = f(br.first);
  const double f2 = f(br.second);
  return std::abs(f1) <= std::abs(f2) ? br.first : br.second;
}

struct Minimum {
  double x;
  double value;
};

/// Minimum of a unimodal f on [a, b] (Brent's parabolic/golden search).
template <class F>
Minimum golden_minimize(F&& f, double a, double b, int bits = 26) {
  const auto m = boost::math::tools::brent_find_minima(f, a, b, bits);
  return {m.first, m.second};
}

struct QuadratureOptions {
  double rel_tol = 1e-10;
  /// Level cap; 15 halvings stays below 2^20 abscissae.
  std::size_t max_levels = 15;
};

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule(std::size_t levels) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(levels);
  thread_local std::size_t built = levels;
  if (built != levels) {
    rule = boost::math::quadrature::tanh_sinh<double>(levels);
    built = levels;
  }
  return rule;
}

/// Tanh-sinh rule on a finite interval [lo, hi]; f(x) is never evaluated at the ends.
template <class F>
double tanh_sinh(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
  if (hi == lo) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  double value = 0.0;
  try {
    value = tanh_sinh_rule(opts.max_levels)
                .integrate([&](double x) { return f(x); }, lo, hi, opts.rel_tol, &err, &l1,
                           &levels);
  } catch (const std::exception& e) {
    throw QuadratureFailure(std::string("tanh-sinh: ") + e.what());
  }
  if (!std::isfinite(value)) throw QuadratureFailure("tanh-sinh: non-finite result");
  if (levels >= opts.max_levels && err > opts.rel_tol * l1) {
    throw QuadratureFailure("tanh-sinh: no convergence within the level cap");
  }
  return value;
}

/// Integral of gap(h)^(-1/p) over (0, h_max] where gap vanishes at h = 0 like
/// C h^zero_order (zero_order in {1, 2}, p > zero_order).
///
/// The substitution h = h_max u^beta with beta = p / (p - zero_order) makes
/// the transformed integrand bounded at u = 0.
template <class Gap>
double singular_power_integral(Gap&& gap, double h_max, double p, int zero_order,
                               const QuadratureOptions& opts = {}) {
  if (!(p > zero_order)) {
    throw Divergent("singular_power_integral: exponent makes the integral diverge");
  }
  if (h_max == 0.0) return 0.0;
  const double beta = p / (p - zero_order);
  const double scale = h_max * beta;
  return tanh_sinh(
      [&](double u) {
        const double h = h_max * std::pow(u, beta);
        // Underflowed nodes sit where the rule's weight is negligible.
        if (!(h > 0.0)) return 0.0;
        const double gv = gap(h);
        if (!(gv > 0.0)) return 0.0;
        return scale * std::exp((beta - 1.0) * std::log(u) - std::log(gv) / p);
      },
      0.0, 1.0, opts);
}

}  // namespace plap::numerics
