#pragma once

#include <utility>

#include "plap/nonlinearity.hpp"
#include "plap/numerics.hpp"

namespace plap {

/// (p, f, lambda) together with the quadrature tolerance used throughout.
struct Problem {
  double p;
  Nonlinearity nl;
  double lambda;
  numerics::QuadratureOptions quad{};

  Problem(double p_, Nonlinearity nl_, double lambda_,
          numerics::QuadratureOptions quad_ = {});

  /// lambda p / (p - 1): r^p = kappa * (energy level).
  double kappa() const noexcept { return lambda * p / (p - 1.0); }
  /// ((p - 1) / (lambda p))^(1/p): converts I, J into x-lengths.
  double time_scale() const noexcept;
};

struct SlopeBounds {
  double r_pos;
  double r_neg;
  double r_star;
};

struct EndpointLevels {
  double z_hat;
  double s_hat;
};

/// An energy level E = r^p / kappa together with the exact distances
/// A(z+) - E and A(z-) - E. Near the zeros these distances are tiny and carry
/// all the information, so they are never recovered by subtraction.
struct Level {
  double energy;
  double gap_plus;
  double gap_minus;

  double gap(int sign) const noexcept { return sign > 0 ? gap_plus : gap_minus; }
};

SlopeBounds slope_bounds(const Problem& pr);

/// Level reached by an arch launched with slope r (r > 0). The gaps may be
/// negative when r exceeds the corresponding slope bound.
Level level_of_r(const Problem& pr, double r);
double r_of_level(const Problem& pr, const Level& lv);

/// Signed arch top a on the side of `sign` with A(a) = energy, where
/// gap = A(z_sign) - energy is supplied exactly. gap == 0 returns z_sign.
double arch_top(const Nonlinearity& nl, int sign, double energy, double gap);
double arch_top(const Nonlinearity& nl, int sign, const Level& lv);

double z_of_r(const Problem& pr, double r);
double s_of_r(const Problem& pr, double r);

/// Integral of (A(a) - A(t))^(-1/p) over t between 0 and a, for either sign
/// of a. Equal to I(a) for a > 0 and J(a) for a < 0.
double arch_integral(const Nonlinearity& nl, double p, double a,
                     const numerics::QuadratureOptions& opts = {});

/// Same integrand from the top a down to the height a - sign(a) h.
double partial_arch_integral(const Nonlinearity& nl, double p, double a, double h,
                             const numerics::QuadratureOptions& opts = {});

double integral_I(const Nonlinearity& nl, double p, double a,
                  const numerics::QuadratureOptions& opts = {});
double integral_J(const Nonlinearity& nl, double p, double a,
                  const numerics::QuadratureOptions& opts = {});

double theta(const Problem& pr, double r);
double alpha(const Problem& pr, double r);

/// (x(lambda), y(lambda)): half-widths of arches reaching z+ and z-. p > 2.
std::pair<double, double> flat_core_half_widths(const Problem& pr);

/// Relative tolerance under which A(z+) and A(z-) are treated as equal.
inline constexpr double kAreaTie = 1e-12;

/// Levels at r = r*(lambda); independent of lambda.
EndpointLevels endpoint_levels(const Nonlinearity& nl, double p);

}  // namespace plap
