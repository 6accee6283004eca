#include "plap/timemap.hpp"

#include <cmath>
#include <stdexcept>

#include "plap/errors.hpp"

namespace plap {

Problem::Problem(double p_, Nonlinearity nl_, double lambda_,
                 numerics::QuadratureOptions quad_)
    : p(p_), nl(std::move(nl_)), lambda(lambda_), quad(quad_) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must be a finite real > 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be a finite positive real");
  }
}

double Problem::time_scale() const noexcept { return std::pow(1.0 / kappa(), 1.0 / p); }

SlopeBounds slope_bounds(const Problem& pr) {
  const double k = pr.kappa();
  const double rp = std::pow(k * pr.nl.area_plus(), 1.0 / pr.p);
  const double rn = std::pow(k * pr.nl.area_minus(), 1.0 / pr.p);
  return {rp, rn, std::min(rp, rn)};
}

Level level_of_r(const Problem& pr, double r) {
  if (!(r > 0.0)) throw OutOfRange("slope r must be positive");
  const SlopeBounds sb = slope_bounds(pr);
  Level lv{};
  lv.energy = std::pow(r, pr.p) / pr.kappa();
  lv.gap_plus = -pr.nl.area_plus() * std::expm1(pr.p * std::log(r / sb.r_pos));
  lv.gap_minus = -pr.nl.area_minus() * std::expm1(pr.p * std::log(r / sb.r_neg));
  return lv;
}

double r_of_level(const Problem& pr, const Level& lv) {
  return std::pow(pr.kappa() * lv.energy, 1.0 / pr.p);
}

double arch_top(const Nonlinearity& nl, int sign, double energy, double gap) {
  const double z = nl.zero(sign);
  const double a_max = nl.area_at(sign);
  if (gap < 0.0) throw OutOfRange("level lies above the area of the zero");
  if (gap == 0.0) return z;
  const double zabs = std::abs(z);
  if (gap < 0.25 * a_max) {
    // Solve for the depth below the zero; accurate when the level is close to it.
    auto fn = [&](double h) { return nl.area_gap(z, h) - gap; };
    const double h = numerics::brent_root(fn, 0.0, zabs, -gap, a_max - gap);
    return z - std::copysign(h, z);
  }
  // Far from the zero the energy itself is the accurate datum.
  if (!(energy > 0.0)) return 0.0;
  auto fn = [&](double x) { return nl.area(std::copysign(x, z)) - energy; };
  const double x = numerics::brent_root(fn, 0.0, zabs, -energy, a_max - energy);
  return std::copysign(x, z);
}

double arch_top(const Nonlinearity& nl, int sign, const Level& lv) {
  return arch_top(nl, sign, lv.energy, lv.gap(sign));
}

double z_of_r(const Problem& pr, double r) {
  const SlopeBounds sb = slope_bounds(pr);
  if (!(r > 0.0) || !(r < sb.r_pos)) throw OutOfRange("z_of_r: r outside (0, r_pos)");
  return arch_top(pr.nl, +1, level_of_r(pr, r));
}

double s_of_r(const Problem& pr, double r) {
  const SlopeBounds sb = slope_bounds(pr);
  if (!(r > 0.0) || !(r < sb.r_neg)) throw OutOfRange("s_of_r: r outside (0, r_neg)");
  return arch_top(pr.nl, -1, level_of_r(pr, r));
}

double partial_arch_integral(const Nonlinearity& nl, double p, double a, double h,
                             const numerics::QuadratureOptions& opts) {
  const double x = std::abs(a);
  if (!(h > 0.0) || x == 0.0) return 0.0;
  const int sign = a > 0.0 ? +1 : -1;
  const double zs = std::abs(nl.zero(sign));
  if (x > zs) throw OutOfRange("arch top beyond the first zero");
  h = std::min(h, x);
  auto gap = [&](double s) { return nl.area_gap(a, s); };
  const double d = zs - x;
  if (d == 0.0) return numerics::singular_power_integral(gap, h, p, 2, opts);

  // Near the zero the gap behaves like K s (2d + s): linear for s << d and
  // quadratic beyond. The linear part gets the algebraic substitution, the
  // rest is integrated in log s where the crossover is smooth.
  const double split = 2.0 * d;
  if (split >= h) return numerics::singular_power_integral(gap, h, p, 1, opts);
  const double head = numerics::singular_power_integral(gap, split, p, 1, opts);
  const double span = std::log(h / split);
  const double tail = numerics::tanh_sinh(
      [&](double v) {
        const double s = split * std::exp(v);
        return std::exp(std::log(s) - std::log(gap(s)) / p);
      },
      0.0, span, opts);
  return head + tail;
}

double arch_integral(const Nonlinearity& nl, double p, double a,
                     const numerics::QuadratureOptions& opts) {
  return partial_arch_integral(nl, p, a, std::abs(a), opts);
}

double integral_I(const Nonlinearity& nl, double p, double a,
                  const numerics::QuadratureOptions& opts) {
  if (!(a > 0.0) || a > nl.z_plus()) throw OutOfRange("integral_I: a outside (0, z+]");
  return arch_integral(nl, p, a, opts);
}

double integral_J(const Nonlinearity& nl, double p, double a,
                  const numerics::QuadratureOptions& opts) {
  if (!(a < 0.0) || a < nl.z_minus()) throw OutOfRange("integral_J: a outside [z-, 0)");
  return arch_integral(nl, p, a, opts);
}

double theta(const Problem& pr, double r) {
  return pr.time_scale() * arch_integral(pr.nl, pr.p, z_of_r(pr, r), pr.quad);
}

double alpha(const Problem& pr, double r) {
  return pr.time_scale() * arch_integral(pr.nl, pr.p, s_of_r(pr, r), pr.quad);
}

std::pair<double, double> flat_core_half_widths(const Problem& pr) {
  if (!(pr.p > 2.0)) throw Divergent("flat-core half-widths require p > 2");
  const double c = pr.time_scale();
  return {c * arch_integral(pr.nl, pr.p, pr.nl.z_plus(), pr.quad),
          c * arch_integral(pr.nl, pr.p, pr.nl.z_minus(), pr.quad)};
}

EndpointLevels endpoint_levels(const Nonlinearity& nl, double /*p*/) {
  // At r = r*(lambda) the energy equals min(A+, A-); lambda drops out.
  const double ap = nl.area_plus();
  const double am = nl.area_minus();
  if (std::abs(ap - am) <= kAreaTie * std::max(ap, am)) return {nl.z_plus(), nl.z_minus()};
  if (ap < am) return {nl.z_plus(), arch_top(nl, -1, ap, am - ap)};
  return {arch_top(nl, +1, am, ap - am), nl.z_minus()};
}

}  // namespace plap
