#include "plap/nonlinearity.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "plap/errors.hpp"
#include "plap/numerics.hpp"

namespace plap {
namespace {

double signed_pow(double s, double e) {
  return std::copysign(std::pow(std::abs(s), e), s);
}

// X^e - Y^e for X >= Y >= 0 with X - Y = d known exactly.
double pow_gap(double x, double d, double e) {
  if (d >= x) return std::pow(x, e);
  return -std::pow(x, e) * std::expm1(e * std::log1p(-d / x));
}

// expm1(x) - x without cancellation for small |x|.
double expm1_minus_x(double x) {
  if (std::abs(x) > 0.5) return std::expm1(x) - x;
  double term = x * x / 2.0;
  double sum = term;
  for (int n = 3; n < 40; ++n) {
    term *= x / n;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// a^n - t^n = (a - t) sum_i a^(n-1-i) t^i, with a - t passed exactly.
double int_pow_gap(double a, double t, double a_minus_t, int n) {
  double sum = 0.0;
  double ap = 1.0;
  std::vector<double> apow(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    apow[static_cast<std::size_t>(i)] = ap;
    ap *= a;
  }
  double tp = 1.0;
  for (int i = 0; i < n; ++i) {
    sum += apow[static_cast<std::size_t>(n - 1 - i)] * tp;
    tp *= t;
  }
  return a_minus_t * sum;
}

}  // namespace

Nonlinearity::Nonlinearity(double q, NonlinearityParams params)
    : q_(q), params_(std::move(params)) {}

Nonlinearity Nonlinearity::unchecked(double q, NonlinearityParams params) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw std::invalid_argument("nonlinearity: q must be a finite real > 1");
  }
  if (const auto* pa = std::get_if<PowerAsymParams>(&params)) {
    if (!(pa->b_plus > 0.0) || !(pa->b_minus > 0.0)) {
      throw std::invalid_argument("power_asym: b_plus and b_minus must be positive");
    }
    if (!(pa->r_exp > 1.0)) {
      throw std::invalid_argument("power_asym: r_exp must exceed 1");
    }
  } else {
    const auto& poly = std::get<PolynomialParams>(params);
    if (poly.coeffs.empty()) {
      throw std::invalid_argument("polynomial: coefficient list is empty");
    }
  }
  Nonlinearity nl(q, std::move(params));
  if (const auto* pa = std::get_if<PowerAsymParams>(&nl.params_); pa && pa->r_exp != q) {
    // s^(q-1) = b s^(r-1) at s = b^(-1/(r-q)).
    nl.z_plus_ = std::pow(pa->b_plus, -1.0 / (pa->r_exp - q));
    nl.z_minus_ = -std::pow(pa->b_minus, -1.0 / (pa->r_exp - q));
  } else {
    nl.z_plus_ = nl.first_zero(+1);
    nl.z_minus_ = nl.first_zero(-1);
  }
  nl.area_plus_ = nl.area(nl.z_plus_);
  nl.area_minus_ = nl.area(nl.z_minus_);
  return nl;
}

NonlinearityKind Nonlinearity::kind() const noexcept {
  return std::holds_alternative<PowerAsymParams>(params_) ? NonlinearityKind::PowerAsym
                                                          : NonlinearityKind::Polynomial;
}

bool Nonlinearity::is_odd() const noexcept {
  if (const auto* pa = std::get_if<PowerAsymParams>(&params_)) {
    return pa->b_plus == pa->b_minus;
  }
  const auto& c = std::get<PolynomialParams>(params_).coeffs;
  for (std::size_t k = 1; k < c.size(); k += 2) {
    if (c[k] != 0.0) return false;  // even power s^(k+1)
  }
  return true;
}

double Nonlinearity::f(double s) const {
  if (const auto* pa = std::get_if<PowerAsymParams>(&params_)) {
    if (s >= 0.0) return pa->b_plus * std::pow(s, pa->r_exp - 1.0);
    return -pa->b_minus * std::pow(-s, pa->r_exp - 1.0);
  }
  const auto& c = std::get<PolynomialParams>(params_).coeffs;
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
  return acc * s;
}

double Nonlinearity::F(double s) const {
  if (const auto* pa = std::get_if<PowerAsymParams>(&params_)) {
    const double b = s >= 0.0 ? pa->b_plus : pa->b_minus;
    return b * std::pow(std::abs(s), pa->r_exp) / pa->r_exp;
  }
  const auto& c = std::get<PolynomialParams>(params_).coeffs;
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    acc = acc * s + c[k] / static_cast<double>(k + 2);
  }
  return acc * s * s;
}

double Nonlinearity::g(double s) const {
  if (s == 0.0) throw DomainError("g is undefined at s = 0");
  return f(s) / signed_pow(s, q_ - 1.0);
}

double Nonlinearity::m(double s) const { return signed_pow(s, q_ - 1.0) - f(s); }

double Nonlinearity::area(double a) const {
  return std::pow(std::abs(a), q_) / q_ - F(a);
}

double Nonlinearity::area_slope(double a) const {
  return std::pow(std::abs(a), q_ - 1.0) - std::copysign(1.0, a) * f(a);
}

double Nonlinearity::area_gap(double a, double h) const {
  const double x = std::abs(a);
  if (h <= 0.0) return 0.0;
  if (h >= x) return area(a);
  if (const auto* pa = std::get_if<PowerAsymParams>(&params_)) {
    // With l = log(|t|/|a|) and beta = b |a|^(r-q):
    //   gap = |a|^q [ (1 - beta)(-expm1(q l))/q + beta (E2(r l)/r - E2(q l)/q) ]
    // where E2(y) = expm1(y) - y. The linear terms in l cancel analytically.
    const double b = a >= 0.0 ? pa->b_plus : pa->b_minus;
    const double r = pa->r_exp;
    const double l = std::log1p(-h / x);
    const double beta = b * std::pow(x, r - q_);
    // b z^(r-q) = 1, so 1 - beta = 1 - (|a|/z)^(r-q); this form keeps the
    // relative accuracy of 1 - beta when |a| is close to z.
    const double zs = a >= 0.0 ? z_plus_ : -z_minus_;
    const double one_minus_beta = -std::expm1((r - q_) * std::log1p((x - zs) / zs));
    const double lin = one_minus_beta * (-std::expm1(q_ * l)) / q_;
    const double curv = beta * (expm1_minus_x(r * l) / r - expm1_minus_x(q_ * l) / q_);
    return std::pow(x, q_) * (lin + curv);
  }
  const double t = a >= 0.0 ? a - h : a + h;
  const double a_minus_t = a >= 0.0 ? h : -h;
  const auto& c = std::get<PolynomialParams>(params_).coeffs;
  double dF = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0.0) continue;
    const int n = static_cast<int>(k) + 2;
    dF += c[k] * int_pow_gap(a, t, a_minus_t, n) / n;
  }
  return pow_gap(x, h, q_) / q_ - dF;
}

double Nonlinearity::first_zero(int sign) const {
  // Geometric probes s_k = 1e-3 2^k, k = -40..40; the first sign change of m
  // relative to the innermost probe brackets the first zero.
  constexpr double kStart = 1e-3;
  constexpr int kSpan = 40;
  const double sgn = sign > 0 ? 1.0 : -1.0;
  double prev = sgn * std::ldexp(kStart, -kSpan);
  const double ref = m(prev);
  if (ref == 0.0) {
    throw NoZeroFound("m vanishes identically near 0");
  }
  for (int k = -kSpan + 1; k <= kSpan; ++k) {
    const double s = sgn * std::ldexp(kStart, k);
    const double ms = m(s);
    if ((ms > 0.0) != (ref > 0.0) || ms == 0.0) {
      if (ms == 0.0) return s;
      const auto fn = [this](double x) { return m(x); };
      return numerics::brent_root(fn, prev, s, m(prev), ms, 1e-15);
    }
    prev = s;
  }
  std::ostringstream msg;
  msg << "no sign change of |s|^(q-2)s - f(s) on the " << (sign > 0 ? "positive" : "negative")
      << " axis up to |s| = " << std::ldexp(kStart, kSpan);
  throw NoZeroFound(msg.str());
}

namespace {

// 256-point grid on (0, 1): geometric toward both ends.
std::vector<double> two_sided_geometric_grid() {
  constexpr int kHalf = 128;
  constexpr double kInner = 1e-6;
  std::vector<double> u;
  u.reserve(2 * kHalf);
  const double ratio = std::pow(0.5 / kInner, 1.0 / (kHalf - 1));
  double v = kInner;
  for (int i = 0; i < kHalf; ++i, v *= ratio) u.push_back(i == kHalf - 1 ? 0.5 : v);
  for (int i = kHalf - 1; i >= 0; --i) {
    const double d = u[static_cast<std::size_t>(i)];
    if (d == 0.5) continue;
    u.push_back(1.0 - d);
  }
  return u;
}

// Polynomial extrapolation to delta = 0 through three (delta, value) samples.
double extrapolate_to_zero(const std::array<double, 3>& d, const std::array<double, 3>& v) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    double w = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) w *= (0.0 - d[j]) / (d[i] - d[j]);
    }
    acc += w * v[i];
  }
  return acc;
}

}  // namespace

HypothesisReport validate_hypotheses(const Nonlinearity& nl) {
  HypothesisReport rep;
  const auto grid = two_sided_geometric_grid();
  std::ostringstream diag;
  auto fail_at = [&](double s, const std::string& what) {
    if (!rep.violation_at) {
      rep.violation_at = s;
      diag << what << " at s = " << s;
    }
  };

  rep.zeros_ok = true;
  for (int sign : {+1, -1}) {
    const double z = nl.zero(sign);
    bool monotone = true;
    double prev_g = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = z * grid[i];
      const double ms = nl.m(s);
      if (!((sign > 0) ? ms > 0.0 : ms < 0.0)) {
        if (rep.zeros_ok) fail_at(s, "|s|^(q-2)s - f(s) has the wrong sign");
        rep.zeros_ok = false;
      }
      const double gs = nl.g(s);
      // Walking away from 0: g must increase on both sides (it decreases in s on (z-, 0)).
      if (i > 0 && !(gs > prev_g)) {
        if (monotone) fail_at(s, sign > 0 ? "g not strictly increasing" : "g not strictly decreasing");
        monotone = false;
      }
      prev_g = gs;
    }
    (sign > 0 ? rep.monotone_plus : rep.monotone_minus) = monotone;
  }

  // g(z+-) = 1, so the near-zero probe is compared against that scale.
  constexpr double kLimitTol = 0.05;
  const double probe = 1e-6 * std::min(nl.z_plus(), -nl.z_minus());
  rep.g_near_zero_plus = nl.g(probe);
  rep.g_near_zero_minus = nl.g(-probe);
  rep.g_vanishes_at_zero =
      std::abs(rep.g_near_zero_plus) < kLimitTol && std::abs(rep.g_near_zero_minus) < kLimitTol;
  if (!rep.g_vanishes_at_zero) fail_at(probe, "g does not vanish at 0");

  for (int sign : {+1, -1}) {
    const double z = nl.zero(sign);
    const double mz = nl.m(z);
    const double pz = std::copysign(std::pow(std::abs(z), nl.q() - 1.0), z);
    std::array<double, 3> d{1e-3, 1e-4, 1e-5};
    std::array<double, 3> v{};
    for (int i = 0; i < 3; ++i) {
      const double s = z - std::copysign(d[i] * std::abs(z), z);
      const double ps = std::copysign(std::pow(std::abs(s), nl.q() - 1.0), s);
      v[i] = (nl.m(s) - mz) / (ps - pz);
    }
    const double lim = extrapolate_to_zero(d, v);
    if (sign > 0) {
      rep.limit_plus = lim;
      rep.limit_plus_negative = lim < 0.0;
      if (!(lim < 0.0)) fail_at(z, "endpoint limit L+ is not negative");
    } else {
      rep.limit_minus = lim;
      rep.limit_minus_negative = lim < 0.0;
      if (!(lim < 0.0)) fail_at(z, "endpoint limit L- is not negative");
    }
  }
  rep.diagnostic = diag.str();
  return rep;
}

Nonlinearity build_nonlinearity(double q, NonlinearityParams params) {
  Nonlinearity nl = Nonlinearity::unchecked(q, std::move(params));
  const HypothesisReport rep = validate_hypotheses(nl);
  if (!rep.pass()) {
    throw HypothesisViolated("nonlinearity violates the structural hypotheses: " +
                             rep.diagnostic);
  }
  return nl;
}

std::pair<double, double> areas(const Nonlinearity& nl) {
  return {nl.area_plus(), nl.area_minus()};
}

}  // namespace plap
