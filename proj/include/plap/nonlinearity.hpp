#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace plap {

enum class NonlinearityKind { PowerAsym, Polynomial };

/// f(s) = b_plus s^(r_exp-1) for s >= 0 and -b_minus |s|^(r_exp-1) for s < 0.
struct PowerAsymParams {
  double b_plus = 1.0;
  double b_minus = 1.0;
  double r_exp = 4.0;
};

/// f(s) = sum_k coeffs[k-1] s^k, k = 1, 2, ...
struct PolynomialParams {
  std::vector<double> coeffs;
};

using NonlinearityParams = std::variant<PowerAsymParams, PolynomialParams>;

/// The reaction term f together with the exponent q of |s|^(q-2) s.
///
/// Immutable after construction. The zeros z+ > 0 > z- are the first zeros of
/// m(s) = |s|^(q-2) s - f(s) on either side of the origin.
class Nonlinearity {
 public:
  /// Locates z+ and z- without checking the structural hypotheses.
  /// Throws NoZeroFound when m has no sign change within 2^40 of the start probe.
  static Nonlinearity unchecked(double q, NonlinearityParams params);

  NonlinearityKind kind() const noexcept;
  double q() const noexcept { return q_; }
  const NonlinearityParams& params() const noexcept { return params_; }
  double z_plus() const noexcept { return z_plus_; }
  double z_minus() const noexcept { return z_minus_; }
  /// Signed zero on the side of `sign` (+1 or -1).
  double zero(int sign) const noexcept { return sign > 0 ? z_plus_ : z_minus_; }

  double f(double s) const;
  /// Antiderivative with F(0) = 0, exact for both families.
  double F(double s) const;
  /// f(s) / (|s|^(q-2) s); throws DomainError at s = 0.
  double g(double s) const;
  /// m(s) = |s|^(q-2) s - f(s).
  double m(double s) const;

  /// A(a) = |a|^q / q - F(a).
  double area(double a) const;
  double area_plus() const noexcept { return area_plus_; }
  double area_minus() const noexcept { return area_minus_; }
  double area_at(int sign) const noexcept { return sign > 0 ? area_plus_ : area_minus_; }

  /// A(a) - A(t) with t = a - sign(a) h, i.e. h is measured from a toward 0.
  /// Evaluated without forming A(a) and A(t) separately.
  double area_gap(double a, double h) const;

  /// dA/d|a| = |a|^(q-1) - sign(a) f(a).
  double area_slope(double a) const;

  /// Whether the map is odd (PowerAsym with b+ == b-, or only odd powers).
  bool is_odd() const noexcept;

 private:
  Nonlinearity(double q, NonlinearityParams params);
  double first_zero(int sign) const;

  double q_;
  NonlinearityParams params_;
  double z_plus_ = 0.0;
  double z_minus_ = 0.0;
  double area_plus_ = 0.0;
  double area_minus_ = 0.0;
};

struct HypothesisReport {
  bool zeros_ok = false;           // m > 0 on (0, z+) and m < 0 on (z-, 0)
  bool monotone_plus = false;      // g strictly increasing on (0, z+)
  bool monotone_minus = false;     // g strictly decreasing on (z-, 0)
  bool g_vanishes_at_zero = false;
  bool limit_plus_negative = false;
  bool limit_minus_negative = false;
  double limit_plus = 0.0;   // estimated L+
  double limit_minus = 0.0;  // estimated L-
  double g_near_zero_plus = 0.0;
  double g_near_zero_minus = 0.0;
  /// Location of the first failed check, when any.
  std::optional<double> violation_at;
  std::string diagnostic;

  bool pass() const noexcept {
    return zeros_ok && monotone_plus && monotone_minus && g_vanishes_at_zero &&
           limit_plus_negative && limit_minus_negative;
  }
};

/// Grid-based surrogate for the analytic hypotheses on f.
HypothesisReport validate_hypotheses(const Nonlinearity& nl);

/// Locates the zeros and validates; throws HypothesisViolated on failure.
Nonlinearity build_nonlinearity(double q, NonlinearityParams params);

/// (A(z+), A(z-)).
std::pair<double, double> areas(const Nonlinearity& nl);

}  // namespace plap
