#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "plap/solver.hpp"
#include "plap/timemap.hpp"

namespace plap {

/// Sampled solution on [0, 1].
struct Profile {
  std::vector<double> x;
  std::vector<double> phi;
  std::vector<double> dphi;
  std::vector<std::pair<double, double>> flat_intervals;
  std::vector<double> nodes;  // interior zeros
  /// Exact pointwise (phi, dphi) when the profile comes from reconstruction.
  std::function<std::pair<double, double>(double)> evaluator;

  /// (phi, dphi) at any x in [0, 1]: the evaluator if present, otherwise
  /// cubic Hermite interpolation of the samples.
  std::pair<double, double> at(double x) const;
};

/// One arch of a solution: rises from 0 to `top` in half_width, optionally
/// rests on a plateau of length `core`, then returns to 0.
struct ArchSegment {
  int sign;
  double top;
  double half_width;
  double core;
  double start;

  double end() const noexcept { return start + 2.0 * half_width + core; }
};

/// Arch decomposition of a descriptor. For flat cores, core_lengths assigns
/// plateau lengths to the arches that can carry one, in order along [0, 1];
/// empty means an even split of the budget.
std::vector<ArchSegment> arch_layout(const Problem& pr, const SolutionDescriptor& d,
                                     const std::vector<double>& core_lengths = {});

/// Samples the descriptor's solution on m points. Throws BudgetMismatch when
/// core_lengths do not match the descriptor and ShapeError when the arches do
/// not fill [0, 1].
Profile reconstruct(const Problem& pr, const SolutionDescriptor& d, int m = 2048,
                    const std::vector<double>& core_lengths = {});

/// The trivial solution on m uniform points.
Profile trivial_profile(int m);

/// Spread of |phi_x|^p + kappa A(phi) along the profile relative to r^p.
double energy_residual(const Problem& pr, const Profile& prof);

/// Fixed-step RK4 for (phi, |phi_x|^(p-2) phi_x) from phi(0) = 0,
/// phi_x(0) = sign * r0. Throws Blowup once |phi| exceeds ten times the
/// larger zero.
Profile shoot(const Problem& pr, double r0, int sign, int n_steps = 100000);

struct VerificationReport {
  double matching_residual = 0.0;  // at the stored level; 0 for flat cores
  double length_error = 0.0;       // |sum of arch and plateau lengths - 1|
  double energy_residual = 0.0;
  double oracle_sup_diff = 0.0;
  double oracle_until = 1.0;  // comparison stops at the first plateau
  bool pass = false;
  std::string detail;
};

inline constexpr double kResidualTol = 1e-11;
inline constexpr double kEnergyTol = 1e-8;
inline constexpr double kOracleTol = 1e-6;

VerificationReport verify(const Problem& pr, const SolutionDescriptor& d, int m = 2048,
                          int n_steps = 100000);

enum class Smoothness {
  c2,                    // C^2([0, 1])
  c1a_c2_off_c_minus_z,  // C^{1,1/(p-1)}, C^2 away from C \ Z
  c1a_c2_off_c,          // C^{1,1/(p-1)}, C^2 away from C
};
std::string to_string(Smoothness s);

struct CriticalPoint {
  double chi;
  double value;     // phi(chi)
  double h_value;   // lambda (|v|^(q-2) v - f(v))
  bool plateau_end;
  bool in_z;
  int zero_order;   // 0 when not a zero of h, -1 when above 4
  bool c2;          // phi is C^2 at chi
  bool boundary_case;  // p == 2(n + 1)
  std::vector<double> deltas;
  /// |phi_x| / |x - chi|^(1/(p-1)) at each delta (exponent 1 inside Z).
  std::vector<double> ratios;
  /// Centered finite-difference phi_xx at each delta (Z points only).
  std::vector<double> second_derivative;
  /// Limit of the ratio as stated by the regularity theorem,
  /// ((1/(p-1)) |h|)^(1/(p-1)); 0 inside Z.
  double predicted_limit;
  /// Limit implied by the first integral |phi_x|^p = kappa (A(top) - A(phi)),
  /// |h|^(1/(p-1)). Differs from predicted_limit by (p-1)^(1/(p-1)).
  double energy_limit;
  double measured_limit;  // extrapolated from the two smallest deltas
};

struct RegularityReport {
  Smoothness smoothness;
  bool boundary_case;
  std::vector<CriticalPoint> points;
};

RegularityReport classify_regularity(const Problem& pr, const Profile& prof);

/// h(s) = lambda (|s|^(q-2) s - f(s)).
double reaction(const Problem& pr, double s);

/// Order of the zero of h at s (1..4), 0 if h(s) != 0, -1 if above 4.
int zero_order(const Problem& pr, double s);

}  // namespace plap
