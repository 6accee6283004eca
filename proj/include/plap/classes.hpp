#pragma once

#include <string>
#include <vector>

#include "plap/nonlinearity.hpp"
#include "plap/numerics.hpp"
#include "plap/timemap.hpp"

namespace plap {

/// S_j^sign: sign of phi_x(0) and j - 1 interior simple zeros, i.e. j arches
/// alternating in sign starting with `sign`.
struct SolutionClass {
  int j = 1;
  int sign = +1;

  int n_plus() const noexcept { return sign > 0 ? (j + 1) / 2 : j / 2; }
  int n_minus() const noexcept { return sign > 0 ? j / 2 : (j + 1) / 2; }
  /// Sign of the i-th arch, i = 0 .. j-1.
  int arch_sign(int i) const noexcept { return (i % 2 == 0) ? sign : -sign; }
  std::string label() const;

  friend bool operator==(const SolutionClass&, const SolutionClass&) = default;
};

enum class CoreSide { positive, negative, alternating };
std::string to_string(CoreSide side);

/// -1, 0, +1 for A+ < A-, A+ == A-, A+ > A-.
int compare_areas(const Nonlinearity& nl);

/// Range of energy levels available to a class: (0, e_max] where e_max is the
/// smallest area among the arch signs present. limiting_sign is the sign
/// whose top reaches its zero at e_max (0 when both do).
struct ClassFrame {
  double e_max;
  int limiting_sign;
  bool uses_plus;
  bool uses_minus;
};

ClassFrame class_frame(const Nonlinearity& nl, SolutionClass cls);

/// Level with E = e_max s(tau) and e_max - E = e_max s(-tau), s the logistic
/// function. Both ends of the level range are resolved geometrically.
Level level_at_tau(const Nonlinearity& nl, const ClassFrame& frame, double tau);

/// The level at e_max itself: the limiting sign's top equals its zero.
Level frame_top_level(const Nonlinearity& nl, const ClassFrame& frame);

/// Unscaled arch lengths at a level: I(z) for sign > 0, |J(S)| for sign < 0.
double arch_length(const Nonlinearity& nl, double p, int sign, const Level& lv,
                   const numerics::QuadratureOptions& opts);

/// Sign(s) whose arches may carry a plateau at the end of the level range.
CoreSide core_side(const Nonlinearity& nl, SolutionClass cls);
/// Number of arches that can hold a plateau.
int core_count(const Nonlinearity& nl, SolutionClass cls);
/// Dimension of the flat-core continuum (core_count - 1).
int continuum_dimension(const Nonlinearity& nl, SolutionClass cls);

/// Arch lengths I and J sampled on a uniform tau grid over a class frame.
struct ArchScan {
  ClassFrame frame;
  std::vector<double> tau;
  std::vector<double> I;  // empty when the frame has no positive arches
  std::vector<double> J;  // empty when the frame has no negative arches

  /// 2 n+ I + 2 n- J at grid point i.
  double total(SolutionClass cls, std::size_t i) const;
};

inline constexpr double kTauSpan = 45.0;

ArchScan scan_arches(const Nonlinearity& nl, double p, const ClassFrame& frame, int points,
                     const numerics::QuadratureOptions& opts);

/// 2 n+ I(z) + 2 n- J(S) at a level.
double arch_total(const Nonlinearity& nl, double p, SolutionClass cls, const Level& lv,
                  const numerics::QuadratureOptions& opts);

}  // namespace plap
