#include "plap/classes.hpp"

#include <cmath>

namespace plap {

std::string SolutionClass::label() const {
  return "S" + std::to_string(j) + (sign > 0 ? "+" : "-");
}

std::string to_string(CoreSide side) {
  switch (side) {
    case CoreSide::positive:
      return "positive";
    case CoreSide::negative:
      return "negative";
    case CoreSide::alternating:
      return "alternating";
  }
  return "?";
}

int compare_areas(const Nonlinearity& nl) {
  const double ap = nl.area_plus();
  const double am = nl.area_minus();
  if (std::abs(ap - am) <= kAreaTie * std::max(ap, am)) return 0;
  return ap < am ? -1 : +1;
}

ClassFrame class_frame(const Nonlinearity& nl, SolutionClass cls) {
  ClassFrame fr{};
  fr.uses_plus = cls.n_plus() > 0;
  fr.uses_minus = cls.n_minus() > 0;
  if (!fr.uses_minus) {
    fr.e_max = nl.area_plus();
    fr.limiting_sign = +1;
  } else if (!fr.uses_plus) {
    fr.e_max = nl.area_minus();
    fr.limiting_sign = -1;
  } else {
    const int cmp = compare_areas(nl);
    fr.e_max = std::min(nl.area_plus(), nl.area_minus());
    fr.limiting_sign = cmp < 0 ? +1 : (cmp > 0 ? -1 : 0);
  }
  return fr;
}

Level level_at_tau(const Nonlinearity& nl, const ClassFrame& frame, double tau) {
  const double below = frame.e_max / (1.0 + std::exp(-tau));  // E
  const double above = frame.e_max / (1.0 + std::exp(tau));   // e_max - E
  Level lv{};
  lv.energy = below;
  auto gap_for = [&](int sign) {
    if (frame.limiting_sign == sign || frame.limiting_sign == 0) return above;
    return (nl.area_at(sign) - frame.e_max) + above;
  };
  lv.gap_plus = gap_for(+1);
  lv.gap_minus = gap_for(-1);
  return lv;
}

Level frame_top_level(const Nonlinearity& nl, const ClassFrame& frame) {
  Level lv{};
  lv.energy = frame.e_max;
  const bool plus_at_zero = frame.limiting_sign >= 0;
  const bool minus_at_zero = frame.limiting_sign <= 0;
  lv.gap_plus = plus_at_zero ? 0.0 : nl.area_plus() - frame.e_max;
  lv.gap_minus = minus_at_zero ? 0.0 : nl.area_minus() - frame.e_max;
  return lv;
}

double arch_length(const Nonlinearity& nl, double p, int sign, const Level& lv,
                   const numerics::QuadratureOptions& opts) {
  const double top = arch_top(nl, sign, lv);
  return arch_integral(nl, p, top, opts);
}

CoreSide core_side(const Nonlinearity& nl, SolutionClass cls) {
  const ClassFrame fr = class_frame(nl, cls);
  if (fr.limiting_sign > 0) return CoreSide::positive;
  if (fr.limiting_sign < 0) return CoreSide::negative;
  return CoreSide::alternating;
}

int core_count(const Nonlinearity& nl, SolutionClass cls) {
  switch (core_side(nl, cls)) {
    case CoreSide::positive:
      return cls.n_plus();
    case CoreSide::negative:
      return cls.n_minus();
    case CoreSide::alternating:
      return cls.j;
  }
  return 0;
}

int continuum_dimension(const Nonlinearity& nl, SolutionClass cls) {
  return core_count(nl, cls) - 1;
}

double ArchScan::total(SolutionClass cls, std::size_t i) const {
  double t = 0.0;
  if (cls.n_plus() > 0) t += 2.0 * cls.n_plus() * I[i];
  if (cls.n_minus() > 0) t += 2.0 * cls.n_minus() * J[i];
  return t;
}

ArchScan scan_arches(const Nonlinearity& nl, double p, const ClassFrame& frame, int points,
                     const numerics::QuadratureOptions& opts) {
  ArchScan sc;
  sc.frame = frame;
  sc.tau.resize(static_cast<std::size_t>(points));
  if (frame.uses_plus) sc.I.resize(sc.tau.size());
  if (frame.uses_minus) sc.J.resize(sc.tau.size());
  for (int i = 0; i < points; ++i) {
    const double tau = -kTauSpan + 2.0 * kTauSpan * i / (points - 1);
    const auto k = static_cast<std::size_t>(i);
    sc.tau[k] = tau;
    const Level lv = level_at_tau(nl, frame, tau);
    if (frame.uses_plus) sc.I[k] = arch_length(nl, p, +1, lv, opts);
    if (frame.uses_minus) sc.J[k] = arch_length(nl, p, -1, lv, opts);
  }
  return sc;
}

double arch_total(const Nonlinearity& nl, double p, SolutionClass cls, const Level& lv,
                  const numerics::QuadratureOptions& opts) {
  double t = 0.0;
  if (cls.n_plus() > 0) t += 2.0 * cls.n_plus() * arch_length(nl, p, +1, lv, opts);
  if (cls.n_minus() > 0) t += 2.0 * cls.n_minus() * arch_length(nl, p, -1, lv, opts);
  return t;
}

}  // namespace plap
