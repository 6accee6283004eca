#include "plap/bifurcation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "plap/errors.hpp"

namespace plap {
namespace {

constexpr int kStarScanPoints = 512;

double lambda_from_total(double p, double total) {
  return (p - 1.0) / p * std::pow(total, p);
}

struct ScanMinimum {
  double tau;
  double value;
};

// Minimum over tau of an objective sampled on a scan, refined around the
// best grid point.
template <class Sampled, class Fresh>
ScanMinimum minimize_on_scan(const std::vector<double>& tau, Sampled&& sampled, Fresh&& fresh) {
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const double v = sampled(i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = tau[best == 0 ? 0 : best - 1];
  const double hi = tau[std::min(best + 1, tau.size() - 1)];
  const auto m = numerics::golden_minimize(fresh, lo, hi, 40);
  if (m.value < best_val) return {m.x, m.value};
  return {tau[best], best_val};
}

ClassFrame plus_frame(const Nonlinearity& nl) { return class_frame(nl, {1, +1}); }
ClassFrame minus_frame(const Nonlinearity& nl) { return class_frame(nl, {1, -1}); }
ClassFrame mixed_frame(const Nonlinearity& nl) { return class_frame(nl, {2, +1}); }

const ArchScan& scan_for(const ClassFrame& fr, const ArchScan& plus, const ArchScan& minus,
                         const ArchScan& mixed) {
  if (fr.uses_plus && fr.uses_minus) return mixed;
  return fr.uses_plus ? plus : minus;
}

StarThreshold star_from_scan(const Nonlinearity& nl, double p, SolutionClass cls,
                             const ArchScan& scan, const numerics::QuadratureOptions& opts) {
  const ClassFrame& fr = scan.frame;
  auto fresh = [&](double tau) {
    return arch_total(nl, p, cls, level_at_tau(nl, fr, tau), opts);
  };
  const ScanMinimum m =
      minimize_on_scan(scan.tau, [&](std::size_t i) { return scan.total(cls, i); }, fresh);
  StarThreshold st{};
  st.lambda = lambda_from_total(p, m.value);
  st.tau = m.tau;
  st.level = level_at_tau(nl, fr, m.tau);
  st.r_at_unit_lambda = std::pow(p / (p - 1.0) * st.level.energy, 1.0 / p);
  return st;
}

void require_superlinear(const Nonlinearity& nl, double p) {
  if (regime(nl.q(), p) != Regime::q_above_p) {
    throw NotApplicable("minimizers and star thresholds are defined for q > p only");
  }
}

}  // namespace

double eigenvalue_base(double p, const numerics::QuadratureOptions& opts) {
  if (!(p > 1.0)) throw std::invalid_argument("eigenvalue_base: p must exceed 1");
  // With h = 1 - t: 1 - t^p = -expm1(p log1p(-h)), a simple zero at h = 0.
  auto gap = [p](double h) { return -std::expm1(p * std::log1p(-h)); };
  const double integral = numerics::singular_power_integral(gap, 1.0, p, 1, opts);
  return (p - 1.0) * std::pow(2.0 * integral, p);
}

Minimizers find_minimizers(const Nonlinearity& nl, double p,
                           const numerics::QuadratureOptions& opts) {
  require_superlinear(nl, p);
  Minimizers mz{};
  const ArchScan plus = scan_arches(nl, p, plus_frame(nl), kStarScanPoints, opts);
  const ArchScan minus = scan_arches(nl, p, minus_frame(nl), kStarScanPoints, opts);
  const ArchScan mixed = scan_arches(nl, p, mixed_frame(nl), kStarScanPoints, opts);

  {
    auto fresh = [&](double tau) {
      return arch_length(nl, p, +1, level_at_tau(nl, plus.frame, tau), opts);
    };
    const auto m = minimize_on_scan(plus.tau, [&](std::size_t i) { return plus.I[i]; }, fresh);
    mz.a_star = arch_top(nl, +1, level_at_tau(nl, plus.frame, m.tau));
    mz.I_star = m.value;
  }
  {
    auto fresh = [&](double tau) {
      return arch_length(nl, p, -1, level_at_tau(nl, minus.frame, tau), opts);
    };
    const auto m = minimize_on_scan(minus.tau, [&](std::size_t i) { return minus.J[i]; }, fresh);
    mz.b_star = arch_top(nl, -1, level_at_tau(nl, minus.frame, m.tau));
    mz.J_star = m.value;
  }

  const double kappa1 = p / (p - 1.0);  // lambda = 1
  const double c1 = std::pow(1.0 / kappa1, 1.0 / p);
  auto r_unit = [&](double tau) {
    return std::pow(kappa1 * level_at_tau(nl, mixed.frame, tau).energy, 1.0 / p);
  };
  auto pair_at = [&](double tau) {
    const Level lv = level_at_tau(nl, mixed.frame, tau);
    return std::pair{arch_length(nl, p, +1, lv, opts), arch_length(nl, p, -1, lv, opts)};
  };
  {
    auto fresh = [&](double tau) {
      const auto [i, j] = pair_at(tau);
      return i + j;
    };
    const auto m = minimize_on_scan(
        mixed.tau, [&](std::size_t i) { return mixed.I[i] + mixed.J[i]; }, fresh);
    mz.r_e = r_unit(m.tau);
    mz.I_e = m.value;
  }
  auto odd_objective = [&](double i_val, double j_val, bool plus_first) {
    const double th = c1 * i_val;
    const double al = c1 * j_val;
    return (2 * th + 2 * al) / (1 + 2 * (plus_first ? al : th));
  };
  for (bool plus_first : {true, false}) {
    auto fresh = [&](double tau) {
      const auto [i, j] = pair_at(tau);
      return odd_objective(i, j, plus_first);
    };
    const auto m = minimize_on_scan(
        mixed.tau,
        [&](std::size_t k) { return odd_objective(mixed.I[k], mixed.J[k], plus_first); }, fresh);
    const auto [iv, jv] = pair_at(m.tau);
    if (plus_first) {
      mz.r_o_plus = r_unit(m.tau);
      mz.I_o_plus = iv;
      mz.J_o_plus = jv;
    } else {
      mz.r_o_minus = r_unit(m.tau);
      mz.I_o_minus = iv;
      mz.J_o_minus = jv;
    }
  }
  return mz;
}

double lambda_tilde(const Nonlinearity& nl, double p, SolutionClass cls,
                    const numerics::QuadratureOptions& opts) {
  if (!(p > 2.0)) return std::numeric_limits<double>::infinity();
  const ClassFrame fr = class_frame(nl, cls);
  return lambda_from_total(p, arch_total(nl, p, cls, frame_top_level(nl, fr), opts));
}

StarThreshold lambda_star(const Nonlinearity& nl, double p, SolutionClass cls,
                          const numerics::QuadratureOptions& opts) {
  require_superlinear(nl, p);
  const ClassFrame fr = class_frame(nl, cls);
  const ArchScan scan = scan_arches(nl, p, fr, kStarScanPoints, opts);
  return star_from_scan(nl, p, cls, scan, opts);
}

BifurcationTable bifurcation_table(const Nonlinearity& nl, double p, int n,
                                   const numerics::QuadratureOptions& opts) {
  if (n < 1) throw std::invalid_argument("bifurcation_table: N must be at least 1");
  BifurcationTable tb;
  tb.n = n;
  tb.levels = endpoint_levels(nl, p);
  const Regime rg = regime(nl.q(), p);

  // Arch lengths at the top of each frame; every tilde entry is a combination.
  double i_plus_frame = 0, j_minus_frame = 0, i_mixed = 0, j_mixed = 0;
  if (p > 2.0) {
    i_plus_frame = arch_integral(nl, p, nl.z_plus(), opts);
    j_minus_frame = arch_integral(nl, p, nl.z_minus(), opts);
    i_mixed = arch_integral(nl, p, tb.levels.z_hat, opts);
    j_mixed = arch_integral(nl, p, tb.levels.s_hat, opts);
  }
  std::optional<ArchScan> plus, minus, mixed;
  if (rg == Regime::q_above_p) {
    plus = scan_arches(nl, p, plus_frame(nl), kStarScanPoints, opts);
    minus = scan_arches(nl, p, minus_frame(nl), kStarScanPoints, opts);
    mixed = scan_arches(nl, p, mixed_frame(nl), kStarScanPoints, opts);
    tb.minimizers = find_minimizers(nl, p, opts);
  }
  const double lambda1 = rg == Regime::q_equals_p ? eigenvalue_base(p, opts) : 0.0;
  for (int k = 1; k <= n; ++k) {
    for (int sign : {+1, -1}) {
      const SolutionClass cls{k, sign};
      double tilde = std::numeric_limits<double>::infinity();
      if (p > 2.0) {
        double total;
        if (k == 1) {
          total = 2.0 * (sign > 0 ? i_plus_frame : j_minus_frame);
        } else {
          total = 2.0 * cls.n_plus() * i_mixed + 2.0 * cls.n_minus() * j_mixed;
        }
        tilde = lambda_from_total(p, total);
      }
      (sign > 0 ? tb.lambda_tilde_plus : tb.lambda_tilde_minus).push_back(tilde);
      if (rg == Regime::q_above_p) {
        const ClassFrame fr = class_frame(nl, cls);
        const auto st = star_from_scan(nl, p, cls, scan_for(fr, *plus, *minus, *mixed), opts);
        (sign > 0 ? tb.lambda_star_plus : tb.lambda_star_minus).push_back(st.lambda);
      }
    }
    if (rg == Regime::q_equals_p) tb.lambda_classical.push_back(std::pow(k, p) * lambda1);
  }
  return tb;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::q_below_p:
      return "q<p";
    case Regime::q_equals_p:
      return "q=p";
    case Regime::q_above_p:
      return "q>p";
  }
  return "?";
}

Regime regime(double q, double p) {
  if (std::abs(q - p) <= 1e-12 * p) return Regime::q_equals_p;
  return q < p ? Regime::q_below_p : Regime::q_above_p;
}

std::string to_string(Cardinality c) {
  switch (c) {
    case Cardinality::empty:
      return "empty";
    case Cardinality::single:
      return "single";
    case Cardinality::pair:
      return "pair";
    case Cardinality::continuum:
      return "continuum";
  }
  return "?";
}

StructureReport structure(const Problem& pr, int n) {
  const BifurcationTable tb = bifurcation_table(pr.nl, pr.p, n, pr.quad);
  StructureReport rep;
  rep.lambda = pr.lambda;
  rep.regime = regime(pr.nl.q(), pr.p);
  const double lam = pr.lambda;
  auto near = [&](double threshold) {
    return std::abs(lam - threshold) <= kThresholdTie * threshold;
  };
  for (int k = 1; k <= n; ++k) {
    for (int sign : {+1, -1}) {
      const SolutionClass cls{k, sign};
      const auto idx = static_cast<std::size_t>(k - 1);
      const double tilde = (sign > 0 ? tb.lambda_tilde_plus : tb.lambda_tilde_minus)[idx];
      // Inclusive upper threshold: at lambda == tilde the arches fill [0, 1] exactly.
      const bool flat = std::isfinite(tilde) && lam > tilde && !near(tilde);
      int regular = 0;
      switch (rep.regime) {
        case Regime::q_below_p:
          regular = flat ? 0 : 1;
          break;
        case Regime::q_equals_p: {
          const double low = tb.lambda_classical[idx];
          regular = (!flat && lam > low && !near(low)) ? 1 : 0;
          break;
        }
        case Regime::q_above_p: {
          const double star = (sign > 0 ? tb.lambda_star_plus : tb.lambda_star_minus)[idx];
          if (near(star)) {
            regular = 1;
          } else if (lam > star) {
            regular = flat ? 1 : 2;
          }
          break;
        }
      }
      ClassStructure cs{};
      cs.cls = cls;
      cs.regular_count = regular;
      cs.flat_core = flat;
      cs.continuum_dim = flat ? continuum_dimension(pr.nl, cls) : -1;
      const int members = regular + (flat ? 1 : 0);
      if (flat && cs.continuum_dim > 0) {
        cs.tag = Cardinality::continuum;
      } else if (members == 0) {
        cs.tag = Cardinality::empty;
      } else if (members == 1) {
        cs.tag = Cardinality::single;
      } else {
        cs.tag = Cardinality::pair;
      }
      rep.classes.push_back(cs);
    }
  }
  return rep;
}

}  // namespace plap
