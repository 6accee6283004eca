#include "plap/solver.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <regex>

#include "plap/bifurcation.hpp"
#include "plap/errors.hpp"

namespace plap {
namespace {

// Beyond the scan window the level is within ~1e-31 of the zero's area,
// the last level at which a top below the zero is still representable.
constexpr double kTauExtended = 70.0;
// Flat-core budgets below this are treated as the boundary case where the
// arches fill [0, 1] exactly.
constexpr double kBudgetFloor = 1e-12;

struct Root {
  double tau;
  bool degenerate;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

class ClassSolver {
 public:
  ClassSolver(const Problem& pr, SolutionClass cls, const ArchScan& scan, const SolverOptions& opts)
      : pr_(pr), cls_(cls), scan_(scan), opts_(opts), c_(pr.time_scale()) {}

  std::vector<SolutionDescriptor> run() {
    const auto& tau = scan_.tau;
    const std::size_t n = tau.size();
    std::vector<double> res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = c_ * scan_.total(cls_, i) - 1.0;

    std::vector<Root> roots;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if ((res[i] < 0.0) != (res[i + 1] < 0.0)) {
        roots.push_back({bracket(tau[i], tau[i + 1], res[i], res[i + 1]), false});
      }
    }
    // Extrema that approach zero without a sign change between grid points.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const bool dip = res[i] > 0.0 && res[i] < res[i - 1] && res[i] <= res[i + 1];
      const bool bump = res[i] < 0.0 && res[i] > res[i - 1] && res[i] >= res[i + 1];
      if (!dip && !bump) continue;
      const double s = dip ? 1.0 : -1.0;
      const auto m = numerics::golden_minimize(
          [&](double t) { return s * residual(t); }, tau[i - 1], tau[i + 1]);
      const double ext = s * m.value;
      if (std::abs(ext) <= opts_.tangent_tol) {
        roots.push_back({m.x, true});
      } else if (s * ext < 0.0) {
        roots.push_back({bracket(tau[i - 1], m.x, res[i - 1], ext), false});
        roots.push_back({bracket(m.x, tau[i + 1], ext, res[i + 1]), false});
      }
    }
    if (pr_.p <= 2.0 && res[n - 1] < 0.0) extend_beyond_scan(roots, tau[n - 1], res[n - 1]);
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.tau < b.tau; });
    roots = merge_tangent_pairs(roots, tau[1] - tau[0]);

    if (regime(pr_.nl.q(), pr_.p) != Regime::q_above_p && roots.size() > 1) {
      throw Error("matching residual of " + cls_.label() +
                  " is not monotone on the scan although q <= p");
    }

    std::vector<SolutionDescriptor> out;
    for (const Root& rt : roots) out.push_back(regular(rt));
    if (pr_.p > 2.0) {
      const Level top = frame_top_level(pr_.nl, scan_.frame);
      const double budget =
          1.0 - c_ * arch_total(pr_.nl, pr_.p, cls_, top, pr_.quad);
      if (budget > kBudgetFloor) out.push_back(flat(top, budget));
    }
    return out;
  }

 private:
  double residual(double tau) const {
    const Level lv = level_at_tau(pr_.nl, scan_.frame, tau);
    return c_ * arch_total(pr_.nl, pr_.p, cls_, lv, pr_.quad) - 1.0;
  }

  double bracket(double a, double b, double fa, double fb) const {
    return numerics::brent_root([&](double t) { return residual(t); }, a, b, fa, fb,
                                4 * numerics::kEps, 1e-15);
  }

  void extend_beyond_scan(std::vector<Root>& roots, double tau_last, double res_last) const {
    double far;
    try {
      far = residual(kTauExtended);
    } catch (const Divergent&) {
      far = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(far > 0.0)) {
      throw OutOfRange("a solution of " + cls_.label() +
                       " lies too close to the constant zero level to resolve in double precision");
    }
    roots.push_back({bracket(tau_last, kTauExtended, res_last, far), false});
  }

  std::vector<Root> merge_tangent_pairs(const std::vector<Root>& roots, double spacing) const {
    std::vector<Root> out;
    const double rb = std::pow(pr_.kappa() * scan_.frame.e_max, 1.0 / pr_.p);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (i + 1 < roots.size() && !roots[i].degenerate && !roots[i + 1].degenerate) {
        const double a = roots[i].tau;
        const double b = roots[i + 1].tau;
        bool merge = std::abs(slope_at(b) - slope_at(a)) <= 1e-9 * rb;
        double at = 0.5 * (a + b);
        if (!merge && b - a <= 2.0 * spacing) {
          const double s = residual(at) > 0.0 ? -1.0 : 1.0;
          const auto m = numerics::golden_minimize([&](double t) { return -s * residual(t); }, a, b);
          merge = std::abs(m.value) <= opts_.tangent_tol;
          at = m.x;
        }
        if (merge) {
          out.push_back({at, true});
          ++i;
          continue;
        }
      }
      out.push_back(roots[i]);
    }
    return out;
  }

  double slope_at(double tau) const {
    return std::pow(pr_.kappa() * level_at_tau(pr_.nl, scan_.frame, tau).energy, 1.0 / pr_.p);
  }

  SolutionDescriptor regular(const Root& rt) const {
    SolutionDescriptor d;
    d.cls = cls_;
    d.kind = DescriptorKind::regular;
    d.tau = rt.tau;
    d.level = level_at_tau(pr_.nl, scan_.frame, rt.tau);
    d.r = r_of_level(pr_, d.level);
    d.residual = matching_residual(pr_, cls_, d.level);
    d.degenerate = rt.degenerate;
    return d;
  }

  SolutionDescriptor flat(const Level& top, double budget) const {
    SolutionDescriptor d;
    d.cls = cls_;
    d.kind = DescriptorKind::flat_core;
    d.tau = std::numeric_limits<double>::infinity();
    d.level = top;
    d.r = r_of_level(pr_, top);
    d.residual = -budget;
    d.core_budget = budget;
    d.core_side = core_side(pr_.nl, cls_);
    d.core_count = core_count(pr_.nl, cls_);
    d.continuum_dim = continuum_dimension(pr_.nl, cls_);
    return d;
  }

  const Problem& pr_;
  SolutionClass cls_;
  const ArchScan& scan_;
  SolverOptions opts_;
  double c_;
};

}  // namespace

std::string to_string(DescriptorKind k) {
  return k == DescriptorKind::regular ? "regular" : "flat_core";
}

std::string SolutionDescriptor::id() const {
  char rbuf[32];
  std::snprintf(rbuf, sizeof rbuf, "%.11e", r);
  const std::string canon = cls.label() + "|" + to_string(kind) + "|" + rbuf;
  char hbuf[24];
  std::snprintf(hbuf, sizeof hbuf, "%016" PRIx64, fnv1a(canon));
  return cls.label() + "-" + to_string(kind) + "-" + hbuf;
}

std::optional<SolutionClass> class_from_id(const std::string& id) {
  static const std::regex re(R"(^S([0-9]+)([+-])-)");
  std::smatch m;
  if (!std::regex_search(id, m, re)) return std::nullopt;
  const int j = std::stoi(m[1].str());
  if (j < 1) return std::nullopt;
  return SolutionClass{j, m[2].str() == "+" ? +1 : -1};
}

double class_slope_bound(const Problem& pr, SolutionClass cls) {
  return std::pow(pr.kappa() * class_frame(pr.nl, cls).e_max, 1.0 / pr.p);
}

double matching_residual(const Problem& pr, SolutionClass cls, double r) {
  if (!(r > 0.0) || !(r < class_slope_bound(pr, cls))) {
    throw OutOfRange("matching_residual: r outside the admissible interval of " + cls.label());
  }
  return matching_residual(pr, cls, level_of_r(pr, r));
}

double matching_residual(const Problem& pr, SolutionClass cls, const Level& lv) {
  return pr.time_scale() * arch_total(pr.nl, pr.p, cls, lv, pr.quad) - 1.0;
}

std::vector<SolutionDescriptor> solve_class(const Problem& pr, SolutionClass cls,
                                            const SolverOptions& opts) {
  if (cls.j < 1) throw std::invalid_argument("solve_class: j must be at least 1");
  const ArchScan scan = scan_arches(pr.nl, pr.p, class_frame(pr.nl, cls), opts.scan_points, pr.quad);
  return ClassSolver(pr, cls, scan, opts).run();
}

Enumeration enumerate(const Problem& pr, int j_max, const SolverOptions& opts) {
  if (j_max < 1) throw std::invalid_argument("enumerate: j_max must be at least 1");
  Enumeration en;
  // Classes with both arch signs share one frame, so one scan serves them all.
  std::optional<ArchScan> mixed;
  for (int j = 1; j <= j_max; ++j) {
    for (int sign : {+1, -1}) {
      const SolutionClass cls{j, sign};
      const ClassFrame fr = class_frame(pr.nl, cls);
      std::vector<SolutionDescriptor> found;
      if (fr.uses_plus && fr.uses_minus) {
        if (!mixed) mixed = scan_arches(pr.nl, pr.p, fr, opts.scan_points, pr.quad);
        found = ClassSolver(pr, cls, *mixed, opts).run();
      } else {
        found = solve_class(pr, cls, opts);
      }
      std::sort(found.begin(), found.end(),
                [](const SolutionDescriptor& a, const SolutionDescriptor& b) { return a.r < b.r; });
      en.solutions.insert(en.solutions.end(), found.begin(), found.end());
    }
  }
  return en;
}

}  // namespace plap
