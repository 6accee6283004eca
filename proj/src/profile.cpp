#include "plap/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "plap/classes.hpp"
#include "plap/errors.hpp"
#include "plap/numerics.hpp"

namespace plap {
namespace {

constexpr double kBudgetTol = 1e-10;
constexpr double kShapeTol = 1e-9;
constexpr double kZeroTol = 1e-10;

// Everything needed to evaluate a reconstructed solution at a point.
struct Layout {
  Nonlinearity nl;
  double p;
  double kappa;
  double c;  // time scale
  numerics::QuadratureOptions quad;
  std::vector<ArchSegment> arches;

  // Depth below the top at which the arch is `dist` away (in x) from its top.
  double depth(const ArchSegment& a, double dist) const {
    const double full = std::abs(a.top);
    if (!(dist > 0.0)) return 0.0;
    if (dist >= a.half_width) return full;
    auto fn = [&](double h) { return c * partial_arch_integral(nl, p, a.top, h, quad) - dist; };
    return numerics::brent_root(fn, 0.0, full, -dist, a.half_width - dist);
  }

  double slope(const ArchSegment& a, double h) const {
    return std::pow(kappa * nl.area_gap(a.top, h), 1.0 / p);
  }

  std::pair<double, double> eval(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    auto it = std::upper_bound(arches.begin(), arches.end(), x,
                               [](double v, const ArchSegment& a) { return v < a.start; });
    const ArchSegment& a = it == arches.begin() ? arches.front() : *std::prev(it);
    const double u = std::min(x - a.start, 2.0 * a.half_width + a.core);
    const int s = a.top > 0.0 ? +1 : -1;
    if (u > a.half_width && u < a.half_width + a.core) return {a.top, 0.0};
    const bool rising = u <= a.half_width;
    const double dist = rising ? a.half_width - u : u - a.half_width - a.core;
    const double h = depth(a, dist);
    const double phi = h >= std::abs(a.top) ? 0.0 : a.top - s * h;
    const double d = slope(a, h);
    return {phi, rising ? s * d : -s * d};
  }
};

std::vector<double> nodes_from_samples(const std::vector<double>& x, const std::vector<double>& phi,
                                       double margin) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double xc;
    if (phi[i] == 0.0) {
      xc = x[i];
    } else if (phi[i] * phi[i + 1] < 0.0) {
      xc = x[i] - phi[i] * (x[i + 1] - x[i]) / (phi[i + 1] - phi[i]);
    } else {
      continue;
    }
    if (xc > margin && xc < 1.0 - margin) out.push_back(xc);
  }
  return out;
}

struct Trajectory {
  std::vector<double> x, phi, dphi;
  bool blew_up = false;
  double blowup_x = 0.0;
};

Trajectory integrate(const Problem& pr, double r0, int sign, int n_steps, double x_stop) {
  if (!(r0 > 0.0)) throw std::invalid_argument("shoot: r0 must be positive");
  if (n_steps < 1) throw std::invalid_argument("shoot: n_steps must be positive");
  const double p = pr.p;
  const double bound = 10.0 * std::max(pr.nl.z_plus(), -pr.nl.z_minus());
  auto velocity = [p](double w) { return std::copysign(std::pow(std::abs(w), 1.0 / (p - 1.0)), w); };
  auto force = [&](double phi) { return -reaction(pr, phi); };

  const double dx = 1.0 / n_steps;
  Trajectory tr;
  tr.x.reserve(static_cast<std::size_t>(n_steps) + 1);
  tr.phi.reserve(tr.x.capacity());
  tr.dphi.reserve(tr.x.capacity());
  double phi = 0.0;
  double w = sign * std::pow(r0, p - 1.0);
  tr.x.push_back(0.0);
  tr.phi.push_back(phi);
  tr.dphi.push_back(velocity(w));
  for (int i = 1; i <= n_steps; ++i) {
    const double k1p = velocity(w), k1w = force(phi);
    const double k2p = velocity(w + 0.5 * dx * k1w), k2w = force(phi + 0.5 * dx * k1p);
    const double k3p = velocity(w + 0.5 * dx * k2w), k3w = force(phi + 0.5 * dx * k2p);
    const double k4p = velocity(w + dx * k3w), k4w = force(phi + dx * k3p);
    phi += dx / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    w += dx / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
    const double x = i == n_steps ? 1.0 : i * dx;
    if (!(std::abs(phi) <= bound)) {
      tr.blew_up = true;
      tr.blowup_x = x;
      break;
    }
    tr.x.push_back(x);
    tr.phi.push_back(phi);
    tr.dphi.push_back(velocity(w));
    if (x > x_stop) break;
  }
  return tr;
}

Profile to_profile(Trajectory&& tr) {
  Profile prof;
  prof.x = std::move(tr.x);
  prof.phi = std::move(tr.phi);
  prof.dphi = std::move(tr.dphi);
  const double step = prof.x.size() > 1 ? prof.x[1] - prof.x[0] : 0.0;
  prof.nodes = nodes_from_samples(prof.x, prof.phi, 10.0 * step);
  return prof;
}

void append(Profile& prof, double x, double phi, double dphi) {
  prof.x.push_back(x);
  prof.phi.push_back(phi);
  prof.dphi.push_back(dphi);
}

}  // namespace

std::pair<double, double> Profile::at(double xq) const {
  if (evaluator) return evaluator(xq);
  if (x.empty()) throw std::logic_error("Profile::at on an empty profile");
  if (xq <= x.front()) return {phi.front(), dphi.front()};
  if (xq >= x.back()) return {phi.back(), dphi.back()};
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const auto i = static_cast<std::size_t>(std::distance(x.begin(), it)) - 1;
  const double h = x[i + 1] - x[i];
  const double t = (xq - x[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double v = h00 * phi[i] + h10 * h * dphi[i] + h01 * phi[i + 1] + h11 * h * dphi[i + 1];
  const double dv = ((6 * t2 - 6 * t) * phi[i] + (3 * t2 - 4 * t + 1) * h * dphi[i] +
                     (-6 * t2 + 6 * t) * phi[i + 1] + (3 * t2 - 2 * t) * h * dphi[i + 1]) /
                    h;
  return {v, dv};
}

double reaction(const Problem& pr, double s) { return pr.lambda * pr.nl.m(s); }

int zero_order(const Problem& pr, double s) {
  if (std::abs(reaction(pr, s)) >= kZeroTol || s == 0.0) return 0;
  // Step toward 0 so the probe stays inside (z-, z+).
  const double e1 = 1e-2 * std::abs(s);
  const double e2 = 1e-3 * std::abs(s);
  const double h1 = std::abs(reaction(pr, s - std::copysign(e1, s)));
  const double h2 = std::abs(reaction(pr, s - std::copysign(e2, s)));
  const double n = std::log10(h1 / h2);
  if (!std::isfinite(n)) return -1;
  const int order = static_cast<int>(std::lround(n));
  if (order > 4) return -1;
  return std::max(order, 1);
}

std::vector<ArchSegment> arch_layout(const Problem& pr, const SolutionDescriptor& d,
                                     const std::vector<double>& core_lengths) {
  const SolutionClass cls = d.cls;
  const double c = pr.time_scale();
  std::vector<ArchSegment> arches;
  for (int i = 0; i < cls.j; ++i) {
    const int s = cls.arch_sign(i);
    ArchSegment a{};
    a.sign = s;
    a.top = arch_top(pr.nl, s, d.level);
    a.half_width = c * arch_integral(pr.nl, pr.p, a.top, pr.quad);
    arches.push_back(a);
  }

  if (d.kind == DescriptorKind::regular) {
    if (!core_lengths.empty()) throw BudgetMismatch("regular solutions have no plateau budget");
  } else {
    std::vector<std::size_t> holders;
    for (std::size_t i = 0; i < arches.size(); ++i) {
      const int s = arches[i].sign;
      const bool holds = d.core_side == CoreSide::alternating ||
                         (d.core_side == CoreSide::positive ? s > 0 : s < 0);
      if (holds) holders.push_back(i);
    }
    if (holders.size() != static_cast<std::size_t>(d.core_count)) {
      throw ShapeError("descriptor core count does not match its class");
    }
    std::vector<double> lengths = core_lengths;
    if (lengths.empty()) lengths.assign(holders.size(), d.core_budget / holders.size());
    if (lengths.size() != holders.size()) {
      throw BudgetMismatch("expected " + std::to_string(holders.size()) + " plateau lengths, got " +
                           std::to_string(lengths.size()));
    }
    for (double l : lengths) {
      if (!(l >= 0.0)) throw BudgetMismatch("plateau lengths must be non-negative");
    }
    const double sum = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    if (std::abs(sum - d.core_budget) > kBudgetTol) {
      throw BudgetMismatch("plateau lengths sum to " + std::to_string(sum) + " but the budget is " +
                           std::to_string(d.core_budget));
    }
    for (std::size_t k = 0; k < holders.size(); ++k) arches[holders[k]].core = lengths[k];
  }

  double pos = 0.0;
  for (auto& a : arches) {
    a.start = pos;
    pos = a.end();
  }
  if (std::abs(pos - 1.0) > kShapeTol) {
    throw ShapeError("arches cover a length of " + std::to_string(pos) + " instead of 1");
  }
  return arches;
}

Profile reconstruct(const Problem& pr, const SolutionDescriptor& d, int m,
                    const std::vector<double>& core_lengths) {
  auto lay = std::make_shared<Layout>(Layout{pr.nl, pr.p, pr.kappa(), pr.time_scale(), pr.quad,
                                             arch_layout(pr, d, core_lengths)});
  const auto& arches = lay->arches;

  int segments = 0;
  for (const auto& a : arches) segments += a.core > 0.0 ? 3 : 2;
  // Segments share their end points.
  const int total = m + segments - 1;
  if (total / segments < 3) throw std::invalid_argument("reconstruct: too few grid points");
  std::vector<int> counts(static_cast<std::size_t>(segments), total / segments);
  for (int k = 0; k < total % segments; ++k) ++counts[static_cast<std::size_t>(k)];

  Profile prof;
  prof.x.reserve(static_cast<std::size_t>(m));
  prof.phi.reserve(prof.x.capacity());
  prof.dphi.reserve(prof.x.capacity());
  std::size_t seg = 0;
  for (const auto& a : arches) {
    const int s = a.top > 0.0 ? +1 : -1;
    const double full = std::abs(a.top);
    const double top_x = a.start + a.half_width;

    // Rising half, depths clustered toward the top.
    const int nr = counts[seg++];
    std::vector<double> depth(static_cast<std::size_t>(nr)), offset(depth.size());
    for (int k = 0; k < nr; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      depth[kk] = k == nr - 1 ? full
                              : full * (1.0 - std::cos(0.5 * std::numbers::pi * k / (nr - 1)));
      offset[kk] = k == nr - 1 ? a.half_width
                               : lay->c * partial_arch_integral(pr.nl, pr.p, a.top, depth[kk], pr.quad);
    }
    // The bottom point is shared with the previous arch.
    for (int k = prof.x.empty() ? nr - 1 : nr - 2; k >= 0; --k) {
      const auto kk = static_cast<std::size_t>(k);
      const double phi = k == nr - 1 ? 0.0 : a.top - s * depth[kk];
      append(prof, k == nr - 1 ? a.start : top_x - offset[kk], phi, s * lay->slope(a, depth[kk]));
    }

    double fall_x = top_x;
    if (a.core > 0.0) {
      const int np = counts[seg++];
      for (int k = 1; k < np; ++k) append(prof, top_x + a.core * k / (np - 1), a.top, 0.0);
      prof.flat_intervals.emplace_back(top_x, top_x + a.core);
      fall_x = top_x + a.core;
    }

    // Falling half mirrors the rising one on its own point count.
    const int nf = counts[seg++];
    for (int k = 1; k < nf; ++k) {
      const double dd = k == nf - 1 ? full
                                    : full * (1.0 - std::cos(0.5 * std::numbers::pi * k / (nf - 1)));
      const double off = k == nf - 1 ? a.half_width
                                     : lay->c * partial_arch_integral(pr.nl, pr.p, a.top, dd, pr.quad);
      const double phi = k == nf - 1 ? 0.0 : a.top - s * dd;
      append(prof, k == nf - 1 ? a.end() : fall_x + off, phi, -s * lay->slope(a, dd));
    }
  }
  prof.x.back() = 1.0;
  for (std::size_t i = 1; i < arches.size(); ++i) prof.nodes.push_back(arches[i].start);
  prof.evaluator = [lay](double x) { return lay->eval(x); };
  return prof;
}

Profile trivial_profile(int m) {
  if (m < 2) throw std::invalid_argument("trivial_profile: need at least two points");
  Profile prof;
  for (int i = 0; i < m; ++i) {
    prof.x.push_back(static_cast<double>(i) / (m - 1));
    prof.phi.push_back(0.0);
    prof.dphi.push_back(0.0);
  }
  return prof;
}

double energy_residual(const Problem& pr, const Profile& prof) {
  if (prof.x.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < prof.x.size(); ++i) {
    const double e = std::pow(std::abs(prof.dphi[i]), pr.p) + pr.kappa() * pr.nl.area(prof.phi[i]);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const double scale = std::pow(std::abs(prof.dphi.front()), pr.p);
  if (hi - lo == 0.0) return 0.0;
  if (!(scale > 0.0)) return std::numeric_limits<double>::infinity();
  return (hi - lo) / scale;
}

Profile shoot(const Problem& pr, double r0, int sign, int n_steps) {
  Trajectory tr = integrate(pr, r0, sign, n_steps, std::numeric_limits<double>::infinity());
  if (tr.blew_up) {
    throw Blowup("shooting trajectory left the bounded region at x = " + std::to_string(tr.blowup_x),
                 tr.blowup_x);
  }
  return to_profile(std::move(tr));
}

VerificationReport verify(const Problem& pr, const SolutionDescriptor& d, int m, int n_steps) {
  VerificationReport rep;
  const auto arches = arch_layout(pr, d);
  rep.length_error = std::abs(arches.back().end() - 1.0);
  if (d.kind == DescriptorKind::regular) {
    rep.matching_residual = std::abs(matching_residual(pr, d.cls, d.level));
  }
  const Profile prof = reconstruct(pr, d, m);
  rep.energy_residual = energy_residual(pr, prof);
  rep.oracle_until = prof.flat_intervals.empty() ? 1.0 : prof.flat_intervals.front().first;

  Trajectory tr = integrate(pr, d.r, d.cls.sign, n_steps, rep.oracle_until);
  double until = rep.oracle_until;
  if (tr.blew_up) until = std::min(until, tr.blowup_x);
  const Profile oracle = to_profile(std::move(tr));
  for (std::size_t i = 0; i < prof.x.size() && prof.x[i] <= until; ++i) {
    rep.oracle_sup_diff = std::max(rep.oracle_sup_diff, std::abs(prof.phi[i] - oracle.at(prof.x[i]).first));
  }

  std::string why;
  if (!(rep.matching_residual < kResidualTol)) why += "matching residual; ";
  if (!(rep.length_error < kShapeTol)) why += "arch lengths; ";
  if (!(rep.energy_residual < kEnergyTol)) why += "energy residual; ";
  if (!(rep.oracle_sup_diff < kOracleTol)) why += "shooting oracle; ";
  if (until < rep.oracle_until) why += "shooting oracle left the bounded region; ";
  rep.pass = why.empty();
  rep.detail = rep.pass ? "ok" : "failed: " + why.substr(0, why.size() - 2);
  return rep;
}

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::c2:
      return "C2";
    case Smoothness::c1a_c2_off_c_minus_z:
      return "C1,1/(p-1) and C2 off C\\Z";
    case Smoothness::c1a_c2_off_c:
      return "C1,1/(p-1) and C2 off C";
  }
  return "?";
}

RegularityReport classify_regularity(const Problem& pr, const Profile& prof) {
  const double p = pr.p;
  const std::vector<double> deltas{1e-2, 1e-3, 1e-4};

  struct Candidate {
    double chi;
    int side;  // -1: measure to the left only, +1: right only, 0: both
    bool plateau_end;
  };
  std::vector<Candidate> cands;
  auto in_flat = [&](double x) {
    for (const auto& [l, u] : prof.flat_intervals) {
      if (x >= l - 1e-12 && x <= u + 1e-12) return true;
    }
    return false;
  };
  for (const auto& [l, u] : prof.flat_intervals) {
    cands.push_back({l, -1, true});
    cands.push_back({u, +1, true});
  }
  for (std::size_t i = 0; i < prof.x.size(); ++i) {
    if (in_flat(prof.x[i])) continue;
    if (prof.dphi[i] == 0.0 && prof.phi[i] != 0.0) {
      cands.push_back({prof.x[i], 0, false});
    } else if (i + 1 < prof.x.size() && prof.dphi[i] * prof.dphi[i + 1] < 0.0 &&
               !in_flat(prof.x[i + 1])) {
      double lo = prof.x[i], hi = prof.x[i + 1];
      const double s_lo = prof.dphi[i];
      for (int it = 0; it < 200 && hi - lo > 4 * numerics::kEps * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((prof.at(mid).second > 0.0) == (s_lo > 0.0) ? lo : hi) = mid;
      }
      cands.push_back({0.5 * (lo + hi), 0, false});
    }
  }

  RegularityReport rep;
  rep.boundary_case = false;
  bool any_z = false, all_z_c2 = true;
  for (const auto& cd : cands) {
    CriticalPoint cp{};
    cp.chi = cd.chi;
    cp.plateau_end = cd.plateau_end;
    cp.value = prof.at(cd.chi).first;
    cp.h_value = reaction(pr, cp.value);
    cp.in_z = std::abs(cp.h_value) < kZeroTol;
    cp.zero_order = cp.in_z ? zero_order(pr, cp.value) : 0;
    cp.deltas = deltas;
    const double expo = cp.in_z ? 1.0 : 1.0 / (p - 1.0);
    for (double dl : deltas) {
      double sum = 0.0, d2 = 0.0;
      int n = 0;
      for (int side : {-1, +1}) {
        if (cd.side != 0 && side != cd.side) continue;
        const double xs = cd.chi + side * dl;
        if (xs < 0.0 || xs > 1.0) continue;
        sum += std::abs(prof.at(xs).second) / std::pow(dl, expo);
        if (cp.in_z) {
          const double eps = 0.1 * dl;
          d2 = std::max(d2, std::abs(prof.at(xs + eps).second - prof.at(xs - eps).second) / (2 * eps));
        }
        ++n;
      }
      cp.ratios.push_back(n ? sum / n : std::numeric_limits<double>::quiet_NaN());
      if (cp.in_z) cp.second_derivative.push_back(d2);
    }
    const double r_mid = cp.ratios[1], r_small = cp.ratios[2];
    if (cp.in_z) {
      cp.predicted_limit = 0.0;
      cp.energy_limit = 0.0;
      cp.measured_limit = r_small;
    } else {
      cp.predicted_limit = std::pow(std::abs(cp.h_value) / (p - 1.0), 1.0 / (p - 1.0));
      cp.energy_limit = std::pow(std::abs(cp.h_value), 1.0 / (p - 1.0));
      cp.measured_limit = r_small + (r_small - r_mid) / 9.0;
    }
    if (p <= 2.0) {
      cp.c2 = true;
    } else if (cp.in_z && cp.zero_order > 0) {
      const double critical = 2.0 * (cp.zero_order + 1);
      cp.boundary_case = std::abs(p - critical) <= 1e-12 * critical;
      cp.c2 = p < critical && !cp.boundary_case;
    } else {
      cp.c2 = false;
    }
    if (cp.in_z) {
      any_z = true;
      all_z_c2 = all_z_c2 && cp.c2;
    }
    rep.boundary_case = rep.boundary_case || cp.boundary_case;
    rep.points.push_back(std::move(cp));
  }
  std::sort(rep.points.begin(), rep.points.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.chi < b.chi; });

  if (p <= 2.0) {
    rep.smoothness = Smoothness::c2;
  } else if (any_z && all_z_c2) {
    rep.smoothness = Smoothness::c1a_c2_off_c_minus_z;
  } else {
    rep.smoothness = Smoothness::c1a_c2_off_c;
  }
  return rep;
}

}  // namespace plap
