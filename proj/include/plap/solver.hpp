#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plap/classes.hpp"
#include "plap/timemap.hpp"

namespace plap {

enum class DescriptorKind { regular, flat_core };
std::string to_string(DescriptorKind k);

struct SolutionDescriptor {
  SolutionClass cls;
  DescriptorKind kind = DescriptorKind::regular;
  /// |phi_x(0)|. For flat cores this is the slope bound of the class.
  double r = 0.0;
  /// Level reached by every arch, kept exactly (see Level).
  Level level{};
  /// Level parameter in the class frame (+inf for flat cores).
  double tau = 0.0;
  /// Matching residual 2 n+ theta + 2 n- alpha - 1 at the level.
  double residual = 0.0;
  /// Tangent root: the residual touches zero without crossing.
  bool degenerate = false;

  // Flat-core data.
  double core_budget = 0.0;
  int core_count = 0;
  CoreSide core_side = CoreSide::positive;
  int continuum_dim = -1;

  /// Content-addressed identifier: class, kind and r rounded to 12 digits.
  std::string id() const;
};

/// Parses the class prefix of a descriptor id ("S3+-...").
std::optional<SolutionClass> class_from_id(const std::string& id);

/// Upper end of the admissible slope range of a class.
double class_slope_bound(const Problem& pr, SolutionClass cls);

/// (2 n+ theta(r) + 2 n- alpha(r)) - 1. Throws OutOfRange outside (0, bound).
double matching_residual(const Problem& pr, SolutionClass cls, double r);
/// Same at an exactly known level.
double matching_residual(const Problem& pr, SolutionClass cls, const Level& lv);

struct SolverOptions {
  int scan_points = 1024;
  /// |residual| at a local extremum below which it is reported as a tangent root.
  double tangent_tol = 1e-10;
};

std::vector<SolutionDescriptor> solve_class(const Problem& pr, SolutionClass cls,
                                            const SolverOptions& opts = {});

struct Enumeration {
  bool trivial = true;  // phi = 0 always solves the problem
  std::vector<SolutionDescriptor> solutions;
};

/// All classes with j <= j_max, ordered by (j, sign, r).
Enumeration enumerate(const Problem& pr, int j_max, const SolverOptions& opts = {});

}  // namespace plap
