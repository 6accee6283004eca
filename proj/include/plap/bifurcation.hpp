#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plap/classes.hpp"
#include "plap/nonlinearity.hpp"
#include "plap/numerics.hpp"
#include "plap/timemap.hpp"

namespace plap {

/// lambda_1 = (p - 1) [2 int_0^1 (1 - t^p)^(-1/p) dt]^p.
double eigenvalue_base(double p, const numerics::QuadratureOptions& opts = {});

struct Minimizers {
  double a_star;     // argmin I on (0, z+)
  double b_star;     // argmin J on (z-, 0)
  double I_star;     // I(a_star)
  double J_star;     // J(b_star)
  double r_e;        // argmin over [0, r*] of I(z(r)) + J(S(r)), at lambda = 1
  double I_e;        // that minimum
  double r_o_plus;   // argmin of (2 theta + 2 alpha) / (1 + 2 alpha), lambda = 1
  double I_o_plus;
  double J_o_plus;
  double r_o_minus;  // argmin of (2 theta + 2 alpha) / (1 + 2 theta), lambda = 1
  double I_o_minus;
  double J_o_minus;
};

/// Requires q > p; throws NotApplicable otherwise.
Minimizers find_minimizers(const Nonlinearity& nl, double p,
                           const numerics::QuadratureOptions& opts = {});

/// Threshold beyond which the class admits a plateau:
/// (p - 1)/p [2 n+ I(z_hat) + 2 n- J(s_hat)]^p at the top of the class's level
/// range. +infinity for p <= 2.
double lambda_tilde(const Nonlinearity& nl, double p, SolutionClass cls,
                    const numerics::QuadratureOptions& opts = {});

struct StarThreshold {
  double lambda;
  double tau;     // level parameter of the tangency
  Level level;
  double r_at_unit_lambda;
};

/// Smallest lambda for which 2 n+ theta + 2 n- alpha = 1 has a root (q > p).
StarThreshold lambda_star(const Nonlinearity& nl, double p, SolutionClass cls,
                          const numerics::QuadratureOptions& opts = {});

struct BifurcationTable {
  int n = 0;
  std::vector<double> lambda_tilde_plus;
  std::vector<double> lambda_tilde_minus;
  std::vector<double> lambda_star_plus;   // empty unless q > p
  std::vector<double> lambda_star_minus;  // empty unless q > p
  std::vector<double> lambda_classical;   // n^p lambda_1, only for q == p
  EndpointLevels levels{};
  std::optional<Minimizers> minimizers;
};

BifurcationTable bifurcation_table(const Nonlinearity& nl, double p, int n,
                                   const numerics::QuadratureOptions& opts = {});

enum class Regime { q_below_p, q_equals_p, q_above_p };
std::string to_string(Regime r);
Regime regime(double q, double p);

enum class Cardinality { empty, single, pair, continuum };
std::string to_string(Cardinality c);

struct ClassStructure {
  SolutionClass cls;
  Cardinality tag;
  int regular_count;
  int continuum_dim;  // -1 when no plateau solution exists
  bool flat_core;
};

struct StructureReport {
  double lambda;
  Regime regime;
  std::vector<ClassStructure> classes;  // S1+, S1-, S2+, S2-, ...
};

/// Counts, per class, how many thresholds lie below lambda. Exact for q <= p;
/// for q > p it reflects the generic picture (pair between the two
/// thresholds), not a proof of exact counts.
StructureReport structure(const Problem& pr, int n);

/// Relative tolerance for lambda to count as equal to a threshold.
inline constexpr double kThresholdTie = 1e-9;

}  // namespace plap
