#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "plap/bifurcation.hpp"
#include "plap/errors.hpp"
#include "plap/solver.hpp"

using namespace plap;
using doctest::Approx;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

Nonlinearity cubic() { return build_nonlinearity(2, PowerAsymParams{1, 1, 4}); }
Nonlinearity power(double q, double bp, double bm, double r) {
  return build_nonlinearity(q, PowerAsymParams{bp, bm, r});
}

int count_class(const Enumeration& en, int j, int sign) {
  int n = 0;
  for (const auto& d : en.solutions) n += (d.cls.j == j && d.cls.sign == sign) ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("class bookkeeping") {
  const SolutionClass c{5, -1};
  CHECK(c.n_minus() == 3);
  CHECK(c.n_plus() == 2);
  CHECK(c.arch_sign(0) == -1);
  CHECK(c.arch_sign(3) == +1);
  CHECK(c.label() == "S5-");
  CHECK(class_from_id("S12+-regular-0123456789abcdef") == SolutionClass{12, +1});
  CHECK_FALSE(class_from_id("garbage").has_value());
  CHECK_FALSE(class_from_id("S0+-regular-00").has_value());
}

TEST_CASE("matching residual") {
  const Problem pr(2, cubic(), 4 * kPi2);
  const double r = 0.3 * slope_bounds(pr).r_star;
  CHECK(matching_residual(pr, {2, +1}, r) ==
        Approx(2 * (theta(pr, r) + alpha(pr, r)) - 1).epsilon(1e-14));
  CHECK(matching_residual(pr, {3, +1}, r) ==
        Approx(4 * theta(pr, r) + 2 * alpha(pr, r) - 1).epsilon(1e-14));
  CHECK(matching_residual(pr, {3, -1}, r) == Approx(matching_residual(pr, {3, +1}, r)).epsilon(1e-14));
  CHECK_THROWS_AS(matching_residual(pr, {1, +1}, 0.0), OutOfRange);
  CHECK_THROWS_AS(matching_residual(pr, {1, +1}, slope_bounds(pr).r_pos), OutOfRange);
}

TEST_CASE("Chafee-Infante counts") {
  for (int n = 1; n <= 4; ++n) {
    CAPTURE(n);
    const Problem pr(2, cubic(), (n * n + n + 0.5) * kPi2);
    const auto en = enumerate(pr, n + 2);
    CHECK(en.trivial);
    CHECK(en.solutions.size() == static_cast<std::size_t>(2 * n));
    for (int j = 1; j <= n + 2; ++j) {
      CHECK(count_class(en, j, +1) == (j <= n ? 1 : 0));
      CHECK(count_class(en, j, -1) == (j <= n ? 1 : 0));
    }
    for (const auto& d : en.solutions) {
      CHECK(d.kind == DescriptorKind::regular);
      CHECK(std::abs(matching_residual(pr, d.cls, d.level)) < 1e-11);
      // Near the slope bound one ulp of r moves the residual by ~1e-10.
      CHECK(std::abs(matching_residual(pr, d.cls, d.r)) < 1e-9);
      CHECK(d.r < slope_bounds(pr).r_star);
      CHECK_FALSE(d.degenerate);
    }
  }
}

TEST_CASE("no solutions below every threshold") {
  const auto en = enumerate(Problem(2, cubic(), 0.9 * kPi2), 3);
  CHECK(en.solutions.empty());
  const auto nl = power(3, 1, 1, 5);
  const double star = lambda_star(nl, 2, {1, +1}).lambda;
  CHECK(enumerate(Problem(2, nl, 0.5 * star), 3).solutions.empty());
}

TEST_CASE("q < p: one solution per class") {
  const Problem pr(3, cubic(), 2.0);
  const auto en = enumerate(pr, 5);
  CHECK(en.solutions.size() >= 10);
  for (int j = 1; j <= 5; ++j) {
    CHECK(count_class(en, j, +1) == 1);
    CHECK(count_class(en, j, -1) == 1);
  }
}

TEST_CASE("flat core for p = q = 3, f = s^5") {
  const auto nl = power(3, 1, 1, 6);
  const double tilde = lambda_tilde(nl, 3, {1, +1});
  const Problem pr(3, nl, 1.5 * tilde);
  const auto sols = solve_class(pr, {1, +1});
  REQUIRE(sols.size() == 1);
  const auto& d = sols[0];
  CHECK(d.kind == DescriptorKind::flat_core);
  const auto [x, y] = flat_core_half_widths(pr);
  CHECK(d.core_budget == Approx(1 - 2 * x).epsilon(1e-12));
  CHECK(d.core_count == 1);
  CHECK(d.continuum_dim == 0);
  CHECK(d.core_side == CoreSide::positive);
  CHECK(d.r == Approx(slope_bounds(pr).r_pos).epsilon(1e-14));

  // Below the threshold only the regular solution exists.
  const auto before = solve_class(Problem(3, nl, 0.9 * tilde), {1, +1});
  REQUIRE(before.size() == 1);
  CHECK(before[0].kind == DescriptorKind::regular);
}

TEST_CASE("flat-core side follows the area comparison") {
  const auto nl = power(2, 2, 1, 4);  // A+ < A-
  const double lambda = 3.0 * lambda_tilde(nl, 3, {4, +1});
  const Problem pr(3, nl, lambda);
  for (int j : {2, 4}) {
    const auto sols = solve_class(pr, {j, +1});
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].kind == DescriptorKind::flat_core);
    CHECK(sols[0].core_side == CoreSide::positive);
    CHECK(sols[0].core_count == j / 2);
    CHECK(sols[0].continuum_dim == j / 2 - 1);
  }
  const auto odd = power(3, 1, 1, 6);
  const auto alt = solve_class(Problem(3, odd, 3.0 * lambda_tilde(odd, 3, {3, -1})), {3, -1});
  REQUIRE(alt.size() == 1);
  CHECK(alt[0].core_side == CoreSide::alternating);
  CHECK(alt[0].core_count == 3);
}

TEST_CASE("q > p: tangent root at the star threshold, a pair above") {
  const auto nl = power(3, 1, 1, 5);
  const auto st = lambda_star(nl, 2, {1, +1});
  const auto at = solve_class(Problem(2, nl, st.lambda), {1, +1});
  REQUIRE(at.size() == 1);
  CHECK(at[0].degenerate);
  CHECK(at[0].r == Approx(std::sqrt(st.lambda) * st.r_at_unit_lambda).epsilon(1e-5));

  const auto above = solve_class(Problem(2, nl, 1.05 * st.lambda), {1, +1});
  REQUIRE(above.size() == 2);
  CHECK(above[0].r < above[1].r);
  for (const auto& d : above) {
    CHECK_FALSE(d.degenerate);
    CHECK(std::abs(d.residual) < 1e-11);
  }
  CHECK(solve_class(Problem(2, nl, st.lambda * (1 - 1e-9)), {1, +1}).empty());
  CHECK_FALSE(solve_class(Problem(2, nl, st.lambda * (1 + 1e-9)), {1, +1}).empty());
}

TEST_CASE("ids are stable and carry the class") {
  const Problem pr(2, cubic(), 6.5 * kPi2);
  const auto a = enumerate(pr, 3);
  const auto b = enumerate(pr, 3);
  REQUIRE(a.solutions.size() == b.solutions.size());
  for (std::size_t i = 0; i < a.solutions.size(); ++i) {
    const auto& d = a.solutions[i];
    CHECK(d.id() == b.solutions[i].id());
    CHECK(class_from_id(d.id()) == d.cls);
    CHECK(d.id().rfind(d.cls.label() + "-regular-", 0) == 0);
  }
  CHECK(a.solutions[0].id() != a.solutions[1].id());
}

TEST_CASE("odd f gives mirrored classes") {
  const Problem pr(2, cubic(), 7 * kPi2);
  const auto plus = solve_class(pr, {2, +1});
  const auto minus = solve_class(pr, {2, -1});
  REQUIRE(plus.size() == 1);
  REQUIRE(minus.size() == 1);
  CHECK(plus[0].r == Approx(minus[0].r).epsilon(1e-13));
}
