#include <doctest.h>

#include "kinlr/errors.hpp"
#include "kinlr/reference.hpp"
#include "kinlr/sat.hpp"
#include "oracles.hpp"

using namespace kinlr;
namespace kt = kinlr::testing;

namespace {

PhaseGrid grids() { return make_grids(ProblemSpec{}, 16, 24, 6.0); }

}  // namespace

TEST_SUITE("sat") {

TEST_CASE("factored right-hand side assembles to the stencil operator") {
  const PhaseGrid g = grids();
  const LowRankState s = kt::random_state(g, 3, 0.5, 7);
  const Vector E = kt::naive_field(to_full(s), g);
  for (SpaceScheme space : {SpaceScheme::upwind, SpaceScheme::centered}) {
    SchemeConfig sc;
    sc.space_scheme = space;
    const FactoredSum terms = sat_rhs_terms(s, E, sc);
    CHECK(terms.width() == (space == SpaceScheme::upwind ? 12 : 6));
    const Matrix expected = kt::naive_rhs(to_full(s), g, E, space);
    CHECK((terms.assemble() - expected).norm() < 1e-12 * expected.norm());
    CHECK((sat_rhs_terms(FactoredSum(s), g, E, sc).assemble() - expected).norm() <
          1e-12 * expected.norm());
  }
}

TEST_CASE("lossless steps equal the dense updates of the assembled state") {
  const PhaseGrid g = grids();
  const LowRankState s = kt::random_state(g, 4, 0.5, 19);
  const Matrix F = to_full(s);
  const double dt = 0.01;
  const TruncationPolicy lossless = TruncationPolicy::lossless();
  for (SpaceScheme space : {SpaceScheme::upwind, SpaceScheme::centered}) {
    SchemeConfig sc;
    sc.space_scheme = space;
    const Matrix euler = F + dt * kt::naive_rhs(F, g, kt::naive_field(F, g), space);
    CHECK((to_full(step_sat_euler(s, dt, sc, lossless)) - euler).norm() < 1e-11 * F.norm());
    CHECK((to_full(step_sat_rk(s, dt, 2, sc, lossless)) - dense_step(F, g, dt, DenseMethod::rk2, sc))
              .norm() < 1e-11 * F.norm());
    CHECK((to_full(step_sat_rk(s, dt, 4, sc, lossless)) - dense_step(F, g, dt, DenseMethod::rk4, sc))
              .norm() < 1e-11 * F.norm());
  }
  CHECK((to_full(step_sl_split(s, dt, lossless)) - dense_step(F, g, dt, DenseMethod::sl, SchemeConfig{}))
            .norm() < 1e-11 * F.norm());
}

TEST_CASE("truncated step stays within theta of the lossless one") {
  const PhaseGrid g = grids();
  const LowRankState s = kt::random_state(g, 4, 0.5, 3);
  const SchemeConfig sc;
  const double theta = 1e-4;
  const Matrix exact = to_full(step_sat_euler(s, 0.01, sc, TruncationPolicy::lossless()));
  StepStats stats;
  const LowRankState cut = step_sat_euler(s, 0.01, sc, TruncationPolicy::tolerance(theta), &stats);
  const double w = std::sqrt(g.x().delta() * g.v().delta());
  CHECK(w * (to_full(cut) - exact).norm() <= theta * (1 + 1e-10));
  CHECK(stats.truncated);
  CHECK(stats.truncation.discarded_sq <= theta * theta);
  CHECK(step_sat_rk(s, 0.01, 4, sc, TruncationPolicy::tolerance(theta), true).rank() <= cut.rank() + 4);
}

TEST_CASE("conservative rounding keeps the mass of an upwind step") {
  const ProblemSpec p;
  const PhaseGrid g = make_grids(p, 16, 32, 6.0);
  const TruncationPolicy pol = TruncationPolicy::conservative(1e-5);
  LowRankState s = initial_condition(p, g, pol);
  const double m0 = moments(s).mass;
  for (int n = 0; n < 50; ++n) s = step_sat_euler(s, 0.02, SchemeConfig{}, pol);
  CHECK(std::abs(moments(s).mass - m0) < 1e-12 * m0);
}

TEST_CASE("invalid arguments") {
  const PhaseGrid g = grids();
  const LowRankState s = kt::random_state(g, 2, 0.5, 1);
  const SchemeConfig sc;
  CHECK_THROWS_AS(step_sat_rk(s, 0.01, 3, sc, TruncationPolicy::lossless()), ConfigError);
  CHECK_THROWS_AS(step_sat_euler(s, -0.01, sc, TruncationPolicy::lossless()), StepSizeError);
  CHECK_THROWS_AS(step_sl_split(s, 10.0, TruncationPolicy::lossless()), StepSizeError);
  CHECK_THROWS_AS(sat_rhs_terms(s, Vector::Zero(3), sc), DimensionError);
}

}
