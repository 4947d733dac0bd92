#include <doctest.h>

#include <cmath>

#include "kinlr/errors.hpp"
#include "kinlr/vlasov.hpp"
#include "oracles.hpp"

using namespace kinlr;
namespace kt = kinlr::testing;

TEST_SUITE("vlasov") {

TEST_CASE("maxwellian has unit mass on the grid") {
  const Grid1D vg(64, -8.0, 8.0);
  double mass = 0.0;
  for (Index l = 0; l < 64; ++l) mass += vg.delta() * maxwellian(vg.node(l));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("problem validation and grids") {
  ProblemSpec p;
  p.k = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ProblemSpec{};
  p.periods = 2;
  CHECK(make_grids(p, 16, 16, 6.0).x().length() == doctest::Approx(8.0 * std::acos(-1.0)));
  CHECK_THROWS_AS(make_grids(p, 16, 16, -1.0), ConfigError);
  CHECK(ProblemSpec{}.field_coupling() == FieldCoupling::poisson);
  ProblemSpec fs;
  fs.kind = ProblemKind::free_stream;
  CHECK(fs.field_coupling() == FieldCoupling::none);
}

TEST_CASE("initial condition rejects truncated tails and wrong domains") {
  const ProblemSpec p;
  CHECK_THROWS_AS(initial_condition_full(p, make_grids(p, 16, 16, 3.0)), ConfigError);
  const PhaseGrid wrong(Grid1D(16, 0.0, 5.0), Grid1D(16, -6.0, 6.0));
  CHECK_THROWS_AS(initial_condition(p, wrong, TruncationPolicy::lossless()), ConfigError);
}

TEST_CASE("factored initial condition matches the sampled one") {
  for (ProblemKind kind : {ProblemKind::landau, ProblemKind::two_stream, ProblemKind::bump_on_tail,
                           ProblemKind::free_stream}) {
    ProblemSpec p;
    p.kind = kind;
    const PhaseGrid g = make_grids(p, 16, 64, 9.0);
    const Matrix F = initial_condition_full(p, g);
    const LowRankState s = initial_condition(p, g, TruncationPolicy::lossless());
    CHECK(s.rank() == 1);
    CHECK((to_full(s) - F).norm() < 1e-13 * F.norm());
    for (std::uint64_t seed : {0u, 3u}) {
      const LowRankState padded = initial_condition(p, g, TruncationPolicy::fixed(4), seed);
      CHECK(padded.rank() == 4);
      CHECK(padded.orthonormality_residual() < 1e-12);
      CHECK((to_full(padded) - F).norm() < 1e-13 * F.norm());
    }
  }
}

TEST_CASE("charge density and field agree across representations") {
  const ProblemSpec p;
  const PhaseGrid g = make_grids(p, 32, 32, 6.0);
  const LowRankState s = kt::random_state(g, 5, 0.5, 12);
  const Matrix F = to_full(s);
  CHECK((charge_density(s) - charge_density(F, g)).norm() < 1e-12);
  CHECK((charge_density(FactoredSum(s), g) - charge_density(F, g)).norm() < 1e-12);
  CHECK((efield(s) - kt::naive_field(F, g)).norm() < 1e-12);
  SchemeConfig none;
  none.field = FieldCoupling::none;
  CHECK(field_for(s, none).norm() == 0.0);
  CHECK(field_for(F, g, none).norm() == 0.0);
}

TEST_CASE("landau field has the linear shape") {
  ProblemSpec p;
  p.alpha = 1e-3;
  const PhaseGrid g = make_grids(p, 32, 64, 8.0);
  const Vector E = efield(initial_condition(p, g, TruncationPolicy::lossless()));
  // rho = -alpha cos(kx)  =>  E = -alpha sin(kx) / k
  for (Index i = 0; i < 32; ++i) {
    CHECK(E(i) == doctest::Approx(-p.alpha * std::sin(p.k * g.x().node(i)) / p.k).epsilon(1e-6));
  }
}

TEST_CASE("projected coefficients split consistently") {
  const ProblemSpec p;
  const PhaseGrid g = make_grids(p, 16, 32, 6.0);
  const LowRankState s = kt::random_state(g, 4, 0.5, 2);
  const Vector E = kt::naive_field(to_full(s), g);
  SchemeConfig sc;
  const ProjectedCoeffs c = projected_coeffs(s, E, sc);
  CHECK((c.v.A1_pos + c.v.A1_neg - c.v.A1).norm() < 1e-13);
  CHECK((0.5 * (c.v.A2_plus + c.v.A2_minus) - c.v.A2).norm() < 1e-12);
  CHECK((0.5 * (c.x.C1_plus + c.x.C1_minus) - c.x.C1).norm() < 1e-12);
  CHECK((c.x.C2_pos + c.x.C2_neg - c.x.C2).norm() < 1e-13);
  CHECK((c.v.A1_vectors * c.v.A1_values.asDiagonal() * c.v.A1_vectors.transpose() - c.v.A1).norm() <
        1e-12);
  CHECK((c.x.C2_vectors * c.x.C2_values.asDiagonal() * c.x.C2_vectors.transpose() - c.x.C2).norm() <
        1e-12);
  CHECK_THROWS_AS(velocity_coeffs(Matrix(31, 2), g.v(), sc), DimensionError);
}

}
