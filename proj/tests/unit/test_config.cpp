#include <doctest.h>

#include <sstream>

#include "kinlr/config.hpp"
#include "kinlr/errors.hpp"

using namespace kinlr;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const RunConfig cfg = parse("");
  CHECK(cfg.integrator == Integrator::bug_aug);
  CHECK(cfg.nsteps() == 100);
  CHECK(cfg.policy().mode == TruncationPolicy::Mode::tolerance);
  CHECK(cfg.scheme_config().field == FieldCoupling::poisson);
}

TEST_CASE("keys, comments and whitespace") {
  const RunConfig cfg = parse(
      "# a comment\n"
      "problem = free_stream   # trailing\n"
      "  nx=32\n"
      "nv = 48\n"
      "integrator = ps_strang\n"
      "truncation = fixed\n"
      "rank = 4\n"
      "dt = 0.005\n"
      "tfinal = 0.5\n"
      "scheme = centered\n"
      "substep = euler\n"
      "seed = 18446744073709551615\n");
  CHECK(cfg.problem.kind == ProblemKind::free_stream);
  CHECK(cfg.nx == 32);
  CHECK(cfg.nv == 48);
  CHECK(cfg.integrator == Integrator::ps_strang);
  CHECK(cfg.nsteps() == 100);
  CHECK(cfg.policy().r_target == 4);
  CHECK(cfg.scheme_config().field == FieldCoupling::none);
  CHECK(cfg.scheme_config().space_scheme == SpaceScheme::centered);
  CHECK(cfg.seed == 18446744073709551615ull);
}

TEST_CASE("rejections") {
  CHECK_THROWS_AS(parse("nx = 32\nnx = 64\n"), ConfigError);
  CHECK_THROWS_AS(parse("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse("nx = 3.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("dt = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse("integrator = magic\n"), ConfigError);
  CHECK_THROWS_AS(parse("just text\n"), ConfigError);
  CHECK_THROWS_AS(parse("dt = 0.03\ntfinal = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("integrator = bug\n"), ConfigError);
  CHECK_THROWS_AS(parse("truncation = conservative\nr_max = 2\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/kinlr.cfg"), IoError);
}

TEST_CASE("write and parse round trip") {
  RunConfig cfg;
  cfg.problem.kind = ProblemKind::two_stream;
  cfg.problem.alpha = 1e-3;
  cfg.integrator = Integrator::sat_rk4;
  cfg.truncation = TruncationPolicy::Mode::conservative;
  cfg.theta = 1.0 / 3.0;
  cfg.out_snap_dir = "snaps";
  std::ostringstream os;
  write_config(os, cfg);
  const RunConfig back = parse(os.str());
  CHECK(back.problem.kind == ProblemKind::two_stream);
  CHECK(back.problem.alpha == cfg.problem.alpha);
  CHECK(back.integrator == Integrator::sat_rk4);
  CHECK(back.truncation == TruncationPolicy::Mode::conservative);
  CHECK(back.theta == cfg.theta);
  CHECK(back.out_snap_dir == "snaps");
}

TEST_CASE("integrator classification") {
  CHECK(is_dense(Integrator::dense_sl));
  CHECK_FALSE(is_dense(Integrator::sl));
  CHECK(is_fixed_rank(Integrator::ps_lie));
  CHECK_FALSE(is_fixed_rank(Integrator::bug_aug));
  CHECK(integrator_name(Integrator::sat_rk2) == "sat_rk2");
}

}
