#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "kinlr/lowrank.hpp"
#include "kinlr/scheme.hpp"
#include "kinlr/vlasov.hpp"

namespace kinlr {

enum class Integrator {
  ps_lie,
  ps_strang,
  bug,
  bug_aug,
  sat_euler,
  sat_rk2,
  sat_rk4,
  sl,
  dense_euler,
  dense_rk2,
  dense_rk4,
  dense_sl,
};

std::string_view integrator_name(Integrator i);
bool is_dense(Integrator i);
/// Integrators that keep the rank of the initial state.
bool is_fixed_rank(Integrator i);

/// Flat run description read from "key = value" lines ('#' starts a comment).
struct RunConfig {
  ProblemSpec problem;
  Index nx = 64;
  Index nv = 64;
  double vmax = 6.0;
  double dt = 1e-2;
  double tfinal = 1.0;
  Integrator integrator = Integrator::bug_aug;
  /// Rank of fixed-rank runs and initial (padded) rank of ps/bug/bug_aug runs.
  Index rank = 5;
  TruncationPolicy::Mode truncation = TruncationPolicy::Mode::tolerance;
  double theta = 1e-6;
  Index r_max = 32;
  SpaceScheme scheme = SpaceScheme::upwind;
  SubstepSolver substep = SubstepSolver::rk4;
  Index snapshot_every = 0;
  std::string out_csv = "diag.csv";
  std::string out_snap_dir;
  std::uint64_t seed = 0;

  /// Throws ConfigError for inconsistent combinations.
  void validate() const;

  PhaseGrid grids() const;
  TruncationPolicy policy() const;
  SchemeConfig scheme_config() const;
  /// tfinal / dt, which must be a whole number.
  Index nsteps() const;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::filesystem::path& path);

/// Renders every key, in the order accepted by parse_config.
void write_config(std::ostream& os, const RunConfig& cfg);

}  // namespace kinlr
