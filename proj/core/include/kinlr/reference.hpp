#pragma once

#include <vector>

#include "kinlr/diagnostics.hpp"
#include "kinlr/grid.hpp"
#include "kinlr/scheme.hpp"
#include "kinlr/vlasov.hpp"

namespace kinlr {

/// -v d_x F + E d_v F on the full grid with the stencils of sat_rhs_terms.
Matrix dense_rhs(const Matrix& F, const PhaseGrid& grids, const Vector& E,
                 const SchemeConfig& scheme);

enum class DenseMethod { euler, rk2, rk4, sl };

/// One full-grid step; E is taken from F (and from every stage for RK).
Matrix dense_step(const Matrix& F, const PhaseGrid& grids, double dt, DenseMethod method,
                  const SchemeConfig& scheme);

struct DenseRunOptions {
  /// Snapshot cadence in steps; 0 keeps only the initial and final states.
  Index snapshot_every = 0;
  std::int64_t cap = kDefaultDenseCap;
};

struct DenseRun {
  std::vector<double> snapshot_times;
  std::vector<Matrix> snapshots;
  std::vector<DiagRecord> records;  ///< one per step, including t = 0
};

/// nsteps full-grid steps from F0; the field coupling follows the problem.
DenseRun run_dense(const Matrix& F0, const PhaseGrid& grids, const ProblemSpec& prob, double dt,
                   Index nsteps, SchemeConfig scheme, DenseMethod method,
                   const DenseRunOptions& options = {});

enum class RankNorm { max, fro };

/// Smallest r' whose best rank-r' approximation F_r' satisfies
/// ||F - F_r'|| / ||F|| <= tol in the chosen norm. tol = 0 gives the number of
/// singular values above 1e-13 sigma_1; F = 0 gives 1.
Index rank_profile(const Matrix& F, double tol, RankNorm norm);

/// Smallest r' for which the field of F_r' matches the field of F to tol in
/// the chosen norm (normalized by the norm of the reference field) and the
/// electric energy matches to relative tol. F = 0 gives 1.
Index field_rank_profile(const Matrix& F, const PhaseGrid& grids, double tol, RankNorm norm,
                         const SchemeConfig& scheme = {});

}  // namespace kinlr
