#pragma once

#include "kinlr/lowrank.hpp"
#include "kinlr/scheme.hpp"
#include "kinlr/vlasov.hpp"

namespace kinlr {

/// Side information a stepper can hand back to the caller.
struct StepStats {
  Vector field;                 ///< E used for the (first part of the) step
  bool truncated = false;       ///< whether `truncation` was filled in
  TruncationReport truncation;  ///< rank-adaptive steppers only
};

/// Largest dt admitted by the CFL guard for the given field.
double max_stable_dt(const PhaseGrid& grids, const Vector& E, const SchemeConfig& scheme);

/// Throws StepSizeError when dt > cfl_guard * min(dx / vmax, dv / max|E|).
/// The field bound is skipped when E vanishes.
void check_cfl(const PhaseGrid& grids, const Vector& E, double dt, const SchemeConfig& scheme);

/// dK/dt = <RHS(K V^T), V>_v = -D_x[K] A1^T + (field term).
/// Upwind: the x-derivative is taken in the eigenbasis of A1 with the
/// difference side chosen by the sign of each characteristic speed.
Matrix k_rhs(const Matrix& K, const VelocityCoeffs& c, const Vector& E, const Grid1D& xg,
             const SchemeConfig& scheme);

/// dL/dt = <RHS(U L^T), U>_x = -diag(v) L C1^T + D_v[L] C2^T.
/// Upwind: the v-derivative is taken in the eigenbasis of C2.
Matrix l_rhs(const Matrix& L, const SpatialCoeffs& c, const Grid1D& vg, const SchemeConfig& scheme);

/// Galerkin projection of the discrete RHS onto span{U_i V_j^T}:
/// centered -C1 S A1^T + C2 S A2^T, upwind the same with split brackets.
Matrix s_rhs(const Matrix& S, const ProjectedCoeffs& c, const SchemeConfig& scheme);

/// Projector-splitting Lie step (K, S backward, L). Rank is preserved.
LowRankState step_ps_lie(const LowRankState& s, double dt, const SchemeConfig& scheme,
                         StepStats* stats = nullptr);

/// Symmetric Strang composition of the projector-splitting substeps.
LowRankState step_ps_strang(const LowRankState& s, double dt, const SchemeConfig& scheme,
                            StepStats* stats = nullptr);

/// Fixed-rank basis-update & Galerkin step.
LowRankState step_bug(const LowRankState& s, double dt, const SchemeConfig& scheme,
                      StepStats* stats = nullptr);

/// Rank-adaptive BUG: bases augmented with the old ones (width 2r), Galerkin
/// S step, then truncation per policy.
LowRankState step_bug_augmented(const LowRankState& s, double dt, const SchemeConfig& scheme,
                                const TruncationPolicy& policy, StepStats* stats = nullptr);

}  // namespace kinlr
