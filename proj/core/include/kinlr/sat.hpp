#pragma once

#include "kinlr/dlr.hpp"
#include "kinlr/lowrank.hpp"
#include "kinlr/scheme.hpp"

namespace kinlr {

/// Factored form of RHS(f) = -v d_x f + E d_v f for f = U S V^T.
/// Upwind: four groups {-D+U (x) v+V, -D-U (x) v-V, E-U (x) D+V, E+U (x) D-V},
/// each pairing the difference side with the sign of its advection speed.
/// Centered: two groups {-DcU (x) vV, EU (x) DcV}.
FactoredSum sat_rhs_terms(const LowRankState& s, const Vector& E, const SchemeConfig& scheme);
FactoredSum sat_rhs_terms(const FactoredSum& fs, const PhaseGrid& grids, const Vector& E,
                          const SchemeConfig& scheme);

/// f + dt RHS(f) assembled as a factored sum (width 5r upwind, 3r centered)
/// and rounded per policy. E is frozen at the start of the step.
LowRankState step_sat_euler(const LowRankState& s, double dt, const SchemeConfig& scheme,
                            const TruncationPolicy& policy, StepStats* stats = nullptr);

/// Explicit midpoint (stages = 2) or classical RK4 (stages = 4) over factored
/// stages, E recomputed from every stage. With truncate_stages each stage is
/// rounded with budget theta / stages, otherwise only recompressed without loss.
LowRankState step_sat_rk(const LowRankState& s, double dt, int stages, const SchemeConfig& scheme,
                         const TruncationPolicy& policy, bool truncate_stages = false,
                         StepStats* stats = nullptr);

/// Split semi-Lagrangian step with linear interpolation: x-advection, round,
/// field from the intermediate state, v-advection, round. Requires
/// |dt v| <= dx and |dt E| <= dv. Only scheme.field is consulted.
LowRankState step_sl_split(const LowRankState& s, double dt, const TruncationPolicy& policy,
                           const SchemeConfig& scheme = {}, StepStats* stats = nullptr);

}  // namespace kinlr
