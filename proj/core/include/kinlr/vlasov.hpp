#pragma once

#include <cstdint>

#include "kinlr/grid.hpp"
#include "kinlr/lowrank.hpp"
#include "kinlr/scheme.hpp"

namespace kinlr {

enum class ProblemKind { landau, two_stream, bump_on_tail, free_stream };

/// Initial value f(0,x,v) = (1 + alpha cos(k x)) f_eq(v) on x in [0, 2 pi periods / k).
/// free_stream uses alpha cos(k x) M(v) and no electric field.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::landau;
  double alpha = 0.01;
  double k = 0.5;
  int periods = 1;
  double stream_speed = 2.4;   ///< two_stream: beams at +-v0
  double bump_fraction = 0.1;  ///< bump_on_tail: beta
  double bump_center = 4.5;
  double bump_width = 0.5;

  double domain_length() const;
  FieldCoupling field_coupling() const {
    return kind == ProblemKind::free_stream ? FieldCoupling::none : FieldCoupling::poisson;
  }
  void validate() const;
};

/// Unit-mass Maxwellian (2 pi)^{-1/2} exp(-v^2 / 2).
double maxwellian(double v);

/// Velocity profile of the initial condition evaluated at the nodes.
Vector equilibrium(const ProblemSpec& p, const Vector& v);

/// Periodic grids for the problem: x in [0, L), v in [-vmax, vmax).
PhaseGrid make_grids(const ProblemSpec& p, Index nx, Index nv, double vmax);

/// Separable initial state. A fixed-rank policy pads the rank-1 product with
/// zero-weight directions; seed 0 uses deterministic Fourier directions,
/// any other seed draws them at random.
LowRankState initial_condition(const ProblemSpec& p, const PhaseGrid& grids,
                               const TruncationPolicy& policy, std::uint64_t seed = 0);

/// Dense samples of the initial value.
Matrix initial_condition_full(const ProblemSpec& p, const PhaseGrid& grids);

/// rho = 1 - int f dv, evaluated in factored form.
Vector charge_density(const LowRankState& s);
Vector charge_density(const FactoredSum& fs, const PhaseGrid& grids);
Vector charge_density(const Matrix& F, const PhaseGrid& grids);

/// Field from a charge density. The mean of rho is removed first, so the
/// background density is the current mean electron density.
Vector efield_from_density(const Vector& rho, const Grid1D& xg);

Vector efield(const LowRankState& s);

/// efield(s) for Poisson coupling, zero otherwise.
Vector field_for(const LowRankState& s, const SchemeConfig& scheme);
Vector field_for(const FactoredSum& fs, const PhaseGrid& grids, const SchemeConfig& scheme);
Vector field_for(const Matrix& F, const PhaseGrid& grids, const SchemeConfig& scheme);

/// Velocity-side brackets, built from the V basis:
///   A1 = V^T W_v diag(v) V, A2 = V^T W_v D_v V (centered D_v).
/// For the upwind scheme also the split pieces used by the S step and the
/// field part of the K step, and the eigendecomposition A1 = T diag(lambda) T^T.
struct VelocityCoeffs {
  Matrix A1;
  Matrix A2;
  Matrix A1_pos;    ///< diag(v+) weight
  Matrix A1_neg;    ///< diag(v-) weight
  Matrix A2_plus;   ///< backward difference
  Matrix A2_minus;  ///< forward difference
  Matrix A1_vectors;
  Vector A1_values;
};

/// Space-side brackets, built from the U basis and a frozen field:
///   C1 = U^T W_x D_x U (centered), C2 = U^T W_x diag(E) U.
struct SpatialCoeffs {
  Matrix C1;
  Matrix C2;
  Matrix C1_plus;
  Matrix C1_minus;
  Matrix C2_pos;  ///< diag(E+) weight
  Matrix C2_neg;  ///< diag(E-) weight
  Matrix C2_vectors;
  Vector C2_values;
};

struct ProjectedCoeffs {
  VelocityCoeffs v;
  SpatialCoeffs x;
};

VelocityCoeffs velocity_coeffs(const Matrix& V, const Grid1D& vg, const SchemeConfig& scheme);
SpatialCoeffs spatial_coeffs(const Matrix& U, const Vector& E, const Grid1D& xg,
                             const SchemeConfig& scheme);
ProjectedCoeffs projected_coeffs(const Matrix& U, const Matrix& V, const Vector& E,
                                 const PhaseGrid& grids, const SchemeConfig& scheme);
ProjectedCoeffs projected_coeffs(const LowRankState& s, const Vector& E,
                                 const SchemeConfig& scheme);

}  // namespace kinlr
