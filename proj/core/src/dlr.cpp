#include "kinlr/dlr.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kinlr/errors.hpp"

namespace kinlr {

namespace {

template <class Rhs>
Matrix integrate(const Matrix& y0, double dt, SubstepSolver solver, Rhs&& rhs) {
  if (solver == SubstepSolver::euler) return y0 + dt * rhs(y0);
  const Matrix k1 = rhs(y0);
  const Matrix k2 = rhs(y0 + 0.5 * dt * k1);
  const Matrix k3 = rhs(y0 + 0.5 * dt * k2);
  const Matrix k4 = rhs(y0 + dt * k3);
  return y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Columnwise upwind derivative of Y in the characteristic frame; column j
// travels with speeds(j) and is multiplied by scale(j).
Matrix characteristic_diff(const Matrix& Y, const Grid1D& g, const Vector& speeds,
                           const Vector& scale) {
  const Matrix dplus = diff_upwind(Y, g, DiffSide::plus);
  const Matrix dminus = diff_upwind(Y, g, DiffSide::minus);
  Matrix out(Y.rows(), Y.cols());
  for (Index j = 0; j < Y.cols(); ++j) {
    out.col(j) = scale(j) * (speeds(j) >= 0.0 ? dplus.col(j) : dminus.col(j));
  }
  return out;
}

// The four factor updates shared by the integrators. Every one freezes E.

Matrix advance_k(const Matrix& K, const Matrix& V, const Vector& E, double dt,
                 const PhaseGrid& grids, const SchemeConfig& scheme) {
  const VelocityCoeffs c = velocity_coeffs(V, grids.v(), scheme);
  return integrate(K, dt, scheme.substep_solver,
                   [&](const Matrix& y) { return k_rhs(y, c, E, grids.x(), scheme); });
}

Matrix advance_l(const Matrix& L, const Matrix& U, const Vector& E, double dt,
                 const PhaseGrid& grids, const SchemeConfig& scheme) {
  const SpatialCoeffs c = spatial_coeffs(U, E, grids.x(), scheme);
  return integrate(L, dt, scheme.substep_solver,
                   [&](const Matrix& y) { return l_rhs(y, c, grids.v(), scheme); });
}

// sign = -1 integrates the S equation backward in time.
Matrix advance_s(const Matrix& S, const Matrix& U, const Matrix& V, const Vector& E, double dt,
                 double sign, const PhaseGrid& grids, const SchemeConfig& scheme) {
  const ProjectedCoeffs c = projected_coeffs(U, V, E, grids, scheme);
  return integrate(S, dt, scheme.substep_solver,
                   [&](const Matrix& y) { return Matrix(sign * s_rhs(y, c, scheme)); });
}

// K step, backward S step, L step.
LowRankState lie_ksl(const LowRankState& s, double dt, const Vector& E,
                     const SchemeConfig& scheme) {
  const PhaseGrid& grids = s.grids();
  const Matrix K = advance_k(s.U() * s.S(), s.V(), E, dt, grids, scheme);
  QRFactors qk = orthonormalize(K, grids.x());
  const Matrix S = advance_s(qk.R, qk.Q, s.V(), E, dt, -1.0, grids, scheme);
  const Matrix L = advance_l(s.V() * S.transpose(), qk.Q, E, dt, grids, scheme);
  QRFactors ql = orthonormalize(L, grids.v());
  return LowRankState(grids, std::move(qk.Q), ql.R.transpose(), std::move(ql.Q));
}

// Adjoint ordering: L step, backward S step, K step.
LowRankState lie_lsk(const LowRankState& s, double dt, const Vector& E,
                     const SchemeConfig& scheme) {
  const PhaseGrid& grids = s.grids();
  const Matrix L = advance_l(s.V() * s.S().transpose(), s.U(), E, dt, grids, scheme);
  QRFactors ql = orthonormalize(L, grids.v());
  const Matrix S = advance_s(ql.R.transpose(), s.U(), ql.Q, E, dt, -1.0, grids, scheme);
  const Matrix K = advance_k(s.U() * S, ql.Q, E, dt, grids, scheme);
  QRFactors qk = orthonormalize(K, grids.x());
  return LowRankState(grids, std::move(qk.Q), std::move(qk.R), std::move(ql.Q));
}

Matrix basis_of(const Matrix& A, const Grid1D& g) {
  if (A.cols() <= g.n()) return orthonormalize(A, g).Q;
  const double sq = std::sqrt(g.delta());
  Eigen::HouseholderQR<Matrix> qr(sq * A);
  return (qr.householderQ() * Matrix::Identity(g.n(), g.n())) / sq;
}

Vector prepare_step(const LowRankState& s, double dt, const SchemeConfig& scheme) {
  scheme.validate();
  if (!(dt > 0.0)) throw StepSizeError("time step must be positive");
  Vector E = field_for(s, scheme);
  check_cfl(s.grids(), E, dt, scheme);
  return E;
}

}  // namespace

double max_stable_dt(const PhaseGrid& grids, const Vector& E, const SchemeConfig& scheme) {
  const double vmax = grids.v().nodes().cwiseAbs().maxCoeff();
  double limit = grids.x().delta() / vmax;
  const double emax = E.size() > 0 ? E.cwiseAbs().maxCoeff() : 0.0;
  if (emax > 1e-14) limit = std::min(limit, grids.v().delta() / emax);
  return scheme.cfl_guard * limit;
}

void check_cfl(const PhaseGrid& grids, const Vector& E, double dt, const SchemeConfig& scheme) {
  const double limit = max_stable_dt(grids, E, scheme);
  if (dt > limit) {
    throw StepSizeError("time step " + std::to_string(dt) + " exceeds the CFL limit " +
                        std::to_string(limit));
  }
}

Matrix k_rhs(const Matrix& K, const VelocityCoeffs& c, const Vector& E, const Grid1D& xg,
             const SchemeConfig& scheme) {
  if (K.rows() != xg.n() || E.size() != xg.n()) throw DimensionError("k_rhs: bad K or E length");
  if (scheme.space_scheme == SpaceScheme::centered) {
    return -diff_centered(K, xg) * c.A1.transpose() + E.asDiagonal() * K * c.A2.transpose();
  }
  if (!K.allFinite()) throw NumericError("k_rhs: non-finite K");
  const Matrix& T = c.A1_vectors;
  const Matrix transport = characteristic_diff(K * T, xg, c.A1_values, -c.A1_values);
  const Vector e_pos = E.cwiseMax(0.0);
  const Vector e_neg = E.cwiseMin(0.0);
  return transport * T.transpose() + e_neg.asDiagonal() * K * c.A2_plus.transpose() +
         e_pos.asDiagonal() * K * c.A2_minus.transpose();
}

Matrix l_rhs(const Matrix& L, const SpatialCoeffs& c, const Grid1D& vg, const SchemeConfig& scheme) {
  if (L.rows() != vg.n()) throw DimensionError("l_rhs: bad L length");
  const Vector v = vg.nodes();
  if (scheme.space_scheme == SpaceScheme::centered) {
    return -(v.asDiagonal() * L * c.C1.transpose()) + diff_centered(L, vg) * c.C2.transpose();
  }
  if (!L.allFinite()) throw NumericError("l_rhs: non-finite L");
  // D_v L C2^T: column j of L T moves with speed -lambda_j
  const Matrix& T = c.C2_vectors;
  const Vector speeds = -c.C2_values;
  const Matrix transport = characteristic_diff(L * T, vg, speeds, c.C2_values);
  const Vector v_pos = v.cwiseMax(0.0);
  const Vector v_neg = v.cwiseMin(0.0);
  return transport * T.transpose() - v_pos.asDiagonal() * L * c.C1_plus.transpose() -
         v_neg.asDiagonal() * L * c.C1_minus.transpose();
}

Matrix s_rhs(const Matrix& S, const ProjectedCoeffs& c, const SchemeConfig& scheme) {
  if (scheme.space_scheme == SpaceScheme::centered) {
    return -c.x.C1 * S * c.v.A1.transpose() + c.x.C2 * S * c.v.A2.transpose();
  }
  return -c.x.C1_plus * S * c.v.A1_pos.transpose() - c.x.C1_minus * S * c.v.A1_neg.transpose() +
         c.x.C2_neg * S * c.v.A2_plus.transpose() + c.x.C2_pos * S * c.v.A2_minus.transpose();
}

LowRankState step_ps_lie(const LowRankState& s, double dt, const SchemeConfig& scheme,
                         StepStats* stats) {
  Vector E = prepare_step(s, dt, scheme);
  LowRankState out = lie_ksl(s, dt, E, scheme);
  if (stats) stats->field = std::move(E);
  return out;
}

LowRankState step_ps_strang(const LowRankState& s, double dt, const SchemeConfig& scheme,
                            StepStats* stats) {
  Vector E = prepare_step(s, dt, scheme);
  // first-order predictor for the midpoint field, then the symmetric
  // composition KSL(dt/2) LSK(dt/2) with that field frozen
  Vector E_mid = E;
  if (scheme.field == FieldCoupling::poisson) {
    E_mid = efield(lie_ksl(s, 0.5 * dt, E, scheme));
    check_cfl(s.grids(), E_mid, dt, scheme);
  }
  LowRankState out = lie_lsk(lie_ksl(s, 0.5 * dt, E_mid, scheme), 0.5 * dt, E_mid, scheme);
  if (stats) stats->field = std::move(E);
  return out;
}

LowRankState step_bug(const LowRankState& s, double dt, const SchemeConfig& scheme,
                      StepStats* stats) {
  Vector E = prepare_step(s, dt, scheme);
  const PhaseGrid& grids = s.grids();
  const Matrix K = advance_k(s.U() * s.S(), s.V(), E, dt, grids, scheme);
  const Matrix L = advance_l(s.V() * s.S().transpose(), s.U(), E, dt, grids, scheme);
  Matrix U1 = orthonormalize(K, grids.x()).Q;
  Matrix V1 = orthonormalize(L, grids.v()).Q;
  const Matrix M = grids.x().delta() * (U1.transpose() * s.U());
  const Matrix N = grids.v().delta() * (V1.transpose() * s.V());
  Matrix S1 = advance_s(M * s.S() * N.transpose(), U1, V1, E, dt, 1.0, grids, scheme);
  if (stats) stats->field = std::move(E);
  return LowRankState(grids, std::move(U1), std::move(S1), std::move(V1));
}

LowRankState step_bug_augmented(const LowRankState& s, double dt, const SchemeConfig& scheme,
                                const TruncationPolicy& policy, StepStats* stats) {
  policy.validate();
  Vector E = prepare_step(s, dt, scheme);
  const PhaseGrid& grids = s.grids();
  const Index r = s.rank();
  const Matrix K = advance_k(s.U() * s.S(), s.V(), E, dt, grids, scheme);
  const Matrix L = advance_l(s.V() * s.S().transpose(), s.U(), E, dt, grids, scheme);

  Matrix ku(grids.nx(), 2 * r);
  ku << K, s.U();
  Matrix lv(grids.nv(), 2 * r);
  lv << L, s.V();
  Matrix U_hat = basis_of(ku, grids.x());
  Matrix V_hat = basis_of(lv, grids.v());
  const Matrix M = grids.x().delta() * (U_hat.transpose() * s.U());
  const Matrix N = grids.v().delta() * (V_hat.transpose() * s.V());
  Matrix S_hat = advance_s(M * s.S() * N.transpose(), U_hat, V_hat, E, dt, 1.0, grids, scheme);

  // bases of different width (Nx != Nv, 2r beyond one of them) go through round
  if (U_hat.cols() != V_hat.cols()) {
    FactoredSum fs;
    fs.U = std::move(U_hat);
    fs.S = std::move(S_hat);
    fs.V = std::move(V_hat);
    TruncationReport report;
    LowRankState out = round(fs, policy, grids, &report);
    if (stats) {
      stats->field = std::move(E);
      stats->truncated = true;
      stats->truncation = std::move(report);
    }
    return out;
  }
  const LowRankState augmented(grids, std::move(U_hat), std::move(S_hat), std::move(V_hat));
  TruncationReport report;
  LowRankState out = truncate(augmented, policy, &report);
  if (stats) {
    stats->field = std::move(E);
    stats->truncated = true;
    stats->truncation = std::move(report);
  }
  return out;
}

}  // namespace kinlr
