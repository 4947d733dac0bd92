#include "kinlr/vlasov.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "kinlr/errors.hpp"

namespace kinlr {

namespace {

// Largest admissible ratio f_eq(+-vmax) / max f_eq.
constexpr double kTailTolerance = 1e-7;

void symmetric_eigen(const Matrix& A, Matrix& vectors, Vector& values, const char* what) {
  if (!A.allFinite()) throw NumericError(std::string(what) + ": non-finite coefficient matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (A + A.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericError(std::string(what) + ": eigendecomposition failed");
  }
  vectors = eig.eigenvectors();
  values = eig.eigenvalues();
}

Matrix weighted_gram(const Matrix& A, const Vector& weight, const Matrix& B, double delta) {
  return delta * (A.transpose() * weight.asDiagonal() * B);
}

}  // namespace

void SchemeConfig::validate() const {
  if (!(cfl_guard > 0.0 && cfl_guard <= 1.0)) {
    throw ConfigError("SchemeConfig: cfl_guard must lie in (0, 1]");
  }
}

double ProblemSpec::domain_length() const {
  return 2.0 * std::numbers::pi * static_cast<double>(periods) / k;
}

void ProblemSpec::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("ProblemSpec: alpha must be non-negative");
  if (!(k > 0.0)) throw ConfigError("ProblemSpec: k must be positive");
  if (periods < 1) throw ConfigError("ProblemSpec: periods must be a positive integer");
  if (kind == ProblemKind::bump_on_tail) {
    if (!(bump_fraction >= 0.0 && bump_fraction <= 1.0) || !(bump_width > 0.0)) {
      throw ConfigError("ProblemSpec: invalid bump parameters");
    }
  }
}

double maxwellian(double v) {
  return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

Vector equilibrium(const ProblemSpec& p, const Vector& v) {
  Vector f(v.size());
  for (Index l = 0; l < v.size(); ++l) {
    const double vl = v(l);
    switch (p.kind) {
      case ProblemKind::landau:
      case ProblemKind::free_stream:
        f(l) = maxwellian(vl);
        break;
      case ProblemKind::two_stream:
        f(l) = 0.5 * (maxwellian(vl - p.stream_speed) + maxwellian(vl + p.stream_speed));
        break;
      case ProblemKind::bump_on_tail:
        f(l) = (1.0 - p.bump_fraction) * maxwellian(vl) +
               p.bump_fraction * maxwellian((vl - p.bump_center) / p.bump_width) / p.bump_width;
        break;
    }
  }
  return f;
}

PhaseGrid make_grids(const ProblemSpec& p, Index nx, Index nv, double vmax) {
  p.validate();
  if (!(vmax > 0.0)) throw ConfigError("make_grids: vmax must be positive");
  return PhaseGrid(Grid1D(nx, 0.0, p.domain_length()), Grid1D(nv, -vmax, vmax));
}

namespace {

void check_domain(const ProblemSpec& p, const PhaseGrid& grids) {
  p.validate();
  const double expected = p.domain_length();
  if (std::abs(grids.x().length() - expected) > 1e-12 * expected) {
    throw ConfigError("initial_condition: x-domain length must be 2 pi periods / k");
  }
  Vector ends(2);
  ends << grids.v().a(), grids.v().b();
  const Vector tail = equilibrium(p, ends);
  const double peak = equilibrium(p, grids.v().nodes()).maxCoeff();
  if (tail.maxCoeff() > kTailTolerance * peak) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "initial_condition: vmax = %g truncates the velocity profile (tail/peak %.3g)",
                  grids.v().b(), tail.maxCoeff() / peak);
    throw ConfigError(msg);
  }
}

Vector x_profile(const ProblemSpec& p, const Grid1D& xg) {
  const Vector x = xg.nodes();
  if (p.kind == ProblemKind::free_stream) return p.alpha * (p.k * x.array()).cos().matrix();
  return (1.0 + p.alpha * (p.k * x.array()).cos()).matrix();
}

}  // namespace

Matrix initial_condition_full(const ProblemSpec& p, const PhaseGrid& grids) {
  check_domain(p, grids);
  return x_profile(p, grids.x()) * equilibrium(p, grids.v().nodes()).transpose();
}

LowRankState initial_condition(const ProblemSpec& p, const PhaseGrid& grids,
                               const TruncationPolicy& policy, std::uint64_t seed) {
  check_domain(p, grids);
  policy.validate();
  const Vector fx = x_profile(p, grids.x());
  const Vector fv = equilibrium(p, grids.v().nodes());
  const double nx_norm = std::sqrt(inner(fx, fx, grids.x()));
  const double nv_norm = std::sqrt(inner(fv, fv, grids.v()));

  Index r = 1;
  if (policy.mode == TruncationPolicy::Mode::fixed_rank) {
    r = std::min({policy.r_target, grids.nx(), grids.nv()});
  }
  Matrix U = Matrix::Zero(grids.nx(), r);
  Matrix V = Matrix::Zero(grids.nv(), r);
  if (seed != 0 && r > 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (Index j = 1; j < r; ++j) {
      for (Index i = 0; i < U.rows(); ++i) U(i, j) = normal(rng);
      for (Index i = 0; i < V.rows(); ++i) V(i, j) = normal(rng);
    }
  }
  Matrix S = Matrix::Zero(r, r);
  if (nx_norm > 0.0 && nv_norm > 0.0) {
    U.col(0) = fx / nx_norm;
    V.col(0) = fv / nv_norm;
    S(0, 0) = nx_norm * nv_norm;
  }
  // orthonormalize keeps the unit column 0 and completes the zero-weight directions
  QRFactors qu = orthonormalize(U, grids.x());
  QRFactors qv = orthonormalize(V, grids.v());
  return LowRankState(grids, std::move(qu.Q), std::move(S), std::move(qv.Q));
}

Vector charge_density(const LowRankState& s) {
  const Vector vint = s.grids().v().delta() * s.V().colwise().sum().transpose();
  return Vector::Ones(s.grids().nx()) - s.U() * (s.S() * vint);
}

Vector charge_density(const FactoredSum& fs, const PhaseGrid& grids) {
  const Vector vint = grids.v().delta() * fs.V.colwise().sum().transpose();
  return Vector::Ones(grids.nx()) - fs.U * (fs.S * vint);
}

Vector charge_density(const Matrix& F, const PhaseGrid& grids) {
  return Vector::Ones(grids.nx()) - grids.v().delta() * F.rowwise().sum();
}

Vector efield_from_density(const Vector& rho, const Grid1D& xg) {
  const Vector centered = rho.array() - rho.mean();
  return solve_efield(centered, xg);
}

Vector efield(const LowRankState& s) {
  return efield_from_density(charge_density(s), s.grids().x());
}

Vector field_for(const LowRankState& s, const SchemeConfig& scheme) {
  if (scheme.field == FieldCoupling::none) return Vector::Zero(s.grids().nx());
  return efield(s);
}

Vector field_for(const FactoredSum& fs, const PhaseGrid& grids, const SchemeConfig& scheme) {
  if (scheme.field == FieldCoupling::none) return Vector::Zero(grids.nx());
  return efield_from_density(charge_density(fs, grids), grids.x());
}

Vector field_for(const Matrix& F, const PhaseGrid& grids, const SchemeConfig& scheme) {
  if (scheme.field == FieldCoupling::none) return Vector::Zero(grids.nx());
  return efield_from_density(charge_density(F, grids), grids.x());
}

VelocityCoeffs velocity_coeffs(const Matrix& V, const Grid1D& vg, const SchemeConfig& scheme) {
  if (V.rows() != vg.n()) throw DimensionError("velocity_coeffs: V height differs from grid");
  const Vector v = vg.nodes();
  const double dv = vg.delta();
  VelocityCoeffs c;
  c.A1 = weighted_gram(V, v, V, dv);
  c.A2 = dv * (V.transpose() * diff_centered(V, vg));
  if (scheme.space_scheme == SpaceScheme::upwind) {
    c.A1_pos = weighted_gram(V, v.cwiseMax(0.0), V, dv);
    c.A1_neg = weighted_gram(V, v.cwiseMin(0.0), V, dv);
    c.A2_plus = dv * (V.transpose() * diff_upwind(V, vg, DiffSide::plus));
    c.A2_minus = dv * (V.transpose() * diff_upwind(V, vg, DiffSide::minus));
    symmetric_eigen(c.A1, c.A1_vectors, c.A1_values, "velocity_coeffs");
  }
  return c;
}

SpatialCoeffs spatial_coeffs(const Matrix& U, const Vector& E, const Grid1D& xg,
                             const SchemeConfig& scheme) {
  if (U.rows() != xg.n() || E.size() != xg.n()) {
    throw DimensionError("spatial_coeffs: U or E length differs from grid");
  }
  const double dx = xg.delta();
  SpatialCoeffs c;
  c.C1 = dx * (U.transpose() * diff_centered(U, xg));
  c.C2 = weighted_gram(U, E, U, dx);
  if (scheme.space_scheme == SpaceScheme::upwind) {
    c.C1_plus = dx * (U.transpose() * diff_upwind(U, xg, DiffSide::plus));
    c.C1_minus = dx * (U.transpose() * diff_upwind(U, xg, DiffSide::minus));
    c.C2_pos = weighted_gram(U, E.cwiseMax(0.0), U, dx);
    c.C2_neg = weighted_gram(U, E.cwiseMin(0.0), U, dx);
    symmetric_eigen(c.C2, c.C2_vectors, c.C2_values, "spatial_coeffs");
  }
  return c;
}

ProjectedCoeffs projected_coeffs(const Matrix& U, const Matrix& V, const Vector& E,
                                 const PhaseGrid& grids, const SchemeConfig& scheme) {
  return {velocity_coeffs(V, grids.v(), scheme), spatial_coeffs(U, E, grids.x(), scheme)};
}

ProjectedCoeffs projected_coeffs(const LowRankState& s, const Vector& E,
                                 const SchemeConfig& scheme) {
  return projected_coeffs(s.U(), s.V(), E, s.grids(), scheme);
}

}  // namespace kinlr
