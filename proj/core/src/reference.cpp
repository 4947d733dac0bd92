#include "kinlr/reference.hpp"

#include <string>

#include "kinlr/dlr.hpp"
#include "kinlr/errors.hpp"

namespace kinlr {

namespace {

void require_shape(const Matrix& F, const PhaseGrid& grids, const char* what) {
  if (F.rows() != grids.nx() || F.cols() != grids.nv()) {
    throw DimensionError(std::string(what) + ": matrix shape differs from the grids");
  }
}

// Columns of F^T are functions of v.
Matrix diff_v(const Matrix& F, const Grid1D& vg, DiffSide side) {
  return diff_upwind(Matrix(F.transpose()), vg, side).transpose();
}

Matrix interpolate(const Matrix& F, const Grid1D& g, const Vector& courant) {
  const Vector center = (1.0 - courant.array().abs()).matrix();
  const Vector plus = courant.cwiseMax(0.0);
  const Vector minus = (-courant).cwiseMax(0.0);
  return F * center.asDiagonal() + shift(F, g, 1) * plus.asDiagonal() +
         shift(F, g, -1) * minus.asDiagonal();
}

void require_courant(const Vector& c, const char* what) {
  const double m = c.size() > 0 ? c.cwiseAbs().maxCoeff() : 0.0;
  if (m > 1.0 + 1e-14) {
    throw StepSizeError(std::string("dense semi-Lagrangian: ") + what + " Courant number " +
                        std::to_string(m) + " exceeds 1");
  }
}

Matrix sl_step(const Matrix& F, const PhaseGrid& grids, double dt, const SchemeConfig& scheme) {
  const Vector cx = (dt / grids.x().delta()) * grids.v().nodes();
  require_courant(cx, "x");
  const Matrix half = interpolate(F, grids.x(), cx);
  const Vector E = field_for(half, grids, scheme);
  const Vector cv = (-dt / grids.v().delta()) * E;
  require_courant(cv, "v");
  return interpolate(Matrix(half.transpose()), grids.v(), cv).transpose();
}

}  // namespace

Matrix dense_rhs(const Matrix& F, const PhaseGrid& grids, const Vector& E,
                 const SchemeConfig& scheme) {
  require_shape(F, grids, "dense_rhs");
  if (E.size() != grids.nx()) throw DimensionError("dense_rhs: E length differs from Nx");
  const Vector v = grids.v().nodes();
  if (scheme.space_scheme == SpaceScheme::centered) {
    const Matrix dv = diff_centered(Matrix(F.transpose()), grids.v()).transpose();
    return -(diff_centered(F, grids.x()) * v.asDiagonal()) + E.asDiagonal() * dv;
  }
  const Vector v_pos = v.cwiseMax(0.0);
  const Vector v_neg = v.cwiseMin(0.0);
  const Vector e_pos = E.cwiseMax(0.0);
  const Vector e_neg = E.cwiseMin(0.0);
  return -(diff_upwind(F, grids.x(), DiffSide::plus) * v_pos.asDiagonal()) -
         diff_upwind(F, grids.x(), DiffSide::minus) * v_neg.asDiagonal() +
         e_neg.asDiagonal() * diff_v(F, grids.v(), DiffSide::plus) +
         e_pos.asDiagonal() * diff_v(F, grids.v(), DiffSide::minus);
}

Matrix dense_step(const Matrix& F, const PhaseGrid& grids, double dt, DenseMethod method,
                  const SchemeConfig& scheme) {
  require_shape(F, grids, "dense_step");
  scheme.validate();
  if (method == DenseMethod::sl) {
    if (!(dt >= 0.0)) throw StepSizeError("dense_step: time step must be non-negative");
    return sl_step(F, grids, dt, scheme);
  }
  if (!(dt > 0.0)) throw StepSizeError("dense_step: time step must be positive");
  const Vector E0 = field_for(F, grids, scheme);
  check_cfl(grids, E0, dt, scheme);
  auto rhs = [&](const Matrix& Y) { return dense_rhs(Y, grids, field_for(Y, grids, scheme), scheme); };
  const Matrix k1 = dense_rhs(F, grids, E0, scheme);
  switch (method) {
    case DenseMethod::euler:
      return F + dt * k1;
    case DenseMethod::rk2:
      return F + dt * rhs(F + 0.5 * dt * k1);
    case DenseMethod::rk4: {
      const Matrix k2 = rhs(F + 0.5 * dt * k1);
      const Matrix k3 = rhs(F + 0.5 * dt * k2);
      const Matrix k4 = rhs(F + dt * k3);
      return F + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    case DenseMethod::sl:
      break;
  }
  return sl_step(F, grids, dt, scheme);
}

DenseRun run_dense(const Matrix& F0, const PhaseGrid& grids, const ProblemSpec& prob, double dt,
                   Index nsteps, SchemeConfig scheme, DenseMethod method,
                   const DenseRunOptions& options) {
  require_shape(F0, grids, "run_dense");
  if (static_cast<std::int64_t>(grids.nx()) * grids.nv() > options.cap) {
    throw ResourceError("run_dense: grid exceeds the dense size cap");
  }
  if (nsteps < 0) throw ConfigError("run_dense: negative step count");
  scheme.field = prob.field_coupling();

  DenseRun run;
  Matrix F = F0;
  run.records.push_back(observe(F, grids, 0.0, scheme));
  run.snapshot_times.push_back(0.0);
  run.snapshots.push_back(F);
  for (Index n = 1; n <= nsteps; ++n) {
    try {
      F = dense_step(F, grids, dt, method, scheme);
    } catch (const StepSizeError& e) {
      throw StepSizeError("step " + std::to_string(n) + ": " + e.what());
    }
    const double t = static_cast<double>(n) * dt;
    run.records.push_back(observe(F, grids, t, scheme));
    const bool cadence = options.snapshot_every > 0 && n % options.snapshot_every == 0;
    if (cadence || n == nsteps) {
      run.snapshot_times.push_back(t);
      run.snapshots.push_back(F);
    }
  }
  return run;
}

Index rank_profile(const Matrix& F, double tol, RankNorm norm) {
  if (!(tol >= 0.0)) throw ConfigError("rank_profile: tol must be non-negative");
  if (!F.allFinite()) throw NumericError("rank_profile: non-finite input");
  Eigen::BDCSVD<Matrix> svd(F, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 1;
  if (tol == 0.0) {
    Index r = 0;
    while (r < sv.size() && sv(r) > 1e-13 * sv(0)) ++r;
    return std::max<Index>(r, 1);
  }
  const Index len = sv.size();
  if (norm == RankNorm::fro) {
    // tail(r) = sum_{j >= r} sigma_j^2
    const double total = sv.squaredNorm();
    double tail = total;
    for (Index r = 1; r <= len; ++r) {
      tail -= sv(r - 1) * sv(r - 1);
      if (std::sqrt(std::max(tail, 0.0)) <= tol * std::sqrt(total)) return r;
    }
    return len;
  }
  const double scale = F.cwiseAbs().maxCoeff();
  Matrix residual = F;
  for (Index r = 1; r <= len; ++r) {
    residual.noalias() -= sv(r - 1) * svd.matrixU().col(r - 1) * svd.matrixV().col(r - 1).transpose();
    if (residual.cwiseAbs().maxCoeff() <= tol * scale) return r;
  }
  return len;
}

Index field_rank_profile(const Matrix& F, const PhaseGrid& grids, double tol, RankNorm norm,
                         const SchemeConfig& scheme) {
  require_shape(F, grids, "field_rank_profile");
  if (!(tol >= 0.0)) throw ConfigError("field_rank_profile: tol must be non-negative");
  Eigen::BDCSVD<Matrix> svd(F, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 1;
  auto measure = [norm](const Vector& e) {
    return norm == RankNorm::max ? e.cwiseAbs().maxCoeff() : e.norm();
  };
  const Vector E_ref = field_for(F, grids, scheme);
  const double e_scale = measure(E_ref);
  const double w_ref = 0.5 * grids.x().delta() * E_ref.squaredNorm();
  Matrix approx = Matrix::Zero(F.rows(), F.cols());
  for (Index r = 1; r <= sv.size(); ++r) {
    approx.noalias() += sv(r - 1) * svd.matrixU().col(r - 1) * svd.matrixV().col(r - 1).transpose();
    const Vector E = field_for(approx, grids, scheme);
    const double e_err = measure(E - E_ref);
    const double w_err = std::abs(0.5 * grids.x().delta() * E.squaredNorm() - w_ref);
    const bool e_ok = e_scale > 0.0 ? e_err <= tol * e_scale : e_err == 0.0;
    const bool w_ok = w_ref > 0.0 ? w_err <= tol * w_ref : w_err == 0.0;
    if (e_ok && w_ok) return r;
  }
  return sv.size();
}

}  // namespace kinlr
