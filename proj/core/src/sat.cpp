#include "kinlr/sat.hpp"

#include <string>

#include "kinlr/errors.hpp"

namespace kinlr {

namespace {

struct Weights {
  Vector center;
  Vector plus;   // paired with shift +1
  Vector minus;  // paired with shift -1
};

// Linear-interpolation weights for a departure point at x - c delta.
Weights interpolation_weights(const Vector& courant) {
  Weights w;
  w.center = (1.0 - courant.array().abs()).matrix();
  w.plus = courant.cwiseMax(0.0);
  w.minus = (-courant).cwiseMax(0.0);
  return w;
}

void require_courant(const Vector& courant, const char* what) {
  const double c = courant.size() > 0 ? courant.cwiseAbs().maxCoeff() : 0.0;
  if (c > 1.0 + 1e-14) {
    throw StepSizeError(std::string("step_sl_split: ") + what + " Courant number " +
                        std::to_string(c) + " exceeds 1");
  }
}

void record(StepStats* stats, Vector E, TruncationReport report) {
  if (!stats) return;
  stats->field = std::move(E);
  stats->truncated = true;
  stats->truncation = std::move(report);
}

Vector start_step(const LowRankState& s, double dt, const SchemeConfig& scheme) {
  scheme.validate();
  if (!(dt > 0.0)) throw StepSizeError("time step must be positive");
  Vector E = field_for(s, scheme);
  check_cfl(s.grids(), E, dt, scheme);
  return E;
}

}  // namespace

FactoredSum sat_rhs_terms(const FactoredSum& fs, const PhaseGrid& grids, const Vector& E,
                          const SchemeConfig& scheme) {
  if (E.size() != grids.nx()) throw DimensionError("sat_rhs_terms: E length differs from Nx");
  if (fs.U.rows() != grids.nx() || fs.V.rows() != grids.nv()) {
    throw DimensionError("sat_rhs_terms: factors disagree with the grids");
  }
  const Vector v = grids.v().nodes();
  FactoredSum out(grids.nx(), grids.nv());
  if (scheme.space_scheme == SpaceScheme::centered) {
    out.append(diff_centered(fs.U, grids.x()), fs.S, v.asDiagonal() * fs.V, -1.0);
    out.append(E.asDiagonal() * fs.U, fs.S, diff_centered(fs.V, grids.v()));
    return out;
  }
  const Vector v_pos = v.cwiseMax(0.0);
  const Vector v_neg = v.cwiseMin(0.0);
  const Vector e_pos = E.cwiseMax(0.0);
  const Vector e_neg = E.cwiseMin(0.0);
  out.append(diff_upwind(fs.U, grids.x(), DiffSide::plus), fs.S, v_pos.asDiagonal() * fs.V, -1.0);
  out.append(diff_upwind(fs.U, grids.x(), DiffSide::minus), fs.S, v_neg.asDiagonal() * fs.V, -1.0);
  out.append(e_neg.asDiagonal() * fs.U, fs.S, diff_upwind(fs.V, grids.v(), DiffSide::plus));
  out.append(e_pos.asDiagonal() * fs.U, fs.S, diff_upwind(fs.V, grids.v(), DiffSide::minus));
  return out;
}

FactoredSum sat_rhs_terms(const LowRankState& s, const Vector& E, const SchemeConfig& scheme) {
  return sat_rhs_terms(FactoredSum(s), s.grids(), E, scheme);
}

LowRankState step_sat_euler(const LowRankState& s, double dt, const SchemeConfig& scheme,
                            const TruncationPolicy& policy, StepStats* stats) {
  policy.validate();
  Vector E = start_step(s, dt, scheme);
  FactoredSum fs(s);
  fs.append(sat_rhs_terms(s, E, scheme), dt);
  TruncationReport report;
  LowRankState out = recompress(fs, policy, s.grids(), &report);
  record(stats, std::move(E), std::move(report));
  return out;
}

LowRankState step_sat_rk(const LowRankState& s, double dt, int stages, const SchemeConfig& scheme,
                         const TruncationPolicy& policy, bool truncate_stages, StepStats* stats) {
  if (stages != 2 && stages != 4) throw ConfigError("step_sat_rk: stages must be 2 or 4");
  policy.validate();
  Vector E0 = start_step(s, dt, scheme);
  const PhaseGrid& grids = s.grids();

  TruncationPolicy stage_policy = TruncationPolicy::lossless();
  if (truncate_stages) {
    stage_policy = policy;
    stage_policy.theta = policy.theta / stages;
  }
  auto rhs = [&](const LowRankState& y) {
    return sat_rhs_terms(y, field_for(y, scheme), scheme);
  };
  auto stage = [&](const FactoredSum& k, double h) {
    FactoredSum y(s);
    y.append(k, h);
    return round(y, stage_policy, grids);
  };

  FactoredSum result(s);
  if (stages == 2) {
    const FactoredSum k1 = sat_rhs_terms(s, E0, scheme);
    const FactoredSum k2 = rhs(stage(k1, 0.5 * dt));
    result.append(k2, dt);
  } else {
    const FactoredSum k1 = sat_rhs_terms(s, E0, scheme);
    const FactoredSum k2 = rhs(stage(k1, 0.5 * dt));
    const FactoredSum k3 = rhs(stage(k2, 0.5 * dt));
    const FactoredSum k4 = rhs(stage(k3, dt));
    result.append(k1, dt / 6.0);
    result.append(k2, dt / 3.0);
    result.append(k3, dt / 3.0);
    result.append(k4, dt / 6.0);
  }
  TruncationReport report;
  LowRankState out = recompress(result, policy, grids, &report);
  record(stats, std::move(E0), std::move(report));
  return out;
}

LowRankState step_sl_split(const LowRankState& s, double dt, const TruncationPolicy& policy,
                           const SchemeConfig& scheme, StepStats* stats) {
  policy.validate();
  if (!(dt >= 0.0)) throw StepSizeError("step_sl_split: time step must be non-negative");
  const PhaseGrid& grids = s.grids();
  const Grid1D& xg = grids.x();
  const Grid1D& vg = grids.v();

  const Vector cx = (dt / xg.delta()) * vg.nodes();
  require_courant(cx, "x");
  const Weights wx = interpolation_weights(cx);
  FactoredSum fx(grids.nx(), grids.nv());
  fx.append(s.U(), s.S(), wx.center.asDiagonal() * s.V());
  fx.append(shift(s.U(), xg, 1), s.S(), wx.plus.asDiagonal() * s.V());
  fx.append(shift(s.U(), xg, -1), s.S(), wx.minus.asDiagonal() * s.V());
  TruncationReport report;
  const LowRankState half = recompress(fx, policy, grids, &report);

  // d_t f - E d_v f = 0 moves f with speed -E in v
  Vector E = field_for(half, scheme);
  const Vector cv = (-dt / vg.delta()) * E;
  require_courant(cv, "v");
  const Weights wv = interpolation_weights(cv);
  FactoredSum fv(grids.nx(), grids.nv());
  fv.append(wv.center.asDiagonal() * half.U(), half.S(), half.V());
  fv.append(wv.plus.asDiagonal() * half.U(), half.S(), shift(half.V(), vg, 1));
  fv.append(wv.minus.asDiagonal() * half.U(), half.S(), shift(half.V(), vg, -1));
  LowRankState out = recompress(fv, policy, grids, &report);
  record(stats, std::move(E), std::move(report));
  return out;
}

}  // namespace kinlr
