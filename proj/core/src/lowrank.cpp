#include "kinlr/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "kinlr/errors.hpp"

namespace kinlr {

namespace {

constexpr double kRoundoffFloor = 1e-15;

// Unnormalized candidate directions used to complete a rank-deficient basis:
// low Fourier modes first, then unit vectors.
Vector completion_candidate(Index c, Index n) {
  Vector out = Vector::Zero(n);
  if (c < n) {
    const Index freq = (c + 1) / 2;
    const bool use_sin = (c % 2) == 0 && c > 0;
    for (Index k = 0; k < n; ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(freq * k) /
                           static_cast<double>(n);
      out(k) = (c == 0) ? 1.0 : (use_sin ? std::sin(phase) : std::cos(phase));
    }
  } else {
    out(c - n) = 1.0;
  }
  return out;
}

// Projects w against the columns of Q (which may contain zero columns) until
// the norm stops dropping substantially. Returns the accumulated coefficients.
Vector reorthogonalize(const Matrix& Q, Vector& w) {
  Vector coeff = Vector::Zero(Q.cols());
  if (Q.cols() == 0) return coeff;
  double before = w.norm();
  for (int pass = 0; pass < 3; ++pass) {
    const Vector proj = Q.transpose() * w;
    w.noalias() -= Q * proj;
    coeff += proj;
    const double after = w.norm();
    if (pass > 0 && after > 0.5 * before) break;
    before = after;
  }
  return coeff;
}

// Thin factorization A = Q R of any width. For m <= n this is orthonormalize;
// wider inputs use a Householder QR and return an n x n Q.
QRFactors factor_any(const Matrix& A, const Grid1D& g) {
  if (A.cols() <= g.n()) return orthonormalize(A, g);
  const double sq = std::sqrt(g.delta());
  Eigen::HouseholderQR<Matrix> qr(sq * A);
  QRFactors out;
  out.Q = (qr.householderQ() * Matrix::Identity(g.n(), g.n())) / sq;
  out.R = qr.matrixQR().topRows(g.n()).triangularView<Eigen::Upper>();
  return out;
}

struct Factors {
  Matrix U;
  Matrix S;
  Matrix V;
};

Factors round_factors(const FactoredSum& fs, const TruncationPolicy& policy,
                      const PhaseGrid& grids, bool allow_empty, TruncationReport* report) {
  if (fs.width() == 0) throw EmptyInputError("round: factored sum has no terms");
  // the core may be rectangular when one side was completed to a full basis
  if (fs.U.rows() != grids.nx() || fs.V.rows() != grids.nv() || fs.U.cols() != fs.S.rows() ||
      fs.V.cols() != fs.S.cols()) {
    throw DimensionError("round: factored sum is inconsistent with the grids");
  }
  const QRFactors qx = factor_any(fs.U, grids.x());
  const QRFactors qv = factor_any(fs.V, grids.v());
  const Matrix core = qx.R * fs.S * qv.R.transpose();
  Eigen::BDCSVD<Matrix> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (!sv.allFinite()) throw NumericError("round: non-finite singular values");

  double discarded = 0.0;
  Index r = select_rank(sv, policy, &discarded);
  if (allow_empty && policy.mode != TruncationPolicy::Mode::fixed_rank) {
    // select_rank floors at one; the remainder of a conservative split may vanish
    double tail = 0.0;
    for (Index j = sv.size() - 1; j >= 0; --j) tail += sv(j) * sv(j);
    if (tail <= policy.theta * policy.theta) {
      r = 0;
      discarded = tail;
    }
  }
  if (report) {
    report->sv = sv;
    report->rank_before = fs.width();
    report->rank_after = r;
    report->discarded_sq = discarded;
  }
  Factors out;
  out.U = qx.Q * svd.matrixU().leftCols(r);
  out.V = qv.Q * svd.matrixV().leftCols(r);
  out.S = sv.head(r).asDiagonal();
  return out;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

LowRankState::LowRankState(PhaseGrid grids, Matrix U, Matrix S, Matrix V)
    : grids_(grids), U_(std::move(U)), S_(std::move(S)), V_(std::move(V)) {
  const Index r = S_.rows();
  if (r < 1) throw DimensionError("LowRankState: rank must be at least 1");
  if (S_.cols() != r || U_.cols() != r || V_.cols() != r) {
    throw DimensionError("LowRankState: factor widths disagree with the core");
  }
  if (U_.rows() != grids_.nx() || V_.rows() != grids_.nv()) {
    throw DimensionError("LowRankState: factor heights disagree with the grids");
  }
  if (r > std::min(grids_.nx(), grids_.nv())) {
    throw DimensionError("LowRankState: rank exceeds min(Nx, Nv)");
  }
}

double LowRankState::orthonormality_residual() const {
  const Index r = rank();
  const Matrix gx = grids_.x().delta() * (U_.transpose() * U_) - Matrix::Identity(r, r);
  const Matrix gv = grids_.v().delta() * (V_.transpose() * V_) - Matrix::Identity(r, r);
  return std::max(gx.cwiseAbs().maxCoeff(), gv.cwiseAbs().maxCoeff());
}

TruncationPolicy TruncationPolicy::fixed(Index r) {
  TruncationPolicy p;
  p.mode = Mode::fixed_rank;
  p.r_target = r;
  p.r_max = std::max<Index>(r, 1);
  return p;
}

TruncationPolicy TruncationPolicy::tolerance(double theta, Index r_max) {
  TruncationPolicy p;
  p.mode = Mode::tolerance;
  p.theta = theta;
  p.r_max = r_max;
  return p;
}

TruncationPolicy TruncationPolicy::conservative(double theta, Index r_max) {
  TruncationPolicy p = tolerance(theta, r_max);
  p.mode = Mode::conservative;
  return p;
}

void TruncationPolicy::validate() const {
  if (!(theta >= 0.0)) throw ConfigError("TruncationPolicy: theta must be non-negative");
  if (r_target < 1 || r_target > r_max) {
    throw ConfigError("TruncationPolicy: need 1 <= r_target <= r_max");
  }
  if (mode == Mode::conservative && r_max < 3) {
    throw ConfigError("TruncationPolicy: conservative truncation needs r_max >= 3");
  }
}

void FactoredSum::append(const Matrix& Ui, const Matrix& Si, const Matrix& Vi, double scale) {
  if (Ui.cols() != Si.rows() || Vi.cols() != Si.cols()) {
    throw DimensionError("FactoredSum::append: term widths disagree");
  }
  if (width() > 0 && (Ui.rows() != U.rows() || Vi.rows() != V.rows())) {
    throw DimensionError("FactoredSum::append: term heights disagree");
  }
  Matrix u(Ui.rows(), U.cols() + Ui.cols());
  u << U, Ui;
  Matrix v(Vi.rows(), V.cols() + Vi.cols());
  v << V, Vi;
  S = block_diag(S, scale * Si);
  U = std::move(u);
  V = std::move(v);
}

void FactoredSum::append(const FactoredSum& other, double scale) {
  append(other.U, other.S, other.V, scale);
}

QRFactors orthonormalize(const Matrix& A, const Grid1D& g) {
  const Index n = A.rows();
  const Index m = A.cols();
  if (n != g.n()) throw DimensionError("orthonormalize: row count differs from grid size");
  if (m > n) throw DimensionError("orthonormalize: more columns than grid nodes");
  if (!A.allFinite()) throw NumericError("orthonormalize: non-finite input");

  const double sq = std::sqrt(g.delta());
  const Matrix B = sq * A;
  const double threshold = 1e-13 * B.norm();

  Matrix Q = Matrix::Zero(n, m);
  Matrix R = Matrix::Zero(m, m);
  std::vector<Index> deficient;
  for (Index j = 0; j < m; ++j) {
    Vector w = B.col(j);
    const Vector coeff = reorthogonalize(Q.leftCols(j), w);
    R.col(j).head(j) = coeff;
    const double nrm = w.norm();
    if (nrm <= threshold || nrm == 0.0) {
      deficient.push_back(j);
    } else {
      Q.col(j) = w / nrm;
      R(j, j) = nrm;
    }
  }

  // take the first candidate with a solid residual; when the basis is nearly
  // complete none may qualify, and the largest residual is used instead
  Index candidate = 0;
  for (Index j : deficient) {
    Vector best;
    double best_nrm = 0.0;
    for (Index c = candidate; c < 2 * n; ++c) {
      Vector w = completion_candidate(c, n);
      w /= w.norm();
      reorthogonalize(Q, w);
      const double nrm = w.norm();
      if (nrm > best_nrm) {
        best_nrm = nrm;
        best = w;
      }
      if (nrm > 0.5) {
        candidate = c + 1;
        break;
      }
    }
    if (best_nrm < 1e-6) throw NumericError("orthonormalize: basis completion failed");
    best /= best_nrm;
    reorthogonalize(Q, best);
    Q.col(j) = best / best.norm();
  }
  return {Q / sq, R};
}

Index select_rank(const Vector& sv, const TruncationPolicy& policy, double* discarded_sq) {
  const Index len = sv.size();
  if (len == 0) {
    if (discarded_sq) *discarded_sq = 0.0;
    return 0;
  }
  // tail(r) = sum_{j >= r} sigma_j^2, accumulated from the smallest values
  Vector tail(len + 1);
  tail(len) = 0.0;
  for (Index j = len - 1; j >= 0; --j) tail(j) = tail(j + 1) + sv(j) * sv(j);

  Index r = 0;
  if (policy.mode == TruncationPolicy::Mode::fixed_rank) {
    r = std::min(policy.r_target, len);
  } else {
    // values below the roundoff floor of the largest one never count as rank
    const double floor = kRoundoffFloor * sv(0);
    const double budget = std::max(policy.theta * policy.theta, floor * floor);
    while (r < len && tail(r) > budget) ++r;
  }
  r = std::clamp<Index>(r, 1, std::min(len, std::max<Index>(policy.r_max, 1)));
  if (discarded_sq) *discarded_sq = tail(r);
  return r;
}

LowRankState round(const FactoredSum& fs, const TruncationPolicy& policy, const PhaseGrid& grids,
                   TruncationReport* report) {
  policy.validate();
  if (policy.mode == TruncationPolicy::Mode::conservative) {
    return conservative_round(fs, policy, grids, report);
  }
  Factors f = round_factors(fs, policy, grids, false, report);
  return LowRankState(grids, std::move(f.U), std::move(f.S), std::move(f.V));
}

LowRankState truncate(const LowRankState& s, const TruncationPolicy& policy,
                      TruncationReport* report) {
  policy.validate();
  if (policy.mode == TruncationPolicy::Mode::conservative) {
    return conservative_truncate(s, policy, report);
  }
  Eigen::JacobiSVD<Matrix> svd(s.S(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  double discarded = 0.0;
  const Index r = select_rank(sv, policy, &discarded);
  if (report) {
    report->sv = sv;
    report->rank_before = s.rank();
    report->rank_after = r;
    report->discarded_sq = discarded;
  }
  return LowRankState(s.grids(), s.U() * svd.matrixU().leftCols(r),
                      Matrix(sv.head(r).asDiagonal()), s.V() * svd.matrixV().leftCols(r));
}

LowRankState conservative_truncate(const LowRankState& s, const TruncationPolicy& policy,
                                   TruncationReport* report) {
  const PhaseGrid& grids = s.grids();
  const Grid1D& vg = grids.v();
  if (vg.n() < 6) throw DimensionError("conservative_truncate: need at least 6 velocity nodes");
  if (!(policy.theta >= 0.0)) throw ConfigError("conservative_truncate: theta must be >= 0");

  const Vector v = vg.nodes();
  // any positive weight keeps the moments; the floor bounds the conditioning of
  // the 1/w geometry on wide velocity grids
  const Vector w = (-0.5 * v.array().square()).exp().max(1e-8).matrix();
  Matrix B(vg.n(), 3);
  B.col(0) = w;
  B.col(1) = v.cwiseProduct(w);
  B.col(2) = v.cwiseProduct(B.col(1));
  // <a, b>_{1/w} = dv sum a b / w
  const Vector inv_w = vg.delta() * w.cwiseInverse();
  const Matrix gram = B.transpose() * inv_w.asDiagonal() * B;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericError("conservative_truncate: singular moment Gram");
  // Phi = B L^{-T} is orthonormal in <.,.>_{1/w}
  const Matrix phi = llt.matrixU().solve<Eigen::OnTheRight>(B);

  const Matrix coeff = phi.transpose() * inv_w.asDiagonal() * s.V();  // 3 x r
  const Matrix v_rem = s.V() - phi * coeff;
  const Matrix x_cons = s.U() * s.S() * coeff.transpose();  // f_cons = x_cons phi^T

  FactoredSum remainder;
  remainder.U = s.U();
  remainder.S = s.S();
  remainder.V = v_rem;
  TruncationPolicy rem_policy = TruncationPolicy::tolerance(
      policy.theta,
      std::max<Index>(std::min({policy.r_max, grids.nx(), grids.nv()}) - 3, 0));
  if (rem_policy.r_max == 0) rem_policy.theta = std::numeric_limits<double>::infinity();
  rem_policy.r_max = std::max<Index>(rem_policy.r_max, 1);
  Factors rem = round_factors(remainder, rem_policy, grids, true, report);
  if (report) report->rank_before = s.rank();

  FactoredSum combined;
  combined.U.resize(grids.nx(), 3 + rem.U.cols());
  combined.U << x_cons, rem.U;
  combined.V.resize(grids.nv(), 3 + rem.V.cols());
  combined.V << phi, rem.V;
  combined.S = block_diag(Matrix::Identity(3, 3), rem.S);
  Factors out = round_factors(combined, TruncationPolicy::lossless(), grids, false, nullptr);
  if (report) report->rank_after = out.S.rows();
  return LowRankState(grids, std::move(out.U), std::move(out.S), std::move(out.V));
}

LowRankState conservative_round(const FactoredSum& fs, const TruncationPolicy& policy,
                                const PhaseGrid& grids, TruncationReport* report) {
  Factors f = round_factors(fs, TruncationPolicy::lossless(), grids, false, nullptr);
  const LowRankState full(grids, std::move(f.U), std::move(f.S), std::move(f.V));
  return conservative_truncate(full, policy, report);
}

LowRankState recompress(const FactoredSum& fs, const TruncationPolicy& policy,
                        const PhaseGrid& grids, TruncationReport* report) {
  return round(fs, policy, grids, report);
}

Matrix to_full(const LowRankState& s, std::int64_t cap) {
  const std::int64_t entries = static_cast<std::int64_t>(s.grids().nx()) * s.grids().nv();
  if (entries > cap) {
    throw ResourceError("to_full: " + std::to_string(entries) + " entries exceed the cap of " +
                        std::to_string(cap));
  }
  return s.U() * s.S() * s.V().transpose();
}

LowRankState from_full(const Matrix& F, const PhaseGrid& grids, const TruncationPolicy& policy,
                       TruncationReport* report) {
  if (F.rows() != grids.nx() || F.cols() != grids.nv()) {
    throw DimensionError("from_full: matrix shape differs from the grids");
  }
  policy.validate();
  const double sx = std::sqrt(grids.x().delta());
  const double sv_scale = std::sqrt(grids.v().delta());
  Eigen::BDCSVD<Matrix> svd(sx * sv_scale * F, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  double discarded = 0.0;
  const Index r = select_rank(sv, policy, &discarded);
  if (report) {
    report->sv = sv;
    report->rank_before = sv.size();
    report->rank_after = r;
    report->discarded_sq = discarded;
  }
  if (policy.mode == TruncationPolicy::Mode::conservative) {
    // the conservative split must see the whole function, not the cut one
    LowRankState whole(grids, svd.matrixU() / sx, Matrix(sv.asDiagonal()),
                       svd.matrixV() / sv_scale);
    return conservative_truncate(whole, policy, report);
  }
  return LowRankState(grids, svd.matrixU().leftCols(r) / sx, Matrix(sv.head(r).asDiagonal()),
                      svd.matrixV().leftCols(r) / sv_scale);
}

Moments moments(const LowRankState& s) {
  const Grid1D& xg = s.grids().x();
  const Grid1D& vg = s.grids().v();
  const Vector v = vg.nodes();
  const Vector xw = xg.delta() * s.U().colwise().sum().transpose();  // r
  const Vector sx = s.S().transpose() * xw;                          // (xw^T S)^T
  const Matrix& V = s.V();
  Moments m;
  m.mass = vg.delta() * sx.dot(V.colwise().sum().transpose());
  m.momentum = vg.delta() * sx.dot(V.transpose() * v);
  m.kinetic_energy = vg.delta() * sx.dot(V.transpose() * (0.5 * v.array().square()).matrix());
  return m;
}

Moments moments(const Matrix& F, const PhaseGrid& grids) {
  const Vector v = grids.v().nodes();
  const double cell = grids.x().delta() * grids.v().delta();
  const Vector per_v = F.colwise().sum().transpose();
  Moments m;
  m.mass = cell * per_v.sum();
  m.momentum = cell * per_v.dot(v);
  m.kinetic_energy = cell * per_v.dot((0.5 * v.array().square()).matrix());
  return m;
}

}  // namespace kinlr
