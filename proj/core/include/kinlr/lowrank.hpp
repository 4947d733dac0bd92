#pragma once

#include <cstdint>
#include <limits>

#include "kinlr/grid.hpp"
#include "kinlr/types.hpp"

namespace kinlr {

/// Factored phase-space density f = U S V^T on a PhaseGrid.
///
/// Columns of U (Nx x r) and V (Nv x r) hold node values of the basis
/// functions and are orthonormal in the grid inner products, i.e.
/// U^T (dx U) = I and V^T (dv V) = I. The weighted Frobenius norm of f
/// therefore equals the Frobenius norm of S.
class LowRankState {
 public:
  LowRankState(PhaseGrid grids, Matrix U, Matrix S, Matrix V);

  const PhaseGrid& grids() const { return grids_; }
  const Matrix& U() const { return U_; }
  const Matrix& S() const { return S_; }
  const Matrix& V() const { return V_; }
  Index rank() const { return S_.rows(); }

  /// Largest entrywise deviation of either Gram matrix from the identity.
  double orthonormality_residual() const;

  /// sqrt(dx dv sum f^2), evaluated from the core.
  double weighted_norm() const { return S_.norm(); }

 private:
  PhaseGrid grids_;
  Matrix U_;
  Matrix S_;
  Matrix V_;
};

/// How a factorization is cut back after it has grown.
struct TruncationPolicy {
  enum class Mode { fixed_rank, tolerance, conservative };

  Mode mode = Mode::tolerance;
  Index r_target = 1;
  /// Budget for the discarded singular values: sum_{j>r'} sigma_j^2 <= theta^2.
  double theta = 0.0;
  Index r_max = std::numeric_limits<Index>::max() / 4;

  static TruncationPolicy fixed(Index r);
  static TruncationPolicy tolerance(double theta, Index r_max = std::numeric_limits<Index>::max() / 4);
  static TruncationPolicy conservative(double theta, Index r_max = std::numeric_limits<Index>::max() / 4);
  /// Keeps every singular value above the roundoff floor (1e-15 sigma_1).
  static TruncationPolicy lossless() { return tolerance(0.0); }

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Sum of factored terms U_cat S_blk V_cat^T without orthonormality.
struct FactoredSum {
  Matrix U;
  Matrix S;
  Matrix V;

  FactoredSum() = default;
  FactoredSum(Index nx, Index nv) : U(nx, 0), S(0, 0), V(nv, 0) {}
  explicit FactoredSum(const LowRankState& s) : U(s.U()), S(s.S()), V(s.V()) {}

  Index width() const { return S.rows(); }

  /// Appends scale * Ui Si Vi^T as a new diagonal block.
  void append(const Matrix& Ui, const Matrix& Si, const Matrix& Vi, double scale = 1.0);
  void append(const FactoredSum& other, double scale = 1.0);

  Matrix assemble() const { return U * S * V.transpose(); }
};

/// Outcome of a truncation: the full spectrum and what was dropped.
struct TruncationReport {
  Vector sv;                  ///< all singular values before the cut, descending
  Index rank_before = 0;
  Index rank_after = 0;
  double discarded_sq = 0.0;  ///< sum of squared discarded singular values
};

struct QRFactors {
  Matrix Q;
  Matrix R;
};

/// A = Q R with Q^T (delta Q) = I and R upper triangular (m <= g.n()).
/// Columns of A that are numerically dependent on the preceding ones get a
/// zero row in R; the matching column of Q is completed with a vector that is
/// orthonormal to all others.
QRFactors orthonormalize(const Matrix& A, const Grid1D& g);

/// Rank chosen by a policy for a descending spectrum (always >= 1 unless the
/// spectrum is empty). Tolerance modes keep the smallest r whose tail
/// sum_{j>=r} sigma_j^2 is at most max(theta^2, (1e-15 sigma_1)^2).
/// Reports the discarded squared sum through `discarded_sq`.
Index select_rank(const Vector& sv, const TruncationPolicy& policy, double* discarded_sq = nullptr);

/// Recompression of a factored sum (two QRs and an SVD of the small core).
LowRankState round(const FactoredSum& fs, const TruncationPolicy& policy, const PhaseGrid& grids,
                   TruncationReport* report = nullptr);

/// SVD truncation of an existing state; dispatches to conservative_truncate
/// for the conservative mode.
LowRankState truncate(const LowRankState& s, const TruncationPolicy& policy,
                      TruncationReport* report = nullptr);

/// Truncation that leaves the discrete mass, momentum and kinetic energy
/// untouched: the part of f in span{w, v w, v^2 w} (w the unit Maxwellian)
/// is split off in the 1/w-weighted inner product and only the remainder is
/// compressed with budget theta.
LowRankState conservative_truncate(const LowRankState& s, const TruncationPolicy& policy,
                                   TruncationReport* report = nullptr);

/// Recompresses a factored sum conservatively (lossless round followed by
/// conservative_truncate).
LowRankState conservative_round(const FactoredSum& fs, const TruncationPolicy& policy,
                                const PhaseGrid& grids, TruncationReport* report = nullptr);

/// Dispatches on policy.mode between round and conservative_round.
LowRankState recompress(const FactoredSum& fs, const TruncationPolicy& policy,
                        const PhaseGrid& grids, TruncationReport* report = nullptr);

inline constexpr std::int64_t kDefaultDenseCap = std::int64_t{1} << 24;

/// U S V^T. Throws ResourceError when Nx * Nv exceeds `cap`.
Matrix to_full(const LowRankState& s, std::int64_t cap = kDefaultDenseCap);

/// Weighted SVD of a full matrix of node values, truncated per policy.
LowRankState from_full(const Matrix& F, const PhaseGrid& grids, const TruncationPolicy& policy,
                       TruncationReport* report = nullptr);

struct Moments {
  double mass = 0.0;
  double momentum = 0.0;
  double kinetic_energy = 0.0;
};

/// Mass, momentum and kinetic energy evaluated in factored form.
Moments moments(const LowRankState& s);

/// Same reductions on a full matrix of node values.
Moments moments(const Matrix& F, const PhaseGrid& grids);

}  // namespace kinlr
