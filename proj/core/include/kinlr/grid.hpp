#pragma once

#include "kinlr/types.hpp"

namespace kinlr {

/// Uniform periodic grid on [a, b) with n nodes x_k = a + k * delta.
/// The right endpoint is identified with the left one and is not stored.
class Grid1D {
 public:
  Grid1D(Index n, double a, double b);

  Index n() const { return n_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double delta() const { return delta_; }
  double length() const { return b_ - a_; }

  double node(Index k) const { return a_ + static_cast<double>(k) * delta_; }
  Vector nodes() const;

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  Index n_;
  double a_;
  double b_;
  double delta_;
};

/// Tensor product of a periodic physical grid and a velocity grid that is
/// symmetric about zero (treated periodically as well).
class PhaseGrid {
 public:
  PhaseGrid(Grid1D xg, Grid1D vg);

  const Grid1D& x() const { return xg_; }
  const Grid1D& v() const { return vg_; }

  Index nx() const { return xg_.n(); }
  Index nv() const { return vg_.n(); }

  friend bool operator==(const PhaseGrid&, const PhaseGrid&) = default;

 private:
  Grid1D xg_;
  Grid1D vg_;
};

enum class DiffSide {
  plus,   ///< backward difference, upwind for positive advection speed
  minus,  ///< forward difference, upwind for negative advection speed
};

/// Discrete inner product delta * sum_k u_k w_k.
double inner(const Vector& u, const Vector& w, const Grid1D& g);

// The difference and shift operators act along the grid direction, i.e. on
// every column of the argument independently.

Matrix diff_upwind(const Matrix& u, const Grid1D& g, DiffSide side);
Vector diff_upwind(const Vector& u, const Grid1D& g, DiffSide side);

Matrix diff_centered(const Matrix& u, const Grid1D& g);
Vector diff_centered(const Vector& u, const Grid1D& g);

/// (shift(u, s))_k = u_{(k - s) mod n}.
Matrix shift(const Matrix& u, const Grid1D& g, Index offset);
Vector shift(const Vector& u, const Grid1D& g, Index offset);

/// Spectral solve of -phi'' = rho on the periodic grid, returning the
/// zero-mean field E = -phi'. Throws SolvabilityError when rho has a mean
/// larger than 1e-10 * max|rho|.
Vector solve_efield(const Vector& rho, const Grid1D& g);

/// Spectral derivative, used to verify solve_efield.
Vector diff_spectral(const Vector& u, const Grid1D& g);

}  // namespace kinlr
