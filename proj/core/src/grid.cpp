#include "kinlr/grid.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "kinlr/errors.hpp"

namespace kinlr {

namespace {

void require_length(Index len, const Grid1D& g, const char* what) {
  if (len != g.n()) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(g.n()) +
                         ", got " + std::to_string(len));
  }
}

// Angular wavenumber of DFT index j; the Nyquist mode is reported as 0 so
// that odd derivatives drop it.
double wavenumber(Index j, const Grid1D& g) {
  const Index n = g.n();
  const double base = 2.0 * std::numbers::pi / g.length();
  if (2 * j == n) return 0.0;
  const Index signed_j = (2 * j < n) ? j : j - n;
  return base * static_cast<double>(signed_j);
}

}  // namespace

Grid1D::Grid1D(Index n, double a, double b) : n_(n), a_(a), b_(b), delta_(0.0) {
  if (n < 4) throw ConfigError("Grid1D: need at least 4 nodes, got " + std::to_string(n));
  if (!(b > a)) throw ConfigError("Grid1D: right endpoint must exceed left endpoint");
  delta_ = (b - a) / static_cast<double>(n);
}

Vector Grid1D::nodes() const {
  Vector x(n_);
  for (Index k = 0; k < n_; ++k) x(k) = node(k);
  return x;
}

PhaseGrid::PhaseGrid(Grid1D xg, Grid1D vg) : xg_(xg), vg_(vg) {
  if (std::abs(vg_.a() + vg_.b()) > 1e-12 * vg_.length()) {
    throw ConfigError("PhaseGrid: velocity grid must be symmetric about zero");
  }
}

double inner(const Vector& u, const Vector& w, const Grid1D& g) {
  require_length(u.size(), g, "inner");
  require_length(w.size(), g, "inner");
  return g.delta() * u.dot(w);
}

Matrix diff_upwind(const Matrix& u, const Grid1D& g, DiffSide side) {
  require_length(u.rows(), g, "diff_upwind");
  const Index n = g.n();
  const double inv = 1.0 / g.delta();
  Matrix out(n, u.cols());
  if (side == DiffSide::plus) {
    out.bottomRows(n - 1) = (u.bottomRows(n - 1) - u.topRows(n - 1)) * inv;
    out.row(0) = (u.row(0) - u.row(n - 1)) * inv;
  } else {
    out.topRows(n - 1) = (u.bottomRows(n - 1) - u.topRows(n - 1)) * inv;
    out.row(n - 1) = (u.row(0) - u.row(n - 1)) * inv;
  }
  return out;
}

Vector diff_upwind(const Vector& u, const Grid1D& g, DiffSide side) {
  return diff_upwind(Matrix(u), g, side).col(0);
}

Matrix diff_centered(const Matrix& u, const Grid1D& g) {
  require_length(u.rows(), g, "diff_centered");
  const Index n = g.n();
  const double inv = 0.5 / g.delta();
  Matrix out(n, u.cols());
  out.middleRows(1, n - 2) = (u.bottomRows(n - 2) - u.topRows(n - 2)) * inv;
  out.row(0) = (u.row(1) - u.row(n - 1)) * inv;
  out.row(n - 1) = (u.row(0) - u.row(n - 2)) * inv;
  return out;
}

Vector diff_centered(const Vector& u, const Grid1D& g) {
  return diff_centered(Matrix(u), g).col(0);
}

Matrix shift(const Matrix& u, const Grid1D& g, Index offset) {
  require_length(u.rows(), g, "shift");
  const Index n = g.n();
  const Index s = ((offset % n) + n) % n;
  if (s == 0) return u;
  Matrix out(n, u.cols());
  out.bottomRows(n - s) = u.topRows(n - s);
  out.topRows(s) = u.bottomRows(s);
  return out;
}

Vector shift(const Vector& u, const Grid1D& g, Index offset) {
  return shift(Matrix(u), g, offset).col(0);
}

Vector solve_efield(const Vector& rho, const Grid1D& g) {
  require_length(rho.size(), g, "solve_efield");
  const double scale = rho.cwiseAbs().maxCoeff();
  const double mean = rho.mean();
  if (std::abs(mean) > 1e-10 * scale) {
    throw SolvabilityError("solve_efield: charge density has non-zero mean " +
                           std::to_string(mean));
  }
  Eigen::FFT<double> fft;
  Eigen::VectorXcd rho_hat;
  fft.fwd(rho_hat, rho);
  Eigen::VectorXcd e_hat(g.n());
  const std::complex<double> i_unit(0.0, 1.0);
  for (Index j = 0; j < g.n(); ++j) {
    const double kappa = wavenumber(j, g);
    e_hat(j) = (kappa == 0.0) ? std::complex<double>(0.0) : rho_hat(j) / (i_unit * kappa);
  }
  Eigen::VectorXcd e;
  fft.inv(e, e_hat);
  return e.real();
}

Vector diff_spectral(const Vector& u, const Grid1D& g) {
  require_length(u.size(), g, "diff_spectral");
  Eigen::FFT<double> fft;
  Eigen::VectorXcd u_hat;
  fft.fwd(u_hat, u);
  const std::complex<double> i_unit(0.0, 1.0);
  for (Index j = 0; j < g.n(); ++j) u_hat(j) *= i_unit * wavenumber(j, g);
  Eigen::VectorXcd du;
  fft.inv(du, u_hat);
  return du.real();
}

}  // namespace kinlr
