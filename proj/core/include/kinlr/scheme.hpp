#pragma once

namespace kinlr {

enum class SpaceScheme {
  upwind,    ///< first-order upwind; characteristic upwinding inside projected K/L systems
  centered,  ///< second-order centered differences everywhere
};

enum class SubstepSolver { euler, rk4 };

/// Whether E comes from the Poisson equation or is identically zero.
enum class FieldCoupling { poisson, none };

/// Spatial discretization and substep time integration shared by all steppers.
struct SchemeConfig {
  SpaceScheme space_scheme = SpaceScheme::upwind;
  SubstepSolver substep_solver = SubstepSolver::rk4;
  /// Fraction of the advective CFL limit a step may use, in (0, 1].
  double cfl_guard = 0.9;
  FieldCoupling field = FieldCoupling::poisson;

  void validate() const;
};

}  // namespace kinlr
