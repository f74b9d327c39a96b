#pragma once

#include "robincone/fem.hpp"

namespace robincone {

/// Grid for the spherical-coordinate finite-volume discretization of an axisymmetric mode
/// on the truncated circular cone {r < R_T, polar angle < θ₀}.
struct FdGrid {
  int radial_cells = 200;       // cell-centred in r
  int angular_intervals = 100;  // vertex-centred in φ
  /// Angle nodes φ_j = θ₀·g(j/J), g(t) = t + β·t(1 − t): spacing near θ₀ shrinks by (1 − β)/(1 + β).
  double grading = 0.5;
  ArtificialBC bc = ArtificialBC::Dirichlet;
};

/// Same pencil convention as the FEM forms: (A − αB)x = λMx, M diagonal.
/// An independent discretization, used to cross-check FEM counts.
FormTriple assemble_fd_axisymmetric(double theta0, double alpha, double truncation_radius, int mode,
                                    const FdGrid& grid);

}  // namespace robincone
