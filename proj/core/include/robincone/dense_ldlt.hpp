#pragma once

#include <Eigen/Core>

namespace robincone {

struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
  /// Smallest pivot magnitude (eigenvalue magnitude for 2×2 blocks).
  double min_pivot = 0.0;
};

/// Inertia of a dense symmetric matrix via Bunch–Kaufman LDLᵀ with 1×1 / 2×2 pivots.
/// Pivots with magnitude ≤ zero_tolerance are counted as zero.
Inertia bunch_kaufman_inertia(Eigen::MatrixXd a, double zero_tolerance = 0.0);

}  // namespace robincone
