#include "robincone/dense_ldlt.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace robincone {

namespace {

void symmetric_swap(Eigen::MatrixXd& a, int p, int q) {
  if (p == q) return;
  a.row(p).swap(a.row(q));
  a.col(p).swap(a.col(q));
}

void classify_pivot(double d, double tol, Inertia& out) {
  out.min_pivot = std::min(out.min_pivot, std::abs(d));
  if (std::abs(d) <= tol) ++out.zero;
  else if (d < 0) ++out.negative;
  else ++out.positive;
}

}  // namespace

Inertia bunch_kaufman_inertia(Eigen::MatrixXd a, double zero_tolerance) {
  if (a.rows() != a.cols()) throw std::invalid_argument("bunch_kaufman_inertia: matrix not square");
  const int n = static_cast<int>(a.rows());
  const double growth = (1.0 + std::sqrt(17.0)) / 8.0;
  Inertia out;
  out.min_pivot = std::numeric_limits<double>::infinity();

  int k = 0;
  while (k < n) {
    const double akk = std::abs(a(k, k));
    int r = k;
    double colmax = 0.0;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > colmax) {
        colmax = std::abs(a(i, k));
        r = i;
      }

    int size = 1;
    if (std::max(akk, colmax) == 0.0) {
      classify_pivot(0.0, zero_tolerance, out);
      ++k;
      continue;
    }
    if (akk < growth * colmax) {
      double rowmax = 0.0;
      for (int j = k; j < n; ++j)
        if (j != r) rowmax = std::max(rowmax, std::abs(a(r, j)));
      if (akk * rowmax >= growth * colmax * colmax) {
        // keep the 1×1 pivot at k
      } else if (std::abs(a(r, r)) >= growth * rowmax) {
        symmetric_swap(a, k, r);
      } else {
        symmetric_swap(a, k + 1, r);
        size = 2;
      }
    }

    const int m = n - k - size;
    if (size == 1) {
      const double d = a(k, k);
      classify_pivot(d, zero_tolerance, out);
      if (m > 0) {
        const Eigen::VectorXd l = a.col(k).tail(m) / d;
        a.bottomRightCorner(m, m).noalias() -= a.col(k).tail(m) * l.transpose();
      }
    } else {
      const Eigen::Matrix2d d = a.block(k, k, 2, 2);
      // Eigenvalues of the symmetric 2×2 block.
      const double mean = 0.5 * (d(0, 0) + d(1, 1));
      const double rad = std::hypot(0.5 * (d(0, 0) - d(1, 1)), d(0, 1));
      classify_pivot(mean - rad, zero_tolerance, out);
      classify_pivot(mean + rad, zero_tolerance, out);
      if (m > 0) {
        const Eigen::MatrixXd c = a.block(k + 2, k, m, 2);
        const Eigen::MatrixXd l = c * d.inverse();
        a.bottomRightCorner(m, m).noalias() -= l * c.transpose();
      }
    }
    k += size;
  }
  if (n == 0) out.min_pivot = 0.0;
  return out;
}

}  // namespace robincone
