#include "robincone/finite_difference.hpp"

#include <cmath>

#include "robincone/error.hpp"

namespace robincone {

FormTriple assemble_fd_axisymmetric(double theta0, double alpha, double rt, int mode,
                                    const FdGrid& grid) {
  if (!(theta0 > 0 && theta0 < M_PI)) throw Error(ErrorCode::InvalidCrossSection, "theta0 out of range");
  if (!(rt > 0) || grid.radial_cells < 2 || grid.angular_intervals < 2 || mode < 0 ||
      !(grid.grading >= 0 && grid.grading < 1))
    throw Error(ErrorCode::InvalidDomain, "invalid finite-difference grid");

  const int nr = grid.radial_cells;
  const int nj = grid.angular_intervals;
  const double dr = rt / nr;
  const double beta = grid.grading;

  std::vector<double> phi(nj + 1);
  for (int j = 0; j <= nj; ++j) {
    const double t = static_cast<double>(j) / nj;
    phi[j] = theta0 * (t + beta * t * (1.0 - t));
  }
  phi[nj] = theta0;
  // Control volume of node j in φ: [lo_j, hi_j].
  auto cv_lo = [&](int j) { return j == 0 ? 0.0 : 0.5 * (phi[j - 1] + phi[j]); };
  auto cv_hi = [&](int j) { return j == nj ? theta0 : 0.5 * (phi[j] + phi[j + 1]); };
  auto sin_weight = [&](int j) { return std::cos(cv_lo(j)) - std::cos(cv_hi(j)); };
  auto log_tan_half = [](double x) { return std::log(std::tan(0.5 * x)); };

  const int first_j = mode >= 1 ? 1 : 0;  // the axis row vanishes for m ≥ 1
  const int per_ring = nj + 1 - first_j;
  const int n = nr * per_ring;
  auto index = [&](int i, int j) { return i * per_ring + (j - first_j); };

  using T = Eigen::Triplet<double>;
  std::vector<T> ta, tb, tm;
  ta.reserve(static_cast<std::size_t>(n) * 5);
  auto add_pair = [&](int p, int q, double w) {
    // w·(u_p − u_q)²
    ta.emplace_back(p, p, w);
    ta.emplace_back(q, q, w);
    ta.emplace_back(std::max(p, q), std::min(p, q), -w);
  };

  const double m2 = static_cast<double>(mode) * mode;
  for (int i = 0; i < nr; ++i) {
    const double r_lo = i * dr, r_hi = (i + 1) * dr;
    const double r2_int = (r_hi * r_hi * r_hi - r_lo * r_lo * r_lo) / 3.0;
    for (int j = first_j; j <= nj; ++j) {
      const int p = index(i, j);
      const double w = sin_weight(j);
      tm.emplace_back(p, p, w * r2_int);
      if (i + 1 < nr) add_pair(p, index(i + 1, j), w * r_hi * r_hi / dr);
      else if (grid.bc == ArtificialBC::Dirichlet) ta.emplace_back(p, p, w * rt * rt / (0.5 * dr));
      if (j + 1 <= nj)
        add_pair(p, index(i, j + 1), dr * std::sin(0.5 * (phi[j] + phi[j + 1])) / (phi[j + 1] - phi[j]));
      if (j == first_j && first_j == 1)  // link to the eliminated axis value u = 0
        ta.emplace_back(p, p, dr * std::sin(0.5 * (phi[0] + phi[1])) / (phi[1] - phi[0]));
      if (mode >= 1) ta.emplace_back(p, p, m2 * dr * (log_tan_half(cv_hi(j)) - log_tan_half(cv_lo(j))));
      if (j == nj) tb.emplace_back(p, p, std::sin(theta0) * 0.5 * (r_hi * r_hi - r_lo * r_lo));
    }
  }

  FormTriple out;
  out.A.resize(n, n);
  out.A.setFromTriplets(ta.begin(), ta.end());
  out.B.resize(n, n);
  out.B.setFromTriplets(tb.begin(), tb.end());
  out.M.resize(n, n);
  out.M.setFromTriplets(tm.begin(), tm.end());
  out.A.makeCompressed();
  out.B.makeCompressed();
  out.M.makeCompressed();
  out.alpha = alpha;
  out.mode = mode;
  out.bc = grid.bc;
  out.node_of_dof.resize(n);
  out.dof_of_node.assign(static_cast<std::size_t>(nr) * (nj + 1), -1);
  for (int i = 0; i < nr; ++i)
    for (int j = first_j; j <= nj; ++j) {
      out.node_of_dof[index(i, j)] = i * (nj + 1) + j;
      out.dof_of_node[i * (nj + 1) + j] = index(i, j);
    }
  return out;
}

}  // namespace robincone
