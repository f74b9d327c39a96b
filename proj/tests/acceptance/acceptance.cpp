// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any criterion fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "robincone/certify.hpp"
#include "robincone/config.hpp"
#include "robincone/error.hpp"
#include "robincone/fem.hpp"
#include "robincone/finite_difference.hpp"
#include "robincone/geometry.hpp"
#include "robincone/mesh.hpp"
#include "robincone/pipeline.hpp"
#include "robincone/spectrum.hpp"

using namespace robincone;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DomainSpec circular(double theta0, double R_T) {
  DomainSpec d{ConeSpec(CrossSection::latitude(theta0))};
  d.truncation_radius = R_T;
  return d;
}

// 1. Quadrant: one eigenvalue below −(ν−1)α² = −1, close to −να² = −2.
void quadrant_benchmark(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  DomainSpec d{ConeSpec(CrossSection::interval(M_PI / 4, M_PI / 4))};
  d.truncation_radius = 12.0;
  MeshOptions opt;
  opt.layer_h = 0.05;
  const Mesh mesh = build_planar_mesh(d, 0.5, opt);
  const FormTriple f = assemble_planar(mesh, 1.0);
  const int count = count_below(f, -1.0);
  const int count_margin = count_below(f, -1.001);
  const EigenResult r = eigenpairs_below(f, -1.0, 4);
  const double runtime = seconds_since(t0);
  const double lambda = r.pairs.empty() ? NAN : r.pairs[0].lambda;
  o.detail << "count=" << count << " lambda1=" << lambda << " residual="
           << (r.pairs.empty() ? NAN : r.pairs[0].residual) << " dofs=" << f.size() << " runtime=" << runtime << "s";
  o.require(count == 1 && count_margin == 1, "exactly one eigenvalue below -1");
  o.require(static_cast<int>(r.pairs.size()) == count && r.converged, "Lanczos pairs match inertia count");
  o.require(lambda >= -2.02 && lambda <= -1.98, "lambda1 in [-2.02, -1.98]");
  o.require(runtime < 60.0, "runtime < 60 s");
}

// 2. Convex complement: no Dirichlet-bracket count below −1.001.
void convex_emptiness(Outcome& o) {
  int worst = 0, runs = 0;
  for (double R_T : {10.0, 20.0, 40.0}) {
    const DomainSpec d = circular(2.0 * M_PI / 3, R_T);
    const Mesh mesh = build_meridian_mesh(d, 1.0);
    for (int m : {0, 1, 2}) {
      const int c = count_below(assemble_axisymmetric(mesh, 1.0, m), -1.001);
      worst = std::max(worst, c);
      ++runs;
      if (c != 0) o.detail << " R_T=" << R_T << ",m=" << m << ":" << c;
    }
  }
  o.detail << "runs=" << runs << " max count=" << worst;
  o.require(worst == 0, "count 0 in every run");
}

// 3. Acute circular cone: counts grow with R_T; FEM and finite differences agree at R_T = 20.
void infinite_signature(Outcome& o) {
  std::vector<int> counts;
  for (double R_T : {10.0, 20.0, 40.0, 80.0}) {
    MeshOptions opt;
    opt.layer_h = 0.1;
    const Mesh mesh = build_meridian_mesh(circular(M_PI / 4, R_T), 1.0, opt);
    counts.push_back(count_below(assemble_axisymmetric(mesh, 1.0, 0), -1.001));
  }
  FdGrid g;
  g.radial_cells = 400;
  g.angular_intervals = 200;
  const int fd = count_below(assemble_fd_axisymmetric(M_PI / 4, 1.0, 20.0, 0, g), -1.001);
  o.detail << "counts(R_T=10,20,40,80)=" << counts[0] << "," << counts[1] << "," << counts[2] << "," << counts[3]
           << " fd(R_T=20)=" << fd;
  for (std::size_t i = 1; i < counts.size(); ++i) o.require(counts[i] >= counts[i - 1], "nondecreasing in R_T");
  o.require(counts.back() >= 3, "count >= 3 at R_T = 80");
  o.require(fd == counts[1], "FEM and FD counts agree at R_T = 20");
}

// 4. Trial-function certificate, N = 5.
void certificate(Outcome& o) {
  const TrialFamily f = build_trial_family(ConeSpec(CrossSection::latitude(M_PI / 4)), 1.0, 5, 1.0);
  double worst_q = -INFINITY, worst_gap = 0.0, worst_cross = 0.0;
  for (const auto& m : f.members) {
    worst_q = std::max(worst_q, m.quotient);
    worst_gap = std::max(worst_gap, std::abs(m.quotient - m.quotient_low));
  }
  for (int i = 0; i < f.cross_forms.rows(); ++i)
    for (int j = 0; j < f.cross_forms.cols(); ++j)
      if (i != j) worst_cross = std::max(worst_cross, std::abs(f.cross_forms(i, j)));
  bool disjoint = true;
  for (std::size_t j = 1; j < f.members.size(); ++j)
    disjoint = disjoint && f.members[j - 1].center + f.members[j - 1].half_width1 <
                               f.members[j].center - f.members[j].half_width1;
  o.detail << "R=" << f.R << " eps=" << f.eps << " max quotient=" << worst_q << " max order gap=" << worst_gap
           << " max cross form=" << worst_cross;
  o.require(f.certified && f.members.size() == 5, "five members certified");
  o.require(worst_q < -1.0, "every quotient < -1");
  o.require(worst_cross < 1e-12, "cross forms < 1e-12");
  o.require(worst_gap < 1e-6, "quadrature orders agree to 1e-6");
  o.require(disjoint, "supports pairwise disjoint");
  for (const auto& m : f.members) o.require(m.inner_radius > f.r0, "supports outside the r0 ball");
}

// 5. One-dimensional Robin–Dirichlet bound.
void layer_bound(Outcome& o) {
  double worst_residual = 0.0, worst_slack = INFINITY;
  for (double R : {4.0, 10.0, 30.0})
    for (double alpha : {0.5, 1.0, 2.0}) {
      const double delta = 1.0 / std::sqrt(R);
      const auto e = solve_robin_dirichlet_1d(R, alpha, delta);
      const double a2 = alpha * alpha * R * R;
      const double upper = -a2 + 10.0 * a2 * std::exp(-delta * R * alpha);
      worst_residual = std::max(worst_residual, e.residual);
      worst_slack = std::min({worst_slack, e.E + a2, upper - e.E});
      o.require(e.E >= -a2 && e.E <= upper, "bound at R=" + std::to_string(R) + " alpha=" + std::to_string(alpha));
    }
  o.detail << "grid=9 min slack=" << worst_slack << " max residual=" << worst_residual;
  o.require(worst_residual < 1e-12, "residual < 1e-12");
}

// 6. Quasi-modes approach k² − α².
void quasimodes(Outcome& o) {
  const ConeSpec cone(CrossSection::latitude(M_PI / 3));
  std::vector<double> dev;
  for (int N : {20, 40, 80}) dev.push_back(build_quasimode(cone, 1.0, 1.0, N).deviation);
  o.detail << "deviation(N=20,40,80)=" << dev[0] << "," << dev[1] << "," << dev[2] << " ratios=" << dev[1] / dev[0]
           << "," << dev[2] / dev[1];
  for (std::size_t i = 1; i < dev.size(); ++i) o.require(dev[i] <= 0.85 * dev[i - 1], "ratio <= 0.85 per doubling");
}

// 7. Half-line inequality.
void halfline(Outcome& o) {
  std::mt19937_64 rng(7);
  double worst = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const double alpha = std::uniform_real_distribution<double>(0.25, 4.0)(rng);
    worst = std::min(worst, halfline_inequality_check(random_spline_probe(rng, alpha), alpha));
  }
  double equality = 0.0;
  for (double alpha : {0.5, 1.0, 2.0})
    equality = std::max(equality, std::abs(halfline_inequality_check(exponential_probe(alpha), alpha)));
  o.detail << "probes=100 min value=" << worst << " |equality case|=" << equality;
  o.require(worst >= -1e-10, "all probes >= -1e-10");
  o.require(equality < 1e-10, "equality case < 1e-10");
}

// 8. Asymptotic slope on the quadrant and the π/6 sector.
RunConfig sweep_config(const std::string& kind, double theta) {
  RunConfig c;
  c.nu = 2;
  c.cross_section.kind = kind;
  c.cross_section.theta = theta;
  c.solve = true;
  c.alpha_sweep = AlphaSweep{1.0, 8.0, 7, "log"};
  // One absolute mesh for every α (fine enough for α = 8), so the slope is not built in.
  c.R_T = {10.0};
  c.h = 0.5;
  c.h_layer = 0.025;
  return c;
}

void asymptotic_slope(Outcome& o) {
  const SweepResult q = run_sweep(sweep_config("quadrant", M_PI / 4));
  const RunConfig sc = sweep_config("interval", M_PI / 6);
  const SweepResult s = run_sweep(sc);

  // Closed-form oracle on the sector: u = e^{−αx/sinθ} has quotient −α²/sin²θ in the continuum.
  const double alpha = 8.0;
  const Resolution res = resolution(sc, alpha, 10.0);
  const Mesh mesh = build_planar_mesh(sc.domain(alpha, res.truncation_radius), res.h, res.mesh);
  const FormTriple f = assemble_planar(mesh, alpha);
  const Eigen::VectorXd u =
      interpolate(f, mesh, [&](const Eigen::Vector2d& p) { return std::exp(-alpha * p.x() / std::sin(M_PI / 6)); });
  const double oracle = rayleigh_quotient(f, u) / (alpha * alpha);
  const double lambda8 = s.points.back().lambda1 / (alpha * alpha);

  o.detail << "quadrant slope=" << q.fit.slope << " C=" << q.fit.C << "; sector slope=" << s.fit.slope
           << " C=" << s.fit.C << " oracle quotient/alpha^2=" << oracle << " lambda1/alpha^2=" << lambda8;
  o.require(std::abs(q.fit.slope - 2.0) <= 0.05, "quadrant slope 2 +- 0.05");
  o.require(std::abs(q.fit.C - 2.0) <= 0.1, "quadrant C 2 +- 5%");
  o.require(std::abs(s.fit.C - 4.0) <= 0.2, "sector C 4 +- 5%");
  o.require(std::abs(oracle + 4.0) <= 0.2 && lambda8 <= oracle + 1e-9,
            "sector oracle quotient within 5% and above the computed lambda1");
}

// 9. Inertia counts and Lanczos pairs against dense diagonalization.
void solver_soundness(Outcome& o) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  int mismatches = 0, pairs = 0;
  double worst_pair = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 50;
    Eigen::MatrixXd a(n, n), b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a(i, j) = g(rng);
        b(i, j) = g(rng);
      }
    const Eigen::MatrixXd K = 0.5 * (a + a.transpose());
    const Eigen::MatrixXd M = b * b.transpose() / n + Eigen::MatrixXd::Identity(n, n);
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    const SparseMatrix Kl = SparseMatrix(K.sparseView()).triangularView<Eigen::Lower>();
    const SparseMatrix Ml = SparseMatrix(M.sparseView()).triangularView<Eigen::Lower>();
    const Pencil pencil(Kl, Ml);
    for (double shift : {-2.0, -0.5, 0.0, 0.5, 2.0})
      if (count_below(pencil, shift) != (es.eigenvalues().array() < shift).count()) ++mismatches;
    const EigenResult r = eigenpairs_below(pencil, -0.5, 8);
    for (std::size_t k = 0; k < r.pairs.size(); ++k) {
      worst_pair = std::max(worst_pair, std::abs(r.pairs[k].lambda - es.eigenvalues()(k)));
      ++pairs;
    }
  }
  o.detail << "pencils=30 count mismatches=" << mismatches << " pairs=" << pairs << " max pair error=" << worst_pair;
  o.require(mismatches == 0, "exact count match");
  o.require(worst_pair < 1e-10, "pairs match dense to 1e-10");
}

// 10. Geodesic curvature of latitude circles and orientation reversal.
void curvature_kernel(Outcome& o) {
  double worst = 0.0, flip = 0.0;
  for (double theta0 : {M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2, 2.0 * M_PI / 3}) {
    const ConeSpec cone(CrossSection::latitude(theta0));
    const BoundaryCurve& c = cone.boundary_curve();
    const BoundaryCurve r = c.reversed();
    for (int k = 0; k < 16; ++k) {
      const double s = c.length() * (k + 0.37) / 16.0;
      worst = std::max(worst, std::abs(geodesic_curvature(c, s) - 1.0 / std::tan(theta0)));
      flip = std::max(flip, std::abs(geodesic_curvature(r, c.length() - s) + geodesic_curvature(c, s)));
    }
  }
  o.detail << "max |kappa - cot theta0|=" << worst << " max |kappa + kappa_reversed|=" << flip;
  o.require(worst < 1e-6, "kappa = cot theta0 to 1e-6");
  o.require(flip < 1e-12, "orientation flip antisymmetric to 1e-12");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"quadrant benchmark", quadrant_benchmark},
      {"convex complement is empty", convex_emptiness},
      {"infinite-spectrum signature", infinite_signature},
      {"trial-function certificate", certificate},
      {"Robin-Dirichlet layer bound", layer_bound},
      {"quasi-mode threshold approach", quasimodes},
      {"half-line inequality", halfline},
      {"asymptotic slope", asymptotic_slope},
      {"solver soundness", solver_soundness},
      {"curvature kernel", curvature_kernel},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    o.detail.precision(8);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
    }
    std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d failed, total %.1f s\n", failed, seconds_since(start));
  return failed == 0 ? 0 : 1;
}
