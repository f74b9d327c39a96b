#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>

#include "robincone/dense_ldlt.hpp"
#include "robincone/error.hpp"
#include "robincone/fem.hpp"
#include "robincone/mesh.hpp"
#include "robincone/spectrum.hpp"

using namespace robincone;

namespace {

SparseMatrix lower_of(const Eigen::MatrixXd& a) {
  SparseMatrix s = a.sparseView(0.0, 0.0);
  return SparseMatrix(s.triangularView<Eigen::Lower>());
}

struct RandomPencil {
  Eigen::MatrixXd K, M;
};

RandomPencil random_pencil(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = g(rng);
      b(i, j) = g(rng);
    }
  RandomPencil p;
  p.K = 0.5 * (a + a.transpose());
  p.M = b * b.transpose() / n + Eigen::MatrixXd::Identity(n, n);
  return p;
}

Eigen::VectorXd dense_eigenvalues(const RandomPencil& p) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(p.K, p.M);
  return es.eigenvalues();
}

DomainSpec circular(double theta0, double R_T, double alpha = 1.0) {
  DomainSpec d{ConeSpec(CrossSection::latitude(theta0))};
  d.truncation_radius = R_T;
  d.alpha = alpha;
  return d;
}

DomainSpec sector(double half, double bisector, double R_T, double alpha = 1.0) {
  DomainSpec d{ConeSpec(CrossSection::interval(half, bisector))};
  d.truncation_radius = R_T;
  d.alpha = alpha;
  return d;
}

}  // namespace

TEST(Inertia, DiagonalPencil) {
  Eigen::MatrixXd k = Eigen::Vector3d(-3, -1, 2).asDiagonal();
  const Pencil p(lower_of(k), lower_of(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_EQ(count_below(p, -2.0), 1);
  EXPECT_EQ(count_below(p, 0.0), 2);
  EXPECT_EQ(count_below(p, 5.0), 3);
}

TEST(Inertia, BunchKaufmanTwoByTwoPivots) {
  Eigen::Matrix2d swap;
  swap << 0, 1, 1, 0;
  const Inertia a = bunch_kaufman_inertia(swap);
  EXPECT_EQ(a.negative, 1);
  EXPECT_EQ(a.positive, 1);
  EXPECT_EQ(a.zero, 0);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomPencil p = random_pencil(40, rng);
    Eigen::MatrixXd k = p.K;
    k.diagonal().setZero();  // forces 2×2 pivots
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    const Inertia in = bunch_kaufman_inertia(k);
    EXPECT_EQ(in.negative, (es.eigenvalues().array() < 0).count());
    EXPECT_EQ(in.positive, (es.eigenvalues().array() > 0).count());
  }
}

TEST(Inertia, RandomPencilsMatchDenseCounts) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const RandomPencil p = random_pencil(50, rng);
    const Eigen::VectorXd ev = dense_eigenvalues(p);
    const Pencil pencil(lower_of(p.K), lower_of(p.M));
    for (double shift : {-1.5, -0.3, 0.0, 0.7}) {
      const int want = (ev.array() < shift).count();
      EXPECT_EQ(count_below(pencil, shift), want) << trial << " " << shift;
    }
  }
}

TEST(Inertia, SparsePathMatchesDense) {
  std::mt19937_64 rng(11);
  const int n = 600;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n), m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 4.0 * u(rng);
    m(i, i) = 2.0;
    for (int off : {1, 7}) {
      if (i + off >= n) continue;
      k(i + off, i) = k(i, i + off) = u(rng);
      m(i + off, i) = m(i, i + off) = 0.3 * u(rng);
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
  const Pencil pencil(lower_of(k), lower_of(m));
  SolverOptions sparse;
  sparse.dense_limit = 0;
  for (double shift : {-1.0, -0.25, 0.4}) {
    const int want = (es.eigenvalues().array() < shift).count();
    EXPECT_EQ(count_below(pencil, shift, sparse), want) << shift;
  }
}

TEST(Inertia, CountsAreMonotoneInShift) {
  std::mt19937_64 rng(3);
  const RandomPencil p = random_pencil(50, rng);
  const Pencil pencil(lower_of(p.K), lower_of(p.M));
  int prev = -1;
  for (double s = -30.0; s <= 30.0; s += 0.25) {
    const int c = count_below(pencil, s);
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_EQ(prev, 50);
}

TEST(Inertia, NonFinitePencilBreaksDown) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  k(1, 1) = std::numeric_limits<double>::quiet_NaN();
  const Pencil p(lower_of(k), lower_of(Eigen::MatrixXd::Identity(3, 3)));
  try {
    count_below(p, -1.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FactorizationBreakdown);
  }
}

TEST(Inertia, ExactZeroPivotIsJittered) {
  const Eigen::MatrixXd k = Eigen::Vector3d(0.0, 1.0, -2.0).asDiagonal();
  const Pencil p(lower_of(k), lower_of(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_EQ(count_below(p, 0.0), 1);
}

TEST(Lanczos, RandomPencilsMatchDensePairs) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const RandomPencil p = random_pencil(50, rng);
    const Eigen::VectorXd ev = dense_eigenvalues(p);
    const Pencil pencil(lower_of(p.K), lower_of(p.M));
    const double shift = -0.2;
    const EigenResult r = eigenpairs_below(pencil, shift, 6);
    const int count = (ev.array() < shift).count();
    EXPECT_EQ(r.count, count);
    ASSERT_EQ(static_cast<int>(r.pairs.size()), std::min(count, 6));
    EXPECT_TRUE(r.converged);
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
      EXPECT_NEAR(r.pairs[i].lambda, ev(i), 1e-10 * std::max(1.0, std::abs(ev(i))));
      EXPECT_LT(r.pairs[i].residual, 1e-8 * std::max(1.0, std::abs(r.pairs[i].lambda)));
      if (i > 0) {
        EXPECT_GE(r.pairs[i].lambda, r.pairs[i - 1].lambda);
      }
      for (std::size_t j = 0; j <= i; ++j) {
        const double ip = r.pairs[i].x.dot(p.M * r.pairs[j].x);
        EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-9);
      }
    }
  }
}

TEST(Lanczos, SparsePencilAgreesWithInertia) {
  DomainSpec d = sector(M_PI / 6, 0.0, 8.0);
  const Mesh mesh = build_planar_mesh(d, 0.5);
  const FormTriple f = assemble_planar(mesh, 1.0);
  const double shift = -1.001;
  const int count = count_below(f, shift);
  const EigenResult r = eigenpairs_below(f, shift, 10);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.count, count);
  EXPECT_EQ(static_cast<int>(r.pairs.size()), std::min(count, 10));
  const Pencil pencil(f);
  for (const auto& pair : r.pairs) {
    EXPECT_LT(pair.lambda, shift);
    EXPECT_NEAR(residual_norm(pencil, pair.lambda, pair.x), pair.residual, 1e-10 + 1e-6 * pair.residual);
    EXPECT_LT(pair.residual, 1e-8 * std::abs(pair.lambda));
  }
}

TEST(Lanczos, QuadrantSingleEigenvalue) {
  MeshOptions o;
  o.layer_h = 0.05;
  DomainSpec d = sector(M_PI / 4, M_PI / 4, 12.0);
  const Mesh mesh = build_planar_mesh(d, 0.5, o);
  const FormTriple f = assemble_planar(mesh, 1.0);
  EXPECT_EQ(count_below(f, -1.5), 1);
  const EigenResult r = eigenpairs_below(f, -1.5, 3);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_NEAR(r.pairs[0].lambda, -2.0, 0.02);
}

TEST(Bracket, ConvexComplementHasNoCount) {
  for (double R_T : {10.0, 20.0}) {
    const DomainSpec d = circular(2.0 * M_PI / 3, R_T);
    const Mesh mesh = build_meridian_mesh(d, 1.0);
    for (int m : {0, 1}) {
      const BracketCounts c = bracket(d, mesh, 1.0, -1.01, m);
      EXPECT_EQ(c.dirichlet, 0) << R_T << " " << m;
      EXPECT_LE(c.dirichlet, c.neumann);
    }
  }
}

TEST(Bracket, HalfPlaneHasNothingBelowThreshold) {
  for (double R_T : {6.0, 12.0}) {
    const DomainSpec d = sector(M_PI / 2, M_PI / 2, R_T);
    const Mesh mesh = build_planar_mesh(d, 0.5);
    const BracketCounts c = bracket(d, mesh, 1.0, -1.001);
    EXPECT_EQ(c.dirichlet, 0) << R_T;
  }
}

TEST(Bracket, InfiniteCaseGrowsAndBrackets) {
  int prev = 0;
  for (double R_T : {10.0, 20.0, 40.0}) {
    const DomainSpec d = circular(M_PI / 4, R_T);
    MeshOptions o;
    o.layer_h = 0.1;
    const Mesh mesh = build_meridian_mesh(d, 1.0, o);
    const BracketCounts c = bracket(d, mesh, 1.0, -1.01);
    EXPECT_LE(c.dirichlet, c.neumann);
    EXPECT_GE(c.dirichlet, prev);
    prev = c.dirichlet;
  }
  EXPECT_GE(prev, 2);
}

TEST(Bracket, RejectsMismatchedMesh) {
  const DomainSpec d = circular(M_PI / 4, 10.0);
  const Mesh planar = build_planar_mesh(sector(M_PI / 4, 0.0, 10.0), 1.0);
  EXPECT_THROW(bracket(d, planar, 1.0, -1.01), Error);
}

TEST(Scaling, DoublingAlphaAndHalvingRadiusScalesByFour) {
  // (α, R_T) and (2α, R_T/2) at the same h·α: the continuum eigenvalues differ by exactly 4.
  auto lowest = [](double alpha, double R_T) {
    const DomainSpec d = circular(M_PI / 4, R_T, alpha);
    MeshOptions o;
    o.layer_h = 0.05 / alpha;
    const Mesh mesh = build_meridian_mesh(d, 0.5 / alpha, o);
    const FormTriple f = assemble_axisymmetric(mesh, alpha, 0);
    const EigenResult r = eigenpairs_below(f, -alpha * alpha * 1.001, 1);
    return r.pairs.at(0).lambda;
  };
  const double a = lowest(1.0, 20.0), b = lowest(2.0, 10.0);
  EXPECT_NEAR(b / a, 4.0, 0.08);
}

TEST(Report, CountIsDirichletAtMarginProbe) {
  SpectralReport r;
  EXPECT_EQ(r.count(), 0);
  r.counts.push_back({-1.001, 3, 5});
  r.counts.push_back({-1.0, 4, 6});
  EXPECT_EQ(r.count(), 3);
}
