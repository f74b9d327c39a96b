#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "robincone/certify.hpp"
#include "robincone/error.hpp"

using namespace robincone;

namespace {

// Independent root of tanh(kδ) = k/a by plain bisection on k ∈ (0, a].
double bisect_k(double a, double delta) {
  double lo = 1e-300, hi = a;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::tanh(mid * delta) - mid / a > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n = 40000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::FitDegenerate;  // sentinel: nothing thrown
}

}  // namespace

TEST(RobinDirichlet1D, BoundOnAcceptanceGrid) {
  for (double R : {4.0, 10.0, 30.0})
    for (double alpha : {0.5, 1.0, 2.0}) {
      const double delta = 1.0 / std::sqrt(R);
      const auto e = solve_robin_dirichlet_1d(R, alpha, delta);
      const double a2 = alpha * alpha * R * R;
      EXPECT_GE(e.E, -a2) << R << " " << alpha;
      EXPECT_LE(e.E, -a2 + 10.0 * a2 * std::exp(-delta * R * alpha)) << R << " " << alpha;
      EXPECT_LT(e.residual, 1e-12);
    }
}

TEST(RobinDirichlet1D, PropertyGrid) {
  for (double R : {2.0, 8.0, 32.0})
    for (double alpha : {0.5, 1.0, 4.0})
      for (double delta : {0.25, 0.5, 1.0}) {
        const double a = R * alpha;
        if (a * delta < 2.0) continue;
        const auto e = solve_robin_dirichlet_1d(R, alpha, delta);
        const double k = bisect_k(a, delta);
        EXPECT_NEAR(e.k, k, 1e-10 * k);
        EXPECT_NEAR(e.E, -e.k * e.k, 1e-12 * e.k * e.k);
        EXPECT_GE(e.E, -a * a);
        EXPECT_LE(e.E, -a * a + 10.0 * a * a * std::exp(-delta * a));
        // Normalization and boundary conditions of ψ.
        EXPECT_NEAR(simpson([&](double t) { return e.psi(t) * e.psi(t); }, 0.0, delta), 1.0, 1e-8);
        EXPECT_NEAR(e.psi(delta), 0.0, 1e-12 * std::abs(e.psi(0.0)) + 1e-300);
        EXPECT_NEAR(e.dpsi(0.0) + a * e.psi(0.0), 0.0, 1e-9 * a * std::abs(e.psi(0.0)));
        EXPECT_EQ(e.psi(-0.1), 0.0);
        EXPECT_EQ(e.psi(delta * 1.01), 0.0);
      }
}

TEST(RobinDirichlet1D, DegenerateAndInvalidRegimes) {
  const auto e = solve_robin_dirichlet_1d(2.0, 0.5, 1.0);  // Rαδ = 1
  EXPECT_EQ(e.E, 0.0);
  EXPECT_NEAR(e.psi(1.0), 0.0, 1e-15);
  EXPECT_NEAR(simpson([&](double t) { return e.psi(t) * e.psi(t); }, 0.0, 1.0), 1.0, 1e-10);
  EXPECT_EQ(code_of([] { solve_robin_dirichlet_1d(1.0, 0.5, 1.0); }), ErrorCode::RegimeError);
}

TEST(HalfLine, RandomSplinesAreNonnegative) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 100; ++i) {
    const double alpha = std::exp(std::uniform_real_distribution<double>(std::log(0.2), std::log(5.0))(rng));
    const HalflineProbe p = random_spline_probe(rng, alpha);
    EXPECT_GE(halfline_inequality_check(p, alpha), -1e-10) << i;
  }
}

TEST(HalfLine, ClosedForms) {
  // e^{−ct}: (c − α)²/(2c).  Hat of length L: 1/L − α + α²L/3.
  for (double alpha : {0.5, 1.0, 3.0}) {
    EXPECT_LT(std::abs(halfline_inequality_check(exponential_probe(alpha), alpha)), 1e-10);
    for (double c : {0.3, 2.0, 7.0})
      EXPECT_NEAR(halfline_inequality_check(exponential_probe(c), alpha), (c - alpha) * (c - alpha) / (2 * c), 1e-10);
    for (double L : {0.5, 1.0, 4.0})
      EXPECT_NEAR(halfline_inequality_check(hat_probe(L), alpha), 1.0 / L - alpha + alpha * alpha * L / 3.0, 1e-12);
  }
}

TEST(Tubular, JacobianExamples) {
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
  const TubularChart flat = TubularChart::constant({0.0, 0.0}, 1.0);
  EXPECT_EQ(tubular_jacobian(flat, p, 0.7), 1.0);
  const TubularChart saddle = TubularChart::constant({-1.0, -1.0}, 2.0);
  EXPECT_DOUBLE_EQ(tubular_jacobian(saddle, p, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(tubular_jacobian(saddle, p, 0.0), 1.0);
  const TubularChart ball = TubularChart::constant({2.0, 2.0}, 1.0);
  EXPECT_EQ(code_of([&] { tubular_jacobian(ball, p, 0.6); }), ErrorCode::OutOfChart);  // J > 0 but past the focus
  EXPECT_EQ(code_of([&] { tubular_jacobian(TubularChart::constant({2.0}, 1.0), p, 0.6); }), ErrorCode::OutOfChart);
  EXPECT_EQ(code_of([&] { tubular_jacobian(flat, p, 1.5); }), ErrorCode::OutOfChart);
}

TEST(Tubular, ConeSurface) {
  const ConeSpec cone(CrossSection::latitude(M_PI / 3));
  const TubularChart chart = TubularChart::cone(cone.shared_curve(), 0.1);
  const double kappa = 1.0 / std::tan(M_PI / 3);
  Eigen::VectorXd pt(2);
  pt << 0.4, 2.0;  // (s, τ)
  const auto k = chart.principal_curvatures(pt);
  ASSERT_EQ(k.size(), 2u);
  EXPECT_NEAR(std::min(k[0], k[1]), 0.0, 1e-12);
  EXPECT_NEAR(std::max(k[0], k[1]), kappa / 2.0, 1e-6);
  EXPECT_NEAR(tubular_jacobian(chart, pt, 0.05), 1.0 - 0.05 * kappa / 2.0, 1e-6);
  EXPECT_DOUBLE_EQ(tubular_jacobian(chart, pt, 0.0), 1.0);
}

TEST(ConeChartTest, GraphIsTangentWithCurvatureKappa) {
  for (double theta0 : {M_PI / 6, M_PI / 4, M_PI / 3}) {
    const ConeSpec cone(CrossSection::latitude(theta0, 2048));
    const ConeChart chart(cone.shared_curve(), 0.3);
    EXPECT_NEAR(chart.h(0.0), 0.0, 1e-12);
    EXPECT_NEAR(chart.dh(0.0), 0.0, 1e-10);
    EXPECT_NEAR(chart.metric_defect(0.0), 0.0, 1e-12);
    const double e = 1e-3;
    const double second = (chart.h(e) + chart.h(-e) - 2.0 * chart.h(0.0)) / (e * e);
    EXPECT_NEAR(second, 1.0 / std::tan(theta0), 1e-4) << theta0;
    const auto p = chart.at(2.0, 0.0);
    EXPECT_NEAR(p.s, 0.3, 1e-12);
    EXPECT_NEAR(p.tau, 2.0, 1e-12);
    EXPECT_EQ(code_of([&] { chart.at(-1.0, 0.0); }), ErrorCode::OutOfChart);
  }
}

TEST(Family, CertifiesTwoMembersOnAcuteCone) {
  const ConeSpec cone(CrossSection::latitude(M_PI / 4));
  const TrialFamily f = build_trial_family(cone, 1.0, 2, 1.0);
  ASSERT_TRUE(f.certified);
  ASSERT_EQ(f.members.size(), 2u);
  for (const auto& m : f.members) {
    EXPECT_LT(m.quotient, -1.0);
    EXPECT_LT(std::abs(m.quotient - m.quotient_low), 1e-6 * std::abs(m.quotient));
    EXPECT_GT(m.inner_radius, 1.0);
  }
  // Disjoint supports along x₁.
  const auto& a = f.members[0];
  const auto& b = f.members[1];
  EXPECT_LT(a.center + a.half_width1, b.center - b.half_width1);
  EXPECT_LT(std::abs(f.cross_forms(0, 1)), 1e-12);
  EXPECT_LT(std::abs(f.cross_forms(1, 0)), 1e-12);
  EXPECT_NEAR(f.cross_forms(0, 0), f.quotients[0], 1e-6 * std::abs(f.quotients[0]));
  EXPECT_LE(f.max_metric_defect, 0.5);
  EXPECT_GE(f.min_curvature_ratio, 0.5);
  ASSERT_FALSE(f.history.empty());
  EXPECT_EQ(f.history.back().first, f.R);
}

TEST(Family, RejectsConvexComplementAndPlanarCones) {
  EXPECT_EQ(code_of([] { build_trial_family(ConeSpec(CrossSection::latitude(2.0 * M_PI / 3)), 1.0, 2, 1.0); }),
            ErrorCode::CurvatureNotPositive);
  EXPECT_EQ(code_of([] { build_trial_family(ConeSpec(CrossSection::latitude(M_PI / 2)), 1.0, 2, 1.0); }),
            ErrorCode::CurvatureNotPositive);
  EXPECT_EQ(code_of([] { build_trial_family(ConeSpec(CrossSection::interval(M_PI / 4, 0.0)), 1.0, 2, 1.0); }),
            ErrorCode::CurvatureNotPositive);
}

TEST(Family, TinyBudgetIsExceeded) {
  TrialFamilyOptions o;
  o.R_max = 4.0;
  EXPECT_EQ(code_of([&] { build_trial_family(ConeSpec(CrossSection::latitude(M_PI / 4)), 1.0, 2, 1.0, o); }),
            ErrorCode::RBudgetExceeded);
}

TEST(Family, ScalingIdentity) {
  const ConeSpec cone(CrossSection::latitude(M_PI / 4));
  for (double R : {4.0, 16.0}) {
    const ScalingCheck s = trial_scaling_check(cone, 1.0, R, 1);
    EXPECT_NEAR(s.direct, s.scaled, 1e-8 * std::abs(s.scaled)) << R;
  }
}

TEST(Quasimode, SmoothStep) {
  EXPECT_EQ(smooth_step(-1.0), 0.0);
  EXPECT_EQ(smooth_step(2.0), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
  for (double x : {0.1, 0.3, 0.77}) {
    EXPECT_NEAR(smooth_step(x) + smooth_step(1.0 - x), 1.0, 1e-15);
    const double e = 1e-6;
    EXPECT_NEAR(smooth_step_derivative(x), (smooth_step(x + e) - smooth_step(x - e)) / (2 * e), 1e-8);
  }
}

TEST(Quasimode, ApproachesThresholdPlusKinetic) {
  const ConeSpec cone(CrossSection::latitude(M_PI / 3));
  const QuasimodeResult a = build_quasimode(cone, 1.0, 1.0, 20);
  const QuasimodeResult b = build_quasimode(cone, 1.0, 1.0, 40);
  EXPECT_DOUBLE_EQ(a.target, 0.0);
  EXPECT_LT(b.deviation, 0.85 * a.deviation);
  EXPECT_LT(std::abs(b.quotient - b.quotient_low), 1e-6 * std::max(1.0, std::abs(b.quotient)));
}
