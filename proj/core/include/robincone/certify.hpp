#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "robincone/geometry.hpp"

namespace robincone {

// ---------------------------------------------------------------------------
// One-dimensional Robin–Dirichlet layer problem
//   −ψ'' = Eψ on (0, δ),  ψ'(0) + aψ(0) = 0,  ψ(δ) = 0,  a = Rα.

struct RobinDirichletEigen1D {
  double R = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double k = 0.0;  // E = −k²
  double E = 0.0;
  double residual = 0.0;  // |tanh(kδ) − k/a|

  /// L²(0, δ)-normalized ground state and its derivative; zero outside [0, δ].
  double psi(double t) const;
  double dpsi(double t) const;

 private:
  friend RobinDirichletEigen1D solve_robin_dirichlet_1d(double, double, double);
  bool small_ = false;  // sinh form for kδ < 1/2
  double scale_ = 0.0;
};

/// Solves tanh(kδ) = k/(Rα). Requires Rαδ ≥ 1 (RegimeError otherwise); at Rαδ = 1 the ground
/// state is linear with E = 0.
RobinDirichletEigen1D solve_robin_dirichlet_1d(double R, double alpha, double delta);

// ---------------------------------------------------------------------------
// Half-line inequality  ∫v'² − αv(0)² + α²∫v² ≥ 0

struct HalflineProbe {
  std::function<double(double)> v;
  std::function<double(double)> dv;
  /// Breakpoints of the piecewise-smooth structure; the last one ends the integration range.
  std::vector<double> breaks;
};

double halfline_inequality_check(const HalflineProbe& probe, double alpha);

/// v(t) = e^{−ct}, integrated to 60/c.
HalflineProbe exponential_probe(double c);
/// v(t) = (1 − t/L)₊.
HalflineProbe hat_probe(double length = 1.0);
/// Random compactly supported C¹ cubic Hermite spline.
HalflineProbe random_spline_probe(std::mt19937_64& rng, double alpha);

// ---------------------------------------------------------------------------
// Tubular coordinates Φ(p, t) = p − t·n(p) along a boundary surface

class TubularChart {
 public:
  using Curvatures = std::function<std::vector<double>(const Eigen::VectorXd& point)>;

  TubularChart(Curvatures curvatures, double t_max,
               std::function<bool(const Eigen::VectorXd&)> in_range = nullptr);

  /// Cone boundary with surface coordinates (s, τ); principal curvatures {0, κ(s)/τ}.
  static TubularChart cone(std::shared_ptr<const BoundaryCurve> curve, double t_max);
  /// Constant principal curvatures (any point).
  static TubularChart constant(std::vector<double> curvatures, double t_max);

  std::vector<double> principal_curvatures(const Eigen::VectorXd& point) const;
  bool contains(const Eigen::VectorXd& point, double t) const;
  double t_max() const { return t_max_; }

 private:
  Curvatures curvatures_;
  double t_max_;
  std::function<bool(const Eigen::VectorXd&)> in_range_;
};

/// J = Π(1 − t·k_j). Throws OutOfChart outside the chart or where J ≤ 0.
double tubular_jacobian(const TubularChart& chart, const Eigen::VectorXd& point, double t);

// ---------------------------------------------------------------------------
// Graph chart of a cone boundary around the generator through γ(s₀)
//
// Frame e1 = γ(s₀), e2 = γ'(s₀), e3 = γ(s₀) × γ'(s₀) (into the cone). Boundary points τγ(s)
// have coordinates x_k = τ⟨γ(s), e_k⟩; near the generator x₃ = x₁·h(x₂/x₁).

class ConeChart {
 public:
  ConeChart(std::shared_ptr<const BoundaryCurve> curve, double s0);

  struct Point {
    double s, tau, kappa;
    double g1, g2;    // frame components of γ(s)
    double dg1, dg2;  // frame components of γ'(s)
    double jacobian;  // |∂(x₁, x₂)/∂(s, τ)|
  };

  /// Arc length with x₂/x₁ = y, by Newton from s₀. Throws OutOfChart.
  double solve_s(double y) const;
  Point at(double x1, double x2) const;

  double h(double y) const;
  double dh(double y) const;
  /// Spectral norm of a = [[(h − yh')², (h − yh')h'], [(h − yh')h', h'²]].
  double metric_defect(double y) const;

  double s0() const { return s0_; }
  double kappa0() const { return kappa0_; }
  const BoundaryCurve& curve() const { return *curve_; }

 private:
  std::array<double, 6> components(double s) const;  // γ, γ' in frame coordinates (1, 2, 3)
  std::shared_ptr<const BoundaryCurve> curve_;
  double s0_, kappa0_;
  Vec3 e1_, e2_, e3_;
};

// ---------------------------------------------------------------------------
// Trial-function family with quotient below −α²

struct TrialFamilyOptions {
  double b = 3.0;
  int order_low = 32;
  int order_high = 64;
  double relative_tolerance = 1e-6;
  double R_max = 1048576.0;  // 2^20
  int max_eps_power = 20;
};

struct TrialMember {
  int index = 0;          // j = 1..N
  double center = 0.0;    // x₁-station b(2 + 3j) before dilation
  double half_width1 = 0.0;
  double half_width2 = 0.0;
  double quotient = 0.0;      // q_α(F)/‖F‖², high order
  double quotient_low = 0.0;  // same, low order
  double f_quotient = 0.0;    // q_{Rα}(f)/‖f‖² before rescaling
  double inner_radius = 0.0;  // F vanishes for |x| below this
};

struct TrialFamily {
  int N = 0;
  double alpha = 0.0;
  double r0 = 0.0;
  double R = 0.0;
  double delta = 0.0;
  double b = 0.0;
  double eps = 0.0;
  double s0 = 0.0;
  double kappa0 = 0.0;
  double max_metric_defect = 0.0;
  double min_curvature_ratio = 0.0;  // min κ(s(y))/κ₀ over the chart
  double threshold = 0.0;
  bool certified = false;
  std::string cone;
  std::vector<TrialMember> members;
  std::vector<double> quotients;
  /// q(F_i, F_j) / (‖F_i‖‖F_j‖), by quadrature.
  Eigen::MatrixXd cross_forms;
  /// (R, largest quotient) for every R tried.
  std::vector<std::pair<double, double>> history;
};

/// Builds N trial functions with disjoint supports on the cone, doubling R until every
/// quotient is below −α². Throws CurvatureNotPositive, QuadratureNonConvergence, RBudgetExceeded.
TrialFamily build_trial_family(const ConeSpec& cone, double alpha, int N, double r0,
                                   const TrialFamilyOptions& options = {});

/// The same member evaluated two ways: at scale R with parameter Rα then divided by R²,
/// and directly on the dilated function with parameter α.
struct ScalingCheck {
  double scaled;  // R^{-2} q_{Rα}(f)/‖f‖²
  double direct;  // q_α(F)/‖F‖²
};
ScalingCheck trial_scaling_check(const ConeSpec& cone, double alpha, double R, int j,
                                   const TrialFamilyOptions& options = {});

// ---------------------------------------------------------------------------
// Quasi-modes at the bottom of the essential spectrum

struct QuasimodeOptions {
  int order_low = 12;
  int order_high = 20;
  double relative_tolerance = 1e-6;
};

struct QuasimodeResult {
  double k = 0.0;
  int N = 0;
  double quotient = 0.0;
  double quotient_low = 0.0;
  double target = 0.0;  // k² − α²
  double deviation = 0.0;
};

/// u_N(r, φ) = ψ_N(r) sin(kr) e^{−αξ} φ(√N − ξ), ξ = r(θ₀ − φ), on a circular cone.
QuasimodeResult build_quasimode(const ConeSpec& cone, double alpha, double k, int N,
                                const QuasimodeOptions& options = {});

/// C∞ step: 0 for x ≤ 0, 1 for x ≥ 1, with derivative.
double smooth_step(double x);
double smooth_step_derivative(double x);

}  // namespace robincone
