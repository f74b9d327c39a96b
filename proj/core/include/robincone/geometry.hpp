#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace robincone {

using Vec3 = Eigen::Vector3d;

// ---------------------------------------------------------------------------
// Cross-sections
// ---------------------------------------------------------------------------

/// Planar sector {|arg x - bisector| < half_aperture}.
struct Interval2D {
  double half_aperture;
  double bisector = 0.0;
};

/// Spherical cap {polar angle < theta0}; its cone is the circular cone of half-angle theta0.
struct LatitudeCircle {
  double theta0;
};

/// Cap {polar angle < rho(azimuth)} bounded by a periodic graph over the azimuth.
struct SphericalGraph {
  std::function<double(double)> rho;
  std::string expression;
};

class CrossSection {
 public:
  using Shape = std::variant<Interval2D, LatitudeCircle, SphericalGraph>;

  static CrossSection interval(double half_aperture, double bisector = 0.0);
  static CrossSection latitude(double theta0, int samples = 512);
  static CrossSection graph(const std::string& expression, int samples = 512);
  static CrossSection graph(std::function<double(double)> rho, std::string label,
                            int samples = 512);

  int dimension() const { return std::holds_alternative<Interval2D>(shape_) ? 2 : 3; }
  const Shape& shape() const { return shape_; }
  int samples() const { return samples_; }

  /// Polar angle of a latitude cross-section, or nullopt for other kinds.
  std::optional<double> latitude_angle() const;
  /// Half-aperture of a planar sector, or nullopt for ν=3 kinds.
  std::optional<double> half_aperture() const;

  std::string describe() const;

 private:
  CrossSection(Shape shape, int samples) : shape_(std::move(shape)), samples_(samples) {}
  Shape shape_;
  int samples_ = 512;
};

// ---------------------------------------------------------------------------
// Periodic trigonometric interpolation (spectral differentiation on closed curves)
// ---------------------------------------------------------------------------

class TrigSeries {
 public:
  TrigSeries() = default;
  /// Interpolates samples f_j taken at x_j = j * period / M.
  TrigSeries(const std::vector<double>& samples, double period);

  /// Value (order 0), first or second derivative at x.
  double operator()(double x, int derivative = 0) const;
  /// Value and first two derivatives in one pass.
  std::array<double, 3> evaluate(double x) const;
  /// Antiderivative with F(0) = 0, including the linear mean term.
  double integral(double x) const;

  /// Series of x ↦ f(-x).
  TrigSeries reflected() const;

  double mean() const { return cos_.empty() ? 0.0 : cos_[0]; }
  double period() const { return period_; }

 private:
  std::vector<double> cos_, sin_;
  double period_ = 1.0;
  bool has_nyquist_ = false;
};

// ---------------------------------------------------------------------------
// Boundary curve of a ν=3 cross-section
// ---------------------------------------------------------------------------

/// Closed curve on S², a raw periodic parametrization u ∈ [0, 2π).
struct RawCurve {
  std::function<Vec3(double)> point;
  /// A point of the enclosed cross-section; orientation is fixed relative to it.
  Vec3 interior = Vec3::UnitZ();
};

/// Arc-length parametrized boundary ∂Σ of a cross-section.
///
/// Orientation: the cross-section lies to the left, i.e. m(s) = γ(s) × γ'(s) points into
/// the cone. With this orientation κ(s) = det(γ, γ', γ'') is positive where the cone is
/// locally convex and the mean curvature of the cone boundary w.r.t. the outer normal
/// is H(s, t) = κ(s) / (2t).
class BoundaryCurve {
 public:
  /// Samples γ(s_j), s_j = j·length/M, of a unit-speed closed curve.
  BoundaryCurve(std::vector<Vec3> points, double length);

  double length() const { return length_; }
  int samples() const { return static_cast<int>(points_.size()); }
  double sample_arclength(int j) const { return length_ * j / samples(); }

  const Vec3& point(int j) const { return points_[j]; }
  const Vec3& tangent(int j) const { return d1_[j]; }
  const Vec3& second_derivative(int j) const { return d2_[j]; }
  double curvature(int j) const;

  Vec3 point(double s) const;
  Vec3 tangent(double s) const;
  Vec3 second_derivative(double s) const;
  /// γ, γ', γ'' at s in one pass.
  std::array<Vec3, 3> frame(double s) const;
  double curvature(double s) const;
  /// Inward normal of the cone boundary along the generator through γ(s).
  Vec3 inward_normal(double s) const;

  double max_second_derivative_norm() const;

  /// The same curve traversed backwards; κ changes sign pointwise.
  BoundaryCurve reversed() const;

 private:
  BoundaryCurve() = default;
  void build_series();
  double wrap(double s) const;

  std::vector<Vec3> points_, d1_, d2_;
  std::array<TrigSeries, 3> series_;
  double length_ = 0.0;
};

/// Reparametrizes a raw closed curve by arc length with M samples and normalizes the
/// orientation (cross-section on the left).
/// Throws NotOnSphere, NonSimpleCurve or UnderResolvedCurve.
BoundaryCurve arclength_reparametrize(const RawCurve& curve, int samples = 512);

/// κ(s) = det(γ(s), γ'(s), γ''(s)); s is taken modulo the curve length.
double geodesic_curvature(const BoundaryCurve& curve, double s);

/// Mean curvature κ(s)/(2t) of the cone boundary at tγ(s). Throws DegenerateRadius for t <= 0.
double mean_curvature(const BoundaryCurve& curve, double s, double t);

// ---------------------------------------------------------------------------
// Cones and classification
// ---------------------------------------------------------------------------

class ConeSpec {
 public:
  explicit ConeSpec(CrossSection cross_section);
  ConeSpec(CrossSection cross_section, Eigen::VectorXd vertex);

  int dimension() const { return cross_section_.dimension(); }
  const CrossSection& cross_section() const { return cross_section_; }
  const Eigen::VectorXd& vertex() const { return vertex_; }

  /// Boundary curve of the cross-section (ν=3 only; throws UnsupportedGeometry for ν=2).
  const BoundaryCurve& boundary_curve() const;
  std::shared_ptr<const BoundaryCurve> shared_curve() const { return curve_; }

 private:
  CrossSection cross_section_;
  Eigen::VectorXd vertex_;
  std::shared_ptr<const BoundaryCurve> curve_;
};

/// Raw parametrization of a ν=3 cross-section boundary (azimuth ↦ point on S²).
RawCurve raw_boundary(const CrossSection& cross_section);

double mean_curvature(const ConeSpec& cone, double s, double t);

struct ConvexityEvidence {
  bool convex = false;
  /// Arc-length location and value of max κ (ν=3); NaN for ν=2.
  double s0 = 0.0;
  double kappa_max = 0.0;
  double tolerance = 0.0;
};

/// Convexity of ℝ^ν \ Λ: κ ≤ tol everywhere (ν=3) or opening 2θ ≥ π (ν=2).
/// Throws IndeterminateSign when |max κ| < tol.
ConvexityEvidence complement_is_convex(const ConeSpec& cone);

/// Sign tolerance 1e-9·(1 + max|γ''|).
double curvature_tolerance(const BoundaryCurve& curve);

enum class Verdict { Empty, Finite, Infinite, IndeterminateByPaper };

std::string to_string(Verdict verdict);

struct CurvatureEvidence {
  double s0;
  double kappa;
};

struct ClassificationVerdict {
  Verdict verdict = Verdict::IndeterminateByPaper;
  std::string reason;
  std::optional<CurvatureEvidence> curvature_evidence;
};

struct DomainSpec;

ClassificationVerdict classify(const ConeSpec& cone);
ClassificationVerdict classify(const DomainSpec& domain);

}  // namespace robincone
