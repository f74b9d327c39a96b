#include "robincone/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "robincone/domain.hpp"
#include "robincone/error.hpp"
#include "robincone/expression.hpp"

namespace robincone {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_polar_angle(double value, const char* what) {
  if (!(value > 0.0 && value < kPi))
    throw Error(ErrorCode::InvalidCrossSection,
                std::string(what) + " must lie in (0, pi), got " + std::to_string(value));
}

}  // namespace

// ---------------------------------------------------------------------------
// CrossSection

CrossSection CrossSection::interval(double half_aperture, double bisector) {
  check_polar_angle(half_aperture, "half-aperture");
  if (!std::isfinite(bisector)) throw Error(ErrorCode::InvalidCrossSection, "bisector not finite");
  return CrossSection(Interval2D{half_aperture, bisector}, 0);
}

CrossSection CrossSection::latitude(double theta0, int samples) {
  check_polar_angle(theta0, "theta0");
  if (samples < 16) throw Error(ErrorCode::InvalidCrossSection, "need at least 16 samples");
  return CrossSection(LatitudeCircle{theta0}, samples);
}

CrossSection CrossSection::graph(const std::string& expression, int samples) {
  Expression expr = Expression::parse(expression);
  return graph([expr](double phi) { return expr(phi); }, expression, samples);
}

CrossSection CrossSection::graph(std::function<double(double)> rho, std::string label,
                                 int samples) {
  if (samples < 16) throw Error(ErrorCode::InvalidCrossSection, "need at least 16 samples");
  // Values must stay strictly between the poles; probe more densely than the sample grid.
  const int probes = 8 * samples;
  for (int i = 0; i < probes; ++i) {
    const double phi = kTwoPi * i / probes;
    const double value = rho(phi);
    if (!(value > 0.0 && value < kPi))
      throw Error(ErrorCode::InvalidCrossSection,
                  "graph '" + label + "' leaves (0, pi) at phi = " + std::to_string(phi));
  }
  return CrossSection(SphericalGraph{std::move(rho), std::move(label)}, samples);
}

std::optional<double> CrossSection::latitude_angle() const {
  if (const auto* lat = std::get_if<LatitudeCircle>(&shape_)) return lat->theta0;
  return std::nullopt;
}

std::optional<double> CrossSection::half_aperture() const {
  if (const auto* sector = std::get_if<Interval2D>(&shape_)) return sector->half_aperture;
  return std::nullopt;
}

std::string CrossSection::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval2D>)
          out << "sector(theta=" << s.half_aperture << ", bisector=" << s.bisector << ")";
        else if constexpr (std::is_same_v<T, LatitudeCircle>)
          out << "latitude(theta0=" << s.theta0 << ")";
        else
          out << "graph(rho=" << s.expression << ")";
      },
      shape_);
  return out.str();
}

// ---------------------------------------------------------------------------
// TrigSeries

TrigSeries::TrigSeries(const std::vector<double>& samples, double period) : period_(period) {
  const int m = static_cast<int>(samples.size());
  const int half = m / 2;
  has_nyquist_ = m % 2 == 0;
  cos_.assign(half + 1, 0.0);
  sin_.assign(half + 1, 0.0);
  for (int k = 0; k <= half; ++k) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < m; ++j) {
      // Reduce k·j mod m so the angle stays in [0, 2π).
      const double angle = kTwoPi * static_cast<double>((static_cast<long>(k) * j) % m) / m;
      a += samples[j] * std::cos(angle);
      b += samples[j] * std::sin(angle);
    }
    const bool edge = k == 0 || (has_nyquist_ && k == half);
    cos_[k] = (edge ? 1.0 : 2.0) * a / m;
    sin_[k] = edge ? 0.0 : 2.0 * b / m;
  }
}

TrigSeries TrigSeries::reflected() const {
  TrigSeries out = *this;
  for (double& b : out.sin_) b = -b;
  return out;
}

std::array<double, 3> TrigSeries::evaluate(double x) const {
  const double omega = kTwoPi / period_;
  double theta = std::fmod(omega * x, kTwoPi);
  if (theta < 0) theta += kTwoPi;
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double f = cos_.empty() ? 0.0 : cos_[0], df = 0.0, d2f = 0.0;
  double ck = 1.0, sk = 0.0;
  const int kmax = static_cast<int>(cos_.size()) - 1;
  for (int k = 1; k <= kmax; ++k) {
    const double c = ck * c1 - sk * s1;
    const double s = sk * c1 + ck * s1;
    ck = c;
    sk = s;
    const double wk = k * omega;
    f += cos_[k] * ck + sin_[k] * sk;
    df += wk * (-cos_[k] * sk + sin_[k] * ck);
    d2f += -wk * wk * (cos_[k] * ck + sin_[k] * sk);
  }
  return {f, df, d2f};
}

double TrigSeries::operator()(double x, int derivative) const {
  return evaluate(x)[std::clamp(derivative, 0, 2)];
}

double TrigSeries::integral(double x) const {
  const double omega = kTwoPi / period_;
  double out = cos_.empty() ? 0.0 : cos_[0] * x;
  for (std::size_t k = 1; k < cos_.size(); ++k) {
    const double wk = static_cast<double>(k) * omega;
    out += (cos_[k] * std::sin(wk * x) + sin_[k] * (1.0 - std::cos(wk * x))) / wk;
  }
  return out;
}

// ---------------------------------------------------------------------------
// BoundaryCurve

BoundaryCurve::BoundaryCurve(std::vector<Vec3> points, double length)
    : points_(std::move(points)), length_(length) {
  if (points_.size() < 8) throw Error(ErrorCode::UnderResolvedCurve, "too few samples");
  if (!(length_ > 0)) throw Error(ErrorCode::UnderResolvedCurve, "non-positive length");
  build_series();
}

void BoundaryCurve::build_series() {
  const int m = samples();
  for (int c = 0; c < 3; ++c) {
    std::vector<double> values(m);
    for (int j = 0; j < m; ++j) values[j] = points_[j][c];
    series_[c] = TrigSeries(values, length_);
  }
  d1_.resize(m);
  d2_.resize(m);
  for (int j = 0; j < m; ++j) {
    const auto f = frame(sample_arclength(j));
    d1_[j] = f[1];
    d2_[j] = f[2];
  }
}

double BoundaryCurve::wrap(double s) const {
  double w = std::fmod(s, length_);
  if (w < 0) w += length_;
  return w;
}

std::array<Vec3, 3> BoundaryCurve::frame(double s) const {
  const double x = wrap(s);
  std::array<Vec3, 3> out;
  for (int c = 0; c < 3; ++c) {
    const auto v = series_[c].evaluate(x);
    for (int d = 0; d < 3; ++d) out[d][c] = v[d];
  }
  return out;
}

Vec3 BoundaryCurve::point(double s) const { return frame(s)[0]; }
Vec3 BoundaryCurve::tangent(double s) const { return frame(s)[1]; }
Vec3 BoundaryCurve::second_derivative(double s) const { return frame(s)[2]; }

double BoundaryCurve::curvature(int j) const {
  return points_[j].dot(d1_[j].cross(d2_[j]));
}

double BoundaryCurve::curvature(double s) const {
  const auto f = frame(s);
  return f[0].dot(f[1].cross(f[2]));
}

Vec3 BoundaryCurve::inward_normal(double s) const {
  const auto f = frame(s);
  return f[0].cross(f[1]);
}

double BoundaryCurve::max_second_derivative_norm() const {
  double out = 0.0;
  for (const Vec3& v : d2_) out = std::max(out, v.norm());
  return out;
}

BoundaryCurve BoundaryCurve::reversed() const {
  BoundaryCurve out;
  const int m = samples();
  out.length_ = length_;
  out.points_.resize(m);
  out.d1_.resize(m);
  out.d2_.resize(m);
  for (int j = 0; j < m; ++j) {
    const int src = (m - j) % m;
    out.points_[j] = points_[src];
    out.d1_[j] = -d1_[src];
    out.d2_[j] = d2_[src];
  }
  for (int c = 0; c < 3; ++c) out.series_[c] = series_[c].reflected();
  return out;
}

// ---------------------------------------------------------------------------
// Reparametrization

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                    const Eigen::Vector2d& q2) {
  const double d1 = cross2(q2 - q1, p1 - q1);
  const double d2 = cross2(q2 - q1, p2 - q1);
  const double d3 = cross2(p2 - p1, q1 - p1);
  const double d4 = cross2(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

// Stereographic image (from the antipode of `interior`) of the sampled curve.
std::vector<Eigen::Vector2d> project(const std::vector<Vec3>& points, const Vec3& interior) {
  const Eigen::Quaterniond rot = Eigen::Quaterniond::FromTwoVectors(interior.normalized(), Vec3::UnitZ());
  std::vector<Eigen::Vector2d> out;
  out.reserve(points.size());
  for (const Vec3& p : points) {
    const Vec3 q = rot * p;
    out.emplace_back(q.x() / (1.0 + q.z()), q.y() / (1.0 + q.z()));
  }
  return out;
}

int winding_number(const std::vector<Eigen::Vector2d>& poly) {
  double total = 0.0;
  const std::size_t m = poly.size();
  for (std::size_t j = 0; j < m; ++j) {
    const auto& a = poly[j];
    const auto& b = poly[(j + 1) % m];
    total += std::atan2(cross2(a, b), a.dot(b));
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

bool self_intersects(const std::vector<Eigen::Vector2d>& poly) {
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& p1 = poly[i];
    const auto& p2 = poly[(i + 1) % m];
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;  // adjacent through the seam
      if (segments_cross(p1, p2, poly[j], poly[(j + 1) % m])) return true;
    }
  }
  return false;
}

}  // namespace

BoundaryCurve arclength_reparametrize(const RawCurve& curve, int samples) {
  const int m = samples;
  if (m < 16) throw Error(ErrorCode::UnderResolvedCurve, "need at least 16 samples");

  std::array<std::vector<double>, 3> raw;
  for (auto& r : raw) r.resize(m);
  for (int j = 0; j < m; ++j) {
    const Vec3 p = curve.point(kTwoPi * j / m);
    if (!p.allFinite() || std::abs(p.norm() - 1.0) > 1e-8)
      throw Error(ErrorCode::NotOnSphere,
                  "sample " + std::to_string(j) + " has |gamma| = " + std::to_string(p.norm()));
    for (int c = 0; c < 3; ++c) raw[c][j] = p[c];
  }
  std::array<TrigSeries, 3> series;
  for (int c = 0; c < 3; ++c) series[c] = TrigSeries(raw[c], kTwoPi);

  auto speed_at = [&](double u) {
    return Vec3(series[0](u, 1), series[1](u, 1), series[2](u, 1)).norm();
  };
  std::vector<double> speed(m);
  for (int j = 0; j < m; ++j) {
    speed[j] = speed_at(kTwoPi * j / m);
    if (speed[j] < 1e-10)
      throw Error(ErrorCode::UnderResolvedCurve, "parametrization is stationary at a sample");
  }
  const TrigSeries speed_series(speed, kTwoPi);
  const double length = kTwoPi * speed_series.mean();

  // Invert s(u) = ∫₀ᵘ |c'| by safeguarded Newton.
  std::vector<Vec3> points(m);
  double u_prev = 0.0;
  points[0] = curve.point(0.0).normalized();
  for (int j = 1; j < m; ++j) {
    const double target = length * j / m;
    double lo = u_prev, hi = kTwoPi;
    double u = std::min(hi, u_prev + (length / m) / std::max(speed_series(u_prev), 1e-12));
    for (int iter = 0; iter < 60; ++iter) {
      const double f = speed_series.integral(u) - target;
      if (f > 0) hi = u; else lo = u;
      const double step = f / std::max(speed_series(u), 1e-12);
      double next = u - step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - u) < 1e-15 * kTwoPi) { u = next; break; }
      u = next;
    }
    u_prev = u;
    points[j] = curve.point(u).normalized();
  }

  const auto projected = project(points, curve.interior);
  if (self_intersects(projected))
    throw Error(ErrorCode::NonSimpleCurve, "self-intersection on the sample grid");
  const int winding = winding_number(projected);
  if (std::abs(winding) != 1)
    throw Error(ErrorCode::NonSimpleCurve,
                "curve winds " + std::to_string(winding) + " times around the interior point");

  BoundaryCurve out(std::move(points), length);
  if (winding < 0) out = out.reversed();

  for (int j = 0; j < out.samples(); ++j) {
    const double unit = std::abs(out.tangent(j).norm() - 1.0);
    const double tang = std::abs(out.point(j).dot(out.tangent(j)));
    if (unit > 1e-8 || tang > 1e-8)
    {
      char msg[160];
      std::snprintf(msg, sizeof msg, "unit-speed defect %.3g, tangency defect %.3g at sample %d; increase samples",
                    unit, tang, j);
      throw Error(ErrorCode::UnderResolvedCurve, msg);
    }
  }
  return out;
}

double geodesic_curvature(const BoundaryCurve& curve, double s) { return curve.curvature(s); }

double mean_curvature(const BoundaryCurve& curve, double s, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::DegenerateRadius, "radius must be positive");
  return curve.curvature(s) / (2.0 * t);
}

// ---------------------------------------------------------------------------
// Cones

RawCurve raw_boundary(const CrossSection& cs) {
  RawCurve raw;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Interval2D>) {
          throw Error(ErrorCode::UnsupportedGeometry, "planar sectors have no boundary curve");
        } else if constexpr (std::is_same_v<T, LatitudeCircle>) {
          const double st = std::sin(s.theta0), ct = std::cos(s.theta0);
          raw.point = [st, ct](double u) { return Vec3(st * std::cos(u), st * std::sin(u), ct); };
        } else {
          auto rho = s.rho;
          raw.point = [rho](double u) {
            const double r = rho(u);
            return Vec3(std::sin(r) * std::cos(u), std::sin(r) * std::sin(u), std::cos(r));
          };
        }
      },
      cs.shape());
  raw.interior = Vec3::UnitZ();
  return raw;
}

ConeSpec::ConeSpec(CrossSection cross_section)
    : ConeSpec(cross_section, Eigen::VectorXd::Zero(cross_section.dimension())) {}

ConeSpec::ConeSpec(CrossSection cross_section, Eigen::VectorXd vertex)
    : cross_section_(std::move(cross_section)), vertex_(std::move(vertex)) {
  if (vertex_.size() != cross_section_.dimension())
    throw Error(ErrorCode::InvalidCrossSection, "vertex dimension does not match cross-section");
  if (cross_section_.dimension() == 3)
    curve_ = std::make_shared<const BoundaryCurve>(
        arclength_reparametrize(raw_boundary(cross_section_), cross_section_.samples()));
}

const BoundaryCurve& ConeSpec::boundary_curve() const {
  if (!curve_) throw Error(ErrorCode::UnsupportedGeometry, "planar cones have no boundary curve");
  return *curve_;
}

double mean_curvature(const ConeSpec& cone, double s, double t) {
  return mean_curvature(cone.boundary_curve(), s, t);
}

double curvature_tolerance(const BoundaryCurve& curve) {
  return 1e-9 * (1.0 + curve.max_second_derivative_norm());
}

ConvexityEvidence complement_is_convex(const ConeSpec& cone) {
  ConvexityEvidence ev;
  if (cone.dimension() == 2) {
    const double theta = *cone.cross_section().half_aperture();
    ev.convex = 2.0 * theta >= kPi;
    ev.s0 = std::numeric_limits<double>::quiet_NaN();
    ev.kappa_max = std::numeric_limits<double>::quiet_NaN();
    return ev;
  }
  const BoundaryCurve& curve = cone.boundary_curve();
  ev.tolerance = curvature_tolerance(curve);
  int best = 0;
  ev.kappa_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < curve.samples(); ++j) {
    const double k = curve.curvature(j);
    if (k > ev.kappa_max) {
      ev.kappa_max = k;
      best = j;
    }
  }
  ev.s0 = curve.sample_arclength(best);
  if (std::abs(ev.kappa_max) < ev.tolerance)
    throw Error(ErrorCode::IndeterminateSign,
                "max geodesic curvature " + std::to_string(ev.kappa_max) +
                    " is within tolerance of zero");
  ev.convex = ev.kappa_max <= ev.tolerance;
  return ev;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Empty: return "Empty";
    case Verdict::Finite: return "Finite";
    case Verdict::Infinite: return "Infinite";
    case Verdict::IndeterminateByPaper: return "IndeterminateByPaper";
  }
  return "?";
}

namespace {

std::optional<ConvexityEvidence> convexity_or_verdict(const ConeSpec& cone,
                                                      ClassificationVerdict& verdict) {
  try {
    return complement_is_convex(cone);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IndeterminateSign) throw;
    verdict.verdict = Verdict::IndeterminateByPaper;
    verdict.reason =
        "geodesic curvature vanishes to within tolerance at its maximum; the convexity "
        "dichotomy cannot be decided numerically";
    return std::nullopt;
  }
}

ClassificationVerdict infinite(const ConvexityEvidence& ev, const std::string& reason) {
  ClassificationVerdict v;
  v.verdict = Verdict::Infinite;
  v.reason = reason;
  v.curvature_evidence = CurvatureEvidence{ev.s0, ev.kappa_max};
  return v;
}

}  // namespace

ClassificationVerdict classify(const ConeSpec& cone) {
  ClassificationVerdict v;
  const auto ev = convexity_or_verdict(cone, v);
  if (!ev) return v;
  if (cone.dimension() == 2) {
    if (ev->convex) {
      v.verdict = Verdict::Empty;
      v.reason = "convex complement: no spectrum below -alpha^2";
    } else {
      v.verdict = Verdict::IndeterminateByPaper;
      v.reason = "planar sector with non-convex complement: finiteness is not decided in dimension 2";
    }
    return v;
  }
  if (ev->convex) {
    v.verdict = Verdict::Empty;
    v.reason = "convex complement (geodesic curvature <= 0): no spectrum below -alpha^2";
    return v;
  }
  return infinite(*ev, "geodesic curvature positive at s0: cone complement is not convex, so the "
                       "discrete spectrum of a cone is infinite");
}

ClassificationVerdict classify(const DomainSpec& domain) {
  if (!domain.perturbed()) return classify(domain.cone);
  ClassificationVerdict v;
  const auto ev = convexity_or_verdict(domain.cone, v);
  if (!ev) return v;

  const bool smoothed = std::holds_alternative<SmoothedVertex>(domain.perturbation);
  if (ev->convex) {
    // Rounding the tip of a convex set keeps it convex; other perturbations are not analysed.
    if (smoothed) {
      v.verdict = Verdict::Empty;
      v.reason = "smoothed vertex keeps the complement convex: no spectrum below -alpha^2";
    } else {
      v.verdict = Verdict::Finite;
      v.reason = "complement of the associated cone is convex: finitely many eigenvalues below "
                 "-alpha^2";
    }
    return v;
  }
  if (domain.cone.dimension() == 2) {
    v.verdict = Verdict::IndeterminateByPaper;
    v.reason = "planar domain with non-convex complement: finiteness is not decided in dimension 2";
    return v;
  }
  return infinite(*ev, "associated cone has positive geodesic curvature at s0: the discrete "
                       "spectrum is infinite");
}

}  // namespace robincone
