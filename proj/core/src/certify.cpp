#include "robincone/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robincone/error.hpp"
#include "robincone/parallel.hpp"
#include "robincone/quadrature.hpp"

namespace robincone {

// ---------------------------------------------------------------------------
// 1D Robin–Dirichlet

RobinDirichletEigen1D solve_robin_dirichlet_1d(double R, double alpha, double delta) {
  if (!(R > 0 && alpha > 0 && delta > 0))
    throw Error(ErrorCode::RegimeError, "R, alpha and delta must be positive");
  const double a = R * alpha;
  const double c = a * delta;
  RobinDirichletEigen1D out;
  out.R = R;
  out.alpha = alpha;
  out.delta = delta;
  if (c < 1.0 - 1e-14)
    throw Error(ErrorCode::RegimeError,
                "R*alpha*delta = " + std::to_string(c) + " < 1: the layer has no negative eigenvalue");

  if (c <= 1.0 + 1e-14) {
    // Degenerate threshold: ψ ∝ δ − t, E = 0.
    out.small_ = true;
    out.scale_ = std::sqrt(3.0 / (delta * delta * delta));
    return out;
  }

  // f(x) = tanh x − x/c is concave on (0, c] with f > 0 left of the root and f(c) < 0.
  double lo = 0.0, hi = c, x = c;
  for (int it = 0; it < 200; ++it) {
    const double th = std::tanh(x);
    const double f = th - x / c;
    if (f > 0) lo = x;
    else hi = x;
    const double fp = (1.0 - th * th) - 1.0 / c;
    double next = fp != 0.0 ? x - f / fp : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * x) {
      x = next;
      break;
    }
    x = next;
  }
  out.k = x / delta;
  out.E = -out.k * out.k;
  out.residual = std::abs(std::tanh(out.k * delta) - out.k / a);

  if (x < 0.5) {
    // ψ ∝ sinh(k(δ − t))/k; normalize by quadrature (the integrand is nearly polynomial).
    out.small_ = true;
    const QuadratureRule rule = gauss_legendre(40, 0.0, delta);
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = std::sinh(out.k * rule.nodes[i]) / out.k;
      integral += rule.weights[i] * v * v;
    }
    out.scale_ = 1.0 / std::sqrt(integral);
  } else {
    // ψ = Ĉ e^{−kt}(1 − e^{−2k(δ−t)}), free of overflow for large kδ.
    const double k = out.k;
    const double norm2 = (1.0 - std::exp(-4.0 * x)) / (2.0 * k) - 2.0 * delta * std::exp(-2.0 * x);
    out.scale_ = 1.0 / std::sqrt(norm2);
  }
  return out;
}

double RobinDirichletEigen1D::psi(double t) const {
  if (t < 0.0 || t > delta) return 0.0;
  if (small_) return k == 0.0 ? scale_ * (delta - t) : scale_ * std::sinh(k * (delta - t)) / k;
  return scale_ * std::exp(-k * t) * (1.0 - std::exp(-2.0 * k * (delta - t)));
}

double RobinDirichletEigen1D::dpsi(double t) const {
  if (t < 0.0 || t > delta) return 0.0;
  if (small_) return k == 0.0 ? -scale_ : -scale_ * std::cosh(k * (delta - t));
  return -k * scale_ * std::exp(-k * t) * (1.0 + std::exp(-2.0 * k * (delta - t)));
}

// ---------------------------------------------------------------------------
// Half-line inequality

double halfline_inequality_check(const HalflineProbe& probe, double alpha) {
  double kinetic = 0.0, mass = 0.0;
  for (std::size_t p = 0; p + 1 < probe.breaks.size(); ++p) {
    const QuadratureRule rule = gauss_legendre(24, probe.breaks[p], probe.breaks[p + 1]);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = probe.v(rule.nodes[i]);
      const double dv = probe.dv(rule.nodes[i]);
      kinetic += rule.weights[i] * dv * dv;
      mass += rule.weights[i] * v * v;
    }
  }
  const double v0 = probe.v(0.0);
  return kinetic - alpha * v0 * v0 + alpha * alpha * mass;
}

HalflineProbe exponential_probe(double c) {
  HalflineProbe p;
  p.v = [c](double t) { return std::exp(-c * t); };
  p.dv = [c](double t) { return -c * std::exp(-c * t); };
  for (int i = 0; i <= 120; ++i) p.breaks.push_back(0.5 * i / c);
  return p;
}

HalflineProbe hat_probe(double length) {
  HalflineProbe p;
  p.v = [length](double t) { return t < length ? 1.0 - t / length : 0.0; };
  p.dv = [length](double t) { return t < length ? -1.0 / length : 0.0; };
  p.breaks = {0.0, length};
  return p;
}

HalflineProbe random_spline_probe(std::mt19937_64& rng, double alpha) {
  std::uniform_int_distribution<int> count(2, 8);
  std::uniform_real_distribution<double> gap(0.05, 3.0);
  std::normal_distribution<double> gauss;
  const int knots = count(rng);
  std::vector<double> t(knots + 1), y(knots + 1), d(knots + 1);
  t[0] = 0.0;
  for (int i = 1; i <= knots; ++i) t[i] = t[i - 1] + gap(rng) / alpha;
  for (int i = 0; i < knots; ++i) {
    y[i] = gauss(rng);
    d[i] = 2.0 * alpha * gauss(rng);
  }
  y[knots] = d[knots] = 0.0;

  auto locate = [t](double x) {
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    return std::clamp(static_cast<int>(it - t.begin()) - 1, 0, static_cast<int>(t.size()) - 2);
  };
  HalflineProbe p;
  p.v = [=](double x) {
    if (x >= t.back()) return 0.0;
    const int i = locate(x);
    const double hgt = t[i + 1] - t[i], s = (x - t[i]) / hgt;
    const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
    const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
    return h00 * y[i] + h10 * hgt * d[i] + h01 * y[i + 1] + h11 * hgt * d[i + 1];
  };
  p.dv = [=](double x) {
    if (x >= t.back()) return 0.0;
    const int i = locate(x);
    const double hgt = t[i + 1] - t[i], s = (x - t[i]) / hgt;
    const double g00 = 6 * s * s - 6 * s, g10 = 3 * s * s - 4 * s + 1;
    const double g01 = -6 * s * s + 6 * s, g11 = 3 * s * s - 2 * s;
    return (g00 * y[i] + g01 * y[i + 1]) / hgt + g10 * d[i] + g11 * d[i + 1];
  };
  p.breaks = t;
  return p;
}

// ---------------------------------------------------------------------------
// Tubular coordinates

TubularChart::TubularChart(Curvatures curvatures, double t_max,
                           std::function<bool(const Eigen::VectorXd&)> in_range)
    : curvatures_(std::move(curvatures)), t_max_(t_max), in_range_(std::move(in_range)) {}

TubularChart TubularChart::cone(std::shared_ptr<const BoundaryCurve> curve, double t_max) {
  return TubularChart(
      [curve](const Eigen::VectorXd& p) {
        return std::vector<double>{0.0, curve->curvature(p[0]) / p[1]};
      },
      t_max, [](const Eigen::VectorXd& p) { return p.size() == 2 && p[1] > 0.0; });
}

TubularChart TubularChart::constant(std::vector<double> curvatures, double t_max) {
  return TubularChart([curvatures](const Eigen::VectorXd&) { return curvatures; }, t_max);
}

std::vector<double> TubularChart::principal_curvatures(const Eigen::VectorXd& point) const {
  return curvatures_(point);
}

bool TubularChart::contains(const Eigen::VectorXd& point, double t) const {
  return t >= 0.0 && t <= t_max_ && (!in_range_ || in_range_(point));
}

double tubular_jacobian(const TubularChart& chart, const Eigen::VectorXd& point, double t) {
  if (!chart.contains(point, t)) throw Error(ErrorCode::OutOfChart, "point outside the tubular chart");
  double j = 1.0;
  bool convex_complement = true;
  for (double k : chart.principal_curvatures(point)) {
    // Each factor must stay positive: past a focal distance the product can turn positive again.
    const double factor = 1.0 - t * k;
    if (!(factor > 0.0)) throw Error(ErrorCode::OutOfChart, "normal map is not injective here (past a focal point)");
    j *= factor;
    convex_complement = convex_complement && k <= 0.0;
  }
  if (convex_complement && j < 1.0) throw Error(ErrorCode::OutOfChart, "J < 1 with nonpositive curvatures");
  return j;
}

// ---------------------------------------------------------------------------
// Graph chart of the cone boundary

ConeChart::ConeChart(std::shared_ptr<const BoundaryCurve> curve, double s0)
    : curve_(std::move(curve)), s0_(s0) {
  const auto f = curve_->frame(s0);
  e1_ = f[0];
  e2_ = f[1].normalized();
  e3_ = e1_.cross(e2_);
  kappa0_ = curve_->curvature(s0);
}

std::array<double, 6> ConeChart::components(double s) const {
  const auto f = curve_->frame(s);
  return {f[0].dot(e1_), f[0].dot(e2_), f[0].dot(e3_), f[1].dot(e1_), f[1].dot(e2_), f[1].dot(e3_)};
}

double ConeChart::solve_s(double y) const {
  double s = s0_;
  const double limit = 0.25 * curve_->length();
  for (int it = 0; it < 50; ++it) {
    const auto c = components(s);
    const double f = c[1] - y * c[0];
    const double fp = c[4] - y * c[3];
    if (fp <= 0.0 || c[0] <= 0.0) break;
    const double step = f / fp;
    s -= step;
    if (std::abs(s - s0_) > limit) break;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(s))) {
      const auto c2 = components(s);
      if (c2[0] > 0.0) return s;
      break;
    }
  }
  throw Error(ErrorCode::OutOfChart, "no boundary point with x2/x1 = " + std::to_string(y));
}

ConeChart::Point ConeChart::at(double x1, double x2) const {
  if (!(x1 > 0.0)) throw Error(ErrorCode::OutOfChart, "chart needs x1 > 0");
  Point p;
  p.s = solve_s(x2 / x1);
  const auto c = components(p.s);
  p.g1 = c[0];
  p.g2 = c[1];
  p.dg1 = c[3];
  p.dg2 = c[4];
  p.tau = x1 / c[0];
  p.kappa = curve_->curvature(p.s);
  p.jacobian = p.tau * std::abs(c[3] * c[1] - c[4] * c[0]);
  return p;
}

double ConeChart::h(double y) const {
  const auto c = components(solve_s(y));
  return c[2] / c[0];
}

double ConeChart::dh(double y) const {
  const auto c = components(solve_s(y));
  return (c[5] * c[0] - c[2] * c[3]) / (c[4] * c[0] - c[1] * c[3]);
}

double ConeChart::metric_defect(double y) const {
  const double hv = h(y), dv = dh(y);
  const double u = hv - y * dv;
  return u * u + dv * dv;  // a = w wᵀ with w = (u, h')
}

// ---------------------------------------------------------------------------
// Trial-function quotients

namespace {

double bump(double x) { return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0; }
double bump_derivative(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double q = 1.0 - x * x;
  return bump(x) * (-2.0 * x / (q * q));
}

// φ(x₁, x₂) = β((x₁ − c)/w1)·β(x₂/w2) in absolute chart coordinates.
struct Box {
  double c, w1, w2;
  void eval(double x1, double x2, double& f, double& f1, double& f2) const {
    const double u1 = (x1 - c) / w1, u2 = x2 / w2;
    const double b1 = bump(u1), b2 = bump(u2);
    f = b1 * b2;
    f1 = bump_derivative(u1) / w1 * b2;
    f2 = b1 * bump_derivative(u2) / w2;
  }
};

struct Layer {
  std::function<double(double)> psi, dpsi;
  double t_max;
  double robin;
};

struct Bilinear {
  double grad = 0.0, boundary = 0.0, norm = 0.0;
  double form(double robin) const { return grad - robin * boundary; }
};

QuadratureRule two_panel(int order, double a, double b) {
  return composite_gauss_legendre({a, 0.5 * (a + b), b}, order);
}

// Bilinear forms of f_i = φ_i ψ and f_j = φ_j ψ over the support of f_i, in exact tubular
// coordinates x = τγ(s) + t·m(s): dV = (τ − tκ) ds dτ dt,
// |∇f|² = f_s²/(τ − tκ)² + f_τ² + f_t².
Bilinear integrate(const ConeChart& chart, const Box& bi, const Box& bj, const Layer& layer, int order) {
  const QuadratureRule q1 = two_panel(order, bi.c - bi.w1, bi.c + bi.w1);
  const QuadratureRule q2 = two_panel(order, -bi.w2, bi.w2);
  const QuadratureRule qt = gauss_legendre(order, 0.0, layer.t_max);
  std::vector<double> psi(qt.nodes.size()), dpsi(qt.nodes.size());
  for (std::size_t k = 0; k < qt.nodes.size(); ++k) {
    psi[k] = layer.psi(qt.nodes[k]);
    dpsi[k] = layer.dpsi(qt.nodes[k]);
  }
  const double psi0 = layer.psi(0.0);

  Bilinear out;
  for (std::size_t a = 0; a < q1.nodes.size(); ++a) {
    for (std::size_t b = 0; b < q2.nodes.size(); ++b) {
      const double x1 = q1.nodes[a], x2 = q2.nodes[b];
      double fi, fi1, fi2, fj, fj1, fj2;
      bi.eval(x1, x2, fi, fi1, fi2);
      bj.eval(x1, x2, fj, fj1, fj2);
      if (fi == 0.0 && fi1 == 0.0 && fi2 == 0.0) continue;
      const ConeChart::Point p = chart.at(x1, x2);
      const double w = q1.weights[a] * q2.weights[b] / p.jacobian;
      // Tangential derivatives of φ along s (per unit τ) and τ.
      const double di_s = p.tau * (fi1 * p.dg1 + fi2 * p.dg2), dj_s = p.tau * (fj1 * p.dg1 + fj2 * p.dg2);
      const double di_t = fi1 * p.g1 + fi2 * p.g2, dj_t = fj1 * p.g1 + fj2 * p.g2;
      for (std::size_t k = 0; k < qt.nodes.size(); ++k) {
        const double lam = p.tau - qt.nodes[k] * p.kappa;
        if (!(lam > 0.0)) throw Error(ErrorCode::OutOfChart, "layer thicker than the normal radius");
        const double vol = w * qt.weights[k] * lam;
        const double ps = psi[k], dps = dpsi[k];
        out.grad += vol * (ps * ps * (di_s * dj_s / (lam * lam) + di_t * dj_t) + fi * fj * dps * dps);
        out.norm += vol * fi * fj * ps * ps;
      }
      out.boundary += w * p.tau * fi * fj * psi0 * psi0;
    }
  }
  return out;
}

struct FamilyGeometry {
  double b, eps;
  std::vector<Box> unit_boxes;  // at scale 1
};

Box scaled(const Box& box, double factor) { return {box.c * factor, box.w1 * factor, box.w2 * factor}; }

FamilyGeometry family_geometry(int N, double b, double eps) {
  FamilyGeometry g{b, eps, {}};
  for (int j = 1; j <= N; ++j) {
    const double c = b * (2.0 + 3.0 * j);
    g.unit_boxes.push_back({c, 0.5 * b, 0.5 * eps * (c - 0.5 * b)});
  }
  return g;
}

// Largest dyadic ε with ‖a‖ ≤ ½ and κ ≥ κ₀/2 (i.e. H ≥ H(M)/2) on the chart |y| ≤ ε.
double choose_eps(const ConeChart& chart, const TrialFamilyOptions& opt, double& max_defect, double& min_ratio) {
  for (int p = 1; p <= opt.max_eps_power; ++p) {
    const double eps = std::ldexp(1.0, -p);
    bool ok = true;
    double defect = 0.0, ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 64 && ok; ++i) {
      const double y = eps * (2.0 * i / 64.0 - 1.0);
      try {
        defect = std::max(defect, chart.metric_defect(y));
        ratio = std::min(ratio, chart.curve().curvature(chart.solve_s(y)) / chart.kappa0());
      } catch (const Error&) {
        ok = false;
      }
      ok = ok && defect <= 0.5 && ratio >= 0.5;
    }
    if (ok) {
      max_defect = defect;
      min_ratio = ratio;
      return eps;
    }
  }
  throw Error(ErrorCode::OutOfChart, "no chart width satisfies the metric and curvature bounds");
}

Layer layer_for(const RobinDirichletEigen1D& eig, double dilation, double robin) {
  // ψ(t / dilation) on [0, δ·dilation].
  Layer l;
  l.psi = [eig, dilation](double t) { return eig.psi(t / dilation); };
  l.dpsi = [eig, dilation](double t) { return eig.dpsi(t / dilation) / dilation; };
  l.t_max = eig.delta * dilation;
  l.robin = robin;
  return l;
}

struct MemberValues {
  double q_low, q_high, f_quotient;
};

// Route used for certification: f at scale √R with parameter Rα, quotient divided by R².
MemberValues evaluate_member(const ConeChart& chart, const Box& unit, double R, double alpha,
                             const RobinDirichletEigen1D& eig, const TrialFamilyOptions& opt) {
  const Box box = scaled(unit, std::sqrt(R));
  const Layer layer = layer_for(eig, 1.0, R * alpha);
  const Bilinear hi = integrate(chart, box, box, layer, opt.order_high);
  const Bilinear lo = integrate(chart, box, box, layer, opt.order_low);
  const double fq = hi.form(layer.robin) / hi.norm;
  return {lo.form(layer.robin) / lo.norm / (R * R), fq / (R * R), fq};
}

const ConeSpec& require_curved(const ConeSpec& cone, ConvexityEvidence& ev) {
  if (cone.dimension() != 3)
    throw Error(ErrorCode::CurvatureNotPositive, "trial-function family needs a three-dimensional cone");
  try {
    ev = complement_is_convex(cone);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IndeterminateSign)
      throw Error(ErrorCode::CurvatureNotPositive, "geodesic curvature is nowhere positive");
    throw;
  }
  if (ev.convex) throw Error(ErrorCode::CurvatureNotPositive, "geodesic curvature is nowhere positive");
  return cone;
}

}  // namespace

TrialFamily build_trial_family(const ConeSpec& cone, double alpha, int N, double r0,
                                   const TrialFamilyOptions& opt) {
  if (!(alpha > 0) || N < 1 || !(r0 >= 0))
    throw Error(ErrorCode::InvalidConfig, "trial family needs alpha > 0, N >= 1, r0 >= 0");
  ConvexityEvidence ev;
  require_curved(cone, ev);
  const ConeChart chart(cone.shared_curve(), ev.s0);

  TrialFamily fam;
  fam.N = N;
  fam.alpha = alpha;
  fam.r0 = r0;
  fam.b = opt.b;
  fam.s0 = ev.s0;
  fam.kappa0 = chart.kappa0();
  fam.threshold = -alpha * alpha;
  fam.cone = cone.cross_section().describe();
  fam.eps = choose_eps(chart, opt, fam.max_metric_defect, fam.min_curvature_ratio);
  const FamilyGeometry geom = family_geometry(N, opt.b, fam.eps);

  for (double R = std::max(1.0, 4.0 / (alpha * alpha)); R <= opt.R_max; R *= 2.0) {
    const double delta = 1.0 / std::sqrt(R);
    const RobinDirichletEigen1D eig = solve_robin_dirichlet_1d(R, alpha, delta);
    std::vector<MemberValues> values(N);
    parallel_for(N, [&](int j) { values[j] = evaluate_member(chart, geom.unit_boxes[j], R, alpha, eig, opt); });

    double worst = -std::numeric_limits<double>::infinity();
    bool all_below = true;
    const double dilation = R * std::sqrt(R);  // F(x) = f(x/R), f supported at scale √R
    for (int j = 0; j < N; ++j) {
      const auto& v = values[j];
      const double gap = std::abs(v.q_high - v.q_low);
      if (gap > opt.relative_tolerance * std::abs(v.q_high))
        throw Error(ErrorCode::QuadratureNonConvergence,
                    "orders " + std::to_string(opt.order_low) + " and " + std::to_string(opt.order_high) +
                        " disagree by " + std::to_string(gap) + " for member " + std::to_string(j + 1));
      worst = std::max(worst, v.q_high);
      const double inner = dilation * (geom.unit_boxes[j].c - geom.unit_boxes[j].w1) - R * delta;
      all_below = all_below && v.q_high < fam.threshold - gap && inner > r0;
    }
    fam.history.emplace_back(R, worst);
    if (!all_below) continue;

    fam.R = R;
    fam.delta = delta;
    fam.certified = true;
    for (int j = 0; j < N; ++j) {
      TrialMember m;
      m.index = j + 1;
      m.center = geom.unit_boxes[j].c;
      m.half_width1 = geom.unit_boxes[j].w1;
      m.half_width2 = geom.unit_boxes[j].w2;
      m.quotient = values[j].q_high;
      m.quotient_low = values[j].q_low;
      m.f_quotient = values[j].f_quotient;
      m.inner_radius = dilation * (m.center - m.half_width1) - R * delta;
      fam.members.push_back(m);
      fam.quotients.push_back(m.quotient);
    }
    // Cross forms by quadrature over the support of the first function of each pair.
    const Layer layer = layer_for(eig, 1.0, R * alpha);
    std::vector<Bilinear> diag(N);
    for (int j = 0; j < N; ++j) {
      const Box box = scaled(geom.unit_boxes[j], std::sqrt(R));
      diag[j] = integrate(chart, box, box, layer, opt.order_low);
    }
    fam.cross_forms = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const Box bi = scaled(geom.unit_boxes[i], std::sqrt(R));
        const Box bj = scaled(geom.unit_boxes[j], std::sqrt(R));
        const Bilinear c = i == j ? diag[i] : integrate(chart, bi, bj, layer, opt.order_low);
        fam.cross_forms(i, j) = c.form(layer.robin) / std::sqrt(diag[i].norm * diag[j].norm) / (R * R);
      }
    return fam;
  }
  throw Error(ErrorCode::RBudgetExceeded,
              "no certificate up to R = " + std::to_string(opt.R_max) + "; this is not evidence against "
              "the existence of the family");
}

ScalingCheck trial_scaling_check(const ConeSpec& cone, double alpha, double R, int j,
                                   const TrialFamilyOptions& opt) {
  ConvexityEvidence ev;
  require_curved(cone, ev);
  const ConeChart chart(cone.shared_curve(), ev.s0);
  double defect = 0.0, ratio = 0.0;
  const double eps = choose_eps(chart, opt, defect, ratio);
  const FamilyGeometry geom = family_geometry(j, opt.b, eps);
  const Box& unit = geom.unit_boxes.at(j - 1);
  const RobinDirichletEigen1D eig = solve_robin_dirichlet_1d(R, alpha, 1.0 / std::sqrt(R));

  const Box fbox = scaled(unit, std::sqrt(R));
  const Layer flayer = layer_for(eig, 1.0, R * alpha);
  const Bilinear f = integrate(chart, fbox, fbox, flayer, opt.order_high);

  const Box Fbox = scaled(unit, R * std::sqrt(R));
  const Layer Flayer = layer_for(eig, R, alpha);
  const Bilinear F = integrate(chart, Fbox, Fbox, Flayer, opt.order_high);

  return {f.form(flayer.robin) / f.norm / (R * R), F.form(Flayer.robin) / F.norm};
}

// ---------------------------------------------------------------------------
// Quasi-modes

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double smooth_step_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  const double da = a / (x * x), db = -b / ((1.0 - x) * (1.0 - x));
  return (da * b - a * db) / ((a + b) * (a + b));
}

namespace {

std::vector<double> refined_breaks(double a, double b, double edge, int edge_panels, double panel) {
  // Fine panels on [a, a+edge] and [b−edge, b], uniform panels in between.
  std::vector<double> out;
  for (int i = 0; i < edge_panels; ++i) out.push_back(a + edge * i / edge_panels);
  const std::vector<double> mid = uniform_breaks(a + edge, b - edge, panel);
  out.insert(out.end(), mid.begin(), mid.end() - 1);
  for (int i = 0; i <= edge_panels; ++i) out.push_back(b - edge + edge * i / edge_panels);
  return out;
}

double quasimode_quotient(double theta0, double alpha, double k, int N, int order) {
  const double n = N;
  const double sqrt_n = std::sqrt(n);
  const QuadratureRule qr = composite_gauss_legendre(
      refined_breaks(n, 2.0 * n, 1.0, 8, std::min(0.5, 1.0 / k)), order);
  std::vector<double> xi_breaks;
  for (int i = 0; i <= 8; ++i) xi_breaks.push_back((sqrt_n - 1.0) * i / 8.0 + 0.0);
  const std::vector<double> tail = uniform_breaks(sqrt_n - 1.0, sqrt_n, 1.0 / 8.0);
  xi_breaks.insert(xi_breaks.end(), tail.begin() + 1, tail.end());
  // Split the exponential part more finely when √N − 1 is long.
  std::vector<double> fine;
  for (std::size_t i = 0; i + 1 < xi_breaks.size(); ++i) {
    const std::vector<double> sub = uniform_breaks(xi_breaks[i], xi_breaks[i + 1], 0.25 / alpha);
    fine.insert(fine.end(), sub.begin(), sub.end() - 1);
  }
  fine.push_back(sqrt_n);
  const QuadratureRule qx = composite_gauss_legendre(fine, order);

  std::vector<double> g(qx.nodes.size()), dg(qx.nodes.size());
  for (std::size_t b = 0; b < qx.nodes.size(); ++b) {
    const double xi = qx.nodes[b];
    const double e = std::exp(-alpha * xi);
    const double cut = smooth_step(sqrt_n - xi);
    g[b] = e * cut;
    dg[b] = -alpha * e * cut - e * smooth_step_derivative(sqrt_n - xi);
  }
  const double g0 = smooth_step(sqrt_n);

  double grad = 0.0, norm = 0.0, boundary = 0.0;
  for (std::size_t a = 0; a < qr.nodes.size(); ++a) {
    const double r = qr.nodes[a];
    const double cut = smooth_step(r - n) * smooth_step(2.0 * n - r);
    const double dcut = smooth_step_derivative(r - n) * smooth_step(2.0 * n - r) -
                        smooth_step(r - n) * smooth_step_derivative(2.0 * n - r);
    const double p = cut * std::sin(k * r);
    const double dp = dcut * std::sin(k * r) + cut * k * std::cos(k * r);
    for (std::size_t b = 0; b < qx.nodes.size(); ++b) {
      const double xi = qx.nodes[b];
      const double d = xi / r;
      // r² sin φ dr dφ with dφ = dξ / r.
      const double w = qr.weights[a] * qx.weights[b] * r * std::sin(theta0 - d);
      const double ur = dp * g[b] + p * dg[b] * d;
      const double uang = p * dg[b];
      grad += w * (ur * ur + uang * uang);
      norm += w * p * p * g[b] * g[b];
    }
    boundary += qr.weights[a] * r * std::sin(theta0) * p * p * g0 * g0;
  }
  return (grad - alpha * boundary) / norm;
}

}  // namespace

QuasimodeResult build_quasimode(const ConeSpec& cone, double alpha, double k, int N,
                                const QuasimodeOptions& opt) {
  const auto theta0 = cone.cross_section().latitude_angle();
  if (!theta0)
    throw Error(ErrorCode::UnsupportedGeometry,
                "quasi-modes need the distance to the boundary, available for circular cones only");
  if (!(k > 0) || !(alpha > 0) || N < 1) throw Error(ErrorCode::InvalidConfig, "need k > 0, alpha > 0, N >= 1");
  if (!(1.0 / std::sqrt(static_cast<double>(N)) < *theta0))
    throw Error(ErrorCode::InvalidConfig, "N too small: the boundary layer would leave the cone");

  QuasimodeResult out;
  out.k = k;
  out.N = N;
  out.target = k * k - alpha * alpha;
  out.quotient = quasimode_quotient(*theta0, alpha, k, N, opt.order_high);
  out.quotient_low = quasimode_quotient(*theta0, alpha, k, N, opt.order_low);
  const double scale = std::max({std::abs(out.quotient), alpha * alpha, k * k});
  if (std::abs(out.quotient - out.quotient_low) > opt.relative_tolerance * scale)
    throw Error(ErrorCode::QuadratureNonConvergence, "quasi-mode quotient depends on the quadrature order");
  out.deviation = std::abs(out.quotient - out.target);
  return out;
}

}  // namespace robincone
