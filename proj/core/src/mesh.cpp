#include "robincone/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>

#include "robincone/error.hpp"

namespace robincone {

namespace {

constexpr double kPi = std::numbers::pi;

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

// Half-aperture of a sector or polar angle of a latitude cone; nullopt for graphs.
std::optional<double> aperture(const ConeSpec& cone) {
  if (auto t = cone.cross_section().half_aperture()) return t;
  return cone.cross_section().latitude_angle();
}

}  // namespace

// ---------------------------------------------------------------------------
// DomainSpec

double RadialBump::offset(double r) const { return amplitude * bump((r - center) / width); }

std::string to_string(ArtificialBC bc) {
  return bc == ArtificialBC::Dirichlet ? "dirichlet" : "neumann";
}

double DomainSpec::perturbation_extent() const {
  if (const auto* sv = std::get_if<SmoothedVertex>(&perturbation)) {
    const auto theta = aperture(cone);
    if (!theta) return std::numeric_limits<double>::infinity();
    return sv->radius * (std::abs(1.0 / std::tan(*theta)) + 1.0);
  }
  if (const auto* rb = std::get_if<RadialBump>(&perturbation)) return rb->center + rb->width;
  return 0.0;
}

void DomainSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidDomain, msg); };
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
  if (!(truncation_radius > 0.0) || !std::isfinite(truncation_radius))
    fail("truncation radius must be positive");
  if (!perturbed()) return;

  const auto theta = aperture(cone);
  if (!theta)
    throw Error(ErrorCode::UnsupportedGeometry,
                "perturbations are defined for sectors and circular cones only");
  if (const auto* sv = std::get_if<SmoothedVertex>(&perturbation)) {
    if (!(sv->radius > 0.0)) fail("smoothing radius must be positive");
    if (std::abs(*theta - kPi / 2) < 1e-6)
      throw Error(ErrorCode::UnsupportedGeometry, "a flat boundary has no vertex to smooth");
  }
  if (const auto* rb = std::get_if<RadialBump>(&perturbation)) {
    if (!(rb->width > 0.0)) fail("bump width must be positive");
    if (!(rb->center - rb->width > 0.0)) fail("bump support must stay away from the vertex");
    const double lo = *theta + std::min(0.0, rb->amplitude);
    const double hi = *theta + std::max(0.0, rb->amplitude);
    if (!(lo > 0.0 && hi < kPi)) fail("bumped aperture leaves (0, pi)");
  }
  const double extent = perturbation_extent();
  if (!(extent < truncation_radius - 1.0))
    fail("perturbation reaches radius " + std::to_string(extent) +
         ", must stay inside R_T - 1 = " + std::to_string(truncation_radius - 1.0));
}

DomainSpec DomainSpec::dilated(double factor) const {
  DomainSpec out = *this;
  out.truncation_radius *= factor;
  if (auto* sv = std::get_if<SmoothedVertex>(&out.perturbation)) sv->radius *= factor;
  if (auto* rb = std::get_if<RadialBump>(&out.perturbation)) {
    rb->center *= factor;
    rb->width *= factor;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mesh measures

std::string to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::Robin: return "robin";
    case EdgeTag::Artificial: return "artificial";
    case EdgeTag::Axis: return "axis";
  }
  return "?";
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Eigen::Vector2d e1 = nodes[tri[1]] - nodes[tri[0]];
  const Eigen::Vector2d e2 = nodes[tri[2]] - nodes[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double Mesh::area() const {
  double total = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) total += triangle_area(t);
  return total;
}

double Mesh::boundary_length(EdgeTag tag) const {
  double total = 0.0;
  for (const auto& e : boundary_edges)
    if (e.tag == tag) total += (nodes[e.a] - nodes[e.b]).norm();
  return total;
}

double Mesh::aspect_ratio(int t) const {
  const auto& tri = triangles[t];
  double lmax = 0.0;
  for (int k = 0; k < 3; ++k)
    lmax = std::max(lmax, (nodes[tri[k]] - nodes[tri[(k + 1) % 3]]).squaredNorm());
  const double a = std::abs(triangle_area(t));
  if (a <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(3.0) * lmax / (4.0 * a);
}

double Mesh::max_aspect_ratio() const {
  double out = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) out = std::max(out, aspect_ratio(t));
  return out;
}

// ---------------------------------------------------------------------------
// Wedge mesher
//
// Logical coordinates (r, u) with r ∈ [0, R_T] and u ∈ [0, 1]; rings are r = const.
// The polar angle is φ = lo(r) + u·(hi(r) − lo(r)) and the physical radius radius(r, φ).

namespace {

struct Layout {
  MeshKind kind = MeshKind::Planar;
  std::function<double(double)> lo, hi;
  /// Radius of the apex node; rings start there. Nonzero when the vertex is rounded off.
  double apex_radius = 0.0;
  /// Distance to the Robin part of the boundary, used for grading only.
  std::function<double(const Eigen::Vector2d&)> robin_distance;
  EdgeTag lo_tag = EdgeTag::Robin;
  EdgeTag hi_tag = EdgeTag::Robin;
  double rt = 1.0;

  Eigen::Vector2d position(double r, double phi) const {
    if (kind == MeshKind::Planar) return {r * std::cos(phi), r * std::sin(phi)};
    return {r * std::sin(phi), r * std::cos(phi)};
  }
};

// Distance from p to the ray from the origin in direction (cos a, sin a) of the plane
// (planar) or to the generator at polar angle a (meridian).
double ray_distance(const Eigen::Vector2d& p, double a, MeshKind kind) {
  const Eigen::Vector2d dir = kind == MeshKind::Planar ? Eigen::Vector2d(std::cos(a), std::sin(a))
                                                       : Eigen::Vector2d(std::sin(a), std::cos(a));
  const double along = p.dot(dir);
  if (along <= 0.0) return p.norm();
  return (p - along * dir).norm();
}

struct Spacing {
  double layer_width, layer_h, far_h, growth;
  double operator()(double d) const {
    if (d <= layer_width) return layer_h;
    return std::min(far_h, layer_h + growth * (d - layer_width));
  }
};

// Normalized positions u ∈ [0, 1] of the nodes of ring r, equidistributing ∫ ds / spacing.
std::vector<double> ring_parameters(const Layout& layout, double r, const Spacing& spacing) {
  constexpr int kProbe = 256;
  const double lo = layout.lo(r), hi = layout.hi(r);
  std::vector<double> cumulative(kProbe + 1, 0.0);
  Eigen::Vector2d prev = layout.position(r, lo);
  double prev_density = 1.0 / spacing(layout.robin_distance(prev));
  for (int k = 1; k <= kProbe; ++k) {
    const double u = static_cast<double>(k) / kProbe;
    const Eigen::Vector2d p = layout.position(r, lo + u * (hi - lo));
    const double density = 1.0 / spacing(layout.robin_distance(p));
    cumulative[k] = cumulative[k - 1] + 0.5 * (density + prev_density) * (p - prev).norm();
    prev = p;
    prev_density = density;
  }
  const double total = cumulative.back();
  const int segments = std::max(1, static_cast<int>(std::ceil(total - 1e-9)));
  std::vector<double> params(segments + 1);
  params[0] = 0.0;
  params[segments] = 1.0;
  int k = 0;
  for (int i = 1; i < segments; ++i) {
    const double target = total * i / segments;
    while (k < kProbe && cumulative[k + 1] < target) ++k;
    const double span = cumulative[k + 1] - cumulative[k];
    const double frac = span > 0 ? (target - cumulative[k]) / span : 0.0;
    params[i] = (k + frac) / kProbe;
  }
  return params;
}

Mesh build_wedge(const Layout& layout, double h, const DomainSpec& spec, const MeshOptions& opt) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::InvalidDomain, "h must be positive");
  const double alpha = spec.alpha;
  const double rt = spec.truncation_radius;

  double layer_h = std::min(h, opt.layer_spacing / alpha);
  if (opt.layer_h > 0.0) layer_h = std::min(layer_h, opt.layer_h);
  // Cells are near-square with side a little under layer_h/√2 in the band, so that their
  // diagonals also respect the band spacing when neighbouring rings do not line up.
  const double r_start = layout.apex_radius;
  const int rings =
      std::max(2, static_cast<int>(std::ceil(1.05 * std::sqrt(2.0) * (rt - r_start) / layer_h - 1e-9)));
  const double dr = (rt - r_start) / rings;
  const Spacing spacing{opt.layer_width / alpha, dr, std::max(dr, std::min(h, opt.max_anisotropy * dr)),
                        opt.growth};

  Mesh mesh;
  mesh.kind = layout.kind;
  mesh.h = h;
  mesh.grading = Grading{spacing.layer_width, spacing.layer_h, spacing.far_h, spacing.growth, rings};

  // Apex node, then rings of constant radius.
  std::vector<std::vector<int>> ring_nodes;
  std::vector<std::vector<double>> ring_params;
  const int apex = 0;
  mesh.nodes.push_back(layout.position(r_start, 0.5 * (layout.lo(r_start) + layout.hi(r_start))));
  for (int i = 1; i <= rings; ++i) {
    const double r = i == rings ? rt : r_start + i * dr;
    std::vector<double> params = ring_parameters(layout, r, spacing);
    std::vector<int> ids;
    ids.reserve(params.size());
    const double lo = layout.lo(r), hi = layout.hi(r);
    for (double u : params) {
      ids.push_back(mesh.num_nodes());
      mesh.nodes.push_back(layout.position(r, lo + u * (hi - lo)));
    }
    ring_nodes.push_back(std::move(ids));
    ring_params.push_back(std::move(params));
  }

  auto add_triangle = [&](int a, int b, int c) {
    const Eigen::Vector2d e1 = mesh.nodes[b] - mesh.nodes[a];
    const Eigen::Vector2d e2 = mesh.nodes[c] - mesh.nodes[a];
    const double cross = e1.x() * e2.y() - e1.y() * e2.x();
    if (cross < 0) std::swap(b, c);
    mesh.triangles.push_back({a, b, c});
  };
  auto side_tag = [&](int a, int b, EdgeTag tag) {
    if (mesh.kind == MeshKind::Meridian && std::abs(mesh.nodes[a].x()) < 1e-12 &&
        std::abs(mesh.nodes[b].x()) < 1e-12)
      return EdgeTag::Axis;
    return tag;
  };

  {
    const auto& ring = ring_nodes.front();
    for (std::size_t j = 0; j + 1 < ring.size(); ++j) add_triangle(apex, ring[j], ring[j + 1]);
    mesh.boundary_edges.push_back({apex, ring.front(), side_tag(apex, ring.front(), layout.lo_tag)});
    mesh.boundary_edges.push_back({apex, ring.back(), side_tag(apex, ring.back(), layout.hi_tag)});
  }

  for (std::size_t k = 0; k + 1 < ring_nodes.size(); ++k) {
    const auto& a = ring_nodes[k];
    const auto& b = ring_nodes[k + 1];
    const auto& ta = ring_params[k];
    const auto& tb = ring_params[k + 1];
    const std::size_t p = a.size() - 1, q = b.size() - 1;
    std::size_t i = 0, j = 0;
    while (i < p || j < q) {
      const bool advance_a = j == q || (i < p && ta[i + 1] < tb[j + 1]);
      if (advance_a) {
        add_triangle(a[i], a[i + 1], b[j]);
        ++i;
      } else {
        add_triangle(a[i], b[j + 1], b[j]);
        ++j;
      }
    }
    mesh.boundary_edges.push_back({a.front(), b.front(), side_tag(a.front(), b.front(), layout.lo_tag)});
    mesh.boundary_edges.push_back({a.back(), b.back(), side_tag(a.back(), b.back(), layout.hi_tag)});
  }
  const auto& outer = ring_nodes.back();
  for (std::size_t j = 0; j + 1 < outer.size(); ++j)
    mesh.boundary_edges.push_back({outer[j], outer[j + 1], EdgeTag::Artificial});

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const double ar = mesh.aspect_ratio(t);
    if (!(ar <= opt.max_aspect_ratio))
      throw Error(ErrorCode::MeshQualityFailure,
                  "triangle " + std::to_string(t) + " has aspect ratio " + std::to_string(ar) +
                      " (limit " + std::to_string(opt.max_aspect_ratio) + ")");
  }
  return mesh;
}

// Circle of radius rs tangent to both sides of an opening of half-angle θ < π/2, centred on
// the bisector at distance dc = rs / sin θ. The rounded domain keeps the part of the wedge
// beyond the near arc: its tip sits at r = dc − rs, and a circle |x| = r with
// dc − rs < r < r_tangent meets the domain in the angles |ψ| ≤ ψ_max(r).
struct AcuteFillet {
  double theta, rs, dc, r_tip, r_tangent;

  AcuteFillet(double theta_, double rs_) : theta(theta_), rs(rs_) {
    dc = rs / std::sin(theta);
    r_tip = dc - rs;
    r_tangent = rs / std::tan(theta);
  }
  double psi_max(double r) const {
    if (r >= r_tangent) return theta;
    if (r <= r_tip) return 0.0;
    const double c = (r * r + dc * dc - rs * rs) / (2.0 * r * dc);
    return std::min(theta, std::acos(std::clamp(c, -1.0, 1.0)));
  }
  // Distance to the arc, for points outside the circle.
  double arc_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& centre) const {
    return std::abs((p - centre).norm() - rs);
  }
};

Layout planar_layout(const DomainSpec& spec) {
  const auto& sector = std::get<Interval2D>(spec.cone.cross_section().shape());
  const double theta = sector.half_aperture;
  const double mid = sector.bisector;
  Layout layout;
  layout.kind = MeshKind::Planar;
  layout.lo = [=](double) { return mid - theta; };
  layout.hi = [=](double) { return mid + theta; };
  layout.robin_distance = [=](const Eigen::Vector2d& p) {
    return std::min(ray_distance(p, mid - theta, MeshKind::Planar),
                    ray_distance(p, mid + theta, MeshKind::Planar));
  };

  if (const auto* sv = std::get_if<SmoothedVertex>(&spec.perturbation)) {
    if (theta >= kPi / 2)
      throw Error(ErrorCode::UnsupportedGeometry,
                  "vertex smoothing of a planar sector is meshed for openings below pi only");
    const AcuteFillet fillet(theta, sv->radius);
    layout.apex_radius = fillet.r_tip;
    layout.lo = [=](double r) { return mid - fillet.psi_max(r); };
    layout.hi = [=](double r) { return mid + fillet.psi_max(r); };
    const Eigen::Vector2d centre = fillet.dc * Eigen::Vector2d(std::cos(mid), std::sin(mid));
    const auto base = layout.robin_distance;
    layout.robin_distance = [=](const Eigen::Vector2d& p) {
      return std::min(base(p), fillet.arc_distance(p, centre));
    };
  } else if (const auto* rb = std::get_if<RadialBump>(&spec.perturbation)) {
    const RadialBump b = *rb;
    layout.lo = [=](double r) { return mid - theta - b.offset(r); };
    layout.hi = [=](double r) { return mid + theta + b.offset(r); };
    layout.robin_distance = [=](const Eigen::Vector2d& p) {
      const double r = p.norm();
      const double t = theta + b.offset(r);
      return std::min(ray_distance(p, mid - t, MeshKind::Planar),
                      ray_distance(p, mid + t, MeshKind::Planar));
    };
  }
  return layout;
}

Layout meridian_layout(const DomainSpec& spec) {
  const double theta = *spec.cone.cross_section().latitude_angle();
  Layout layout;
  layout.kind = MeshKind::Meridian;
  layout.lo = [](double) { return 0.0; };
  layout.hi = [=](double) { return theta; };
  layout.lo_tag = EdgeTag::Axis;
  layout.hi_tag = EdgeTag::Robin;
  layout.robin_distance = [=](const Eigen::Vector2d& p) {
    return ray_distance(p, theta, MeshKind::Meridian);
  };

  if (const auto* sv = std::get_if<SmoothedVertex>(&spec.perturbation)) {
    const double rs = sv->radius;
    if (theta < kPi / 2) {
      const AcuteFillet fillet(theta, rs);
      layout.apex_radius = fillet.r_tip;
      layout.hi = [=](double r) { return fillet.psi_max(r); };
      const Eigen::Vector2d centre(0.0, fillet.dc);
      const auto base = layout.robin_distance;
      layout.robin_distance = [=](const Eigen::Vector2d& p) {
        return std::min(base(p), fillet.arc_distance(p, centre));
      };
    } else {
      // Obtuse: the complement is the acute cone around −z; its tip is rounded by the circle
      // of radius rs centred on −z at distance dc, so the domain gains the tip region.
      const double dc = rs / std::sin(theta);
      const double r_tip = dc - rs;
      const double r_tangent = dc * std::cos(kPi - theta);
      layout.hi = [=](double r) {
        if (r <= r_tip) return kPi;
        if (r >= r_tangent) return theta;
        const double c = (r * r + dc * dc - rs * rs) / (2.0 * r * dc);
        return kPi - std::acos(std::clamp(c, -1.0, 1.0));
      };
      layout.robin_distance = [=](const Eigen::Vector2d& p) {
        const Eigen::Vector2d centre(0.0, -dc);
        const double to_arc = std::abs((p - centre).norm() - rs);
        return std::min(ray_distance(p, theta, MeshKind::Meridian), to_arc);
      };
    }
  } else if (const auto* rb = std::get_if<RadialBump>(&spec.perturbation)) {
    const RadialBump b = *rb;
    layout.hi = [=](double r) { return theta + b.offset(r); };
    layout.robin_distance = [=](const Eigen::Vector2d& p) {
      return ray_distance(p, theta + b.offset(p.norm()), MeshKind::Meridian);
    };
  }
  return layout;
}

}  // namespace

Mesh build_planar_mesh(const DomainSpec& spec, double h, const MeshOptions& options) {
  if (spec.cone.dimension() != 2)
    throw Error(ErrorCode::InvalidDomain, "planar meshing needs a two-dimensional cone");
  spec.validate();
  return build_wedge(planar_layout(spec), h, spec, options);
}

Mesh build_meridian_mesh(const DomainSpec& spec, double h, const MeshOptions& options) {
  if (!spec.cone.cross_section().latitude_angle())
    throw Error(ErrorCode::NotAxisymmetric, "meridian meshing needs a latitude cross-section");
  spec.validate();
  return build_wedge(meridian_layout(spec), h, spec, options);
}

Mesh build_mesh(const DomainSpec& spec, double h, const MeshOptions& options) {
  return spec.cone.dimension() == 2 ? build_planar_mesh(spec, h, options)
                                    : build_meridian_mesh(spec, h, options);
}

// ---------------------------------------------------------------------------
// VTK export

void write_vtk(const Mesh& mesh, std::ostream& out) {
  char buf[128];
  const std::size_t nt = mesh.triangles.size();
  const std::size_t ne = mesh.boundary_edges.size();
  out << "# vtk DataFile Version 3.0\n";
  out << (mesh.kind == MeshKind::Planar ? "robincone planar mesh\n" : "robincone meridian mesh\n");
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.nodes.size() << " double\n";
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", p.x(), p.y());
    out << buf;
  }
  out << "CELLS " << nt + ne << ' ' << 4 * nt + 3 * ne << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges) out << "2 " << e.a << ' ' << e.b << '\n';
  out << "CELL_TYPES " << nt + ne << '\n';
  for (std::size_t i = 0; i < nt; ++i) out << "5\n";
  for (std::size_t i = 0; i < ne; ++i) out << "3\n";
  out << "CELL_DATA " << nt + ne << "\nSCALARS edge_tag int 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < nt; ++i) out << "-1\n";
  for (const auto& e : mesh.boundary_edges) out << static_cast<int>(e.tag) << '\n';
}

void write_vtk(const Mesh& mesh, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "' for writing");
  write_vtk(mesh, file);
}

}  // namespace robincone
