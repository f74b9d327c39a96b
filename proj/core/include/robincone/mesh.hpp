#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "robincone/domain.hpp"

namespace robincone {

enum class EdgeTag : int { Robin = 0, Artificial = 1, Axis = 2 };
enum class MeshKind { Planar, Meridian };

std::string to_string(EdgeTag tag);

struct BoundaryEdge {
  int a;
  int b;
  EdgeTag tag;
};

/// Parameters of the structured wedge layout. Lengths are absolute.
struct Grading {
  double layer_width = 0.0;  // band around Robin edges with fine spacing
  double layer_h = 0.0;      // spacing inside the band, also the ring spacing
  double far_h = 0.0;        // largest spacing along a ring
  double growth = 0.0;       // spacing growth rate away from the band
  int rings = 0;
};

/// Triangulation of a planar domain or of a meridian half-section {(ρ, z) : ρ ≥ 0}.
/// Triangles are counter-clockwise.
struct Mesh {
  MeshKind kind = MeshKind::Planar;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;
  Grading grading;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  double triangle_area(int t) const;  // signed
  double area() const;
  double boundary_length(EdgeTag tag) const;
  /// √3·L_max² / (4·area); 1 for the equilateral triangle.
  double aspect_ratio(int t) const;
  double max_aspect_ratio() const;
};

struct MeshOptions {
  /// Band width in units of 1/α.
  double layer_width = 2.0;
  /// Band spacing cap in units of 1/α.
  double layer_spacing = 0.2;
  /// Optional absolute band spacing (overrides h inside the band when smaller).
  double layer_h = 0.0;
  double growth = 0.2;
  /// Ring-direction spacing is capped at this multiple of the ring spacing.
  double max_anisotropy = 8.0;
  double max_aspect_ratio = 20.0;
};

/// ν=2 sector or perturbed sector, truncated at R_T. Robin on the sides, Artificial on the arc.
Mesh build_planar_mesh(const DomainSpec& spec, double h, const MeshOptions& options = {});

/// Meridian half-section of an axisymmetric ν=3 domain. Axis / Robin / Artificial tags.
Mesh build_meridian_mesh(const DomainSpec& spec, double h, const MeshOptions& options = {});

/// Dispatches on the dimension of the cone.
Mesh build_mesh(const DomainSpec& spec, double h, const MeshOptions& options = {});

/// Legacy VTK ASCII: triangles and boundary lines, with an integer edge tag per cell
/// (-1 for triangles).
void write_vtk(const Mesh& mesh, std::ostream& out);
void write_vtk(const Mesh& mesh, const std::string& path);

}  // namespace robincone
