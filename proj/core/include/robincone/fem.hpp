#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "robincone/mesh.hpp"

namespace robincone {

/// Symmetric sparse matrix; only the lower triangle is stored.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Discrete Robin form: q(x) = xᵀA x − α xᵀB x, ‖x‖² = xᵀM x.
struct FormTriple {
  SparseMatrix A;  // gradient (+ m²/ρ² for axisymmetric modes)
  SparseMatrix B;  // Robin boundary mass
  SparseMatrix M;  // volume mass
  std::vector<int> dof_of_node;  // -1 for eliminated nodes
  std::vector<int> node_of_dof;
  double alpha = 1.0;
  int mode = -1;  // azimuthal mode, -1 for planar forms
  ArtificialBC bc = ArtificialBC::Dirichlet;

  int size() const { return static_cast<int>(node_of_dof.size()); }
};

/// P1 element matrices on triangle (p0, p1, p2). Exact integration.
Eigen::Matrix3d element_stiffness(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                  const Eigen::Vector2d& p2);
Eigen::Matrix3d element_mass(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                             const Eigen::Vector2d& p2);
Eigen::Matrix2d edge_mass(double length);

FormTriple assemble_planar(const Mesh& mesh, double alpha, ArtificialBC bc = ArtificialBC::Dirichlet);

/// Forms of azimuthal mode m on a meridian mesh (weight ρ; the 2π factor is dropped).
/// For m ≥ 1 nodes on the axis are eliminated; requesting otherwise throws AxisSingularity.
FormTriple assemble_axisymmetric(const Mesh& mesh, double alpha, int mode,
                                 ArtificialBC bc = ArtificialBC::Dirichlet,
                                 bool eliminate_axis = true);

/// (xᵀAx − α xᵀBx) / xᵀMx. Throws ZeroVector.
double rayleigh_quotient(const FormTriple& forms, const Eigen::VectorXd& x);

/// xᵀ S y for a lower-stored symmetric S.
double sym_dot(const SparseMatrix& lower, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
Eigen::VectorXd sym_multiply(const SparseMatrix& lower, const Eigen::VectorXd& x);
SparseMatrix full_matrix(const SparseMatrix& lower);

/// Nodal interpolant restricted to the free dofs.
Eigen::VectorXd interpolate(const FormTriple& forms, const Mesh& mesh,
                            const std::function<double(const Eigen::Vector2d&)>& f);

/// MatrixMarket "coordinate real symmetric" dump of a lower-stored matrix.
void write_matrix_market(const SparseMatrix& lower, std::ostream& out);
void write_matrix_market(const SparseMatrix& lower, const std::string& path);

}  // namespace robincone
