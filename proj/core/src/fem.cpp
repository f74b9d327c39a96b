#include "robincone/fem.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "robincone/error.hpp"

namespace robincone {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

double signed_area(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2) {
  const Eigen::Vector2d e1 = p1 - p0, e2 = p2 - p0;
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

// Gradients of the barycentric coordinates (rows).
Eigen::Matrix<double, 3, 2> barycentric_gradients(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                                  const Eigen::Vector2d& p2, double area) {
  Eigen::Matrix<double, 3, 2> g;
  const std::array<Eigen::Vector2d, 3> p{p0, p1, p2};
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d& a = p[(i + 1) % 3];
    const Eigen::Vector2d& b = p[(i + 2) % 3];
    g(i, 0) = (a.y() - b.y()) / (2.0 * area);
    g(i, 1) = (b.x() - a.x()) / (2.0 * area);
  }
  return g;
}

double checked_area(const Mesh& mesh, int t) {
  const double a = mesh.triangle_area(t);
  if (!(a > 1e-300))
    throw Error(ErrorCode::SingularElement, "triangle " + std::to_string(t) + " has area " + std::to_string(a));
  return a;
}

struct DofMap {
  std::vector<int> dof_of_node, node_of_dof;
};

DofMap make_dofs(const Mesh& mesh, ArtificialBC bc, bool drop_axis) {
  std::vector<char> drop(mesh.nodes.size(), 0);
  if (bc == ArtificialBC::Dirichlet)
    for (const auto& e : mesh.boundary_edges)
      if (e.tag == EdgeTag::Artificial) drop[e.a] = drop[e.b] = 1;
  if (drop_axis)
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
      if (std::abs(mesh.nodes[i].x()) < 1e-12) drop[i] = 1;
  DofMap map;
  map.dof_of_node.assign(mesh.nodes.size(), -1);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (drop[i]) continue;
    map.dof_of_node[i] = static_cast<int>(map.node_of_dof.size());
    map.node_of_dof.push_back(static_cast<int>(i));
  }
  return map;
}

void scatter(Triplets& out, const std::vector<int>& dof, const int* nodes, int n, const double* local) {
  for (int i = 0; i < n; ++i) {
    const int di = dof[nodes[i]];
    if (di < 0) continue;
    for (int j = 0; j < n; ++j) {
      const int dj = dof[nodes[j]];
      if (dj < 0 || dj > di) continue;
      out.emplace_back(di, dj, local[i * n + j]);
    }
  }
}

SparseMatrix to_sparse(int n, const Triplets& t) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Degree-5 seven-point rule on the reference triangle (barycentric points, weights sum to 1).
struct TriRule {
  std::array<std::array<double, 3>, 7> points;
  std::array<double, 7> weights;
};

const TriRule& degree5_rule() {
  static const TriRule rule = [] {
    TriRule r;
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
    const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
    r.points[0] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    r.weights[0] = 9.0 / 40.0;
    r.points[1] = {b1, a1, a1};
    r.points[2] = {a1, b1, a1};
    r.points[3] = {a1, a1, b1};
    r.points[4] = {b2, a2, a2};
    r.points[5] = {a2, b2, a2};
    r.points[6] = {a2, a2, b2};
    for (int k = 1; k <= 3; ++k) r.weights[k] = w1;
    for (int k = 4; k <= 6; ++k) r.weights[k] = w2;
    return r;
  }();
  return rule;
}

}  // namespace

Eigen::Matrix3d element_stiffness(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                                  const Eigen::Vector2d& p2) {
  const double area = std::abs(signed_area(p0, p1, p2));
  if (!(area > 1e-300)) throw Error(ErrorCode::SingularElement, "zero-area triangle");
  const auto g = barycentric_gradients(p0, p1, p2, signed_area(p0, p1, p2));
  return area * g * g.transpose();
}

Eigen::Matrix3d element_mass(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                             const Eigen::Vector2d& p2) {
  const double area = std::abs(signed_area(p0, p1, p2));
  if (!(area > 1e-300)) throw Error(ErrorCode::SingularElement, "zero-area triangle");
  Eigen::Matrix3d m = Eigen::Matrix3d::Constant(1.0);
  m.diagonal().setConstant(2.0);
  return area / 12.0 * m;
}

Eigen::Matrix2d edge_mass(double length) {
  Eigen::Matrix2d m;
  m << 2.0, 1.0, 1.0, 2.0;
  return length / 6.0 * m;
}

FormTriple assemble_planar(const Mesh& mesh, double alpha, ArtificialBC bc) {
  if (mesh.kind != MeshKind::Planar)
    throw Error(ErrorCode::InvalidDomain, "planar assembly needs a planar mesh");
  const DofMap dofs = make_dofs(mesh, bc, false);
  const int n = static_cast<int>(dofs.node_of_dof.size());
  Triplets ta, tb, tm;
  ta.reserve(6 * mesh.triangles.size());
  tm.reserve(6 * mesh.triangles.size());

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    checked_area(mesh, t);
    const auto& tri = mesh.triangles[t];
    const auto& p0 = mesh.nodes[tri[0]];
    const auto& p1 = mesh.nodes[tri[1]];
    const auto& p2 = mesh.nodes[tri[2]];
    const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> k = element_stiffness(p0, p1, p2);
    const Eigen::Matrix<double, 3, 3, Eigen::RowMajor> m = element_mass(p0, p1, p2);
    scatter(ta, dofs.dof_of_node, tri.data(), 3, k.data());
    scatter(tm, dofs.dof_of_node, tri.data(), 3, m.data());
  }
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::Robin) continue;
    const Eigen::Matrix<double, 2, 2, Eigen::RowMajor> b = edge_mass((mesh.nodes[e.a] - mesh.nodes[e.b]).norm());
    const int nodes[2] = {e.a, e.b};
    scatter(tb, dofs.dof_of_node, nodes, 2, b.data());
  }

  FormTriple out;
  out.A = to_sparse(n, ta);
  out.B = to_sparse(n, tb);
  out.M = to_sparse(n, tm);
  out.dof_of_node = dofs.dof_of_node;
  out.node_of_dof = dofs.node_of_dof;
  out.alpha = alpha;
  out.bc = bc;
  return out;
}

FormTriple assemble_axisymmetric(const Mesh& mesh, double alpha, int mode, ArtificialBC bc,
                                 bool eliminate_axis) {
  if (mesh.kind != MeshKind::Meridian)
    throw Error(ErrorCode::InvalidDomain, "axisymmetric assembly needs a meridian mesh");
  if (mode < 0) throw Error(ErrorCode::InvalidDomain, "azimuthal mode must be nonnegative");
  if (mode >= 1 && !eliminate_axis)
    throw Error(ErrorCode::AxisSingularity,
                "mode " + std::to_string(mode) + " requires eliminating the axis dofs");
  const DofMap dofs = make_dofs(mesh, bc, mode >= 1);
  const int n = static_cast<int>(dofs.node_of_dof.size());
  const double m2 = static_cast<double>(mode) * mode;
  Triplets ta, tb, tm;
  ta.reserve(6 * mesh.triangles.size());
  tm.reserve(6 * mesh.triangles.size());
  const TriRule& rule = degree5_rule();

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const double area = checked_area(mesh, t);
    const auto& tri = mesh.triangles[t];
    const std::array<Eigen::Vector2d, 3> p{mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]};
    const std::array<double, 3> rho{p[0].x(), p[1].x(), p[2].x()};
    const double rho_mean = (rho[0] + rho[1] + rho[2]) / 3.0;

    const auto g = barycentric_gradients(p[0], p[1], p[2], area);
    Eigen::Matrix<double, 3, 3, Eigen::RowMajor> k = rho_mean * area * g * g.transpose();

    // ∫ρ λ_i λ_j = Σ_k ρ_k ∫λ_iλ_jλ_k with ∫λ³ = A/10, ∫λ²λ' = A/30, ∫λλ'λ'' = A/60.
    Eigen::Matrix<double, 3, 3, Eigen::RowMajor> m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int c = 0; c < 3; ++c) {
          const int same = (i == j) + (j == c) + (i == c);
          const double w = same == 3 ? area / 10.0 : (same == 1 ? area / 30.0 : area / 60.0);
          s += rho[c] * w;
        }
        m(i, j) = s;
      }

    if (mode >= 1) {
      const bool touches_axis = std::min({std::abs(rho[0]), std::abs(rho[1]), std::abs(rho[2])}) < 1e-12;
      Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
      if (touches_axis) {
        // Mid-edge rule; λ_iλ_j/ρ at an axis midpoint is read as 0.
        for (int e = 0; e < 3; ++e) {
          std::array<double, 3> lam{0.0, 0.0, 0.0};
          lam[e] = lam[(e + 1) % 3] = 0.5;
          const double r = 0.5 * (rho[e] + rho[(e + 1) % 3]);
          if (r < 1e-12) continue;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) q(i, j) += area / 3.0 * lam[i] * lam[j] / r;
        }
      } else {
        for (int k2 = 0; k2 < 7; ++k2) {
          const auto& lam = rule.points[k2];
          const double r = lam[0] * rho[0] + lam[1] * rho[1] + lam[2] * rho[2];
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) q(i, j) += area * rule.weights[k2] * lam[i] * lam[j] / r;
        }
      }
      k += m2 * q;
    }
    scatter(ta, dofs.dof_of_node, tri.data(), 3, k.data());
    scatter(tm, dofs.dof_of_node, tri.data(), 3, m.data());
  }

  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::Robin) continue;
    const double len = (mesh.nodes[e.a] - mesh.nodes[e.b]).norm();
    const double ra = mesh.nodes[e.a].x(), rb = mesh.nodes[e.b].x();
    Eigen::Matrix<double, 2, 2, Eigen::RowMajor> b;
    b << 3.0 * ra + rb, ra + rb, ra + rb, ra + 3.0 * rb;
    b *= len / 12.0;
    const int nodes[2] = {e.a, e.b};
    scatter(tb, dofs.dof_of_node, nodes, 2, b.data());
  }

  FormTriple out;
  out.A = to_sparse(n, ta);
  out.B = to_sparse(n, tb);
  out.M = to_sparse(n, tm);
  out.dof_of_node = dofs.dof_of_node;
  out.node_of_dof = dofs.node_of_dof;
  out.alpha = alpha;
  out.mode = mode;
  out.bc = bc;
  return out;
}

double sym_dot(const SparseMatrix& lower, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return x.dot(lower.selfadjointView<Eigen::Lower>() * y);
}

Eigen::VectorXd sym_multiply(const SparseMatrix& lower, const Eigen::VectorXd& x) {
  return lower.selfadjointView<Eigen::Lower>() * x;
}

SparseMatrix full_matrix(const SparseMatrix& lower) {
  SparseMatrix full = lower.selfadjointView<Eigen::Lower>();
  return full;
}

double rayleigh_quotient(const FormTriple& forms, const Eigen::VectorXd& x) {
  if (x.size() != forms.size()) throw Error(ErrorCode::ZeroVector, "vector size does not match dofs");
  const double norm2 = sym_dot(forms.M, x, x);
  if (!(norm2 > 0.0)) throw Error(ErrorCode::ZeroVector, "vector has zero mass norm");
  return (sym_dot(forms.A, x, x) - forms.alpha * sym_dot(forms.B, x, x)) / norm2;
}

Eigen::VectorXd interpolate(const FormTriple& forms, const Mesh& mesh,
                            const std::function<double(const Eigen::Vector2d&)>& f) {
  Eigen::VectorXd x(forms.size());
  for (int d = 0; d < forms.size(); ++d) x[d] = f(mesh.nodes[forms.node_of_dof[d]]);
  return x;
}

void write_matrix_market(const SparseMatrix& lower, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << lower.rows() << ' ' << lower.cols() << ' ' << lower.nonZeros() << '\n';
  char buf[96];
  for (int c = 0; c < lower.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(lower, c); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()) + 1,
                    static_cast<long>(it.col()) + 1, it.value());
      out << buf;
    }
}

void write_matrix_market(const SparseMatrix& lower, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "' for writing");
  write_matrix_market(lower, file);
}

}  // namespace robincone
