#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "robincone/fem.hpp"

namespace robincone {

/// Generalized symmetric pencil K x = λ M x with K = A − αB; both stored as lower triangles.
class Pencil {
 public:
  explicit Pencil(const FormTriple& forms);
  Pencil(SparseMatrix stiffness, SparseMatrix mass);

  const SparseMatrix& stiffness() const { return k_; }
  const SparseMatrix& mass() const { return m_; }
  int size() const { return static_cast<int>(k_.rows()); }

  /// Lower triangle of K − σM.
  SparseMatrix shifted(double sigma) const;

 private:
  SparseMatrix k_, m_;
};

struct SolverOptions {
  /// Pencils up to this size are factorized densely with Bunch–Kaufman pivoting.
  int dense_limit = 400;
  /// Lanczos step budget per wanted pair.
  int steps_per_pair = 500;
  double residual_tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
};

/// Number of pencil eigenvalues below `shift` (negative inertia of K − shift·M).
/// Throws FactorizationBreakdown when a pivot stays below 1e-14·scale after one jittered retry.
int count_below(const Pencil& pencil, double shift, const SolverOptions& options = {});
int count_below(const FormTriple& forms, double shift, const SolverOptions& options = {});

struct Eigenpair {
  double lambda = 0.0;
  Eigen::VectorXd x;  // M-normalized
  double residual = 0.0;  // ‖Kx − λMx‖ in the M⁻¹ norm
  bool converged = false;
};

struct EigenResult {
  std::vector<Eigenpair> pairs;  // ascending λ
  int count = 0;                 // inertia count below the shift
  int steps = 0;                 // Lanczos steps taken
  bool converged = true;
  std::string message;
};

/// Smallest min(count_below(shift), k_max) eigenpairs via shift-invert Lanczos with full
/// M-reorthogonalization and locking. On budget exhaustion the result holds the pairs found
/// so far with converged = false.
EigenResult eigenpairs_below(const Pencil& pencil, double shift, int k_max,
                             const SolverOptions& options = {});
EigenResult eigenpairs_below(const FormTriple& forms, double shift, int k_max,
                             const SolverOptions& options = {});

/// ‖Kx − λMx‖_{M⁻¹}.
double residual_norm(const Pencil& pencil, double lambda, const Eigen::VectorXd& x);

struct BracketCounts {
  int neumann = 0;    // over-counts (form extension)
  int dirichlet = 0;  // under-counts (form restriction)
};

/// Counts below `shift` with Neumann and Dirichlet conditions on the artificial boundary.
/// Mode is ignored for planar meshes.
BracketCounts bracket(const DomainSpec& spec, const Mesh& mesh, double alpha, double shift,
                      int mode = 0, const SolverOptions& options = {});

struct ShiftCounts {
  double shift = 0.0;
  int dirichlet = 0;
  int neumann = 0;
};

struct SpectralReport {
  double alpha = 0.0;
  double threshold = 0.0;
  double margin = 1e-3;
  int mode = -1;
  std::vector<double> eigenvalues;
  std::vector<double> residuals;
  bool converged = true;
  std::vector<ShiftCounts> counts;
  double h = 0.0;
  double truncation_radius = 0.0;
  std::string bc = "dirichlet";
  int dofs = 0;
  int nodes = 0;
  double runtime_ms = 0.0;

  /// Dirichlet count at the margin probe threshold·(1 + margin).
  int count() const;
};

}  // namespace robincone
