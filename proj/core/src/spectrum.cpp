#include "robincone/spectrum.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "robincone/dense_ldlt.hpp"
#include "robincone/error.hpp"

namespace robincone {

Pencil::Pencil(const FormTriple& forms) : k_(forms.A - forms.alpha * forms.B), m_(forms.M) {
  k_.makeCompressed();
}

Pencil::Pencil(SparseMatrix stiffness, SparseMatrix mass) : k_(std::move(stiffness)), m_(std::move(mass)) {
  if (k_.rows() != k_.cols() || m_.rows() != m_.cols() || k_.rows() != m_.rows())
    throw Error(ErrorCode::InvalidDomain, "pencil matrices must be square and of equal size");
  // Keep the lower triangle only, whatever the caller passed.
  k_ = SparseMatrix(k_.triangularView<Eigen::Lower>());
  m_ = SparseMatrix(m_.triangularView<Eigen::Lower>());
}

SparseMatrix Pencil::shifted(double sigma) const {
  SparseMatrix s = k_ - sigma * m_;
  s.makeCompressed();
  return s;
}

namespace {

using SparseLDLT = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

double max_abs(const SparseMatrix& s) {
  double out = 0.0;
  for (int k = 0; k < s.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) out = std::max(out, std::abs(it.value()));
  return out;
}

struct CountAttempt {
  bool ok = false;
  int negative = 0;
  double min_pivot = 0.0;
  double tolerance = 0.0;
};

CountAttempt try_count(const Pencil& pencil, double shift, const SolverOptions& options) {
  const SparseMatrix s = pencil.shifted(shift);
  CountAttempt out;
  out.tolerance = 1e-14 * std::max(max_abs(s), std::numeric_limits<double>::min());
  if (pencil.size() <= options.dense_limit) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(full_matrix(s));
    const Inertia in = bunch_kaufman_inertia(dense, out.tolerance);
    out.negative = in.negative;
    out.min_pivot = in.min_pivot;
    out.ok = in.zero == 0 && dense.allFinite();
    return out;
  }
  SparseLDLT ldlt(s);
  if (ldlt.info() != Eigen::Success) return out;
  const Eigen::VectorXd d = ldlt.vectorD();
  out.min_pivot = d.cwiseAbs().minCoeff();
  out.negative = static_cast<int>((d.array() < 0.0).count());
  out.ok = out.min_pivot > out.tolerance && d.allFinite();
  return out;
}

}  // namespace

int count_below(const Pencil& pencil, double shift, const SolverOptions& options) {
  if (pencil.size() == 0) return 0;
  CountAttempt a = try_count(pencil, shift, options);
  if (a.ok) return a.negative;
  const double jittered = shift == 0.0 ? -1e-10 : shift * (1.0 + 1e-10);
  a = try_count(pencil, jittered, options);
  if (a.ok) return a.negative;
  throw Error(ErrorCode::FactorizationBreakdown,
              "pivot " + std::to_string(a.min_pivot) + " below " + std::to_string(a.tolerance) +
                  " at shift " + std::to_string(shift) + " and its jittered retry");
}

int count_below(const FormTriple& forms, double shift, const SolverOptions& options) {
  return count_below(Pencil(forms), shift, options);
}

namespace {

// Solver for (K − σM) y = b and M y = b, dense or sparse depending on size.
class ShiftedSolver {
 public:
  ShiftedSolver(const SparseMatrix& lower, bool dense) : dense_(dense) {
    if (dense_) {
      dense_ldlt_.compute(Eigen::MatrixXd(full_matrix(lower)));
      ok_ = dense_ldlt_.info() == Eigen::Success;
    } else {
      sparse_.compute(lower);
      ok_ = sparse_.info() == Eigen::Success;
    }
  }
  bool ok() const { return ok_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    return dense_ ? Eigen::VectorXd(dense_ldlt_.solve(b)) : Eigen::VectorXd(sparse_.solve(b));
  }

 private:
  bool dense_;
  bool ok_ = false;
  Eigen::LDLT<Eigen::MatrixXd> dense_ldlt_;
  SparseLDLT sparse_;
};

double m_norm_inverse(const Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower>& mllt,
                      const Eigen::VectorXd& r) {
  const Eigen::VectorXd z = mllt.solve(r);
  return std::sqrt(std::max(0.0, r.dot(z)));
}

}  // namespace

double residual_norm(const Pencil& pencil, double lambda, const Eigen::VectorXd& x) {
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower> mllt(pencil.mass());
  if (mllt.info() != Eigen::Success)
    throw Error(ErrorCode::FactorizationBreakdown, "mass matrix is not positive definite");
  const Eigen::VectorXd r = sym_multiply(pencil.stiffness(), x) - lambda * sym_multiply(pencil.mass(), x);
  return m_norm_inverse(mllt, r);
}

EigenResult eigenpairs_below(const Pencil& pencil, double shift, int k_max, const SolverOptions& options) {
  EigenResult res;
  const int n = pencil.size();
  res.count = count_below(pencil, shift, options);
  const int want = std::min(res.count, std::max(0, k_max));
  if (want == 0) return res;

  // Lower shift with no eigenvalue below it, pushed close to λ₁ by bisection.
  double span = std::max(1.0, std::abs(shift));
  double lo = shift - span;
  for (int guard = 0; count_below(pencil, lo, options) > 0; ++guard) {
    if (guard > 60) throw Error(ErrorCode::ConvergenceFailure, "no lower bound for the spectrum");
    span *= 2.0;
    lo = shift - span;
  }
  double hi = shift;
  for (int it = 0; it < 8; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(pencil, mid, options) == 0) lo = mid;
    else hi = mid;
  }
  const double sigma = lo;

  const bool dense = n <= options.dense_limit;
  const ShiftedSolver solver(pencil.shifted(sigma), dense);
  if (!solver.ok()) throw Error(ErrorCode::FactorizationBreakdown, "shifted pencil factorization failed");
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower> mllt(pencil.mass());
  if (mllt.info() != Eigen::Success)
    throw Error(ErrorCode::FactorizationBreakdown, "mass matrix is not positive definite");

  const auto& m = pencil.mass();
  auto mmul = [&](const Eigen::VectorXd& v) { return sym_multiply(m, v); };

  std::vector<Eigen::VectorXd> locked, locked_m;
  std::vector<Eigenpair> pairs;
  const int budget = options.steps_per_pair * std::max(1, k_max);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd start(n);
  for (int i = 0; i < n; ++i) start[i] = gauss(rng);

  // M-orthogonalize v against the locked set and a basis (two passes).
  auto orthogonalize = [](Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis,
                          const std::vector<Eigen::VectorXd>& basis_m) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < basis.size(); ++i) v -= basis_m[i].dot(v) * basis[i];
  };

  int stalled_rounds = 0;
  while (static_cast<int>(pairs.size()) < want && res.steps < budget) {
    const int need = want - static_cast<int>(pairs.size());
    const int max_basis = std::min({n - static_cast<int>(locked.size()), std::max(60, 4 * need + 40),
                                    budget - res.steps});
    if (max_basis < 1) break;

    std::vector<Eigen::VectorXd> q, qm;
    std::vector<double> alphas, betas;
    Eigen::VectorXd v = start;
    orthogonalize(v, locked, locked_m);
    double norm = std::sqrt(std::max(0.0, v.dot(mmul(v))));
    if (!(norm > 0)) {
      for (int i = 0; i < n; ++i) start[i] = gauss(rng);
      continue;
    }
    v /= norm;

    Eigen::VectorXd theta;
    Eigen::MatrixXd s;
    bool done = false;
    while (!done) {
      q.push_back(v);
      qm.push_back(mmul(v));
      ++res.steps;
      Eigen::VectorXd z = solver.solve(qm.back());
      const double a = qm.back().dot(z);
      alphas.push_back(a);
      orthogonalize(z, locked, locked_m);
      orthogonalize(z, q, qm);
      const double b = std::sqrt(std::max(0.0, z.dot(mmul(z))));
      const int j = static_cast<int>(q.size());

      const bool invariant = b <= 1e-13 * std::abs(a);
      const bool check = invariant || j >= max_basis || (j >= need && j % 5 == 0);
      if (check) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j, j);
        for (int i = 0; i < j; ++i) {
          t(i, i) = alphas[i];
          if (i + 1 < j) t(i, i + 1) = t(i + 1, i) = betas[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        theta = es.eigenvalues();
        s = es.eigenvectors();
        bool all = true;
        for (int k = 0; k < std::min(need, j); ++k) {
          const int idx = j - 1 - k;
          if (std::abs(b * s(j - 1, idx)) > 1e-12 * std::abs(theta[idx])) all = false;
        }
        done = invariant || j >= max_basis || (all && j >= need);
      }
      if (!done) {
        betas.push_back(b);
        v = z / b;
      }
    }

    // Ritz vectors for the largest θ (smallest λ); lock those that pass the residual test.
    const int j = static_cast<int>(q.size());
    int accepted = 0;
    Eigen::VectorXd restart = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < std::min(need, j); ++k) {
      const int idx = j - 1 - k;
      if (!(theta[idx] > 0)) break;
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < j; ++i) y += s(i, idx) * q[i];
      orthogonalize(y, locked, locked_m);
      const double yn = std::sqrt(std::max(0.0, y.dot(mmul(y))));
      if (!(yn > 0)) continue;
      y /= yn;
      const double lambda = sigma + 1.0 / theta[idx];
      const Eigen::VectorXd r = sym_multiply(pencil.stiffness(), y) - lambda * mmul(y);
      const double resid = m_norm_inverse(mllt, r);
      if (lambda < shift && resid < options.residual_tolerance * std::abs(lambda)) {
        pairs.push_back({lambda, y, resid, true});
        locked.push_back(y);
        locked_m.push_back(mmul(y));
        ++accepted;
      } else {
        restart += y;
      }
    }
    if (restart.squaredNorm() > 0) {
      start = restart;
    } else {
      for (int i = 0; i < n; ++i) start[i] = gauss(rng);
    }
    stalled_rounds = accepted == 0 ? stalled_rounds + 1 : 0;
    if (stalled_rounds >= 20) break;
  }

  std::sort(pairs.begin(), pairs.end(), [](const Eigenpair& a, const Eigenpair& b) { return a.lambda < b.lambda; });
  res.pairs = std::move(pairs);
  res.converged = static_cast<int>(res.pairs.size()) == want;
  if (!res.converged)
    res.message = "Lanczos stopped after " + std::to_string(res.steps) + " steps with " +
                  std::to_string(res.pairs.size()) + " of " + std::to_string(want) + " pairs converged";
  return res;
}

EigenResult eigenpairs_below(const FormTriple& forms, double shift, int k_max, const SolverOptions& options) {
  return eigenpairs_below(Pencil(forms), shift, k_max, options);
}

BracketCounts bracket(const DomainSpec& spec, const Mesh& mesh, double alpha, double shift, int mode,
                      const SolverOptions& options) {
  const bool planar = spec.cone.dimension() == 2;
  if (planar != (mesh.kind == MeshKind::Planar))
    throw Error(ErrorCode::InvalidDomain, "mesh kind does not match the dimension of the domain");
  auto assemble = [&](ArtificialBC bc) {
    return mesh.kind == MeshKind::Planar ? assemble_planar(mesh, alpha, bc)
                                         : assemble_axisymmetric(mesh, alpha, mode, bc);
  };
  BracketCounts out;
  out.neumann = count_below(assemble(ArtificialBC::Neumann), shift, options);
  out.dirichlet = count_below(assemble(ArtificialBC::Dirichlet), shift, options);
  return out;
}

int SpectralReport::count() const { return counts.empty() ? 0 : counts.front().dirichlet; }

}  // namespace robincone
