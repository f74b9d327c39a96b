#include "robincone/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "robincone/error.hpp"
#include "robincone/fem.hpp"
#include "robincone/parallel.hpp"
#include "robincone/report_io.hpp"

namespace robincone {

Resolution resolution(const RunConfig& config, double alpha, double R_T) {
  const double unit = config.scale_with_alpha ? 1.0 / alpha : 1.0;
  Resolution r;
  r.h = config.h * unit;
  r.truncation_radius = R_T * unit;
  r.mesh.layer_h = config.h_layer * unit;
  return r;
}

namespace {

FormTriple assemble(const Mesh& mesh, double alpha, int mode, ArtificialBC bc) {
  return mesh.kind == MeshKind::Planar ? assemble_planar(mesh, alpha, bc)
                                       : assemble_axisymmetric(mesh, alpha, mode, bc);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SpectralReport solve_point(const RunConfig& config, double alpha, double R_T, int mode, Mesh* mesh_out) {
  const auto start = std::chrono::steady_clock::now();
  const Resolution res = resolution(config, alpha, R_T);
  const DomainSpec spec = config.domain(alpha, res.truncation_radius);
  Mesh mesh = build_mesh(spec, res.h, res.mesh);

  const FormTriple dirichlet = assemble(mesh, alpha, mode, ArtificialBC::Dirichlet);
  const FormTriple neumann = assemble(mesh, alpha, mode, ArtificialBC::Neumann);
  const FormTriple& chosen = spec.artificial_bc == ArtificialBC::Dirichlet ? dirichlet : neumann;

  SpectralReport rep;
  rep.alpha = alpha;
  rep.threshold = -alpha * alpha;
  rep.margin = config.margin;
  rep.mode = mesh.kind == MeshKind::Planar ? -1 : mode;
  rep.h = res.h;
  rep.truncation_radius = res.truncation_radius;
  rep.bc = to_string(spec.artificial_bc);
  rep.dofs = chosen.size();
  rep.nodes = mesh.num_nodes();

  for (double shift : {rep.threshold * (1.0 + config.margin), rep.threshold}) {
    ShiftCounts c;
    c.shift = shift;
    c.dirichlet = count_below(dirichlet, shift);
    c.neumann = count_below(neumann, shift);
    rep.counts.push_back(c);
  }

  const double probe = rep.counts.front().shift;
  const int available = spec.artificial_bc == ArtificialBC::Dirichlet ? rep.counts.front().dirichlet
                                                                      : rep.counts.front().neumann;
  if (available > 0) {
    const EigenResult r = eigenpairs_below(chosen, probe, config.k_max);
    for (const auto& p : r.pairs) {
      rep.eigenvalues.push_back(p.lambda);
      rep.residuals.push_back(p.residual);
    }
    rep.converged = r.converged;
  }
  rep.runtime_ms = elapsed_ms(start);
  if (mesh_out) *mesh_out = std::move(mesh);
  return rep;
}

std::vector<SpectralReport> run_solve(const RunConfig& config) {
  struct Job {
    double alpha, R_T;
    int mode;
  };
  std::vector<Job> jobs;
  const bool planar = config.nu == 2;
  for (double a : config.alphas())
    for (double r : config.R_T)
      for (int m : config.modes) {
        jobs.push_back({a, r, m});
        if (planar) break;  // modes do not apply
      }
  std::vector<SpectralReport> reports(jobs.size());
  parallel_for(static_cast<int>(jobs.size()),
               [&](int i) { reports[i] = solve_point(config, jobs[i].alpha, jobs[i].R_T, jobs[i].mode); });
  return reports;
}

SweepFit fit_power_law(const std::vector<SweepPoint>& points) {
  std::vector<SweepPoint> good;
  for (const auto& p : points)
    if (p.converged && p.lambda1 < 0.0) good.push_back(p);
  std::sort(good.begin(), good.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  const int n = static_cast<int>(good.size());
  const int use = std::max(3, (n + 1) / 2);
  if (n < 3) throw Error(ErrorCode::FitDegenerate, "fewer than 3 converged sweep points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, sc = 0;
  for (int i = n - use; i < n; ++i) {
    const double x = std::log(good[i].alpha), y = std::log(-good[i].lambda1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    sc += y - 2.0 * x;
  }
  const double den = use * sxx - sx * sx;
  if (!(std::abs(den) > 1e-14 * use * sxx)) throw Error(ErrorCode::FitDegenerate, "sweep alphas coincide");
  SweepFit fit;
  fit.slope = (use * sxy - sx * sy) / den;
  fit.C = std::exp(sc / use);
  fit.points_used = use;
  return fit;
}

SweepResult run_sweep(const RunConfig& config) {
  if (!config.alpha_sweep) throw Error(ErrorCode::InvalidConfig, "sweep needs [domain.alpha_sweep]");
  SweepResult out;
  out.R_T = config.R_T.front();
  out.mode = config.nu == 2 ? -1 : config.modes.front();
  const std::vector<double> alphas = config.alphas();
  out.points.resize(alphas.size());
  parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    const double a = alphas[i];
    const Resolution res = resolution(config, a, out.R_T);
    const DomainSpec spec = config.domain(a, res.truncation_radius);
    const Mesh mesh = build_mesh(spec, res.h, res.mesh);
    const FormTriple forms = assemble(mesh, a, std::max(out.mode, 0), spec.artificial_bc);
    SweepPoint& p = out.points[i];
    p.alpha = a;
    p.count = count_below(forms, -a * a * (1.0 + config.margin));
    // The lowest eigenvalue, whether or not it lies below the threshold.
    const EigenResult r = eigenpairs_below(forms, 0.0, 1);
    if (!r.pairs.empty()) {
      p.lambda1 = r.pairs.front().lambda;
      p.residual = r.pairs.front().residual;
      p.converged = r.pairs.front().converged;
    }
  });
  out.fit = fit_power_law(out.points);
  return out;
}

ClassifyOutcome run_classify(const RunConfig& config) {
  ClassifyOutcome out;
  const DomainSpec spec = config.domain(config.alpha, resolution(config, config.alpha, config.R_T.front()).truncation_radius);
  out.verdict = spec.perturbed() ? classify(spec) : classify(spec.cone);
  try {
    out.evidence = complement_is_convex(spec.cone);
  } catch (const Error&) {
    // Degenerate sign; the verdict already carries the reason.
  }
  return out;
}

std::vector<QuasimodeResult> run_quasimode(const RunConfig& config) {
  const ConeSpec cone = config.cone();
  std::vector<QuasimodeResult> out(config.N_quasimode.size());
  parallel_for(static_cast<int>(out.size()), [&](int i) {
    out[i] = build_quasimode(cone, config.alpha, config.k_quasimode, config.N_quasimode[i]);
  });
  return out;
}

int cmd_classify(const RunConfig& config) {
  const ClassifyOutcome outcome = run_classify(config);
  write_text(config.output_dir, "report.json", classify_json(outcome, config));
  return 0;
}

int cmd_solve(const RunConfig& config) {
  std::optional<ClassifyOutcome> verdict;
  if (config.classify) verdict = run_classify(config);
  if (config.wants("vtk")) {
    const double a = config.alphas().front();
    const Resolution res = resolution(config, a, config.R_T.front());
    const Mesh mesh = build_mesh(config.domain(a, res.truncation_radius), res.h, res.mesh);
    std::ostringstream vtk;
    write_vtk(mesh, vtk);
    write_text(config.output_dir, "mesh.vtk", vtk.str());
  }
  const std::vector<SpectralReport> reports = run_solve(config);
  if (config.wants("json"))
    write_text(config.output_dir, "report.json", solve_json(reports, config, verdict ? &*verdict : nullptr));
  if (config.wants("csv")) write_text(config.output_dir, "sweep.csv", solve_csv(reports, config.k_max));
  for (const auto& r : reports)
    if (!r.converged) return exit_code(ErrorCode::ConvergenceFailure);
  return 0;
}

int cmd_certify(const RunConfig& config) {
  try {
    const TrialFamily fam = build_trial_family(config.cone(), config.alpha, config.N_certificate, config.r0);
    write_text(config.output_dir, "certificate.json", certificate_json(fam));
    return fam.certified ? 0 : exit_code(ErrorCode::RBudgetExceeded);
  } catch (const Error& e) {
    TrialFamily failed;
    failed.N = config.N_certificate;
    failed.alpha = config.alpha;
    failed.r0 = config.r0;
    failed.threshold = -config.alpha * config.alpha;
    failed.cone = config.cone().cross_section().describe();
    write_text(config.output_dir, "certificate.json", certificate_json(failed));
    throw;
  }
}

int cmd_quasimode(const RunConfig& config) {
  write_text(config.output_dir, "report.json", quasimode_json(run_quasimode(config), config));
  return 0;
}

int cmd_sweep(const RunConfig& config) {
  const SweepResult sweep = run_sweep(config);
  if (config.wants("json")) write_text(config.output_dir, "report.json", sweep_json(sweep, config));
  if (config.wants("csv")) write_text(config.output_dir, "sweep.csv", sweep_csv(sweep));
  return 0;
}

}  // namespace robincone
