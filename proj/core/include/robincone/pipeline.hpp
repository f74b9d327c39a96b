#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robincone/certify.hpp"
#include "robincone/config.hpp"
#include "robincone/mesh.hpp"
#include "robincone/spectrum.hpp"

namespace robincone {

/// Absolute mesh parameters for one (α, R_T) point of a config.
struct Resolution {
  double h = 0.0;
  double truncation_radius = 0.0;
  MeshOptions mesh;
};
Resolution resolution(const RunConfig& config, double alpha, double R_T);

/// One solve: mesh, both bracketing assemblies, inertia probes at −α²(1 + margin) and −α²,
/// and eigenpairs below the first probe for the configured artificial condition.
SpectralReport solve_point(const RunConfig& config, double alpha, double R_T, int mode,
                           Mesh* mesh_out = nullptr);

struct SweepPoint {
  double alpha = 0.0;
  double lambda1 = 0.0;
  double residual = 0.0;
  int count = 0;  // below −α²(1 + margin)
  bool converged = false;
};

struct SweepFit {
  double slope = 0.0;
  double C = 0.0;  // exp(mean(log(−λ₁) − 2 log α))
  int points_used = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  SweepFit fit;
  double R_T = 0.0;
  int mode = 0;
};

/// Least-squares slope of log(−λ₁) against log α over the upper half of the sweep
/// (at least three converged points). Throws FitDegenerate.
SweepFit fit_power_law(const std::vector<SweepPoint>& points);

/// Lowest pencil eigenvalue per α of the sweep; points run on the worker pool.
SweepResult run_sweep(const RunConfig& config);

struct ClassifyOutcome {
  ClassificationVerdict verdict;
  std::optional<ConvexityEvidence> evidence;
};
ClassifyOutcome run_classify(const RunConfig& config);

/// All (α, R_T, m) tuples of the config, in sweep order.
std::vector<SpectralReport> run_solve(const RunConfig& config);

std::vector<QuasimodeResult> run_quasimode(const RunConfig& config);

// Command entry points: run the stage, write the output files into config.output_dir and
// return the process exit code. Errors propagate as robincone::Error.
int cmd_classify(const RunConfig& config);
int cmd_solve(const RunConfig& config);
int cmd_certify(const RunConfig& config);
int cmd_quasimode(const RunConfig& config);
int cmd_sweep(const RunConfig& config);

}  // namespace robincone
