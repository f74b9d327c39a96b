// robincone: classify | solve | certify | quasimode | sweep
//
// Every run is described by a TOML config (--config). The other flags are shorthands that
// override single config fields; the effective config is written next to the reports.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "robincone/config.hpp"
#include "robincone/error.hpp"
#include "robincone/pipeline.hpp"
#include "robincone/report_io.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<int> nu;
  std::optional<std::string> kind, rho, bc, out;
  std::optional<double> theta0, theta, bisector, alpha, h, h_layer, margin, r0, k;
  std::optional<double> smoothed;
  std::optional<int> N, k_max;
  std::vector<double> R_T;
  std::vector<int> modes, N_quasimode;
  std::vector<std::string> formats;
  bool scale_with_alpha = false;
  bool print_config = false;
};

void add_flags(CLI::App* app, Overrides& o) {
  app->set_help_flag("--help", "print this help and exit");
  app->add_option("--config,-c", o.config_path, "TOML run config")->check(CLI::ExistingFile);
  app->add_option("--nu", o.nu, "ambient dimension (2 or 3)");
  app->add_option("--kind", o.kind, "cross-section: latitude | graph | interval | quadrant");
  app->add_option("--theta0", o.theta0, "polar angle of a latitude circle");
  app->add_option("--theta", o.theta, "half-aperture of a planar sector");
  app->add_option("--bisector", o.bisector, "bisector angle of a planar sector");
  app->add_option("--rho", o.rho, "polar angle as a function of phi");
  app->add_option("--smoothed", o.smoothed, "fillet radius of a smoothed vertex");
  app->add_option("--alpha", o.alpha, "Robin parameter");
  app->add_option("--R_T", o.R_T, "truncation radii");
  app->add_option("--h", o.h, "far-field edge length");
  app->add_option("--h_layer", o.h_layer, "edge length in the boundary band");
  app->add_option("--margin", o.margin, "relative margin below -alpha^2");
  app->add_option("--modes", o.modes, "azimuthal modes");
  app->add_option("--k_max", o.k_max, "eigenpairs per report");
  app->add_option("--bc", o.bc, "artificial boundary: dirichlet | neumann");
  app->add_option("--N", o.N, "certificate size");
  app->add_option("--r0", o.r0, "certificate inner radius");
  app->add_option("--k", o.k, "quasi-mode wavenumber");
  app->add_option("--N_quasimode", o.N_quasimode, "quasi-mode cutoff scales");
  app->add_flag("--scale-with-alpha", o.scale_with_alpha, "lengths in units of 1/alpha");
  app->add_option("--out,-o", o.out, "output directory");
  app->add_option("--formats", o.formats, "json csv vtk");
  app->add_flag("--print-config", o.print_config, "print the effective config and exit");
}

robincone::RunConfig build_config(const Overrides& o) {
  robincone::RunConfig c = o.config_path.empty() ? robincone::RunConfig{} : robincone::load_config(o.config_path);
  if (o.nu) {
    c.nu = *o.nu;
    if (c.nu == 2 && !o.kind && c.cross_section.kind == "latitude") c.cross_section.kind = "interval";
  }
  if (o.kind) c.cross_section.kind = *o.kind;
  if (o.theta0) c.cross_section.theta0 = *o.theta0;
  if (o.theta) c.cross_section.theta = *o.theta;
  if (o.bisector) c.cross_section.bisector = *o.bisector;
  if (o.rho) {
    c.cross_section.rho = *o.rho;
    if (!o.kind) c.cross_section.kind = "graph";
  }
  if (o.smoothed) {
    c.perturbation.kind = "smoothed";
    c.perturbation.radius = *o.smoothed;
  }
  if (o.alpha) c.alpha = *o.alpha;
  if (!o.R_T.empty()) c.R_T = o.R_T;
  if (o.h) c.h = *o.h;
  if (o.h_layer) c.h_layer = *o.h_layer;
  if (o.margin) c.margin = *o.margin;
  if (!o.modes.empty()) c.modes = o.modes;
  if (o.k_max) c.k_max = *o.k_max;
  if (o.bc) c.artificial_bc = *o.bc;
  if (o.N) c.N_certificate = *o.N;
  if (o.r0) c.r0 = *o.r0;
  if (o.k) c.k_quasimode = *o.k;
  if (!o.N_quasimode.empty()) c.N_quasimode = o.N_quasimode;
  if (o.scale_with_alpha) c.scale_with_alpha = true;
  if (o.out) c.output_dir = *o.out;
  if (!o.formats.empty()) c.formats = o.formats;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin Laplacian spectra on conical domains"};
  app.require_subcommand(1);
  Overrides o;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"classify", "decide empty / finite / infinite discrete spectrum from the geometry"},
      {"solve", "finite-element eigenvalues and inertia counts below -alpha^2"},
      {"certify", "trial-function certificate for N eigenvalues below -alpha^2"},
      {"quasimode", "Rayleigh quotients of approximate eigenfunctions near k^2 - alpha^2"},
      {"sweep", "alpha sweep of the lowest eigenvalue with a power-law fit"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), o);
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    robincone::RunConfig config = build_config(o);
    if (command == "classify") config.classify = true;
    if (command == "solve" || command == "sweep") config.solve = true;
    if (command == "certify") config.certify = true;
    if (command == "quasimode") config.quasimode = true;
    config.validate();
    if (o.print_config) {
      std::cout << robincone::to_toml(config);
      return 0;
    }
    robincone::write_text(config.output_dir, "config.toml", robincone::to_toml(config));

    int rc = 0;
    if (command == "classify") rc = robincone::cmd_classify(config);
    else if (command == "solve") rc = robincone::cmd_solve(config);
    else if (command == "certify") rc = robincone::cmd_certify(config);
    else if (command == "quasimode") rc = robincone::cmd_quasimode(config);
    else rc = robincone::cmd_sweep(config);
    std::cerr << command << ": reports in " << config.output_dir << "\n";
    return rc;
  } catch (const robincone::Error& e) {
    std::cerr << "robincone " << command << ": " << e.what() << "\n";
    return robincone::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "robincone " << command << ": " << e.what() << "\n";
    return 1;
  }
}
