#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robincone/domain.hpp"

namespace robincone {

struct CrossSectionConfig {
  std::string kind = "latitude";  // latitude | graph | interval | quadrant
  double theta0 = 0.7853981633974483;
  std::string rho;
  int samples = 512;
  double theta = 0.7853981633974483;  // half-aperture for interval
  double bisector = 0.0;
};

struct PerturbationConfig {
  std::string kind = "none";  // none | smoothed | bump
  double radius = 1.0;
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
};

struct AlphaSweep {
  double from = 1.0;
  double to = 8.0;
  int steps = 7;
  std::string scale = "log";  // log | lin

  std::vector<double> values() const;
};

struct RunConfig {
  int nu = 3;
  CrossSectionConfig cross_section;
  PerturbationConfig perturbation;
  std::string artificial_bc = "dirichlet";

  double alpha = 1.0;
  std::optional<AlphaSweep> alpha_sweep;

  bool classify = false;
  bool solve = false;
  bool certify = false;
  bool quasimode = false;

  double h = 1.0;        // far-field edge length
  double h_layer = 0.0;  // spacing inside the Robin band; 0 picks 0.2/α
  std::vector<double> R_T = {10.0};
  double margin = 1e-3;
  std::vector<int> modes = {0};
  int k_max = 8;
  int N_certificate = 3;
  double r0 = 1.0;
  double k_quasimode = 1.0;
  std::vector<int> N_quasimode = {20, 40, 80};
  /// Lengths (h, h_layer, R_T) are given in units of 1/α.
  bool scale_with_alpha = false;

  std::string output_dir = ".";
  std::vector<std::string> formats = {"json", "csv"};

  std::vector<double> alphas() const;
  bool wants(const std::string& format) const;

  ConeSpec cone() const;
  /// Domain at the given α and truncation radius (the latter already scaled if requested).
  DomainSpec domain(double alpha, double truncation_radius) const;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Parses TOML text. Unknown keys are rejected so that typos do not pass silently.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string to_toml(const RunConfig& config);

}  // namespace robincone
