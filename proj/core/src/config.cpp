#include "robincone/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "robincone/error.hpp"

namespace robincone {

std::vector<double> AlphaSweep::values() const {
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    out.push_back(scale == "log" ? from * std::pow(to / from, t) : from + (to - from) * t);
  }
  return out;
}

std::vector<double> RunConfig::alphas() const {
  return alpha_sweep ? alpha_sweep->values() : std::vector<double>{alpha};
}

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

ConeSpec RunConfig::cone() const {
  const auto& cs = cross_section;
  if (nu == 2) {
    if (cs.kind == "quadrant") return ConeSpec(CrossSection::interval(std::numbers::pi / 4, std::numbers::pi / 4));
    if (cs.kind == "interval") return ConeSpec(CrossSection::interval(cs.theta, cs.bisector));
    throw Error(ErrorCode::InvalidConfig, "nu = 2 needs cross_section kind 'interval' or 'quadrant'");
  }
  if (cs.kind == "latitude") return ConeSpec(CrossSection::latitude(cs.theta0, cs.samples));
  if (cs.kind == "graph") return ConeSpec(CrossSection::graph(cs.rho, cs.samples));
  throw Error(ErrorCode::InvalidConfig, "nu = 3 needs cross_section kind 'latitude' or 'graph'");
}

DomainSpec RunConfig::domain(double a, double truncation_radius) const {
  DomainSpec spec{cone()};
  const double unit = scale_with_alpha ? 1.0 / a : 1.0;
  if (perturbation.kind == "smoothed") {
    spec.perturbation = SmoothedVertex{perturbation.radius * unit};
  } else if (perturbation.kind == "bump") {
    spec.perturbation = RadialBump{perturbation.amplitude, perturbation.center * unit, perturbation.width * unit};
  } else if (perturbation.kind != "none") {
    throw Error(ErrorCode::InvalidConfig, "unknown perturbation kind '" + perturbation.kind + "'");
  }
  spec.truncation_radius = truncation_radius;
  spec.artificial_bc = artificial_bc == "neumann" ? ArtificialBC::Neumann : ArtificialBC::Dirichlet;
  spec.alpha = a;
  return spec;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (nu != 2 && nu != 3) fail("nu must be 2 or 3");
  if (!(classify || solve || certify || quasimode)) fail("no pipeline stage enabled");
  if (!(alpha > 0)) fail("alpha must be positive");
  if (alpha_sweep) {
    if (alpha_sweep->steps < 2) fail("alpha_sweep needs at least 2 steps");
    if (!(alpha_sweep->from > 0 && alpha_sweep->to > 0)) fail("alpha_sweep bounds must be positive");
    if (alpha_sweep->scale != "log" && alpha_sweep->scale != "lin") fail("alpha_sweep.scale is log or lin");
  }
  if (!(h > 0) || h_layer < 0) fail("h must be positive and h_layer nonnegative");
  if (R_T.empty()) fail("R_T must not be empty");
  for (double r : R_T)
    if (!(r > 0)) fail("R_T must be positive");
  if (!(margin >= 0)) fail("margin must be nonnegative");
  for (int m : modes)
    if (m < 0) fail("modes must be nonnegative");
  if (k_max < 1 || N_certificate < 1 || !(r0 >= 0) || !(k_quasimode > 0)) fail("invalid certificate parameters");
  if (artificial_bc != "dirichlet" && artificial_bc != "neumann") fail("artificial_bc is dirichlet or neumann");
  for (const auto& f : formats)
    if (f != "json" && f != "csv" && f != "vtk") fail("unknown output format '" + f + "'");
}

namespace {

void check_keys(const toml::table& table, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, node] : table)
    if (!ok.count(std::string(key.str())))
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + std::string(key.str()) + "' in " + where);
}

template <class T>
void read(const toml::table& t, const char* key, T& out) {
  const toml::node* node = t.get(key);
  if (!node) return;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node->value<double>()) {
      out = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, int>) {
    if (auto v = node->value<int64_t>()) {
      out = static_cast<int>(*v);
      return;
    }
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node->value<bool>()) {
      out = *v;
      return;
    }
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node->value<std::string>()) {
      out = *v;
      return;
    }
  }
  throw Error(ErrorCode::InvalidConfig, std::string("wrong type for '") + key + "'");
}

template <class T>
void read_list(const toml::table& t, const char* key, std::vector<T>& out) {
  const toml::node* node = t.get(key);
  if (!node) return;
  out.clear();
  auto take = [&](const toml::node& n) {
    if constexpr (std::is_same_v<T, std::string>) {
      auto v = n.value<std::string>();
      if (!v) throw Error(ErrorCode::InvalidConfig, std::string("wrong element type in '") + key + "'");
      out.push_back(*v);
    } else if constexpr (std::is_same_v<T, int>) {
      auto v = n.value<int64_t>();
      if (!v) throw Error(ErrorCode::InvalidConfig, std::string("wrong element type in '") + key + "'");
      out.push_back(static_cast<int>(*v));
    } else {
      auto v = n.value<double>();
      if (!v) throw Error(ErrorCode::InvalidConfig, std::string("wrong element type in '") + key + "'");
      out.push_back(*v);
    }
  };
  if (const auto* arr = node->as_array()) {
    for (const auto& n : *arr) take(n);
  } else {
    take(*node);
  }
}

const toml::table* sub(const toml::table& t, const char* key) {
  const toml::node* node = t.get(key);
  if (!node) return nullptr;
  if (const auto* table = node->as_table()) return table;
  throw Error(ErrorCode::InvalidConfig, std::string("'") + key + "' must be a table");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    throw Error(ErrorCode::InvalidConfig, msg.str());
  }
  RunConfig c;
  check_keys(root, {"domain", "pipeline", "numerics", "output"}, "top level");

  if (const auto* d = sub(root, "domain")) {
    check_keys(*d, {"nu", "cross_section", "perturbation", "artificial_bc", "alpha", "alpha_sweep"}, "[domain]");
    read(*d, "nu", c.nu);
    read(*d, "artificial_bc", c.artificial_bc);
    read(*d, "alpha", c.alpha);
    if (const auto* cs = sub(*d, "cross_section")) {
      check_keys(*cs, {"kind", "theta0", "rho", "samples", "theta", "bisector"}, "cross_section");
      read(*cs, "kind", c.cross_section.kind);
      read(*cs, "theta0", c.cross_section.theta0);
      read(*cs, "rho", c.cross_section.rho);
      read(*cs, "samples", c.cross_section.samples);
      read(*cs, "theta", c.cross_section.theta);
      read(*cs, "bisector", c.cross_section.bisector);
    }
    if (const auto* p = sub(*d, "perturbation")) {
      check_keys(*p, {"kind", "radius", "amplitude", "center", "width"}, "perturbation");
      read(*p, "kind", c.perturbation.kind);
      read(*p, "radius", c.perturbation.radius);
      read(*p, "amplitude", c.perturbation.amplitude);
      read(*p, "center", c.perturbation.center);
      read(*p, "width", c.perturbation.width);
    }
    if (const auto* s = sub(*d, "alpha_sweep")) {
      check_keys(*s, {"from", "to", "steps", "scale"}, "alpha_sweep");
      AlphaSweep sw;
      read(*s, "from", sw.from);
      read(*s, "to", sw.to);
      read(*s, "steps", sw.steps);
      read(*s, "scale", sw.scale);
      c.alpha_sweep = sw;
    }
  }
  if (const auto* p = sub(root, "pipeline")) {
    check_keys(*p, {"classify", "solve", "certify", "quasimode"}, "[pipeline]");
    read(*p, "classify", c.classify);
    read(*p, "solve", c.solve);
    read(*p, "certify", c.certify);
    read(*p, "quasimode", c.quasimode);
  }
  if (const auto* n = sub(root, "numerics")) {
    check_keys(*n, {"h", "h_layer", "R_T", "margin", "modes", "k_max", "N_certificate", "r0", "k_quasimode",
                    "N_quasimode", "scale_with_alpha"},
               "[numerics]");
    read(*n, "h", c.h);
    read(*n, "h_layer", c.h_layer);
    read_list(*n, "R_T", c.R_T);
    read(*n, "margin", c.margin);
    read_list(*n, "modes", c.modes);
    read(*n, "k_max", c.k_max);
    read(*n, "N_certificate", c.N_certificate);
    read(*n, "r0", c.r0);
    read(*n, "k_quasimode", c.k_quasimode);
    read_list(*n, "N_quasimode", c.N_quasimode);
    read(*n, "scale_with_alpha", c.scale_with_alpha);
  }
  if (const auto* o = sub(root, "output")) {
    check_keys(*o, {"dir", "formats"}, "[output]");
    read(*o, "dir", c.output_dir);
    read_list(*o, "formats", c.formats);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_toml(const RunConfig& c) {
  auto array_of = [](const auto& values) {
    toml::array a;
    for (const auto& v : values) a.push_back(v);
    return a;
  };
  toml::table cs{{"kind", c.cross_section.kind}, {"samples", c.cross_section.samples}};
  if (c.cross_section.kind == "latitude") cs.insert("theta0", c.cross_section.theta0);
  if (c.cross_section.kind == "graph") cs.insert("rho", c.cross_section.rho);
  if (c.cross_section.kind == "interval") {
    cs.insert("theta", c.cross_section.theta);
    cs.insert("bisector", c.cross_section.bisector);
  }
  toml::table pert{{"kind", c.perturbation.kind}};
  if (c.perturbation.kind == "smoothed") pert.insert("radius", c.perturbation.radius);
  if (c.perturbation.kind == "bump") {
    pert.insert("amplitude", c.perturbation.amplitude);
    pert.insert("center", c.perturbation.center);
    pert.insert("width", c.perturbation.width);
  }
  toml::table domain{{"nu", c.nu},          {"cross_section", cs}, {"perturbation", pert},
                     {"alpha", c.alpha},    {"artificial_bc", c.artificial_bc}};
  if (c.alpha_sweep)
    domain.insert("alpha_sweep", toml::table{{"from", c.alpha_sweep->from},
                                             {"to", c.alpha_sweep->to},
                                             {"steps", c.alpha_sweep->steps},
                                             {"scale", c.alpha_sweep->scale}});
  toml::table root{
      {"domain", domain},
      {"pipeline", toml::table{{"classify", c.classify}, {"solve", c.solve}, {"certify", c.certify},
                               {"quasimode", c.quasimode}}},
      {"numerics", toml::table{{"h", c.h},
                               {"h_layer", c.h_layer},
                               {"R_T", array_of(c.R_T)},
                               {"margin", c.margin},
                               {"modes", array_of(c.modes)},
                               {"k_max", c.k_max},
                               {"N_certificate", c.N_certificate},
                               {"r0", c.r0},
                               {"k_quasimode", c.k_quasimode},
                               {"N_quasimode", array_of(c.N_quasimode)},
                               {"scale_with_alpha", c.scale_with_alpha}}},
      {"output", toml::table{{"dir", c.output_dir}, {"formats", array_of(c.formats)}}},
  };
  std::ostringstream out;
  out << root << "\n";
  return out.str();
}

}  // namespace robincone
