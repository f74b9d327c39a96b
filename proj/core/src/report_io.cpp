#include "robincone/report_io.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "robincone/error.hpp"

namespace robincone {

using Json = nlohmann::ordered_json;

namespace {

Json domain_json(const RunConfig& c) {
  Json d;
  d["nu"] = c.nu;
  d["cross_section"] = c.cone().cross_section().describe();
  d["perturbation"] = c.perturbation.kind;
  d["artificial_bc"] = c.artificial_bc;
  return d;
}

Json verdict_json(const ClassifyOutcome& o) {
  Json j;
  j["verdict"] = to_string(o.verdict.verdict);
  j["reason"] = o.verdict.reason;
  if (o.verdict.curvature_evidence) {
    j["s0"] = o.verdict.curvature_evidence->s0;
    j["kappa"] = o.verdict.curvature_evidence->kappa;
  } else if (o.evidence && std::isfinite(o.evidence->kappa_max)) {
    j["s0"] = o.evidence->s0;
    j["kappa"] = o.evidence->kappa_max;
  }
  if (o.evidence) j["complement_convex"] = o.evidence->convex;
  return j;
}

Json report_json(const SpectralReport& r) {
  Json j;
  j["alpha"] = r.alpha;
  j["threshold"] = r.threshold;
  j["margin"] = r.margin;
  j["mode"] = r.mode;
  j["eigenvalues"] = r.eigenvalues;
  Json counts = Json::array();
  for (const auto& c : r.counts) counts.push_back({{"shift", c.shift}, {"dirichlet", c.dirichlet}, {"neumann", c.neumann}});
  j["counts"] = counts;
  j["residuals"] = r.residuals;
  j["converged"] = r.converged;
  j["mesh"] = {{"h", r.h}, {"R_T", r.truncation_radius}, {"bc", r.bc}, {"nodes", r.nodes}, {"dofs", r.dofs}};
  j["runtime_ms"] = r.runtime_ms;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string classify_json(const ClassifyOutcome& outcome, const RunConfig& config) {
  Json j;
  j["command"] = "classify";
  j["domain"] = domain_json(config);
  const Json verdict = verdict_json(outcome);
  for (const auto& [k, v] : verdict.items()) j[k] = v;
  return dump(j);
}

std::string solve_json(const std::vector<SpectralReport>& reports, const RunConfig& config,
                       const ClassifyOutcome* classification) {
  Json j;
  j["command"] = "solve";
  j["domain"] = domain_json(config);
  if (classification) j["classification"] = verdict_json(*classification);
  Json list = Json::array();
  for (const auto& r : reports) list.push_back(report_json(r));
  j["reports"] = list;
  return dump(j);
}

std::string certificate_json(const TrialFamily& f) {
  Json j;
  j["cone"] = f.cone;
  j["alpha"] = f.alpha;
  j["N"] = f.N;
  j["r0"] = f.r0;
  j["R"] = f.R;
  j["delta"] = f.delta;
  j["b"] = f.b;
  j["eps"] = f.eps;
  j["s0"] = f.s0;
  j["kappa0"] = f.kappa0;
  j["quotients"] = f.quotients;
  j["threshold"] = f.threshold;
  j["certified"] = f.certified;
  Json members = Json::array();
  for (const auto& m : f.members)
    members.push_back({{"index", m.index},
                       {"center", m.center},
                       {"half_width1", m.half_width1},
                       {"half_width2", m.half_width2},
                       {"quotient", m.quotient},
                       {"quotient_low_order", m.quotient_low},
                       {"inner_radius", m.inner_radius}});
  j["members"] = members;
  double cross = 0.0;
  for (int a = 0; a < f.cross_forms.rows(); ++a)
    for (int b = 0; b < f.cross_forms.cols(); ++b)
      if (a != b) cross = std::max(cross, std::abs(f.cross_forms(a, b)));
  j["max_cross_form"] = cross;
  j["max_metric_defect"] = f.max_metric_defect;
  j["min_curvature_ratio"] = f.min_curvature_ratio;
  Json history = Json::array();
  for (const auto& [R, q] : f.history) history.push_back({{"R", R}, {"max_quotient", q}});
  j["history"] = history;
  return dump(j);
}

std::string quasimode_json(const std::vector<QuasimodeResult>& results, const RunConfig& config) {
  Json j;
  j["command"] = "quasimode";
  j["domain"] = domain_json(config);
  j["alpha"] = config.alpha;
  j["k"] = config.k_quasimode;
  Json list = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    Json e{{"N", r.N}, {"quotient", r.quotient}, {"target", r.target}, {"deviation", r.deviation}};
    if (i > 0 && results[i - 1].deviation > 0) e["ratio"] = r.deviation / results[i - 1].deviation;
    list.push_back(e);
  }
  j["results"] = list;
  return dump(j);
}

std::string sweep_json(const SweepResult& s, const RunConfig& config) {
  Json j;
  j["command"] = "sweep";
  j["domain"] = domain_json(config);
  j["R_T"] = s.R_T;
  j["mode"] = s.mode;
  j["scale_with_alpha"] = config.scale_with_alpha;
  Json pts = Json::array();
  for (const auto& p : s.points)
    pts.push_back({{"alpha", p.alpha}, {"lambda_1", p.lambda1}, {"residual", p.residual}, {"count", p.count},
                   {"converged", p.converged}});
  j["points"] = pts;
  j["fit"] = {{"slope", s.fit.slope}, {"C", s.fit.C}, {"points_used", s.fit.points_used}};
  return dump(j);
}

std::string solve_csv(const std::vector<SpectralReport>& reports, int K) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "alpha,R_T,h,m,margin,count";
  for (int k = 1; k <= K; ++k) out << ",lambda_" << k;
  out << "\n";
  for (const auto& r : reports) {
    out << r.alpha << ',' << r.truncation_radius << ',' << r.h << ',' << r.mode << ',' << r.margin << ','
        << r.count();
    for (int k = 0; k < K; ++k) {
      out << ',';
      if (k < static_cast<int>(r.eigenvalues.size())) out << r.eigenvalues[k];
    }
    out << "\n";
  }
  return out.str();
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "alpha,R_T,m,count,lambda_1,residual,converged\n";
  for (const auto& p : s.points)
    out << p.alpha << ',' << s.R_T << ',' << s.mode << ',' << p.count << ',' << p.lambda1 << ',' << p.residual
        << ',' << (p.converged ? 1 : 0) << "\n";
  return out.str();
}

void write_text(const std::string& directory, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  const std::filesystem::path path = std::filesystem::path(directory) / name;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  out << text;
}

}  // namespace robincone
