#pragma once

#include <string>
#include <vector>

#include "robincone/pipeline.hpp"

namespace robincone {

// JSON documents are pretty-printed with a fixed key order so that reruns are byte-identical
// apart from runtime_ms.

std::string classify_json(const ClassifyOutcome& outcome, const RunConfig& config);
std::string solve_json(const std::vector<SpectralReport>& reports, const RunConfig& config,
                       const ClassifyOutcome* classification = nullptr);
std::string certificate_json(const TrialFamily& family);
std::string quasimode_json(const std::vector<QuasimodeResult>& results, const RunConfig& config);
std::string sweep_json(const SweepResult& sweep, const RunConfig& config);

/// Columns alpha,R_T,h,m,margin,count,lambda_1..lambda_K (empty cells past the found pairs).
std::string solve_csv(const std::vector<SpectralReport>& reports, int K);
std::string sweep_csv(const SweepResult& sweep);

void write_text(const std::string& directory, const std::string& name, const std::string& text);

}  // namespace robincone
