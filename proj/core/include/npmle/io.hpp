#pragma once

#include <string>

#include "npmle/pipeline.hpp"

namespace npmle {

/// Plain-text sample file: one decimal number per line, '#' comments.
Dataset read_data_file(const std::string& path);
void write_data_file(const Dataset& X, const std::string& path);

/// Mixture JSON: {"weights":[...],"locations":[...]}.
DiscreteMixture read_mixture_json(const std::string& path);
std::string mixture_to_json(const DiscreteMixture& m);
void write_mixture_json(const DiscreteMixture& m, const std::string& path);

/// Certificate document (fixed schema): {status, w1_bound, support_count,
/// parameter_distance_bound, delta, c1, c2, lambda, eta, constant_chain,
/// diagnostics, shub_smale}; absent values are null.
std::string certificate_to_json(const Certificate& cert,
                                const DiagnosticEstimates& diag,
                                const ShubSmaleReport& ss);

/// Full report; `with_timings = false` yields the deterministic projection.
std::string report_to_json(const SolveReport& report, bool with_timings = true);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace npmle
