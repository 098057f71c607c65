#pragma once

#include <string>

#include "transport/analysis.hpp"
#include "transport/json.hpp"

namespace transport {

Json quantile_summary_to_json(const QuantileSummary& q);
Json diagnostics_to_json(const Diagnostics& d);
Json bootstrap_to_json(const BootstrapSummary& b);

// The full report document: tool version, config echo, per-arm estimates
// keyed by estimator, contrasts with difference and ratio (null when the
// reference mean is zero), diagnostics, and bootstrap metadata.  Field order
// is fixed, so serialize -> parse -> serialize round-trips byte-identically.
Json report_to_json(const EstimateReport& report, const Json& config_echo);

// Writes text via a temporary file in the same directory plus rename, so a
// failed run never leaves a partial file behind.
void write_text_atomic(const std::string& path, const std::string& text);

void write_report(const EstimateReport& report, const Json& config_echo,
                  const std::string& path);

}  // namespace transport
