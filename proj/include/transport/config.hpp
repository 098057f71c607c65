#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transport/estimators.hpp"
#include "transport/inference.hpp"
#include "transport/ingest.hpp"
#include "transport/json.hpp"
#include "transport/simulation.hpp"

namespace transport {

// A fully parsed run configuration.  Model formulas stay as term strings here
// because categorical expansion depends on the ingested dataset; call
// analysis_config() after read_dataset() to resolve them.
struct RunConfig {
  std::string dataset_path;
  DatasetSchema schema;
  std::vector<std::string> participation_terms;
  std::vector<std::string> treatment_terms;
  std::vector<std::string> outcome_terms;
  std::map<std::string, double> known_treatment_prob;
  std::vector<std::string> arms;
  std::vector<std::pair<std::string, std::string>> contrasts;
  std::optional<double> truncate_weights_at;
  double positivity_threshold = 1e-3;
  std::optional<BootstrapConfig> bootstrap;
  std::optional<ScenarioGrid> grid;
  std::uint64_t seed = 1;
  int threads = 0;
  Json effective;  // the document the run is reproducible from
};

// Parses the declarative config document.  Unknown keys are rejected so typos
// fail loudly.  Throws ConfigError.
RunConfig parse_run_config(const Json& doc);
RunConfig load_run_config(const std::string& path);

// Term grammar: "name" (main effect; a categorical base name expands to all
// of its indicator columns), "name:rcsK" (restricted cubic spline, 3<=K<=7),
// "a*b" (product; categorical sides expand to all their indicators).
ModelSpec parse_model_terms(const std::vector<std::string>& terms,
                            const std::vector<std::string>& columns);

// Resolves the model formulas against an ingested dataset.
AnalysisConfig analysis_config(const RunConfig& run, const StudyDataset& data);

}  // namespace transport
