#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "transport/analysis.hpp"
#include "transport/config.hpp"
#include "transport/diagnostics.hpp"
#include "transport/errors.hpp"
#include "transport/report.hpp"
#include "transport/version.hpp"

namespace {

using transport::Json;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::optional<int> bootstrap;
  std::optional<int> threads;
  std::string out;
  std::string histogram;
};

void add_common(CLI::App* cmd, CommonFlags& flags, const char* default_out) {
  cmd->add_option("--config", flags.config_path, "Path to the JSON run config")
      ->required();
  cmd->add_option("--seed", flags.seed, "Override every seed in the config");
  cmd->add_option("--threads", flags.threads, "Worker thread count (0 = all cores)");
  flags.out = default_out;
  cmd->add_option("--out", flags.out, "Output path");
}

// Flag overrides are applied to the config document itself, so the echoed
// config in the report is exactly what the run used.
Json load_effective(const CommonFlags& flags, bool simulate) {
  std::ifstream in(flags.config_path, std::ios::binary);
  if (!in)
    throw transport::ConfigError("cannot open config file '" +
                                 flags.config_path + "'");
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw transport::ConfigError("config file '" + flags.config_path +
                                 "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object())
    throw transport::ConfigError("config root must be a JSON object");
  if (flags.seed) {
    doc["seed"] = *flags.seed;
    if (doc.contains("bootstrap") && doc["bootstrap"].is_object())
      doc["bootstrap"]["seed"] = *flags.seed;
    if (doc.contains("grid") && doc["grid"].is_object())
      doc["grid"]["seed"] = *flags.seed;
  }
  if (flags.bootstrap) {
    if (!doc.contains("bootstrap") || !doc["bootstrap"].is_object())
      doc["bootstrap"] = Json::object();
    doc["bootstrap"]["replicates"] = *flags.bootstrap;
  }
  if (flags.replicates) {
    if (simulate) {
      if (!doc.contains("grid") || !doc["grid"].is_object())
        doc["grid"] = Json::object();
      doc["grid"]["replications"] = *flags.replicates;
    } else {
      if (!doc.contains("bootstrap") || !doc["bootstrap"].is_object())
        doc["bootstrap"] = Json::object();
      doc["bootstrap"]["replicates"] = *flags.replicates;
    }
  }
  if (flags.threads) doc["threads"] = *flags.threads;
  return doc;
}

transport::IngestResult load_data(const transport::RunConfig& run) {
  if (run.dataset_path.empty())
    throw transport::ConfigError("this subcommand requires a 'dataset' section");
  transport::IngestResult ingest =
      transport::read_dataset(run.dataset_path, run.schema);
  std::fprintf(stderr, "read %lld rows, kept %lld (%lld dropped incomplete)\n",
               static_cast<long long>(ingest.log.rows_read),
               static_cast<long long>(ingest.log.rows_kept),
               static_cast<long long>(ingest.log.rows_dropped));
  return ingest;
}

void print_estimates(const transport::EstimateReport& report) {
  const transport::PointEstimates& est = report.estimates;
  for (std::size_t a = 0; a < est.arms.size(); ++a) {
    std::printf("arm %s:\n", est.arms[a].c_str());
    for (std::size_t e = 0; e < transport::kEstimatorCount; ++e)
      std::printf("  %-6s %.6f\n",
                  transport::estimator_name(transport::kEstimators[e]),
                  est.mu[a][e]);
  }
  for (std::size_t c = 0; c < est.contrast_arms.size(); ++c) {
    std::printf("contrast %s - %s:\n", est.contrast_arms[c].first.c_str(),
                est.contrast_arms[c].second.c_str());
    for (std::size_t e = 0; e < transport::kEstimatorCount; ++e) {
      std::printf("  %-6s difference %.6f",
                  transport::estimator_name(transport::kEstimators[e]),
                  est.difference[c][e]);
      if (est.ratio[c][e]) std::printf("  ratio %.6f", *est.ratio[c][e]);
      std::printf("\n");
    }
  }
  if (report.diagnostics.positivity_warning)
    std::printf("warning: %lld non-participants below the positivity threshold %g\n",
                static_cast<long long>(report.diagnostics.low_p_hat_count),
                report.diagnostics.positivity_threshold);
}

int run_analyze(const CommonFlags& flags, bool diagnostics_only) {
  const Json doc = load_effective(flags, /*simulate=*/false);
  transport::RunConfig run = transport::parse_run_config(doc);
  const transport::IngestResult ingest = load_data(run);
  const transport::AnalysisConfig config =
      transport::analysis_config(run, ingest.data);

  std::optional<transport::BootstrapConfig> boot;
  if (!diagnostics_only && run.bootstrap) {
    boot = run.bootstrap;
    if (boot->threads == 0 && run.threads != 0) boot->threads = run.threads;
  }
  const transport::EstimateReport report =
      transport::analyze(ingest.data, config, boot);

  Json out;
  if (diagnostics_only) {
    out["schema_version"] = 1;
    out["tool"] = {{"name", transport::kToolName},
                   {"version", transport::kVersion}};
    out["config"] = doc;
    out["diagnostics"] = transport::diagnostics_to_json(report.diagnostics);
  } else {
    out = transport::report_to_json(report, doc);
  }
  transport::write_text_atomic(flags.out, out.dump(2) + "\n");

  if (!flags.histogram.empty())
    transport::write_text_atomic(
        flags.histogram, transport::p_hat_histogram_csv(report.artifacts.p_hat,
                                                        ingest.data.s));
  if (diagnostics_only) {
    std::printf("weight_mean_ratio %.6f\n",
                report.diagnostics.weight_mean_ratio);
    std::printf("low_p_hat_count %lld\n",
                static_cast<long long>(report.diagnostics.low_p_hat_count));
  } else {
    print_estimates(report);
  }
  std::printf("wrote %s\n", flags.out.c_str());
  return 0;
}

int run_simulate(const CommonFlags& flags) {
  const Json doc = load_effective(flags, /*simulate=*/true);
  transport::RunConfig run = transport::parse_run_config(doc);
  if (!run.grid)
    throw transport::ConfigError("'simulate' requires a 'grid' section");
  transport::RunOptions options;
  options.threads = run.threads;
  const auto summaries = transport::run_factorial(*run.grid, options);
  transport::write_text_atomic(flags.out, transport::summary_csv(summaries));
  std::printf("ran %zu scenarios x %d replications\n", summaries.size(),
              run.grid->replications);
  std::printf("wrote %s\n", flags.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extends randomized-trial treatment effects to the population "
               "of trial non-participants"};
  app.set_version_flag("--version", std::string(transport::kVersion));
  app.require_subcommand(1);

  CommonFlags analyze_flags, simulate_flags, diagnose_flags;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Estimate arm means and contrasts for a dataset");
  add_common(analyze, analyze_flags, "report.json");
  analyze->add_option("--replicates", analyze_flags.replicates,
                      "Override the bootstrap replicate count");
  analyze->add_option("--bootstrap", analyze_flags.bootstrap,
                      "Enable the bootstrap with this many replicates");
  analyze->add_option("--histogram", analyze_flags.histogram,
                      "Also write a participation-probability histogram CSV");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run a factorial simulation grid");
  add_common(simulate, simulate_flags, "summary.csv");
  simulate->add_option("--replicates", simulate_flags.replicates,
                       "Override the per-scenario replication count");

  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Weight and overlap diagnostics only (no bootstrap)");
  add_common(diagnose, diagnose_flags, "diagnostics.json");
  diagnose->add_option("--histogram", diagnose_flags.histogram,
                       "Also write a participation-probability histogram CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (analyze->parsed()) return run_analyze(analyze_flags, false);
    if (simulate->parsed()) return run_simulate(simulate_flags);
    if (diagnose->parsed()) return run_analyze(diagnose_flags, true);
    return 2;
  } catch (const transport::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const transport::SchemaViolation& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const transport::UnknownColumn& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const transport::MissingValue& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const transport::EmptyAfterFiltering& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const transport::InvalidDataset& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const transport::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  } catch (const transport::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
