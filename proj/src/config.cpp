#include "transport/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <initializer_list>
#include <string>

#include "transport/errors.hpp"

namespace transport {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void check_keys(const Json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw ConfigError("'" + where + "' must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

const Json* maybe(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string as_string(const Json& value, const std::string& where) {
  if (!value.is_string())
    throw ConfigError("'" + where + "' must be a string");
  return value.get<std::string>();
}

double as_number(const Json& value, const std::string& where) {
  if (!value.is_number())
    throw ConfigError("'" + where + "' must be a number");
  return value.get<double>();
}

int as_int(const Json& value, const std::string& where) {
  if (!value.is_number_integer())
    throw ConfigError("'" + where + "' must be an integer");
  return value.get<int>();
}

std::uint64_t as_seed(const Json& value, const std::string& where) {
  if (!value.is_number_integer() || value.is_number_float())
    throw ConfigError("'" + where + "' must be an integer seed");
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  const auto v = value.get<std::int64_t>();
  if (v < 0) throw ConfigError("'" + where + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> as_string_list(const Json& value,
                                        const std::string& where) {
  if (!value.is_array())
    throw ConfigError("'" + where + "' must be an array of strings");
  std::vector<std::string> out;
  for (const Json& item : value) out.push_back(as_string(item, where));
  return out;
}

OutcomeKind parse_outcome_kind(const std::string& text,
                               const std::string& where) {
  if (text == "continuous") return OutcomeKind::continuous;
  if (text == "binary") return OutcomeKind::binary;
  throw ConfigError("'" + where + "' must be 'continuous' or 'binary'");
}

DesignKind parse_design_kind(const std::string& text,
                             const std::string& where) {
  if (text == "nested") return DesignKind::nested;
  if (text == "non_nested") return DesignKind::non_nested;
  throw ConfigError("'" + where + "' must be 'nested' or 'non_nested'");
}

void parse_dataset(const Json& obj, RunConfig& run) {
  check_keys(obj, "dataset",
             {"path", "s", "a", "y", "covariates", "categorical",
              "treatment_levels", "design", "outcome"});
  const Json* path = maybe(obj, "path");
  if (!path) throw ConfigError("'dataset.path' is required");
  run.dataset_path = as_string(*path, "dataset.path");

  DatasetSchema& schema = run.schema;
  if (const Json* v = maybe(obj, "s")) schema.s_column = as_string(*v, "dataset.s");
  if (const Json* v = maybe(obj, "a")) schema.a_column = as_string(*v, "dataset.a");
  if (const Json* v = maybe(obj, "y")) schema.y_column = as_string(*v, "dataset.y");
  if (const Json* v = maybe(obj, "covariates"))
    schema.covariate_columns = as_string_list(*v, "dataset.covariates");
  if (const Json* v = maybe(obj, "categorical")) {
    if (!v->is_array())
      throw ConfigError("'dataset.categorical' must be an array");
    for (const Json& item : *v) {
      CategoricalColumn column;
      if (item.is_string()) {
        column.name = item.get<std::string>();
      } else {
        check_keys(item, "dataset.categorical entry", {"name", "levels"});
        const Json* name = maybe(item, "name");
        if (!name)
          throw ConfigError("'dataset.categorical' entry needs a name");
        column.name = as_string(*name, "dataset.categorical name");
        if (const Json* levels = maybe(item, "levels"))
          column.levels = as_string_list(*levels, "dataset.categorical levels");
      }
      schema.categorical_columns.push_back(std::move(column));
    }
  }
  if (const Json* v = maybe(obj, "treatment_levels"))
    schema.treatment_levels = as_string_list(*v, "dataset.treatment_levels");
  if (const Json* v = maybe(obj, "design"))
    schema.design_kind =
        parse_design_kind(as_string(*v, "dataset.design"), "dataset.design");
  if (const Json* v = maybe(obj, "outcome"))
    schema.outcome_kind =
        parse_outcome_kind(as_string(*v, "dataset.outcome"), "dataset.outcome");
}

void parse_models(const Json& obj, RunConfig& run) {
  check_keys(obj, "models", {"participation", "treatment", "outcome"});
  if (const Json* v = maybe(obj, "participation"))
    run.participation_terms = as_string_list(*v, "models.participation");
  if (const Json* v = maybe(obj, "treatment"))
    run.treatment_terms = as_string_list(*v, "models.treatment");
  if (const Json* v = maybe(obj, "outcome"))
    run.outcome_terms = as_string_list(*v, "models.outcome");
}

BootstrapConfig parse_bootstrap(const Json& obj, std::uint64_t default_seed) {
  check_keys(obj, "bootstrap",
             {"replicates", "seed", "scheme", "levels", "max_failure_fraction",
              "threads"});
  BootstrapConfig boot;
  boot.seed = default_seed;
  if (const Json* v = maybe(obj, "replicates")) {
    boot.replicates = as_int(*v, "bootstrap.replicates");
    if (boot.replicates <= 0)
      throw ConfigError("'bootstrap.replicates' must be positive");
  }
  if (const Json* v = maybe(obj, "seed"))
    boot.seed = as_seed(*v, "bootstrap.seed");
  if (const Json* v = maybe(obj, "scheme")) {
    const std::string name = as_string(*v, "bootstrap.scheme");
    const auto scheme = resample_scheme_from_name(name);
    if (!scheme)
      throw ConfigError("'bootstrap.scheme' must be 'cohort' or 'within_s'");
    boot.scheme = *scheme;
  }
  if (const Json* v = maybe(obj, "levels")) {
    if (!v->is_array() || v->size() != 2)
      throw ConfigError("'bootstrap.levels' must be [lower, upper]");
    boot.levels = {as_number((*v)[0], "bootstrap.levels"),
                   as_number((*v)[1], "bootstrap.levels")};
    if (!(boot.levels.first > 0.0) || !(boot.levels.second < 1.0) ||
        !(boot.levels.first < boot.levels.second))
      throw ConfigError("'bootstrap.levels' must satisfy 0 < lower < upper < 1");
  }
  if (const Json* v = maybe(obj, "max_failure_fraction")) {
    boot.max_failure_fraction = as_number(*v, "bootstrap.max_failure_fraction");
    if (boot.max_failure_fraction < 0.0 || boot.max_failure_fraction > 1.0)
      throw ConfigError("'bootstrap.max_failure_fraction' must be in [0, 1]");
  }
  if (const Json* v = maybe(obj, "threads"))
    boot.threads = as_int(*v, "bootstrap.threads");
  return boot;
}

std::vector<double> as_number_list(const Json& value, const std::string& where) {
  if (!value.is_array() || value.empty())
    throw ConfigError("'" + where + "' must be a non-empty array of numbers");
  std::vector<double> out;
  for (const Json& item : value) out.push_back(as_number(item, where));
  return out;
}

ScenarioGrid parse_grid(const Json& obj, std::uint64_t default_seed) {
  check_keys(obj, "grid",
             {"target_n_trial", "n", "beta1", "theta1_x1", "beta2", "beta3",
              "outcome", "error_sd", "replications", "seed"});
  ScenarioGrid grid;
  grid.seed = default_seed;
  if (const Json* v = maybe(obj, "target_n_trial"))
    grid.target_n_trial = as_number_list(*v, "grid.target_n_trial");
  if (const Json* v = maybe(obj, "n")) {
    if (!v->is_array() || v->empty())
      throw ConfigError("'grid.n' must be a non-empty array of integers");
    grid.n.clear();
    for (const Json& item : *v) {
      const int n = as_int(item, "grid.n");
      if (n < 2) throw ConfigError("'grid.n' entries must be at least 2");
      grid.n.push_back(n);
    }
  }
  if (const Json* v = maybe(obj, "beta1"))
    grid.beta1 = as_number_list(*v, "grid.beta1");
  if (const Json* v = maybe(obj, "theta1_x1"))
    grid.theta1_x1 = as_number_list(*v, "grid.theta1_x1");
  if (const Json* v = maybe(obj, "beta2")) grid.beta2 = as_number(*v, "grid.beta2");
  if (const Json* v = maybe(obj, "beta3")) grid.beta3 = as_number(*v, "grid.beta3");
  if (const Json* v = maybe(obj, "outcome"))
    grid.outcome_kind =
        parse_outcome_kind(as_string(*v, "grid.outcome"), "grid.outcome");
  if (const Json* v = maybe(obj, "error_sd")) {
    grid.error_sd = as_number(*v, "grid.error_sd");
    if (!(grid.error_sd > 0.0))
      throw ConfigError("'grid.error_sd' must be positive");
  }
  if (const Json* v = maybe(obj, "replications")) {
    grid.replications = as_int(*v, "grid.replications");
    if (grid.replications <= 0)
      throw ConfigError("'grid.replications' must be positive");
  }
  if (const Json* v = maybe(obj, "seed")) grid.seed = as_seed(*v, "grid.seed");
  for (double target : grid.target_n_trial)
    if (!(target > 0.0))
      throw ConfigError("'grid.target_n_trial' entries must be positive");
  return grid;
}

}  // namespace

RunConfig parse_run_config(const Json& doc) {
  check_keys(doc, "config",
             {"dataset", "models", "known_treatment_probabilities", "arms",
              "contrasts", "truncate_weights_at", "positivity_threshold",
              "bootstrap", "grid", "seed", "threads"});
  RunConfig run;
  if (const Json* v = maybe(doc, "seed")) run.seed = as_seed(*v, "seed");
  if (const Json* v = maybe(doc, "threads")) run.threads = as_int(*v, "threads");
  if (const Json* v = maybe(doc, "dataset")) parse_dataset(*v, run);
  if (const Json* v = maybe(doc, "models")) parse_models(*v, run);
  if (const Json* v = maybe(doc, "known_treatment_probabilities")) {
    if (!v->is_object())
      throw ConfigError("'known_treatment_probabilities' must map arm to probability");
    for (auto it = v->begin(); it != v->end(); ++it) {
      const double p = as_number(it.value(), "known_treatment_probabilities");
      if (!(p > 0.0) || !(p < 1.0))
        throw ConfigError("known treatment probability for arm '" + it.key() +
                          "' must be in (0, 1)");
      run.known_treatment_prob[it.key()] = p;
    }
  }
  if (const Json* v = maybe(doc, "arms")) run.arms = as_string_list(*v, "arms");
  if (const Json* v = maybe(doc, "contrasts")) {
    if (!v->is_array()) throw ConfigError("'contrasts' must be an array of pairs");
    for (const Json& item : *v) {
      if (!item.is_array() || item.size() != 2)
        throw ConfigError("each contrast must be [arm, reference]");
      run.contrasts.emplace_back(as_string(item[0], "contrasts"),
                                 as_string(item[1], "contrasts"));
    }
  }
  if (const Json* v = maybe(doc, "truncate_weights_at")) {
    const double q = as_number(*v, "truncate_weights_at");
    if (!(q > 0.0) || q > 1.0)
      throw ConfigError("'truncate_weights_at' must be in (0, 1]");
    run.truncate_weights_at = q;
  }
  if (const Json* v = maybe(doc, "positivity_threshold")) {
    run.positivity_threshold = as_number(*v, "positivity_threshold");
    if (!(run.positivity_threshold >= 0.0) || run.positivity_threshold >= 1.0)
      throw ConfigError("'positivity_threshold' must be in [0, 1)");
  }
  if (const Json* v = maybe(doc, "bootstrap"))
    run.bootstrap = parse_bootstrap(*v, run.seed);
  if (const Json* v = maybe(doc, "grid")) run.grid = parse_grid(*v, run.seed);
  run.effective = doc;
  return run;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

ModelSpec parse_model_terms(const std::vector<std::string>& terms,
                            const std::vector<std::string>& columns) {
  auto exact = [&](const std::string& name) {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
  };
  auto expand = [&](const std::string& name) {
    std::vector<std::string> out;
    if (exact(name)) {
      out.push_back(name);
      return out;
    }
    const std::string prefix = name + "=";
    for (const std::string& column : columns)
      if (column.compare(0, prefix.size(), prefix) == 0) out.push_back(column);
    if (out.empty())
      throw ConfigError("model term '" + name + "' does not match any covariate");
    return out;
  };

  ModelSpec spec;
  for (const std::string& raw : terms) {
    const std::string term = trim(raw);
    if (term.empty()) throw ConfigError("empty model term");
    const std::size_t star = term.find('*');
    if (star != std::string::npos) {
      const std::string left = trim(term.substr(0, star));
      const std::string right = trim(term.substr(star + 1));
      if (left.empty() || right.empty() ||
          right.find('*') != std::string::npos)
        throw ConfigError("malformed interaction term '" + term + "'");
      for (const std::string& a : expand(left))
        for (const std::string& b : expand(right))
          spec.terms.push_back(Interaction{a, b});
      continue;
    }
    const std::size_t colon = term.find(':');
    if (colon != std::string::npos) {
      const std::string name = trim(term.substr(0, colon));
      const std::string suffix = trim(term.substr(colon + 1));
      if (suffix.compare(0, 3, "rcs") != 0)
        throw ConfigError("unknown transform in term '" + term +
                          "' (expected name:rcsK)");
      const std::string digits = suffix.substr(3);
      if (digits.empty() ||
          !std::all_of(digits.begin(), digits.end(), [](unsigned char c) {
            return std::isdigit(c);
          }))
        throw ConfigError("malformed spline term '" + term + "'");
      const int k = std::stoi(digits);
      if (k < 3 || k > 7)
        throw ConfigError("spline term '" + term +
                          "' must use between 3 and 7 knots");
      if (!exact(name))
        throw ConfigError("spline term '" + term +
                          "' requires a numeric covariate");
      spec.terms.push_back(SplineTerm{name, k});
      continue;
    }
    for (const std::string& column : expand(term))
      spec.terms.push_back(MainEffect{column});
  }
  return spec;
}

AnalysisConfig analysis_config(const RunConfig& run, const StudyDataset& data) {
  AnalysisConfig config;
  config.participation = parse_model_terms(run.participation_terms, data.covariate_names);
  config.treatment = parse_model_terms(run.treatment_terms, data.covariate_names);
  config.outcome = parse_model_terms(run.outcome_terms, data.covariate_names);
  config.known_treatment_prob = run.known_treatment_prob;
  config.arms = run.arms;
  config.contrasts = run.contrasts;
  config.truncate_weights_at = run.truncate_weights_at;
  config.positivity_threshold = run.positivity_threshold;
  return config;
}

}  // namespace transport
