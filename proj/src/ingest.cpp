#include "transport/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "transport/errors.hpp"

namespace transport {

namespace {

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "NaN" || field == "nan" ||
         field == ".";
}

double parse_number(const std::string& field, const std::string& column,
                    Eigen::Index row) {
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || !std::isfinite(value))
    throw SchemaViolation("row " + std::to_string(row) + ": column '" +
                          column + "' value '" + field + "' is not numeric");
  return value;
}

Eigen::Index find_column(const std::vector<std::string>& header,
                         const std::string& name) {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return static_cast<Eigen::Index>(j);
  throw UnknownColumn("column '" + name + "' not found in the CSV header");
}

void check_schema(const DatasetSchema& schema) {
  std::vector<std::string> names = {schema.s_column, schema.a_column,
                                    schema.y_column};
  for (const std::string& c : schema.covariate_columns) names.push_back(c);
  for (const CategoricalColumn& c : schema.categorical_columns)
    names.push_back(c.name);
  std::set<std::string> seen;
  for (const std::string& name : names) {
    if (name.empty()) throw SchemaViolation("schema contains an empty column name");
    if (!seen.insert(name).second)
      throw SchemaViolation("column '" + name + "' listed more than once");
  }
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get(c);
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_started = true;
        break;
      case '\n':
        if (row_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
        }
        row_started = false;
        break;
      case '\r':
        break;  // CRLF: the newline branch finishes the row
      default:
        field += c;
        row_started = true;
        break;
    }
  }
  if (in_quotes) throw SchemaViolation("unterminated quoted CSV field");
  if (row_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

IngestResult ingest_rows(const std::vector<std::vector<std::string>>& rows,
                         const DatasetSchema& schema) {
  check_schema(schema);
  if (rows.empty()) throw SchemaViolation("CSV has no header row");
  const std::vector<std::string>& header = rows[0];
  {
    std::set<std::string> seen;
    for (const std::string& name : header)
      if (!seen.insert(name).second)
        throw SchemaViolation("duplicate CSV header column '" + name + "'");
  }

  const Eigen::Index s_col = find_column(header, schema.s_column);
  const Eigen::Index a_col = find_column(header, schema.a_column);
  const Eigen::Index y_col = find_column(header, schema.y_column);
  std::vector<Eigen::Index> numeric_cols;
  for (const std::string& name : schema.covariate_columns)
    numeric_cols.push_back(find_column(header, name));
  std::vector<Eigen::Index> categorical_cols;
  for (const CategoricalColumn& c : schema.categorical_columns)
    categorical_cols.push_back(find_column(header, c.name));

  struct ParsedRow {
    int s = 0;
    std::string a;  // empty for non-participants
    double y = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> numeric;
    std::vector<std::string> categorical;
  };

  IngestResult out;
  IngestionLog& log = out.log;
  std::vector<ParsedRow> kept;
  kept.reserve(rows.size() - 1);

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::vector<std::string>& fields = rows[r];
    const Eigen::Index row_number = static_cast<Eigen::Index>(r);  // 1-based data row
    ++log.rows_read;
    if (fields.size() != header.size())
      throw SchemaViolation("row " + std::to_string(row_number) + " has " +
                            std::to_string(fields.size()) +
                            " fields; expected " +
                            std::to_string(header.size()));

    ParsedRow parsed;
    const std::string& s_field = fields[static_cast<std::size_t>(s_col)];
    if (is_missing(s_field))
      throw SchemaViolation("row " + std::to_string(row_number) +
                            ": participation indicator missing");
    const double s_value = parse_number(s_field, schema.s_column, row_number);
    if (s_value != 0.0 && s_value != 1.0)
      throw SchemaViolation("row " + std::to_string(row_number) +
                            ": participation indicator must be 0 or 1");
    parsed.s = static_cast<int>(s_value);

    const std::string& a_field = fields[static_cast<std::size_t>(a_col)];
    const std::string& y_field = fields[static_cast<std::size_t>(y_col)];
    if (parsed.s == 1) {
      if (is_missing(a_field))
        throw SchemaViolation("row " + std::to_string(row_number) +
                              ": participant missing a treatment label");
      if (is_missing(y_field))
        throw SchemaViolation("row " + std::to_string(row_number) +
                              ": participant missing an outcome");
      parsed.a = a_field;
      parsed.y = parse_number(y_field, schema.y_column, row_number);
      if (schema.outcome_kind == OutcomeKind::binary && parsed.y != 0.0 &&
          parsed.y != 1.0)
        throw SchemaViolation("row " + std::to_string(row_number) +
                              ": binary outcome must be 0 or 1");
    } else {
      if (!is_missing(a_field))
        throw SchemaViolation("row " + std::to_string(row_number) +
                              ": non-participant with a treatment label");
      if (!is_missing(y_field))
        throw SchemaViolation("row " + std::to_string(row_number) +
                              ": non-participant with an outcome");
    }

    // Complete-case filtering on covariates: any missing value drops the row.
    bool drop = false;
    parsed.numeric.reserve(numeric_cols.size());
    for (std::size_t j = 0; j < numeric_cols.size(); ++j) {
      const std::string& field =
          fields[static_cast<std::size_t>(numeric_cols[j])];
      if (is_missing(field)) {
        ++log.missing_by_column[schema.covariate_columns[j]];
        drop = true;
        parsed.numeric.push_back(0.0);
      } else {
        parsed.numeric.push_back(
            parse_number(field, schema.covariate_columns[j], row_number));
      }
    }
    parsed.categorical.reserve(categorical_cols.size());
    for (std::size_t j = 0; j < categorical_cols.size(); ++j) {
      const std::string& field =
          fields[static_cast<std::size_t>(categorical_cols[j])];
      if (is_missing(field)) {
        ++log.missing_by_column[schema.categorical_columns[j].name];
        drop = true;
        parsed.categorical.push_back("");
      } else {
        parsed.categorical.push_back(field);
      }
    }
    if (drop) {
      ++log.rows_dropped;
    } else {
      kept.push_back(std::move(parsed));
    }
  }
  log.rows_kept = static_cast<Eigen::Index>(kept.size());
  if (kept.empty())
    throw EmptyAfterFiltering("no complete rows after covariate filtering");

  // Resolve categorical levels (declared, or sorted observed).
  std::vector<std::vector<std::string>> levels(schema.categorical_columns.size());
  for (std::size_t j = 0; j < schema.categorical_columns.size(); ++j) {
    const CategoricalColumn& column = schema.categorical_columns[j];
    if (!column.levels.empty()) {
      levels[j] = column.levels;
      std::set<std::string> declared(column.levels.begin(),
                                     column.levels.end());
      if (declared.size() != column.levels.size())
        throw SchemaViolation("duplicate level declared for column '" +
                              column.name + "'");
      for (const ParsedRow& row : kept)
        if (!declared.count(row.categorical[j]))
          throw SchemaViolation("column '" + column.name +
                                "': undeclared level '" + row.categorical[j] +
                                "'");
    } else {
      std::set<std::string> observed;
      for (const ParsedRow& row : kept) observed.insert(row.categorical[j]);
      levels[j].assign(observed.begin(), observed.end());
    }
    if (levels[j].size() < 2)
      throw SchemaViolation("categorical column '" + column.name +
                            "' has fewer than two levels");
    log.category_levels[column.name] = levels[j];
  }

  // Resolve treatment labels (declared order, or sorted observed).
  std::vector<std::string> labels = schema.treatment_levels;
  {
    std::set<std::string> observed;
    for (const ParsedRow& row : kept)
      if (row.s == 1) observed.insert(row.a);
    if (labels.empty()) {
      labels.assign(observed.begin(), observed.end());
    } else {
      std::set<std::string> declared(labels.begin(), labels.end());
      if (declared.size() != labels.size())
        throw SchemaViolation("duplicate treatment level declared");
      for (const std::string& label : observed)
        if (!declared.count(label))
          throw SchemaViolation("undeclared treatment label '" + label + "'");
    }
  }
  if (labels.empty())
    throw SchemaViolation("no treatment labels among participants");
  log.treatment_labels = labels;

  // Assemble the dataset: numeric covariates in schema order, then indicator
  // columns for each categorical level beyond the reference.
  StudyDataset& d = out.data;
  const Eigen::Index m = static_cast<Eigen::Index>(kept.size());
  Eigen::Index width = static_cast<Eigen::Index>(numeric_cols.size());
  for (const auto& level_list : levels)
    width += static_cast<Eigen::Index>(level_list.size()) - 1;

  d.s.resize(m);
  d.arm.resize(m);
  d.y.resize(m);
  d.x.resize(m, width);
  d.covariate_names = schema.covariate_columns;
  for (std::size_t j = 0; j < levels.size(); ++j)
    for (std::size_t l = 1; l < levels[j].size(); ++l)
      d.covariate_names.push_back(schema.categorical_columns[j].name + "=" +
                                  levels[j][l]);
  d.treatment_labels = labels;
  d.design_kind = schema.design_kind;
  d.outcome_kind = schema.outcome_kind;

  for (Eigen::Index i = 0; i < m; ++i) {
    const ParsedRow& row = kept[static_cast<std::size_t>(i)];
    d.s[i] = row.s;
    d.y[i] = row.y;
    if (row.s == 1) {
      d.arm[i] = d.arm_code(row.a);
    } else {
      d.arm[i] = -1;
    }
    Eigen::Index col = 0;
    for (double v : row.numeric) d.x(i, col++) = v;
    for (std::size_t j = 0; j < levels.size(); ++j)
      for (std::size_t l = 1; l < levels[j].size(); ++l)
        d.x(i, col++) = row.categorical[j] == levels[j][l] ? 1.0 : 0.0;
  }
  d.validate();
  return out;
}

IngestResult read_dataset(const std::string& path,
                          const DatasetSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  const auto rows = parse_csv(in);
  return ingest_rows(rows, schema);
}

}  // namespace transport
