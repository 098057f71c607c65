#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "transport/dataset.hpp"

namespace transport {

struct CategoricalColumn {
  std::string name;
  // Declared levels; the first is the reference.  Empty: infer sorted
  // observed levels from the retained rows.
  std::vector<std::string> levels;
};

// Column mapping for a CSV cohort file.  Participants (s = 1) must carry a
// treatment label and an outcome; non-participants must leave both empty.
struct DatasetSchema {
  std::string s_column;
  std::string a_column;
  std::string y_column;
  std::vector<std::string> covariate_columns;  // numeric
  std::vector<CategoricalColumn> categorical_columns;
  // Declared arm order (reference coding for contrasts); empty: sorted
  // observed labels.
  std::vector<std::string> treatment_levels;
  DesignKind design_kind = DesignKind::nested;
  OutcomeKind outcome_kind = OutcomeKind::continuous;
};

struct IngestionLog {
  Eigen::Index rows_read = 0;   // data rows (header excluded)
  Eigen::Index rows_kept = 0;
  Eigen::Index rows_dropped = 0;  // incomplete covariates
  std::map<std::string, Eigen::Index> missing_by_column;
  std::map<std::string, std::vector<std::string>> category_levels;
  std::vector<std::string> treatment_labels;
};

struct IngestResult {
  StudyDataset data;
  IngestionLog log;
};

// RFC-style CSV: quoted fields, doubled-quote escapes, embedded commas and
// newlines; CRLF accepted.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// Rows[0] must be the header.  Rows with missing covariates are dropped and
// counted; a participation/treatment/outcome presence-pattern violation is an
// error naming the row.
IngestResult ingest_rows(const std::vector<std::vector<std::string>>& rows,
                         const DatasetSchema& schema);

IngestResult read_dataset(const std::string& path, const DatasetSchema& schema);

}  // namespace transport
