#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace transport {

enum class OutcomeKind { continuous, binary };
enum class DesignKind { nested, non_nested };

// One analysis cohort: trial participants (s == 1, with an assigned arm and an
// observed outcome) plus the target group of non-participants (s == 0, with
// covariates only).  Under the nested design the cohort is a single sample of
// trial-eligible people; under the non-nested design the two groups come from
// separate sampling mechanisms.
struct StudyDataset {
  Eigen::ArrayXi s;    // participation indicator, 0 or 1
  Eigen::ArrayXi arm;  // index into treatment_labels; -1 when s == 0
  Eigen::ArrayXd y;    // observed outcome; NaN when s == 0
  Eigen::MatrixXd x;   // covariates, one row per unit

  std::vector<std::string> covariate_names;   // size x.cols()
  std::vector<std::string> treatment_labels;  // distinct arms
  DesignKind design_kind = DesignKind::nested;
  OutcomeKind outcome_kind = OutcomeKind::continuous;

  Eigen::Index n() const { return s.size(); }
  Eigen::Index n_trial() const { return (s == 1).count(); }
  Eigen::Index n_target() const { return (s == 0).count(); }

  // Index lookups; -1 when the name is not present.
  int covariate_index(const std::string& name) const;
  int arm_code(const std::string& label) const;

  // Structural checks: indicator coding, presence patterns of arm/outcome,
  // finite covariates, nonempty groups, every arm represented.
  void validate() const;
};

}  // namespace transport
