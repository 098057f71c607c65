#include "transport/dataset.hpp"

#include <cmath>
#include <set>

#include "transport/errors.hpp"

namespace transport {

int StudyDataset::covariate_index(const std::string& name) const {
  for (std::size_t j = 0; j < covariate_names.size(); ++j)
    if (covariate_names[j] == name) return static_cast<int>(j);
  return -1;
}

int StudyDataset::arm_code(const std::string& label) const {
  for (std::size_t k = 0; k < treatment_labels.size(); ++k)
    if (treatment_labels[k] == label) return static_cast<int>(k);
  return -1;
}

void StudyDataset::validate() const {
  const Eigen::Index rows = s.size();
  if (rows == 0) throw InvalidDataset("dataset is empty");
  if (arm.size() != rows || y.size() != rows || x.rows() != rows)
    throw DimensionMismatch("s, arm, y and x must have one entry per unit");
  if (static_cast<Eigen::Index>(covariate_names.size()) != x.cols())
    throw DimensionMismatch("covariate_names must match the columns of x");
  if (treatment_labels.empty())
    throw InvalidDataset("no treatment labels");
  {
    std::set<std::string> seen(treatment_labels.begin(), treatment_labels.end());
    if (seen.size() != treatment_labels.size())
      throw InvalidDataset("duplicate treatment labels");
  }

  const int n_arms = static_cast<int>(treatment_labels.size());
  std::vector<Eigen::Index> arm_counts(treatment_labels.size(), 0);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (s[i] != 0 && s[i] != 1)
      throw InvalidDataset("participation indicator must be 0 or 1");
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (!std::isfinite(x(i, j)))
        throw InvalidDataset("covariates must be finite");
    if (s[i] == 1) {
      if (arm[i] < 0 || arm[i] >= n_arms)
        throw InvalidDataset("participant with unknown arm code");
      ++arm_counts[static_cast<std::size_t>(arm[i])];
      if (!std::isfinite(y[i]))
        throw InvalidDataset("participant with missing outcome");
      if (outcome_kind == OutcomeKind::binary && y[i] != 0.0 && y[i] != 1.0)
        throw InvalidDataset("binary outcome must be 0 or 1");
    } else {
      if (arm[i] != -1)
        throw InvalidDataset("non-participant with an assigned arm");
      if (!std::isnan(y[i]))
        throw InvalidDataset("non-participant with an observed outcome");
    }
  }

  if (n_trial() == 0) throw InvalidDataset("no trial participants");
  if (n_target() == 0) throw NoTargetUnits("no non-participants to transport to");
  for (std::size_t k = 0; k < arm_counts.size(); ++k)
    if (arm_counts[k] == 0)
      throw OneClassOnly("arm '" + treatment_labels[k] + "' has no participants");
}

}  // namespace transport
