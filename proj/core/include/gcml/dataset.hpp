#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gcml {

enum class ColumnKind { continuous, binary };

/// One randomized-trial dataset: binary outcome y, binary arm a, covariates x.
/// Binary covariates are stored as 0/1 doubles alongside the continuous ones;
/// column_kinds records which is which so the design step can decide what to
/// spline-expand.
struct TrialDataset {
    Eigen::VectorXd y;
    Eigen::VectorXd a;
    Eigen::MatrixXd x;
    std::vector<ColumnKind> column_kinds;
    std::vector<std::string> column_names;

    Eigen::Index n() const { return y.size(); }
    Eigen::Index p() const { return x.cols(); }

    /// Throws DataError on shape mismatch, non-binary y/a, or a column tagged
    /// binary that holds values outside {0,1}.
    void validate() const;
};

/// Reads a dataset from CSV. The header must contain `y` and `a`; every other
/// column is a covariate. Column kinds are inferred from the observed values
/// (only {0,1} -> binary) unless the optional sidecar schema overrides them.
/// The schema is a JSON object mapping column name to "binary"/"continuous".
TrialDataset load_dataset(const std::filesystem::path& csv_path,
                          const std::optional<std::filesystem::path>& schema_path = std::nullopt);

void save_dataset(const TrialDataset& data, const std::filesystem::path& csv_path);

} // namespace gcml
