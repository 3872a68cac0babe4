#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gcml/dataset.hpp"

namespace gcml {

/// Controls how a TrialDataset is expanded into a numeric design matrix.
/// arm_only drops every covariate and keeps just the arm indicator, which is
/// what the unadjusted estimator fits on.
struct DesignConfig {
    bool use_splines = true;
    int spline_degree = 3;
    int n_interior_knots = 3;
    bool use_treatment_interactions = true;
    bool standardize = true;
    bool arm_only = false;
};

/// Frozen B-spline basis for one covariate: clamped knot vector over the
/// observed [lo, hi] range with the interior knots that survived filtering.
struct SplineRecord {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> interior;
    int degree = 3;

    int n_basis() const { return degree + 1 + static_cast<int>(interior.size()); }
};

/// Everything needed to map a new (a, x) row into the same feature space the
/// model was trained on: expansion recipe plus the frozen centers/scales.
struct DesignTransform {
    DesignConfig config;
    std::vector<ColumnKind> kinds;
    std::vector<std::optional<SplineRecord>> splines; // per source covariate
    Eigen::Index q_main = 0;                          // expanded main-effect columns
    Eigen::Index q = 0;                               // total columns
    Eigen::Index arm_column = 0;                      // position of A in the raw layout
    Eigen::VectorXd center;
    Eigen::VectorXd scale;
    std::vector<Eigen::Index> constant_columns; // standardized with scale 1

    bool has_warnings() const { return !constant_columns.empty(); }
};

struct DesignMatrix {
    Eigen::MatrixXd z;
    DesignTransform transform;
};

/// Cox-de Boor basis over a clamped knot vector. Out-of-range points are
/// clamped to the boundary knots, so rows always sum to 1.
Eigen::MatrixXd bspline_basis(const Eigen::VectorXd& v, const SplineRecord& record);

/// Convenience that derives the record from v (boundaries at min/max) and the
/// given interior knots, then evaluates the basis.
std::pair<Eigen::MatrixXd, SplineRecord> bspline_basis(const Eigen::VectorXd& v, int degree,
                                                       const std::vector<double>& interior_knots);

/// Type-7 empirical quantile of the values in v (linear interpolation).
double quantile(const Eigen::VectorXd& v, double p);

/// Expands the dataset per config. Column order: expanded main effects in
/// dataset column order, then A, then A x (each expanded main column) when
/// interactions are on. Standardization uses mean and population sd frozen
/// into the transform; constant columns keep scale 1 and are flagged.
DesignMatrix build_design(const TrialDataset& data, const DesignConfig& config);

/// Maps one row through the frozen transform with the arm forced to a_forced.
Eigen::VectorXd apply_transform(const DesignTransform& transform, double a_forced,
                                const Eigen::VectorXd& x_row);

} // namespace gcml
