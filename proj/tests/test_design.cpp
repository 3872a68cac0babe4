#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gcml/design.hpp"
#include "gcml/rng.hpp"

using gcml::DesignConfig;
using gcml::SplineRecord;
using gcml::TrialDataset;

namespace {

// Reference Cox-de Boor recursion over an explicit clamped knot vector,
// written from the textbook definition so the production evaluator has an
// independent check.
std::vector<double> full_knots(const SplineRecord& r) {
    std::vector<double> t;
    for (int i = 0; i <= r.degree; ++i) t.push_back(r.lo);
    for (double k : r.interior) t.push_back(k);
    for (int i = 0; i <= r.degree; ++i) t.push_back(r.hi);
    return t;
}

double ref_bspline(const std::vector<double>& t, int i, int d, double u) {
    if (d == 0) {
        bool last_span = t[static_cast<std::size_t>(i) + 1] == t.back() &&
                         t[static_cast<std::size_t>(i)] < t[static_cast<std::size_t>(i) + 1];
        if (last_span) return u >= t[static_cast<std::size_t>(i)] && u <= t[static_cast<std::size_t>(i) + 1] ? 1.0 : 0.0;
        return u >= t[static_cast<std::size_t>(i)] && u < t[static_cast<std::size_t>(i) + 1] ? 1.0 : 0.0;
    }
    double left = 0.0, right = 0.0;
    double den1 = t[static_cast<std::size_t>(i + d)] - t[static_cast<std::size_t>(i)];
    if (den1 > 0.0) left = (u - t[static_cast<std::size_t>(i)]) / den1 * ref_bspline(t, i, d - 1, u);
    double den2 = t[static_cast<std::size_t>(i + d + 1)] - t[static_cast<std::size_t>(i) + 1];
    if (den2 > 0.0)
        right = (t[static_cast<std::size_t>(i + d + 1)] - u) / den2 * ref_bspline(t, i + 1, d - 1, u);
    return left + right;
}

// Type-7 quantile written independently: linear interpolation of order
// statistics at h = (n-1)p.
double ref_quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double h = (static_cast<double>(v.size()) - 1.0) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - std::floor(h)) * (v[lo + 1] - v[lo]);
}

TrialDataset make_data(Eigen::Index n, std::uint64_t seed) {
    gcml::RngStream rng(seed);
    TrialDataset data;
    data.y.resize(n);
    data.a.resize(n);
    data.x.resize(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        data.x(i, 0) = rng.normal();
        data.x(i, 1) = 2.0 + 0.5 * rng.normal();
        data.x(i, 2) = rng.bernoulli(0.4) ? 1.0 : 0.0;
        data.a[i] = i % 2 == 0 ? 1.0 : 0.0;
        data.y[i] = rng.bernoulli(0.3 + 0.2 * data.a[i]) ? 1.0 : 0.0;
    }
    data.column_kinds = {gcml::ColumnKind::continuous, gcml::ColumnKind::continuous,
                         gcml::ColumnKind::binary};
    data.column_names = {"x1", "x2", "x3"};
    return data;
}

} // namespace

TEST_CASE("bspline basis matches the textbook recursion") {
    SplineRecord rec;
    rec.lo = 0.0;
    rec.hi = 1.0;
    rec.interior = {0.3, 0.5, 0.7};
    rec.degree = 3;
    auto t = full_knots(rec);

    Eigen::VectorXd v(9);
    v << 0.0, 0.05, 0.21, 0.3, 0.44, 0.5, 0.83, 0.99, 1.0;
    Eigen::MatrixXd basis = gcml::bspline_basis(v, rec);
    REQUIRE(basis.cols() == rec.n_basis());
    for (Eigen::Index i = 0; i < v.size(); ++i)
        for (int j = 0; j < rec.n_basis(); ++j)
            CHECK(basis(i, j) == doctest::Approx(ref_bspline(t, j, rec.degree, v[i])).epsilon(1e-13));
}

TEST_CASE("bspline rows sum to one, including clamped points") {
    SplineRecord rec;
    rec.lo = -1.0;
    rec.hi = 2.0;
    rec.interior = {-0.2, 0.4, 1.1};
    rec.degree = 3;
    Eigen::VectorXd v(7);
    v << -5.0, -1.0, -0.9999, 0.0, 1.999, 2.0, 8.5;
    Eigen::MatrixXd basis = gcml::bspline_basis(v, rec);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        CHECK(basis.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j < rec.n_basis(); ++j) CHECK(basis(i, j) >= 0.0);
    }
    // Out-of-range points evaluate exactly at the clamped boundary.
    CHECK((basis.row(0) - basis.row(1)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((basis.row(6) - basis.row(5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quantile is type 7") {
    Eigen::VectorXd v(5);
    v << 5.0, 1.0, 4.0, 2.0, 3.0;
    CHECK(gcml::quantile(v, 0.25) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(gcml::quantile(v, 0.5) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(gcml::quantile(v, 0.75) == doctest::Approx(4.0).epsilon(1e-14));

    Eigen::VectorXd w(4);
    w << 1.0, 2.0, 3.0, 10.0;
    std::vector<double> wv(w.data(), w.data() + w.size());
    for (double p : {0.0, 0.1, 0.25, 0.4, 0.5, 0.75, 0.9, 1.0})
        CHECK(gcml::quantile(w, p) == doctest::Approx(ref_quantile(wv, p)).epsilon(1e-13));
}

TEST_CASE("penalized design reproduces an independently assembled expansion") {
    TrialDataset data = make_data(80, 11);
    DesignConfig config; // splines + interactions + standardize
    gcml::DesignMatrix design = gcml::build_design(data, config);
    const Eigen::Index n = data.n();

    // Expected layout: 7 basis columns for each continuous covariate, the
    // binary covariate raw, then A, then A times every main column.
    REQUIRE(design.transform.q_main == 15);
    REQUIRE(design.z.cols() == 31);
    REQUIRE(design.transform.arm_column == 15);

    // Rebuild the raw expansion from scratch.
    Eigen::MatrixXd raw(n, 31);
    Eigen::Index col = 0;
    for (int j = 0; j < 2; ++j) {
        Eigen::VectorXd xj = data.x.col(j);
        SplineRecord rec;
        rec.lo = xj.minCoeff();
        rec.hi = xj.maxCoeff();
        rec.degree = 3;
        std::vector<double> xv(xj.data(), xj.data() + n);
        for (double p : {0.25, 0.5, 0.75}) rec.interior.push_back(ref_quantile(xv, p));
        auto t = full_knots(rec);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int b = 0; b < rec.n_basis(); ++b)
                raw(i, col + b) = ref_bspline(t, b, 3, std::clamp(xj[i], rec.lo, rec.hi));
        col += rec.n_basis();
    }
    raw.col(col++) = data.x.col(2);
    raw.col(col++) = data.a;
    for (Eigen::Index m = 0; m < 15; ++m) raw.col(col + m) = raw.col(m).cwiseProduct(data.a);

    // Standardize with the population sd.
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        double mean = raw.col(j).mean();
        double sd = std::sqrt((raw.col(j).array() - mean).square().sum() / static_cast<double>(n));
        raw.col(j) = (raw.col(j).array() - mean) / (sd > 0.0 ? sd : 1.0);
    }
    CHECK((design.z - raw).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("apply_transform reproduces training rows and clamps new points") {
    TrialDataset data = make_data(60, 12);
    gcml::DesignMatrix design = gcml::build_design(data, DesignConfig{});
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        Eigen::VectorXd row = gcml::apply_transform(design.transform, data.a[i], data.x.row(i));
        CHECK((row.transpose() - design.z.row(i)).cwiseAbs().maxCoeff() < 1e-12);
    }

    // A far out-of-range covariate maps like the boundary value.
    Eigen::VectorXd extreme = data.x.row(0);
    Eigen::VectorXd at_max = extreme;
    extreme[0] = 1e6;
    at_max[0] = data.x.col(0).maxCoeff();
    Eigen::VectorXd z_ext = gcml::apply_transform(design.transform, 1.0, extreme);
    Eigen::VectorXd z_max = gcml::apply_transform(design.transform, 1.0, at_max);
    CHECK((z_ext - z_max).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("smooth and arm-only configurations") {
    TrialDataset data = make_data(50, 13);

    DesignConfig smooth;
    smooth.use_splines = false;
    smooth.use_treatment_interactions = false;
    gcml::DesignMatrix plain = gcml::build_design(data, smooth);
    REQUIRE(plain.z.cols() == 4); // three covariates plus A
    for (Eigen::Index j = 0; j < 3; ++j) {
        double mean = plain.z.col(j).mean();
        CHECK(std::abs(mean) < 1e-10);
    }

    DesignConfig arm;
    arm.arm_only = true;
    arm.standardize = false;
    gcml::DesignMatrix unadj = gcml::build_design(data, arm);
    REQUIRE(unadj.z.cols() == 1);
    CHECK((unadj.z.col(0) - data.a).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tied covariates drop duplicate knots and constant columns are flagged") {
    gcml::RngStream rng(5);
    TrialDataset data;
    const Eigen::Index n = 40;
    data.y.resize(n);
    data.a.resize(n);
    data.x.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        // First covariate is mostly one value, so the quantile knots collide.
        data.x(i, 0) = i < 30 ? 1.0 : static_cast<double>(i - 29);
        data.x(i, 1) = 2.5; // constant
        data.a[i] = i % 2 == 0 ? 1.0 : 0.0;
        data.y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    data.column_kinds = {gcml::ColumnKind::continuous, gcml::ColumnKind::continuous};
    data.column_names = {"ties", "flat"};

    gcml::DesignMatrix design = gcml::build_design(data, DesignConfig{});
    const auto& rec = design.transform.splines[0];
    REQUIRE(rec.has_value());
    CHECK(rec->interior.size() < 3);
    for (std::size_t k = 0; k < rec->interior.size(); ++k) {
        CHECK(rec->interior[k] > rec->lo);
        CHECK(rec->interior[k] < rec->hi);
        if (k > 0) CHECK(rec->interior[k] > rec->interior[k - 1]);
    }
    CHECK(design.transform.has_warnings());
    // Constant columns keep scale 1 instead of dividing by zero.
    for (Eigen::Index idx : design.transform.constant_columns)
        CHECK(design.transform.scale[idx] == 1.0);
}
