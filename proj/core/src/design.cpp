#include "gcml/design.hpp"

#include <algorithm>
#include <cmath>

#include "gcml/errors.hpp"

namespace gcml {

namespace {

// Full clamped knot vector: boundary knots repeated degree+1 times.
std::vector<double> knot_vector(const SplineRecord& r) {
    std::vector<double> t;
    t.reserve(2 * static_cast<std::size_t>(r.degree + 1) + r.interior.size());
    for (int i = 0; i <= r.degree; ++i) t.push_back(r.lo);
    for (double k : r.interior) t.push_back(k);
    for (int i = 0; i <= r.degree; ++i) t.push_back(r.hi);
    return t;
}

// Index mu with t[mu] <= u < t[mu+1]; u at the right boundary falls in the
// last non-empty span so the basis still sums to 1 there.
int find_span(const std::vector<double>& t, int degree, int n_basis, double u) {
    int last = n_basis - 1;
    if (u >= t[static_cast<std::size_t>(n_basis)]) return last;
    if (u <= t[static_cast<std::size_t>(degree)]) return degree;
    int lo = degree, hi = n_basis;
    int mid = (lo + hi) / 2;
    while (u < t[static_cast<std::size_t>(mid)] || u >= t[static_cast<std::size_t>(mid + 1)]) {
        if (u < t[static_cast<std::size_t>(mid)])
            hi = mid;
        else
            lo = mid;
        mid = (lo + hi) / 2;
    }
    return mid;
}

// Nonzero basis values N_{span-degree..span} at u (the triangular scheme).
void basis_funs(const std::vector<double>& t, int degree, int span, double u, double* out) {
    std::vector<double> left(static_cast<std::size_t>(degree + 1));
    std::vector<double> right(static_cast<std::size_t>(degree + 1));
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[static_cast<std::size_t>(j)] = u - t[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(span + j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            double temp = out[r] / denom;
            out[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        out[j] = saved;
    }
}

void spline_row(const SplineRecord& record, const std::vector<double>& t, double v, double* out) {
    int nb = record.n_basis();
    double u = std::clamp(v, record.lo, record.hi);
    std::fill(out, out + nb, 0.0);
    int span = find_span(t, record.degree, nb, u);
    std::vector<double> vals(static_cast<std::size_t>(record.degree + 1));
    basis_funs(t, record.degree, span, u, vals.data());
    for (int k = 0; k <= record.degree; ++k) out[span - record.degree + k] = vals[static_cast<std::size_t>(k)];
}

// Raw (pre-standardization) design row for one observation.
void raw_row(const DesignTransform& tf, double a, const Eigen::VectorXd& x_row, double* out) {
    Eigen::Index col = 0;
    if (!tf.config.arm_only) {
        for (std::size_t j = 0; j < tf.kinds.size(); ++j) {
            if (tf.splines[j]) {
                const SplineRecord& rec = *tf.splines[j];
                auto t = knot_vector(rec);
                spline_row(rec, t, x_row[static_cast<Eigen::Index>(j)], out + col);
                col += rec.n_basis();
            } else {
                out[col++] = x_row[static_cast<Eigen::Index>(j)];
            }
        }
    }
    out[col++] = a;
    if (tf.config.use_treatment_interactions && !tf.config.arm_only)
        for (Eigen::Index m = 0; m < tf.q_main; ++m) out[col++] = a * out[m];
}

} // namespace

Eigen::MatrixXd bspline_basis(const Eigen::VectorXd& v, const SplineRecord& record) {
    if (record.degree < 1) throw NumericError("spline degree must be >= 1");
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i])) throw NumericError("non-finite value in spline input");
    for (std::size_t k = 0; k < record.interior.size(); ++k) {
        double prev = k == 0 ? record.lo : record.interior[k - 1];
        if (record.interior[k] <= prev || record.interior[k] >= record.hi)
            throw NumericError("interior knots must be strictly increasing inside the range");
    }

    auto t = knot_vector(record);
    int nb = record.n_basis();
    Eigen::MatrixXd basis(v.size(), nb);
    std::vector<double> row(static_cast<std::size_t>(nb));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        spline_row(record, t, v[i], row.data());
        for (int c = 0; c < nb; ++c) basis(i, c) = row[static_cast<std::size_t>(c)];
    }
    return basis;
}

std::pair<Eigen::MatrixXd, SplineRecord> bspline_basis(const Eigen::VectorXd& v, int degree,
                                                       const std::vector<double>& interior_knots) {
    if (v.size() == 0) throw NumericError("empty spline input");
    SplineRecord record;
    record.degree = degree;
    record.lo = v.minCoeff();
    record.hi = v.maxCoeff();
    record.interior = interior_knots;
    return {bspline_basis(v, record), record};
}

double quantile(const Eigen::VectorXd& v, double p) {
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() == 1) return sorted[0];
    double h = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

DesignMatrix build_design(const TrialDataset& data, const DesignConfig& config) {
    if (config.spline_degree < 1) throw NumericError("spline degree must be >= 1");
    if (config.n_interior_knots < 0) throw NumericError("n_interior_knots must be >= 0");

    DesignTransform tf;
    tf.config = config;
    tf.kinds = data.column_kinds;
    tf.splines.assign(tf.kinds.size(), std::nullopt);

    tf.q_main = 0;
    if (!config.arm_only) {
        for (std::size_t j = 0; j < tf.kinds.size(); ++j) {
            Eigen::VectorXd col = data.x.col(static_cast<Eigen::Index>(j));
            double lo = col.minCoeff();
            double hi = col.maxCoeff();
            bool expand = config.use_splines && tf.kinds[j] == ColumnKind::continuous && hi > lo;
            if (expand) {
                SplineRecord rec;
                rec.degree = config.spline_degree;
                rec.lo = lo;
                rec.hi = hi;
                for (int k = 1; k <= config.n_interior_knots; ++k) {
                    double knot = quantile(col, static_cast<double>(k) /
                                                    static_cast<double>(config.n_interior_knots + 1));
                    double prev = rec.interior.empty() ? lo : rec.interior.back();
                    if (knot > prev && knot < hi) rec.interior.push_back(knot);
                }
                tf.splines[j] = rec;
                tf.q_main += rec.n_basis();
            } else {
                tf.q_main += 1;
            }
        }
    }
    tf.arm_column = tf.q_main;
    tf.q = tf.q_main + 1;
    if (config.use_treatment_interactions && !config.arm_only) tf.q += tf.q_main;

    const Eigen::Index n = data.n();
    Eigen::MatrixXd z(n, tf.q);
    std::vector<double> row(static_cast<std::size_t>(tf.q));
    for (Eigen::Index i = 0; i < n; ++i) {
        raw_row(tf, data.a[i], data.x.row(i).transpose(), row.data());
        for (Eigen::Index c = 0; c < tf.q; ++c) z(i, c) = row[static_cast<std::size_t>(c)];
    }

    tf.center = Eigen::VectorXd::Zero(tf.q);
    tf.scale = Eigen::VectorXd::Ones(tf.q);
    if (config.standardize) {
        for (Eigen::Index c = 0; c < tf.q; ++c) {
            double mean = z.col(c).mean();
            double var = (z.col(c).array() - mean).square().sum() / static_cast<double>(n);
            double sd = std::sqrt(var);
            tf.center[c] = mean;
            if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
                tf.scale[c] = 1.0;
                tf.constant_columns.push_back(c);
            } else {
                tf.scale[c] = sd;
            }
            z.col(c) = (z.col(c).array() - tf.center[c]) / tf.scale[c];
        }
    }

    return {std::move(z), std::move(tf)};
}

Eigen::VectorXd apply_transform(const DesignTransform& transform, double a_forced,
                                const Eigen::VectorXd& x_row) {
    if (!transform.config.arm_only &&
        x_row.size() != static_cast<Eigen::Index>(transform.kinds.size()))
        throw DataError("covariate row length does not match transform recipe");

    Eigen::VectorXd out(transform.q);
    std::vector<double> row(static_cast<std::size_t>(transform.q));
    raw_row(transform, a_forced, x_row, row.data());
    for (Eigen::Index c = 0; c < transform.q; ++c)
        out[c] = (row[static_cast<std::size_t>(c)] - transform.center[c]) / transform.scale[c];
    return out;
}

} // namespace gcml
