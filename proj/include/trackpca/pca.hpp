#pragma once

// Standardization, principal component fitting, projection and loading reports.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trackpca/errors.hpp"
#include "trackpca/ingest.hpp"
#include "trackpca/matrix.hpp"
#include "trackpca/symmetric_eigen.hpp"

namespace trackpca {

struct StandardizationParams {
    std::vector<std::string> stat_names;
    std::vector<double> means;
    std::vector<double> std_devs;  // sample (n - 1) convention, all > 0

    friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

struct PcaModel {
    StandardizationParams standardization;
    std::vector<std::vector<double>> loadings;  // k unit vectors of length p
    std::vector<double> component_variances;    // k, non-increasing
    double total_variance = 0.0;
    std::size_t n_samples = 0;
    /// Every eigenvalue of the sample covariance (length p), for scree output.
    std::vector<double> spectrum;

    std::size_t k() const noexcept { return loadings.size(); }
    std::size_t p() const noexcept { return standardization.stat_names.size(); }

    friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

struct ScoreSet {
    std::vector<std::string> entity_ids;
    std::vector<std::string> entity_names;
    std::vector<double> minutes;
    Matrix scores;  // entities x components

    std::size_t size() const noexcept { return entity_ids.size(); }

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < entity_ids.size(); ++i)
            if (entity_ids[i] == id) return i;
        throw LookupError("unknown entity '" + id + "'");
    }
};

enum class ConstantColumns { reject, remove };

struct Standardized {
    StandardizationParams params;
    Matrix values;
    std::vector<std::string> removed_columns;
};

/// Centers each column and scales it to unit sample variance. Constant columns
/// are either rejected or dropped and reported in `removed_columns`.
inline Standardized standardize(const StatTable& table, ConstantColumns constant = ConstantColumns::reject) {
    const std::size_t n = table.values.rows();
    const std::size_t p = table.values.cols();
    if (n < 2) throw InsufficientDataError("standardize needs at least 2 rows, got " + std::to_string(n));
    if (table.stat_names.size() != p) throw SchemaError("stat_names length does not match table width");

    Standardized out;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += table.values(i, j);
            scale = std::max(scale, std::abs(table.values(i, j)));
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = table.values(i, j) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 1e-13 * scale)) {
            if (constant == ConstantColumns::reject)
                throw ZeroVarianceError("column '" + table.stat_names[j] + "' has zero variance");
            out.removed_columns.push_back(table.stat_names[j]);
            continue;
        }
        kept.push_back(j);
        out.params.stat_names.push_back(table.stat_names[j]);
        out.params.means.push_back(mean);
        out.params.std_devs.push_back(sd);
    }
    if (kept.empty()) throw ZeroVarianceError("every column has zero variance");

    out.values = Matrix(n, kept.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < kept.size(); ++c)
            out.values(i, c) = (table.values(i, kept[c]) - out.params.means[c]) / out.params.std_devs[c];
    return out;
}

enum class PcaSolver {
    eigen,      ///< Jacobi eigendecomposition of the covariance matrix
    deflation,  ///< successive variance maximization on the deflated data matrix
};

namespace detail {

/// Flips `w` so that its largest-magnitude coefficient is positive. Magnitudes
/// within a relative 1e-10 of the maximum count as tied; the first one wins.
inline void orient(std::vector<double>& w) {
    double max_abs = 0.0;
    for (double x : w) max_abs = std::max(max_abs, std::abs(x));
    for (double x : w) {
        if (std::abs(x) >= max_abs * (1.0 - 1e-10)) {
            if (x < 0)
                for (double& y : w) y = -y;
            return;
        }
    }
}

inline void normalize(std::vector<double>& w) {
    const double nrm = norm(w);
    for (double& x : w) x /= nrm;
}

/// Removes the components of `w` along the (orthonormal) `basis` vectors.
inline void project_out(std::vector<double>& w, const std::vector<std::vector<double>>& basis) {
    for (const auto& b : basis) {
        const double c = dot(w, b);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= c * b[j];
    }
}

/// Unit vector orthogonal to `basis`, built from the standard basis vector
/// with the largest residual. Used once the deflated matrix has no variance left.
inline std::vector<double> complement_vector(std::size_t p, const std::vector<std::vector<double>>& basis) {
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> e(p, 0.0);
        e[j] = 1.0;
        project_out(e, basis);
        project_out(e, basis);
        const double nrm = norm(e);
        if (nrm > best_norm + 1e-12) {
            best_norm = nrm;
            best = std::move(e);
        }
    }
    normalize(best);
    return best;
}

inline double trace(const Matrix& m) {
    double t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

inline constexpr int kPowerIterationBudget = 10000;
inline constexpr double kPowerIterationTolerance = 1e-12;

/// Unit vector maximizing the Rayleigh quotient of the PSD matrix `c`.
///
/// The power method is run on successive squares c^(2^s) until the normalized
/// power is numerically rank one, then continued on `c` itself until two
/// successive iterates differ by less than 1e-12. Squaring keeps the iteration
/// count logarithmic in the eigenvalue gap; both stages share the budget.
inline std::vector<double> dominant_direction(const Matrix& c, std::size_t component) {
    const std::size_t p = c.rows();
    int iterations = 0;

    const double tr = trace(c);
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) = c(i, j) / tr;

    int extra_squarings = -1;
    while (iterations < kPowerIterationBudget && extra_squarings != 0) {
        Matrix sq = multiply(m, m);
        const double t = trace(sq);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j) m(i, j) = 0.5 * (sq(i, j) + sq(j, i)) / t;
        ++iterations;
        if (extra_squarings > 0) {
            --extra_squarings;
            continue;
        }
        // For a trace-one PSD matrix, 1 - ||m||_F^2 vanishes exactly when it has rank one.
        double fro = 0.0;
        for (double x : m.data()) fro += x * x;
        if (1.0 - fro < 1e-14) extra_squarings = 2;
        if (iterations >= 64 && extra_squarings < 0) break;  // tied leading eigenvalues
    }

    std::size_t pivot = 0;
    for (std::size_t j = 1; j < p; ++j)
        if (m(j, j) > m(pivot, pivot)) pivot = j;
    std::vector<double> w = m.column(pivot);
    normalize(w);

    double residual = std::numeric_limits<double>::infinity();
    while (iterations < kPowerIterationBudget) {
        std::vector<double> next = multiply(c, w);
        normalize(next);
        double diff = 0.0;
        for (std::size_t j = 0; j < p; ++j) diff += (next[j] - w[j]) * (next[j] - w[j]);
        residual = std::sqrt(diff);
        w = std::move(next);
        ++iterations;
        if (residual < kPowerIterationTolerance) return w;
    }
    throw ConvergenceError("power iteration for component " + std::to_string(component + 1) +
                           " did not converge within " + std::to_string(kPowerIterationBudget) +
                           " iterations, residual " + std::to_string(residual));
}

inline double score_variance(const Matrix& x, const std::vector<double>& w) {
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double t = dot(x.row(i), w);
        ss += t * t;
    }
    return ss / static_cast<double>(x.rows() - 1);
}

inline PcaModel fit_by_deflation(const Matrix& x, std::size_t k, const Matrix& covariance) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    PcaModel model;
    model.total_variance = trace(covariance);

    for (std::size_t comp = 0; comp < k; ++comp) {
        // Deflated data: X - sum_s (X w_s) w_s^T over the components found so far.
        Matrix deflated = x;
        for (const auto& w : model.loadings)
            for (std::size_t i = 0; i < n; ++i) {
                const double t = dot(x.row(i), w);
                auto row = deflated.row(i);
                for (std::size_t j = 0; j < p; ++j) row[j] -= t * w[j];
            }
        const Matrix c = gram(deflated, static_cast<double>(n - 1));

        std::vector<double> w;
        if (trace(c) <= 1e-13 * model.total_variance) {
            w = complement_vector(p, model.loadings);
        } else {
            w = dominant_direction(c, comp);
            project_out(w, model.loadings);
            normalize(w);
        }
        orient(w);
        model.component_variances.push_back(score_variance(deflated, w));
        model.loadings.push_back(std::move(w));
    }
    return model;
}

}  // namespace detail

/// Fits the top `k` principal components of a column-centered matrix, using the
/// sample (n - 1) covariance. Loadings are sign-oriented so that the
/// largest-magnitude coefficient is positive. The returned model carries no
/// standardization parameters; `fit` below fills them in.
inline PcaModel fit_pca(const Matrix& standardized, std::size_t k, PcaSolver solver = PcaSolver::eigen) {
    const std::size_t n = standardized.rows();
    const std::size_t p = standardized.cols();
    if (n < 2 || p < 1) throw InsufficientDataError("fit_pca needs at least 2 rows and 1 column");
    const std::size_t k_max = std::min(n - 1, p);
    if (k < 1 || k > k_max)
        throw ParameterError("k = " + std::to_string(k) + " outside [1, " + std::to_string(k_max) + "]");

    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += standardized(i, j);
            scale = std::max(scale, std::abs(standardized(i, j)));
        }
        mean /= static_cast<double>(n);
        if (std::abs(mean) > 1e-8 * std::max(scale, 1e-300))
            throw ParameterError("column " + std::to_string(j) + " is not centered (mean " + std::to_string(mean) + ")");
    }

    const Matrix covariance = gram(standardized, static_cast<double>(n - 1));
    const SymmetricEigen eig = symmetric_eigen(covariance);

    PcaModel model;
    if (solver == PcaSolver::deflation) {
        model = detail::fit_by_deflation(standardized, k, covariance);
    } else {
        model.total_variance = detail::trace(covariance);
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<double> w = eig.vectors.column(c);
            detail::orient(w);
            model.loadings.push_back(std::move(w));
            model.component_variances.push_back(std::max(eig.values[c], 0.0));
        }
    }
    if (!(model.total_variance > 0)) throw ZeroVarianceError("input has zero total variance");
    model.spectrum.reserve(p);
    for (double v : eig.values) model.spectrum.push_back(std::max(v, 0.0));
    model.n_samples = n;
    return model;
}

struct PcaOptions {
    std::size_t k = 4;
    PcaSolver solver = PcaSolver::eigen;
    ConstantColumns constant_columns = ConstantColumns::reject;
};

struct PcaFit {
    PcaModel model;
    std::vector<std::string> removed_columns;
};

/// Standardizes `table` and fits a model that can score raw tables directly.
inline PcaFit fit(const StatTable& table, const PcaOptions& options = {}) {
    Standardized s = standardize(table, options.constant_columns);
    PcaFit out;
    out.model = fit_pca(s.values, options.k, options.solver);
    out.model.standardization = std::move(s.params);
    out.removed_columns = std::move(s.removed_columns);
    return out;
}

inline std::vector<double> explained_variance_ratio(const PcaModel& model) {
    std::vector<double> out;
    out.reserve(model.component_variances.size());
    for (double v : model.component_variances) out.push_back(v / model.total_variance);
    return out;
}

struct ScreeRow {
    std::size_t component = 0;  // 1-based
    double variance = 0.0;
    double ratio = 0.0;
    double cumulative_ratio = 0.0;
};

/// Variance profile of the leading min(count, p) components.
inline std::vector<ScreeRow> scree(const PcaModel& model, std::size_t count = 10) {
    std::vector<ScreeRow> rows;
    double cumulative = 0.0;
    const std::size_t m = std::min(count, model.spectrum.size());
    for (std::size_t c = 0; c < m; ++c) {
        const double ratio = model.spectrum[c] / model.total_variance;
        cumulative += ratio;
        rows.push_back({c + 1, model.spectrum[c], ratio, cumulative});
    }
    return rows;
}

inline void check_columns(const PcaModel& model, const std::vector<std::string>& names) {
    const auto& expected = model.standardization.stat_names;
    if (names == expected) return;
    const std::set<std::string> a(expected.begin(), expected.end());
    const std::set<std::string> b(names.begin(), names.end());
    std::string msg;
    for (const auto& s : a)
        if (!b.contains(s)) msg += " -'" + s + "'";
    for (const auto& s : b)
        if (!a.contains(s)) msg += " +'" + s + "'";
    if (msg.empty()) msg = " same statistics in a different order";
    throw SchemaError("table columns do not match the model:" + msg);
}

/// Standardized copy of a row-major data block using the model's parameters.
inline Matrix standardize_with(const PcaModel& model, const Matrix& values) {
    const auto& sp = model.standardization;
    Matrix z(values.rows(), values.cols());
    for (std::size_t i = 0; i < values.rows(); ++i)
        for (std::size_t j = 0; j < values.cols(); ++j) z(i, j) = (values(i, j) - sp.means[j]) / sp.std_devs[j];
    return z;
}

/// Scores every entity of `table`: standardized row dotted with each loading.
inline ScoreSet transform(const PcaModel& model, const StatTable& table) {
    check_columns(model, table.stat_names);
    const Matrix z = standardize_with(model, table.values);
    ScoreSet out;
    out.entity_ids = table.entity_ids;
    out.entity_names = table.entity_names;
    out.minutes = table.minutes;
    out.scores = Matrix(z.rows(), model.k());
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t c = 0; c < model.k(); ++c) out.scores(i, c) = dot(z.row(i), model.loadings[c]);
    return out;
}

/// Maps scores back to standardized statistic space through the model loadings.
inline Matrix reconstruct_standardized(const PcaModel& model, const Matrix& scores) {
    Matrix out(scores.rows(), model.p());
    for (std::size_t i = 0; i < scores.rows(); ++i)
        for (std::size_t c = 0; c < model.k(); ++c) {
            const double t = scores(i, c);
            for (std::size_t j = 0; j < model.p(); ++j) out(i, j) += t * model.loadings[c][j];
        }
    return out;
}

struct LoadingEntry {
    std::string stat_name;
    double coefficient = 0.0;

    friend bool operator==(const LoadingEntry&, const LoadingEntry&) = default;
};

struct LoadingReport {
    std::vector<LoadingEntry> positives;  // descending
    std::vector<LoadingEntry> negatives;  // most negative first
};

/// The `count` largest positive and most negative coefficients of one
/// component with |coefficient| >= threshold. Zero counts as positive; equal
/// coefficients keep column order.
inline LoadingReport top_loadings(const PcaModel& model, std::size_t component, std::size_t count, double threshold) {
    if (component >= model.k())
        throw ParameterError("component " + std::to_string(component) + " out of range (k = " +
                             std::to_string(model.k()) + ")");
    const auto& w = model.loadings[component];
    const auto& names = model.standardization.stat_names;

    std::vector<std::size_t> pos, neg;
    for (std::size_t j = 0; j < w.size(); ++j) {
        if (std::abs(w[j]) < threshold) continue;
        (w[j] >= 0 ? pos : neg).push_back(j);
    }
    std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    std::stable_sort(neg.begin(), neg.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });

    LoadingReport report;
    for (std::size_t i = 0; i < std::min(count, pos.size()); ++i)
        report.positives.push_back({names.empty() ? std::to_string(pos[i]) : names[pos[i]], w[pos[i]]});
    for (std::size_t i = 0; i < std::min(count, neg.size()); ++i)
        report.negatives.push_back({names.empty() ? std::to_string(neg[i]) : names[neg[i]], w[neg[i]]});
    return report;
}

}  // namespace trackpca
