#pragma once

// Ordinary least squares with coefficient standard errors and t-test p-values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trackpca/errors.hpp"
#include "trackpca/matrix.hpp"
#include "trackpca/student_t.hpp"

namespace trackpca {

struct RegressionFit {
    std::vector<std::string> term_names;  // intercept first when present
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<double> p_values;
    double r_squared = 0.0;
    double residual_sum_squares = 0.0;
    std::size_t n_observations = 0;
    std::size_t df_residual = 0;
    bool has_intercept = true;
    std::vector<std::string> warnings;

    std::size_t predictor_count() const noexcept { return coefficients.size() - (has_intercept ? 1 : 0); }
};

/// Relative pivot size below which a design column counts as linearly dependent.
inline constexpr double kRankTolerance = 1e-10;

namespace detail {

/// Householder QR of `a` in place: R in the upper triangle, reflectors kept
/// separately. No pivoting, so a dependent column shows up at its own position.
struct HouseholderQr {
    Matrix r;
    std::vector<std::vector<double>> reflectors;

    explicit HouseholderQr(Matrix a) : r(std::move(a)) {
        const std::size_t n = r.rows();
        const std::size_t m = r.cols();
        for (std::size_t j = 0; j < m; ++j) {
            std::vector<double> v(n - j);
            for (std::size_t i = j; i < n; ++i) v[i - j] = r(i, j);
            const double alpha = norm(v);
            if (alpha == 0.0) {
                reflectors.emplace_back();
                continue;
            }
            v[0] += v[0] >= 0 ? alpha : -alpha;
            const double vnorm = norm(v);
            for (double& x : v) x /= vnorm;
            for (std::size_t c = j; c < m; ++c) {
                double s = 0.0;
                for (std::size_t i = j; i < n; ++i) s += v[i - j] * r(i, c);
                for (std::size_t i = j; i < n; ++i) r(i, c) -= 2.0 * s * v[i - j];
            }
            for (std::size_t i = j + 1; i < n; ++i) r(i, j) = 0.0;
            reflectors.push_back(std::move(v));
        }
    }

    /// Q^T y.
    std::vector<double> apply_transpose(std::vector<double> y) const {
        for (std::size_t j = 0; j < reflectors.size(); ++j) {
            const auto& v = reflectors[j];
            if (v.empty()) continue;
            double s = 0.0;
            for (std::size_t i = j; i < y.size(); ++i) s += v[i - j] * y[i];
            for (std::size_t i = j; i < y.size(); ++i) y[i] -= 2.0 * s * v[i - j];
        }
        return y;
    }
};

}  // namespace detail

/// Least-squares fit of `outcome` on the columns of `design`, solved through a
/// Householder QR factorization. Standard errors use the unbiased residual
/// variance RSS / (n - terms); p-values are two-sided Student t.
inline RegressionFit fit_ols(const Matrix& design, std::span<const double> outcome, bool include_intercept = true,
                             std::vector<std::string> predictor_names = {}) {
    const std::size_t n = design.rows();
    const std::size_t q = design.cols();
    const std::size_t terms = q + (include_intercept ? 1 : 0);
    if (outcome.size() != n)
        throw SchemaError("outcome length " + std::to_string(outcome.size()) + " != design rows " + std::to_string(n));
    if (terms == 0) throw ParameterError("regression has no terms");
    if (n <= terms)
        throw InsufficientDataError(std::to_string(n) + " observations for " + std::to_string(terms) +
                                    " terms; need more observations than terms");
    if (predictor_names.empty())
        for (std::size_t j = 0; j < q; ++j) predictor_names.push_back("x" + std::to_string(j + 1));
    if (predictor_names.size() != q) throw SchemaError("predictor name count does not match design columns");

    RegressionFit fit;
    fit.has_intercept = include_intercept;
    if (include_intercept) fit.term_names.push_back("Intercept");
    fit.term_names.insert(fit.term_names.end(), predictor_names.begin(), predictor_names.end());

    Matrix a(n, terms);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        if (include_intercept) a(i, c++) = 1.0;
        for (std::size_t j = 0; j < q; ++j) a(i, c++) = design(i, j);
    }
    std::vector<double> column_norms(terms);
    for (std::size_t c = 0; c < terms; ++c) column_norms[c] = norm(a.column(c));

    const detail::HouseholderQr qr(a);
    std::vector<std::string> dependent;
    for (std::size_t c = 0; c < terms; ++c)
        if (!(std::abs(qr.r(c, c)) > kRankTolerance * column_norms[c])) dependent.push_back(fit.term_names[c]);
    if (!dependent.empty()) {
        std::string msg = "design is rank deficient; dependent columns:";
        for (const auto& d : dependent) msg += " '" + d + "'";
        throw RankError(msg);
    }

    // Back substitution for the coefficients and for R^{-1}.
    const std::vector<double> qty = qr.apply_transpose(std::vector<double>(outcome.begin(), outcome.end()));
    fit.coefficients.assign(terms, 0.0);
    for (std::size_t c = terms; c-- > 0;) {
        double s = qty[c];
        for (std::size_t l = c + 1; l < terms; ++l) s -= qr.r(c, l) * fit.coefficients[l];
        fit.coefficients[c] = s / qr.r(c, c);
    }
    Matrix r_inv(terms, terms);
    for (std::size_t col = 0; col < terms; ++col) {
        for (std::size_t c = col + 1; c-- > 0;) {
            double s = c == col ? 1.0 : 0.0;
            for (std::size_t l = c + 1; l <= col; ++l) s -= qr.r(c, l) * r_inv(l, col);
            r_inv(c, col) = s / qr.r(c, c);
        }
    }

    double rss = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = outcome[i] - dot(a.row(i), fit.coefficients);
        rss += resid * resid;
        mean += outcome[i];
    }
    mean /= static_cast<double>(n);
    double tss = 0.0;
    double uncentered = 0.0;
    for (double y : outcome) {
        const double d = include_intercept ? y - mean : y;
        tss += d * d;
        uncentered += y * y;
    }

    fit.n_observations = n;
    fit.df_residual = n - terms;
    fit.residual_sum_squares = rss;
    const double sigma = std::sqrt(rss / static_cast<double>(fit.df_residual));
    for (std::size_t c = 0; c < terms; ++c) {
        double s = 0.0;
        for (std::size_t l = c; l < terms; ++l) s += r_inv(c, l) * r_inv(c, l);
        const double se = sigma * std::sqrt(s);
        const double beta = fit.coefficients[c];
        double t = 0.0;
        if (se > 0)
            t = beta / se;
        else if (beta != 0)
            t = std::copysign(std::numeric_limits<double>::infinity(), beta);
        fit.std_errors.push_back(se);
        fit.t_values.push_back(t);
        fit.p_values.push_back(t_two_sided_p(t, static_cast<double>(fit.df_residual)));
    }

    if (tss <= 1e-28 * uncentered) {
        fit.r_squared = 0.0;
        fit.warnings.push_back("degenerate outcome: total sum of squares is zero; r_squared reported as 0");
    } else {
        fit.r_squared = std::clamp(1.0 - rss / tss, 0.0, 1.0);
    }
    return fit;
}

inline std::vector<double> predict(const RegressionFit& fit, const Matrix& design) {
    if (design.cols() != fit.predictor_count())
        throw SchemaError("design has " + std::to_string(design.cols()) + " columns, model expects " +
                          std::to_string(fit.predictor_count()));
    const std::size_t offset = fit.has_intercept ? 1 : 0;
    std::vector<double> out(design.rows());
    for (std::size_t i = 0; i < design.rows(); ++i) {
        double y = fit.has_intercept ? fit.coefficients[0] : 0.0;
        for (std::size_t j = 0; j < design.cols(); ++j) y += fit.coefficients[j + offset] * design(i, j);
        out[i] = y;
    }
    return out;
}

/// Fixed-width table: Term, Coefficient, Std Error, p-value, then R^2.
inline std::string regression_summary_table(const RegressionFit& fit) {
    std::size_t width = 4;
    for (const auto& t : fit.term_names) width = std::max(width, t.size());
    auto fixed3 = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        std::string s(buf);
        return s == "-0.000" ? std::string("0.000") : s;
    };
    auto pad_right = [](std::string s, std::size_t w) { return s.append(w > s.size() ? w - s.size() : 0, ' '); };
    auto pad_left = [](const std::string& s, std::size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; };

    std::string out = pad_right("Term", width) + "  " + pad_left("Coefficient", 11) + "  " + pad_left("Std Error", 9) +
                      "  " + pad_left("p-value", 7) + "\n";
    for (std::size_t c = 0; c < fit.coefficients.size(); ++c) {
        const std::string p = fit.p_values[c] < 0.001 ? "<0.001" : fixed3(fit.p_values[c]);
        out += pad_right(fit.term_names[c], width) + "  " + pad_left(fixed3(fit.coefficients[c]), 11) + "  " +
               pad_left(fixed3(fit.std_errors[c]), 9) + "  " + pad_left(p, 7) + "\n";
    }
    out += "R^2 = " + fixed3(fit.r_squared) + "  (n = " + std::to_string(fit.n_observations) +
           ", df = " + std::to_string(fit.df_residual) + ")\n";
    for (const auto& w : fit.warnings) out += "warning: " + w + "\n";
    return out;
}

inline nlohmann::json regression_to_json(const RegressionFit& fit) {
    nlohmann::json terms = nlohmann::json::array();
    for (std::size_t c = 0; c < fit.coefficients.size(); ++c)
        terms.push_back({{"term", fit.term_names[c]},
                         {"coefficient", fit.coefficients[c]},
                         {"std_error", fit.std_errors[c]},
                         {"t_value", fit.t_values[c]},
                         {"p_value", fit.p_values[c]}});
    return {{"terms", terms},
            {"r_squared", fit.r_squared},
            {"residual_sum_squares", fit.residual_sum_squares},
            {"n_observations", fit.n_observations},
            {"df_residual", fit.df_residual},
            {"has_intercept", fit.has_intercept},
            {"warnings", fit.warnings}};
}

}  // namespace trackpca
