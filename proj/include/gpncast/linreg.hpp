#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gpncast/common.hpp"
#include "gpncast/stats.hpp"

namespace gpncast {

/// Ordinary least squares fit with per-coefficient two-sided t-test p-values.
struct OlsFit {
    double intercept = 0.0;
    std::vector<double> coef;             // aligned with column_names
    std::vector<double> p_value;          // slope p-values, aligned with coef
    double intercept_p = 1.0;
    std::vector<std::string> column_names;
    std::vector<std::string> dropped_collinear;  // exact-collinear columns removed
    double r_squared = 0.0;
    double sigma2 = 0.0;  // residual variance estimate

    double predict_row(const std::vector<double>& row,
                       const std::vector<std::size_t>& idx) const {
        double y = intercept;
        for (std::size_t k = 0; k < coef.size(); ++k) y += coef[k] * row[idx[k]];
        return y;
    }
};

namespace linreg_detail {

/// Modified Gram-Schmidt rank screen over [intercept, columns...]: returns
/// the indices (into `cols`) that are linearly independent given everything
/// kept before them. The intercept is processed first so it is always kept.
inline std::vector<std::size_t> independent_columns(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::size_t>& cols) {
    const std::size_t n = rows.size();
    std::vector<Eigen::VectorXd> basis;  // orthonormal basis built so far
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    basis.push_back(ones / ones.norm());

    std::vector<std::size_t> kept;
    for (std::size_t c : cols) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i)
            v[static_cast<Eigen::Index>(i)] = rows[i][c];
        const double orig = std::max(v.norm(), 1.0);
        for (const auto& b : basis) v -= b.dot(v) * b;
        // re-orthogonalize once; plain MGS leaks precision on near-collinear sets
        for (const auto& b : basis) v -= b.dot(v) * b;
        if (v.norm() > 1e-9 * orig) {
            basis.push_back(v / v.norm());
            kept.push_back(c);
        }
    }
    return kept;
}

}  // namespace linreg_detail

/// Fit OLS of target on the named columns (plus intercept). Exact-collinear
/// columns are dropped and reported, not fatal.
inline OlsFit fit_ols(const std::vector<std::vector<double>>& rows,
                      const std::vector<double>& target,
                      const std::vector<std::string>& column_names) {
    const std::size_t n = rows.size();
    const std::size_t p_all = column_names.size();
    if (n == 0) throw ValidationError("ols: empty training set");
    if (n != target.size()) throw ValidationError("ols: row/target length mismatch");
    if (n <= p_all + 1)
        throw ValidationError("ols: need more rows (" + std::to_string(n) +
                              ") than columns (" + std::to_string(p_all) + ") + intercept");

    std::vector<std::size_t> all_cols(p_all);
    for (std::size_t i = 0; i < p_all; ++i) all_cols[i] = i;
    const std::vector<std::size_t> kept =
        linreg_detail::independent_columns(rows, all_cols);

    OlsFit fit;
    for (std::size_t c : all_cols)
        if (std::find(kept.begin(), kept.end(), c) == kept.end())
            fit.dropped_collinear.push_back(column_names[c]);

    const std::size_t p = kept.size();
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        X(static_cast<Eigen::Index>(i), 0) = 1.0;
        for (std::size_t k = 0; k < p; ++k)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k + 1)) =
                rows[i][kept[k]];
        y[static_cast<Eigen::Index>(i)] = target[i];
    }

    const Eigen::VectorXd beta = X.householderQr().solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double ssr = resid.squaredNorm();
    const double y_mean = y.mean();
    const double sst = (y.array() - y_mean).square().sum();
    const double df = static_cast<double>(n - (p + 1));

    fit.intercept = beta[0];
    fit.coef.resize(p);
    fit.p_value.resize(p);
    fit.column_names.resize(p);
    for (std::size_t k = 0; k < p; ++k) {
        fit.coef[k] = beta[static_cast<Eigen::Index>(k + 1)];
        fit.column_names[k] = column_names[kept[k]];
    }
    fit.sigma2 = df > 0 ? ssr / df : 0.0;
    fit.r_squared = sst > 0.0 ? 1.0 - ssr / sst : 1.0;

    const bool perfect = sst <= 0.0 || fit.r_squared >= 1.0 - 1e-12;
    if (perfect) {
        // Residuals are numerically zero, so the t-statistics blow up. A
        // coefficient is then either exactly supported by the data or pure
        // noise of the solve: decide by its contribution relative to the
        // target's scale.
        const double y_scale = std::max(std::sqrt(sst / static_cast<double>(n)),
                                        std::max(std::abs(y_mean), 1e-300));
        for (std::size_t k = 0; k < p; ++k) {
            Eigen::VectorXd col = X.col(static_cast<Eigen::Index>(k + 1));
            const double contrib =
                std::abs(fit.coef[k]) * (col.array() - col.mean()).matrix().norm() /
                std::sqrt(static_cast<double>(n));
            fit.p_value[k] = contrib > 1e-8 * y_scale ? 0.0 : 1.0;
        }
        fit.intercept_p = std::abs(fit.intercept) > 1e-8 * y_scale ? 0.0 : 1.0;
        return fit;
    }

    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X)
            .ldlt()
            .solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p + 1),
                                             static_cast<Eigen::Index>(p + 1)));
    for (std::size_t k = 0; k <= p; ++k) {
        const double var_k =
            fit.sigma2 * xtx_inv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        const double se = var_k > 0.0 ? std::sqrt(var_k) : 0.0;
        const double b = k == 0 ? fit.intercept : fit.coef[k - 1];
        double pv = 1.0;
        if (se > 0.0)
            pv = student_t_two_sided_p(b / se, df);
        else
            pv = std::abs(b) > 0.0 ? 0.0 : 1.0;
        if (k == 0)
            fit.intercept_p = pv;
        else
            fit.p_value[k - 1] = pv;
    }
    return fit;
}

struct StepwiseResult {
    OlsFit model;                            // final refit on survivors
    std::vector<std::string> select_list;    // surviving column names
    std::vector<std::string> eliminated;     // in elimination order
    std::size_t rounds = 0;
};

/// Backward elimination: fit OLS, drop the slope with the largest p-value
/// above alpha, refit, until every remaining slope is significant. The
/// intercept is never a candidate for elimination.
inline StepwiseResult fit_stepwise(const std::vector<std::vector<double>>& rows,
                                   const std::vector<double>& target,
                                   const std::vector<std::string>& column_names,
                                   double alpha = 0.05) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("stepwise: alpha must be in (0,1)");
    StepwiseResult out;
    std::vector<std::string> current = column_names;

    while (true) {
        ++out.rounds;
        std::vector<std::size_t> idx;
        for (const auto& name : current) {
            const auto it = std::find(column_names.begin(), column_names.end(), name);
            idx.push_back(static_cast<std::size_t>(it - column_names.begin()));
        }
        std::vector<std::vector<double>> sub_rows;
        sub_rows.reserve(rows.size());
        for (const auto& r : rows) {
            std::vector<double> sr;
            sr.reserve(idx.size());
            for (std::size_t i : idx) sr.push_back(r[i]);
            sub_rows.push_back(std::move(sr));
        }
        OlsFit fit = fit_ols(sub_rows, target, current);
        for (const auto& dropped : fit.dropped_collinear) {
            out.eliminated.push_back(dropped);
            current.erase(std::remove(current.begin(), current.end(), dropped),
                          current.end());
        }

        double worst_p = alpha;
        std::ptrdiff_t worst = -1;
        for (std::size_t k = 0; k < fit.p_value.size(); ++k) {
            if (fit.p_value[k] > worst_p ||
                (worst >= 0 && fit.p_value[k] == worst_p)) {
                worst_p = fit.p_value[k];
                worst = static_cast<std::ptrdiff_t>(k);
            }
        }
        if (worst < 0 || fit.coef.empty()) {
            out.model = std::move(fit);
            out.select_list = current;
            return out;
        }
        const std::string victim = fit.column_names[static_cast<std::size_t>(worst)];
        out.eliminated.push_back(victim);
        current.erase(std::remove(current.begin(), current.end(), victim),
                      current.end());
        if (current.empty()) {
            // intercept-only model: refit to report the mean
            std::vector<std::vector<double>> empty_rows(rows.size());
            out.model = fit_ols(empty_rows, target, {});
            out.select_list = {};
            return out;
        }
    }
}

}  // namespace gpncast
