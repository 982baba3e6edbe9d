#pragma once

#include <cmath>
#include <cstdint>
#include <list>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpncast/common.hpp"

namespace gpncast {

struct SvrConfig {
    double c = 5.0;
    double epsilon = 0.1;
    double gamma = 0.0;     // <= 0 means the "scale" convention
    double tol = 1e-3;      // stopping KKT-gap tolerance
    std::size_t max_iter = 1000000;
    std::size_t cache_mb = 256;  // kernel row cache budget
};

/// RBF-kernel "scale" gamma: 1 / (n_features * variance of all entries of X).
inline double svr_scale_gamma(const std::vector<std::vector<double>>& rows) {
    const std::size_t d = rows.empty() ? 0 : rows[0].size();
    if (d == 0) throw ValidationError("svr: rows have no features");
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (const auto& r : rows)
        for (double x : r) {
            sum += x;
            sum2 += x * x;
            ++count;
        }
    const double meanv = sum / static_cast<double>(count);
    const double var = sum2 / static_cast<double>(count) - meanv * meanv;
    if (!(var > 0.0)) return 1.0 / static_cast<double>(d);
    return 1.0 / (static_cast<double>(d) * var);
}

namespace svr_detail {

inline double rbf(const std::vector<double>& a, const std::vector<double>& b,
                  double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

/// Least-recently-used cache of base kernel rows; the SMO loop touches two
/// rows per iteration, so hot rows stay resident.
class KernelCache {
public:
    KernelCache(const std::vector<std::vector<double>>& rows, double gamma,
                std::size_t budget_bytes)
        : rows_(rows), gamma_(gamma) {
        const std::size_t row_bytes = rows.size() * sizeof(double);
        capacity_ = row_bytes == 0 ? 1 : std::max<std::size_t>(2, budget_bytes / row_bytes);
    }

    const std::vector<double>& row(std::size_t r) {
        const auto it = index_.find(r);
        if (it != index_.end()) {
            order_.splice(order_.begin(), order_, it->second.second);
            return it->second.first;
        }
        if (index_.size() >= capacity_) {
            const std::size_t evict = order_.back();
            order_.pop_back();
            index_.erase(evict);
        }
        std::vector<double> k(rows_.size());
        for (std::size_t j = 0; j < rows_.size(); ++j)
            k[j] = rbf(rows_[r], rows_[j], gamma_);
        order_.push_front(r);
        const auto pos =
            index_.emplace(r, std::make_pair(std::move(k), order_.begin())).first;
        return pos->second.first;
    }

private:
    const std::vector<std::vector<double>>& rows_;
    double gamma_;
    std::size_t capacity_;
    std::list<std::size_t> order_;
    std::unordered_map<std::size_t,
                       std::pair<std::vector<double>, std::list<std::size_t>::iterator>>
        index_;
};

}  // namespace svr_detail

/// Epsilon-insensitive SVR with RBF kernel, solved by SMO over the expanded
/// 2n dual (alpha stacked over alpha*), working pairs chosen by maximal KKT
/// violation, stopping when the violation gap drops to tol.
class Svr {
public:
    SvrConfig config;
    double gamma = 0.0;
    double bias = 0.0;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coef;  // alpha_i - alpha*_i per support vector
    std::size_t iterations = 0;

    // full duals of the training run, kept for KKT audits
    std::vector<double> alpha;       // one per training row
    std::vector<double> alpha_star;

    static Svr fit(const std::vector<std::vector<double>>& rows,
                   const std::vector<double>& y, const SvrConfig& cfg = {}) {
        if (rows.empty()) throw ValidationError("svr: empty training set");
        if (rows.size() != y.size())
            throw ValidationError("svr: row/target length mismatch");
        if (!(cfg.c > 0.0)) throw ValidationError("svr: C must be positive");

        const std::size_t n = rows.size();
        Svr model;
        model.config = cfg;
        model.gamma = cfg.gamma > 0.0 ? cfg.gamma : svr_scale_gamma(rows);

        // expanded dual: beta[t], z[t] = +1 for t < n (alpha), -1 after
        // (alpha*); p[t] = epsilon -/+ y. Gradient starts at p since beta = 0.
        std::vector<double> beta(2 * n, 0.0), grad(2 * n);
        const auto z = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
        const auto base = [n](std::size_t t) { return t < n ? t : t - n; };
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] = cfg.epsilon - y[i];
            grad[n + i] = cfg.epsilon + y[i];
        }

        svr_detail::KernelCache cache(rows, model.gamma,
                                      cfg.cache_mb * 1024 * 1024);
        const double C = cfg.c;
        double gap_m = 0.0, gap_M = 0.0;

        std::size_t iter = 0;
        for (; iter < cfg.max_iter; ++iter) {
            // maximal violating pair over -z*grad
            std::ptrdiff_t i = -1, j = -1;
            double m_val = -1e300, M_val = 1e300;
            for (std::size_t t = 0; t < 2 * n; ++t) {
                const double zs = z(t);
                const double score = -zs * grad[t];
                const bool in_up = (zs > 0 && beta[t] < C) || (zs < 0 && beta[t] > 0);
                const bool in_low = (zs > 0 && beta[t] > 0) || (zs < 0 && beta[t] < C);
                if (in_up && score > m_val) {
                    m_val = score;
                    i = static_cast<std::ptrdiff_t>(t);
                }
                if (in_low && score < M_val) {
                    M_val = score;
                    j = static_cast<std::ptrdiff_t>(t);
                }
            }
            gap_m = m_val;
            gap_M = M_val;
            if (i < 0 || j < 0 || m_val - M_val <= cfg.tol) break;

            const auto ti = static_cast<std::size_t>(i);
            const auto tj = static_cast<std::size_t>(j);
            const auto& ki = cache.row(base(ti));
            const auto& kj = cache.row(base(tj));
            const double zi = z(ti), zj = z(tj);
            const double qii = ki[base(ti)];
            const double qjj = kj[base(tj)];
            const double qij = zi * zj * ki[base(tj)];

            const double old_i = beta[ti], old_j = beta[tj];
            if (zi != zj) {
                const double quad = std::max(qii + qjj + 2.0 * qij, 1e-12);
                const double delta = (-grad[ti] - grad[tj]) / quad;
                const double diff = old_i - old_j;
                beta[ti] += delta;
                beta[tj] += delta;
                if (diff > 0.0 && beta[tj] < 0.0) {
                    beta[tj] = 0.0;
                    beta[ti] = diff;
                } else if (diff <= 0.0 && beta[ti] < 0.0) {
                    beta[ti] = 0.0;
                    beta[tj] = -diff;
                }
                if (diff > 0.0) {
                    if (beta[ti] > C) {
                        beta[ti] = C;
                        beta[tj] = C - diff;
                    }
                } else {
                    if (beta[tj] > C) {
                        beta[tj] = C;
                        beta[ti] = C + diff;
                    }
                }
            } else {
                const double quad = std::max(qii + qjj - 2.0 * qij, 1e-12);
                const double delta = (grad[ti] - grad[tj]) / quad;
                const double sum = old_i + old_j;
                beta[ti] -= delta;
                beta[tj] += delta;
                if (sum > C) {
                    if (beta[ti] > C) {
                        beta[ti] = C;
                        beta[tj] = sum - C;
                    } else if (beta[tj] > C) {
                        beta[tj] = C;
                        beta[ti] = sum - C;
                    }
                } else {
                    if (beta[tj] < 0.0) {
                        beta[tj] = 0.0;
                        beta[ti] = sum;
                    } else if (beta[ti] < 0.0) {
                        beta[ti] = 0.0;
                        beta[tj] = sum;
                    }
                }
            }

            const double di = beta[ti] - old_i;
            const double dj = beta[tj] - old_j;
            if (di == 0.0 && dj == 0.0) break;  // numerically stuck
            for (std::size_t t = 0; t < 2 * n; ++t) {
                const double zt = z(t);
                grad[t] += zt * zi * ki[base(t)] * di + zt * zj * kj[base(t)] * dj;
            }
        }
        if (iter >= cfg.max_iter)
            throw TrainingError("svr: no convergence within " +
                                std::to_string(cfg.max_iter) + " iterations");
        model.iterations = iter;
        model.bias = (gap_m + gap_M) / 2.0;

        model.alpha.assign(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(n));
        model.alpha_star.assign(beta.begin() + static_cast<std::ptrdiff_t>(n), beta.end());
        for (std::size_t t = 0; t < n; ++t) {
            const double coef = model.alpha[t] - model.alpha_star[t];
            if (coef != 0.0) {
                model.support_vectors.push_back(rows[t]);
                model.dual_coef.push_back(coef);
            }
        }
        return model;
    }

    double predict_row(const std::vector<double>& row) const {
        double f = bias;
        for (std::size_t s = 0; s < support_vectors.size(); ++s)
            f += dual_coef[s] * svr_detail::rbf(support_vectors[s], row, gamma);
        return f;
    }

    std::vector<double> predict(const std::vector<std::vector<double>>& rows) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(predict_row(r));
        return out;
    }

    struct KktReport {
        double max_violation = 0.0;      // worst epsilon-tube KKT breach
        double max_pair_product = 0.0;   // worst alpha_i * alpha*_i
        bool duals_in_box = true;
    };

    /// Check the epsilon-tube KKT conditions on the training set the model
    /// was fitted on. Conditions per point, with E = f(x) - y:
    ///   alpha free   -> E = -eps        alpha* free   -> E = +eps
    ///   alpha = C    -> E <= -eps       alpha* = C    -> E >= +eps
    ///   alpha = 0    -> E >= -eps       alpha* = 0    -> E <= +eps
    /// plus dual feasibility 0 <= alpha, alpha* <= C and complementarity.
    KktReport audit_kkt(const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& y) const {
        if (rows.size() != alpha.size())
            throw ValidationError("kkt audit: row count differs from training set");
        const double C = config.c;
        const double eps = config.epsilon;
        const double bound_tol = 1e-8 * C;
        KktReport rep;
        for (std::size_t t = 0; t < rows.size(); ++t) {
            const double a = alpha[t];
            const double as = alpha_star[t];
            if (a < -bound_tol || a > C + bound_tol || as < -bound_tol ||
                as > C + bound_tol)
                rep.duals_in_box = false;
            rep.max_pair_product = std::max(rep.max_pair_product, a * as);
            const double e = predict_row(rows[t]) - y[t];
            double viol = 0.0;
            if (a > bound_tol && a < C - bound_tol)
                viol = std::max(viol, std::abs(e + eps));
            else if (a >= C - bound_tol)
                viol = std::max(viol, e + eps);       // needs E <= -eps
            else
                viol = std::max(viol, -(e + eps));    // needs E >= -eps
            if (as > bound_tol && as < C - bound_tol)
                viol = std::max(viol, std::abs(e - eps));
            else if (as >= C - bound_tol)
                viol = std::max(viol, -(e - eps));    // needs E >= eps
            else
                viol = std::max(viol, e - eps);       // needs E <= eps
            rep.max_violation = std::max(rep.max_violation, viol);
        }
        return rep;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["c"] = config.c;
        j["epsilon"] = config.epsilon;
        j["gamma"] = gamma;
        j["bias"] = bias;
        j["iterations"] = iterations;
        j["support_vectors"] = support_vectors;
        j["dual_coef"] = dual_coef;
        return j;
    }

    static Svr from_json(const nlohmann::json& j) {
        Svr m;
        m.config.c = j.at("c").get<double>();
        m.config.epsilon = j.at("epsilon").get<double>();
        m.gamma = j.at("gamma").get<double>();
        m.bias = j.at("bias").get<double>();
        m.iterations = j.at("iterations").get<std::size_t>();
        m.support_vectors =
            j.at("support_vectors").get<std::vector<std::vector<double>>>();
        m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
        return m;
    }
};

}  // namespace gpncast
