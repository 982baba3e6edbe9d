#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "gpncast/common.hpp"
#include "gpncast/csv.hpp"
#include "gpncast/features.hpp"
#include "gpncast/model.hpp"

namespace gpncast {

inline double rmse(const std::vector<double>& pred,
                   const std::vector<double>& actual) {
    if (pred.empty() || pred.size() != actual.size())
        throw ValidationError("rmse: inputs must be equal-length and non-empty");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - actual[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(pred.size()));
}

/// Mean absolute percentage error. Undefined when any actual value is zero:
/// the percentage error against a zero actual has no meaning.
inline double mape(const std::vector<double>& pred,
                   const std::vector<double>& actual) {
    if (pred.empty() || pred.size() != actual.size())
        throw ValidationError("mape: inputs must be equal-length and non-empty");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (actual[i] == 0.0)
            throw ValidationError(
                "mape: undefined when the dependent variable takes on zero values");
        s += std::abs(pred[i] - actual[i]) / std::abs(actual[i]);
    }
    return 100.0 * s / static_cast<double>(pred.size());
}

inline const std::vector<std::string>& latency_bucket_labels() {
    static const std::vector<std::string> labels = {"0-5ms", "5-50ms", "50-200ms",
                                                    ">200ms"};
    return labels;
}

/// Latency category with upper-inclusive edges; the final bucket is
/// open-ended so the function is total over positive pings.
inline std::string latency_bucket(double ping_ms) {
    if (!(ping_ms > 0.0))
        throw ValidationError("latency bucket: ping must be > 0");
    if (ping_ms <= 5.0) return "0-5ms";
    if (ping_ms <= 50.0) return "5-50ms";
    if (ping_ms <= 200.0) return "50-200ms";
    return ">200ms";
}

struct EvalRow {
    std::string algorithm;
    std::string feature_option;
    std::string details;
    std::string unit;  // "ms" or "ln(ms)"
    double rmse = 0.0;
    double mape = 0.0;     // in the row's unit space
    double mape_ms = 0.0;  // back-transformed; equals mape for ms rows
};

struct SplitDescriptor {
    std::uint64_t seed = 0;
    double fraction = 0.6;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

struct EvalReport {
    std::vector<EvalRow> rows;  // grouped by unit, MAPE ascending within group
    SplitDescriptor split;
};

struct LeaderboardEntry {
    const TrainedModel* model = nullptr;
    const FeatureMatrix* test = nullptr;  // built under the model's transform
};

/// Score each model on its test matrix and rank within target-unit groups.
/// Metrics in different units are never ranked against each other; log-target
/// rows also carry a back-transformed ms MAPE so they stay actionable.
inline EvalReport leaderboard(const std::vector<LeaderboardEntry>& entries,
                              const SplitDescriptor& split = {}) {
    EvalReport report;
    report.split = split;
    for (const auto& e : entries) {
        if (e.model == nullptr || e.test == nullptr)
            throw ValidationError("leaderboard: null entry");
        const auto& m = *e.model;
        const auto& test = *e.test;
        if (test.target_transform != m.target_transform)
            throw ValidationError(
                "leaderboard: test matrix target transform differs from model");
        const std::vector<double> raw = m.raw_predict(test);

        EvalRow row;
        row.algorithm = algorithm_tag(m.algorithm);
        row.feature_option = m.feature_option;
        row.details = m.details;
        row.unit = target_unit(m.target_transform);
        row.rmse = rmse(raw, test.target);
        row.mape = mape(raw, test.target);
        if (m.target_transform == TargetTransform::NaturalLog) {
            std::vector<double> pred_ms(raw.size()), actual_ms(test.target.size());
            for (std::size_t i = 0; i < raw.size(); ++i) {
                pred_ms[i] = std::exp(raw[i]);
                actual_ms[i] = std::exp(test.target[i]);
            }
            row.mape_ms = mape(pred_ms, actual_ms);
        } else {
            row.mape_ms = row.mape;
        }
        report.rows.push_back(std::move(row));
    }

    const auto unit_rank = [](const std::string& u) { return u == "ms" ? 0 : 1; };
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [&](const EvalRow& a, const EvalRow& b) {
                         if (a.unit != b.unit)
                             return unit_rank(a.unit) < unit_rank(b.unit);
                         return a.mape < b.mape;
                     });
    return report;
}

inline CsvTable eval_report_csv(const EvalReport& r) {
    CsvTable t;
    t.header = {"algorithm", "feature",  "model_details", "unit",
                "rmse",      "mape_pct", "mape_ms_pct"};
    for (const auto& row : r.rows)
        t.rows.push_back({row.algorithm, row.feature_option, row.details, row.unit,
                          fmt_double(row.rmse), fmt_double(row.mape),
                          fmt_double(row.mape_ms)});
    return t;
}

inline std::string eval_report_markdown(const EvalReport& r) {
    std::ostringstream os;
    os << "| Algorithm | Feature | Model Details | Unit | RMSE | MAPE |\n";
    os << "|---|---|---|---|---|---|\n";
    char buf[64];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof(buf), "%.4g", row.rmse);
        std::string rm = buf;
        std::snprintf(buf, sizeof(buf), "%.2f%%", row.mape);
        std::string mp = buf;
        if (row.unit != "ms") {
            std::snprintf(buf, sizeof(buf), " (%.2f%% in ms)", row.mape_ms);
            mp += buf;
        }
        os << "| " << row.algorithm << " | " << row.feature_option << " | "
           << row.details << " | " << row.unit << " | " << rm << " | " << mp
           << " |\n";
    }
    os << "\nSplit: seed " << r.split.seed << ", train fraction "
       << r.split.fraction << " (" << r.split.train_rows << " train / "
       << r.split.test_rows << " test)\n";
    return os.str();
}

}  // namespace gpncast
