#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpncast/common.hpp"
#include "gpncast/genre.hpp"
#include "gpncast/session.hpp"
#include "gpncast/stats.hpp"

namespace gpncast {

/// The numerical feature dictionary, in canonical order.
inline const std::vector<std::string>& numeric_feature_names() {
    static const std::vector<std::string> names = {
        "INTERNET_PING",   "INTERNET_FLUX",   "INTERNET_LOSS",
        "INTERNET_SPKE",   "BYTES_UP_TCP",    "BYTES_UP_UDP",
        "BYTES_DOWN_TCP",  "BYTES_DOWN_UDP",  "SOCKET_COUNT_TCP",
        "SOCKET_COUNT_UDP", "CLIENT_IP_COUNT", "GAME_IP_COUNT",
        "BYTES_PER_SECOND", "CALCULATED_DIST", "DURATION",
    };
    return names;
}

/// Count-like features that get bin indicators when binning is enabled;
/// these are the most strongly right-skewed columns.
inline const std::vector<std::string>& default_binned_features() {
    static const std::vector<std::string> names = {
        "INTERNET_LOSS",   "INTERNET_SPKE",   "SOCKET_COUNT_TCP",
        "SOCKET_COUNT_UDP", "CLIENT_IP_COUNT", "GAME_IP_COUNT",
    };
    return names;
}

inline double numeric_feature_value(const SessionFact& f, const std::string& name) {
    static const std::map<std::string, double SessionFact::*> getters = {
        {"INTERNET_PING", &SessionFact::internet_ping},
        {"INTERNET_FLUX", &SessionFact::internet_flux},
        {"INTERNET_LOSS", &SessionFact::internet_loss},
        {"INTERNET_SPKE", &SessionFact::internet_spke},
        {"BYTES_UP_TCP", &SessionFact::bytes_up_tcp},
        {"BYTES_UP_UDP", &SessionFact::bytes_up_udp},
        {"BYTES_DOWN_TCP", &SessionFact::bytes_down_tcp},
        {"BYTES_DOWN_UDP", &SessionFact::bytes_down_udp},
        {"SOCKET_COUNT_TCP", &SessionFact::socket_count_tcp},
        {"SOCKET_COUNT_UDP", &SessionFact::socket_count_udp},
        {"CLIENT_IP_COUNT", &SessionFact::client_ip_count},
        {"GAME_IP_COUNT", &SessionFact::game_ip_count},
        {"BYTES_PER_SECOND", &SessionFact::bytes_per_second},
        {"CALCULATED_DIST", &SessionFact::calculated_distance},
        {"DURATION", &SessionFact::duration_s},
    };
    const auto it = getters.find(name);
    if (it == getters.end())
        throw ValidationError("unknown numeric feature '" + name + "'");
    return f.*(it->second);
}

/// Recompute the derived measures on a fact in place.
inline void derive_measures(SessionFact& f) {
    if (!(f.duration_s > 0.0))
        throw ValidationError("derive_measures: duration must be > 0");
    f.bytes_total =
        f.bytes_up_tcp + f.bytes_up_udp + f.bytes_down_tcp + f.bytes_down_udp;
    f.bytes_per_second = f.bytes_total / f.duration_s;
}

enum class TargetTransform { Identity, NaturalLog };

inline const char* target_transform_tag(TargetTransform t) {
    return t == TargetTransform::Identity ? "identity" : "natural-log";
}

inline TargetTransform parse_target_transform(std::string_view s) {
    if (iequals(s, "identity") || iequals(s, "ms")) return TargetTransform::Identity;
    if (iequals(s, "natural-log") || iequals(s, "log") || iequals(s, "ln"))
        return TargetTransform::NaturalLog;
    throw ValidationError("unknown target transform '" + std::string(s) + "'");
}

/// The unit tag a target transform produces; leaderboards only compare
/// error metrics within one unit.
inline const char* target_unit(TargetTransform t) {
    return t == TargetTransform::Identity ? "ms" : "ln(ms)";
}

struct FitOptions {
    bool use_binning = false;
    TargetTransform target_transform = TargetTransform::Identity;
    std::vector<std::string> select_list;  // empty = keep all columns
    std::string reference_partition = "all";
};

struct NumericFeatureFit {
    std::string name;
    double min_sqrt = 0.0;  // fitted min of sqrt(x) over the reference partition
    double max_sqrt = 0.0;
    bool degenerate = false;          // min == max; transform maps to 0
    std::vector<double> bin_edges;    // sqrt-scale edges, empty when not binned
};

class FeatureSchema {
public:
    std::vector<NumericFeatureFit> numerics;
    std::vector<std::string> vocabulary;  // game-type one-up names, incl. OTHER
    bool use_binning = false;
    bool use_select_list = false;
    std::vector<std::string> select_list;
    TargetTransform target_transform = TargetTransform::Identity;
    std::string reference_partition = "all";

    /// Full column list before any select-list restriction:
    /// numerics, WEEKEND, game types, then bin indicator blocks.
    std::vector<std::string> full_columns() const {
        std::vector<std::string> cols;
        for (const auto& f : numerics) cols.push_back(f.name);
        cols.push_back("WEEKEND");
        for (const auto& v : vocabulary) cols.push_back(v);
        for (const auto& f : numerics) {
            if (f.bin_edges.empty()) continue;
            for (std::size_t b = 1; b <= f.bin_edges.size() + 1; ++b)
                cols.push_back(f.name + "_BIN" + std::to_string(b));
        }
        return cols;
    }

    std::vector<std::string> columns() const {
        if (!use_select_list) return full_columns();
        return select_list;
    }

    const NumericFeatureFit& numeric(const std::string& name) const {
        for (const auto& f : numerics)
            if (f.name == name) return f;
        throw ValidationError("schema has no numeric feature '" + name + "'");
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["format"] = "gpncast-feature-schema";
        j["version"] = 1;
        j["reference_partition"] = reference_partition;
        j["target_transform"] = target_transform_tag(target_transform);
        j["use_binning"] = use_binning;
        j["use_select_list"] = use_select_list;
        j["select_list"] = select_list;
        j["vocabulary"] = vocabulary;
        nlohmann::ordered_json feats = nlohmann::ordered_json::array();
        for (const auto& f : numerics) {
            nlohmann::ordered_json ff;
            ff["name"] = f.name;
            ff["min_sqrt"] = f.min_sqrt;
            ff["max_sqrt"] = f.max_sqrt;
            ff["degenerate"] = f.degenerate;
            ff["bin_edges"] = f.bin_edges;
            feats.push_back(std::move(ff));
        }
        j["numerics"] = std::move(feats);
        return j;
    }

    static FeatureSchema from_json(const nlohmann::json& j) {
        if (j.value("format", "") != "gpncast-feature-schema")
            throw ValidationError("not a feature schema document");
        FeatureSchema s;
        s.reference_partition = j.at("reference_partition").get<std::string>();
        s.target_transform =
            parse_target_transform(j.at("target_transform").get<std::string>());
        s.use_binning = j.at("use_binning").get<bool>();
        s.use_select_list = j.at("use_select_list").get<bool>();
        s.select_list = j.at("select_list").get<std::vector<std::string>>();
        s.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
        for (const auto& ff : j.at("numerics")) {
            NumericFeatureFit f;
            f.name = ff.at("name").get<std::string>();
            f.min_sqrt = ff.at("min_sqrt").get<double>();
            f.max_sqrt = ff.at("max_sqrt").get<double>();
            f.degenerate = ff.at("degenerate").get<bool>();
            f.bin_edges = ff.at("bin_edges").get<std::vector<double>>();
            if (f.min_sqrt > f.max_sqrt)
                throw ValidationError("schema feature " + f.name + ": min > max");
            s.numerics.push_back(std::move(f));
        }
        return s;
    }

    /// Fingerprint over the canonical serialized form; train-time and
    /// predict-time schemas must agree on it.
    std::string fingerprint() const { return fnv1a64_hex(to_json().dump()); }

    void save(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw IoError("cannot write '" + path + "'");
        nlohmann::ordered_json j = to_json();
        j["fingerprint"] = fingerprint();
        f << j.dump(2) << '\n';
    }

    static FeatureSchema load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open '" + path + "'");
        return from_json(nlohmann::json::parse(f));
    }
};

struct FeatureMatrix {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> rows;
    std::vector<double> target;
    TargetTransform target_transform = TargetTransform::Identity;
    std::string schema_fingerprint;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return column_names.size(); }

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < column_names.size(); ++i)
            if (column_names[i] == name) return i;
        throw ValidationError("matrix has no column '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t idx = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[idx]);
        return out;
    }
};

/// Fit transform parameters on a reference partition: per-feature sqrt-scale
/// min/max, plus bin edges at the sqrt-scale 25/75/85/95th percentiles for
/// the binned feature set when binning is enabled.
inline FeatureSchema fit_schema(const std::vector<SessionFact>& facts,
                                const FitOptions& options = {}) {
    if (facts.empty())
        throw ValidationError("fit_schema: reference partition is empty");
    FeatureSchema schema;
    schema.vocabulary = default_type_vocabulary();
    schema.use_binning = options.use_binning;
    schema.use_select_list = !options.select_list.empty();
    schema.select_list = options.select_list;
    schema.target_transform = options.target_transform;
    schema.reference_partition = options.reference_partition;

    for (const auto& name : numeric_feature_names()) {
        std::vector<double> sq;
        sq.reserve(facts.size());
        for (const auto& f : facts) {
            const double x = numeric_feature_value(f, name);
            if (x < 0.0)
                throw ValidationError("fit_schema: negative value for " + name);
            sq.push_back(std::sqrt(x));
        }
        NumericFeatureFit fit;
        fit.name = name;
        fit.min_sqrt = *std::min_element(sq.begin(), sq.end());
        fit.max_sqrt = *std::max_element(sq.begin(), sq.end());
        fit.degenerate = fit.min_sqrt == fit.max_sqrt;
        if (options.use_binning) {
            const auto& binned = default_binned_features();
            if (std::find(binned.begin(), binned.end(), name) != binned.end()) {
                for (double q : {0.25, 0.75, 0.85, 0.95})
                    fit.bin_edges.push_back(percentile(sq, q));
            }
        }
        schema.numerics.push_back(std::move(fit));
    }

    if (schema.use_select_list) {
        const auto full = schema.full_columns();
        for (const auto& name : schema.select_list)
            if (std::find(full.begin(), full.end(), name) == full.end())
                throw ValidationError("select list names unknown column '" + name + "'");
    }
    return schema;
}

inline double transform_numeric(const NumericFeatureFit& fit, double x) {
    if (x < 0.0)
        throw ValidationError("transform: negative value for " + fit.name);
    if (fit.degenerate) return 0.0;
    const double cell = (std::sqrt(x) - fit.min_sqrt) / (fit.max_sqrt - fit.min_sqrt);
    return std::clamp(cell, 0.0, 1.0);
}

/// Inverse of transform_numeric for in-range cells of a non-degenerate
/// feature; exists because sqrt and the affine map are both invertible.
inline double inverse_numeric(const NumericFeatureFit& fit, double cell) {
    if (fit.degenerate)
        throw ValidationError("inverse undefined for degenerate feature " + fit.name);
    const double s = cell * (fit.max_sqrt - fit.min_sqrt) + fit.min_sqrt;
    return s * s;
}

/// Bin index in [1, edges+1]: first edge at or above sqrt(x), else overflow.
inline std::size_t bin_of(const NumericFeatureFit& fit, double x) {
    const double s = std::sqrt(x);
    for (std::size_t i = 0; i < fit.bin_edges.size(); ++i)
        if (s <= fit.bin_edges[i]) return i + 1;
    return fit.bin_edges.size() + 1;
}

inline FeatureMatrix transform(const std::vector<SessionFact>& facts,
                               const FeatureSchema& schema,
                               const TypeMap& type_map) {
    FeatureMatrix m;
    m.schema_fingerprint = schema.fingerprint();
    m.target_transform = schema.target_transform;
    const auto full = schema.full_columns();
    m.column_names = full;

    m.rows.reserve(facts.size());
    m.target.reserve(facts.size());
    for (const auto& f : facts) {
        std::vector<double> row;
        row.reserve(full.size());
        for (const auto& fit : schema.numerics)
            row.push_back(transform_numeric(fit, numeric_feature_value(f, fit.name)));
        row.push_back(f.weekend_start ? 1.0 : 0.0);

        std::string type_name = type_map.classify(f.game_name).name();
        if (std::find(schema.vocabulary.begin(), schema.vocabulary.end(),
                      type_name) == schema.vocabulary.end())
            type_name = "OTHER";
        for (const auto& v : schema.vocabulary)
            row.push_back(v == type_name ? 1.0 : 0.0);

        for (const auto& fit : schema.numerics) {
            if (fit.bin_edges.empty()) continue;
            const std::size_t bin = bin_of(fit, numeric_feature_value(f, fit.name));
            for (std::size_t b = 1; b <= fit.bin_edges.size() + 1; ++b)
                row.push_back(b == bin ? 1.0 : 0.0);
        }
        m.rows.push_back(std::move(row));

        if (!(f.wtfast_ping > 0.0))
            throw ValidationError("transform: wtfast_ping must be > 0");
        m.target.push_back(schema.target_transform == TargetTransform::NaturalLog
                               ? std::log(f.wtfast_ping)
                               : f.wtfast_ping);
    }

    if (schema.use_select_list) {
        FeatureMatrix selected;
        selected.schema_fingerprint = m.schema_fingerprint;
        selected.target_transform = m.target_transform;
        selected.target = m.target;
        selected.column_names = schema.select_list;
        std::vector<std::size_t> idx;
        for (const auto& name : schema.select_list)
            idx.push_back(m.column_index(name));
        selected.rows.reserve(m.rows.size());
        for (const auto& row : m.rows) {
            std::vector<double> r;
            r.reserve(idx.size());
            for (std::size_t i : idx) r.push_back(row[i]);
            selected.rows.push_back(std::move(r));
        }
        return selected;
    }
    return m;
}

/// Restrict a matrix to the named columns, order preserved as given.
inline FeatureMatrix select_columns(const FeatureMatrix& m,
                                    const std::vector<std::string>& names) {
    if (names.empty())
        throw ValidationError("select_columns: empty column list");
    FeatureMatrix out;
    out.schema_fingerprint = m.schema_fingerprint;
    out.target_transform = m.target_transform;
    out.target = m.target;
    out.column_names = names;
    std::vector<std::size_t> idx;
    for (const auto& name : names) idx.push_back(m.column_index(name));
    out.rows.reserve(m.rows.size());
    for (const auto& row : m.rows) {
        std::vector<double> r;
        r.reserve(idx.size());
        for (std::size_t i : idx) r.push_back(row[i]);
        out.rows.push_back(std::move(r));
    }
    return out;
}

}  // namespace gpncast
