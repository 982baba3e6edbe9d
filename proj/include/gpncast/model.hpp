#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpncast/common.hpp"
#include "gpncast/features.hpp"
#include "gpncast/forest.hpp"
#include "gpncast/linreg.hpp"
#include "gpncast/mlp.hpp"
#include "gpncast/svr.hpp"

namespace gpncast {

enum class Algorithm { Stepwise, RandomForest, MlpNet, SvrMachine };

inline const char* algorithm_tag(Algorithm a) {
    switch (a) {
        case Algorithm::Stepwise: return "stepwise-regression";
        case Algorithm::RandomForest: return "random-forest";
        case Algorithm::MlpNet: return "mlp";
        case Algorithm::SvrMachine: return "svr";
    }
    return "unknown";
}

inline Algorithm parse_algorithm(std::string_view s) {
    for (Algorithm a : {Algorithm::Stepwise, Algorithm::RandomForest,
                        Algorithm::MlpNet, Algorithm::SvrMachine})
        if (iequals(s, algorithm_tag(a))) return a;
    throw ValidationError("unknown algorithm '" + std::string(s) + "'");
}

/// A trained model plus everything needed to apply it safely later: the
/// schema fingerprint it was built under, its input columns, and the
/// target-transform tag that decides whether predictions need exp().
struct TrainedModel {
    Algorithm algorithm = Algorithm::Stepwise;
    std::string feature_option = "All";  // leaderboard "Feature" column
    std::string details;                 // leaderboard "Model Details" column
    std::string schema_fingerprint;
    TargetTransform target_transform = TargetTransform::Identity;
    std::uint64_t seed = 0;
    std::size_t train_rows = 0;
    std::vector<std::string> columns;  // input columns, in training order

    // exactly one of these is populated, per `algorithm`
    OlsFit linear;
    StepwiseResult stepwise;
    RandomForest forest;
    Mlp mlp;
    Svr svr;

    /// Model output in its own target space (ms or ln ms).
    std::vector<double> raw_predict(const FeatureMatrix& m) const {
        if (m.schema_fingerprint != schema_fingerprint)
            throw ValidationError("schema fingerprint mismatch: model " +
                                  schema_fingerprint + " vs matrix " +
                                  m.schema_fingerprint);
        std::vector<std::size_t> idx;
        idx.reserve(columns.size());
        for (const auto& name : columns) idx.push_back(m.column_index(name));

        std::vector<double> out;
        out.reserve(m.n_rows());
        if (algorithm == Algorithm::Stepwise) {
            for (const auto& row : m.rows) out.push_back(linear.predict_row(row, idx));
            return out;
        }
        std::vector<std::vector<double>> sub;
        sub.reserve(m.n_rows());
        for (const auto& row : m.rows) {
            std::vector<double> r;
            r.reserve(idx.size());
            for (std::size_t i : idx) r.push_back(row[i]);
            sub.push_back(std::move(r));
        }
        switch (algorithm) {
            case Algorithm::RandomForest: return forest.predict(sub);
            case Algorithm::MlpNet: return mlp.predict(sub);
            case Algorithm::SvrMachine: return svr.predict(sub);
            default: break;
        }
        throw ValidationError("model has no parameters");
    }

    /// Prediction in milliseconds: exp() is applied iff the model was
    /// trained on the natural-log target.
    std::vector<double> predict_ms(const FeatureMatrix& m) const {
        std::vector<double> out = raw_predict(m);
        if (target_transform == TargetTransform::NaturalLog)
            for (double& v : out) v = std::exp(v);
        for (double v : out)
            if (!std::isfinite(v))
                throw ValidationError("non-finite prediction");
        return out;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["format"] = "gpncast-model";
        j["version"] = 1;
        j["algorithm"] = algorithm_tag(algorithm);
        j["feature_option"] = feature_option;
        j["details"] = details;
        j["schema_fingerprint"] = schema_fingerprint;
        j["target_transform"] = target_transform_tag(target_transform);
        j["seed"] = seed;
        j["train_rows"] = train_rows;
        j["columns"] = columns;
        nlohmann::ordered_json params;
        switch (algorithm) {
            case Algorithm::Stepwise: {
                params["intercept"] = linear.intercept;
                params["coef"] = linear.coef;
                params["p_values"] = linear.p_value;
                params["r_squared"] = linear.r_squared;
                params["eliminated"] = stepwise.eliminated;
                params["dropped_collinear"] = linear.dropped_collinear;
                break;
            }
            case Algorithm::RandomForest: params = forest.to_json(); break;
            case Algorithm::MlpNet: params = mlp.to_json(); break;
            case Algorithm::SvrMachine: params = svr.to_json(); break;
        }
        j["params"] = std::move(params);
        return j;
    }

    static TrainedModel from_json(const nlohmann::json& j) {
        if (j.value("format", "") != "gpncast-model")
            throw ValidationError("not a model artifact");
        TrainedModel m;
        m.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        m.feature_option = j.at("feature_option").get<std::string>();
        m.details = j.at("details").get<std::string>();
        m.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
        m.target_transform =
            parse_target_transform(j.at("target_transform").get<std::string>());
        m.seed = j.at("seed").get<std::uint64_t>();
        m.train_rows = j.at("train_rows").get<std::size_t>();
        m.columns = j.at("columns").get<std::vector<std::string>>();
        const auto& params = j.at("params");
        switch (m.algorithm) {
            case Algorithm::Stepwise: {
                m.linear.intercept = params.at("intercept").get<double>();
                m.linear.coef = params.at("coef").get<std::vector<double>>();
                m.linear.p_value = params.at("p_values").get<std::vector<double>>();
                m.linear.r_squared = params.at("r_squared").get<double>();
                m.linear.column_names = m.columns;
                m.stepwise.eliminated =
                    params.at("eliminated").get<std::vector<std::string>>();
                m.linear.dropped_collinear =
                    params.at("dropped_collinear").get<std::vector<std::string>>();
                break;
            }
            case Algorithm::RandomForest:
                m.forest = RandomForest::from_json(params);
                break;
            case Algorithm::MlpNet: m.mlp = Mlp::from_json(params); break;
            case Algorithm::SvrMachine: m.svr = Svr::from_json(params); break;
        }
        return m;
    }

    void save(const std::string& path) const {
        std::ofstream f(path);
        if (!f) throw IoError("cannot write '" + path + "'");
        f << to_json().dump() << '\n';
        if (!f) throw IoError("write failed for '" + path + "'");
    }

    static TrainedModel load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw IoError("cannot open '" + path + "'");
        return from_json(nlohmann::json::parse(f));
    }
};

/// Stepwise predictions index columns positionally inside raw_predict; this
/// adapter builds the index list over the model's own columns.
inline TrainedModel make_stepwise_model(const StepwiseResult& result,
                                        const FeatureMatrix& train,
                                        std::uint64_t seed) {
    TrainedModel m;
    m.algorithm = Algorithm::Stepwise;
    m.details = "Backward Elimination";
    m.schema_fingerprint = train.schema_fingerprint;
    m.target_transform = train.target_transform;
    m.seed = seed;
    m.train_rows = train.n_rows();
    m.columns = result.select_list;
    m.linear = result.model;
    m.stepwise = result;
    return m;
}

}  // namespace gpncast
