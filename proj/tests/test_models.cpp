// The four regressors: ordinary least squares with backward elimination,
// the random forest, the feedforward network, and the epsilon-tube SVR.
// The SVR toy fixture is checked against dual coefficients frozen from an
// independent dense quadratic-programming solve of the same problem.
#include <catch2/catch_amalgamated.hpp>

#include <gpncast/features.hpp>
#include <gpncast/forest.hpp>
#include <gpncast/linreg.hpp>
#include <gpncast/mlp.hpp>
#include <gpncast/model.hpp>
#include <gpncast/rng.hpp>
#include <gpncast/svr.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

using Catch::Matchers::WithinAbs;

namespace {

struct Xy {
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
};

// y = 2 + 3*x0 - 1.5*x1 + noise; x2 is pure noise
Xy linear_data(std::size_t n, double noise_sd, std::uint64_t seed) {
    gpncast::Rng r(seed);
    Xy d;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = r.uniform(0.0, 1.0);
        const double x1 = r.uniform(0.0, 1.0);
        const double x2 = r.uniform(0.0, 1.0);
        d.rows.push_back({x0, x1, x2});
        d.y.push_back(2.0 + 3.0 * x0 - 1.5 * x1 + noise_sd * r.normal());
    }
    return d;
}

Xy bumpy_data(std::size_t n, std::uint64_t seed) {
    gpncast::Rng r(seed);
    Xy d;
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = r.uniform(0.0, 1.0);
        const double x1 = r.uniform(0.0, 1.0);
        d.rows.push_back({x0, x1});
        d.y.push_back(std::sin(6.0 * x0) + 0.5 * x1 * x1 + 0.05 * r.normal());
    }
    return d;
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("ols recovers exact coefficients from noiseless data") {
    const auto d = linear_data(60, 0.0, 1);
    const auto fit = gpncast::fit_ols(d.rows, d.y, {"X0", "X1", "X2"});
    REQUIRE_THAT(fit.intercept, WithinAbs(2.0, 1e-9));
    REQUIRE_THAT(fit.coef[0], WithinAbs(3.0, 1e-9));
    REQUIRE_THAT(fit.coef[1], WithinAbs(-1.5, 1e-9));
    REQUIRE_THAT(fit.coef[2], WithinAbs(0.0, 1e-9));
    REQUIRE_THAT(fit.r_squared, WithinAbs(1.0, 1e-12));
}

TEST_CASE("ols p-values separate signal from noise") {
    const auto d = linear_data(400, 0.25, 2);
    const auto fit = gpncast::fit_ols(d.rows, d.y, {"X0", "X1", "X2"});
    REQUIRE(fit.p_value[0] < 1e-6);   // strong signal
    REQUIRE(fit.p_value[1] < 1e-6);
    REQUIRE(fit.p_value[2] > 0.01);   // pure noise
    REQUIRE(fit.r_squared > 0.7);
    REQUIRE(fit.r_squared < 1.0);
}

TEST_CASE("ols input validation") {
    REQUIRE_THROWS_AS(gpncast::fit_ols({}, {}, {"X"}),
                      gpncast::ValidationError);
    // more columns than rows can support
    REQUIRE_THROWS_AS(
        gpncast::fit_ols({{1.0, 2.0}, {2.0, 1.0}}, {1.0, 2.0}, {"A", "B"}),
        gpncast::ValidationError);
    REQUIRE_THROWS_AS(
        gpncast::fit_ols({{1.0}, {2.0}, {3.0}}, {1.0, 2.0}, {"A"}),
        gpncast::ValidationError);
}

TEST_CASE("ols drops exactly collinear columns instead of failing") {
    auto d = linear_data(80, 0.1, 3);
    for (auto& row : d.rows) row.push_back(2.0 * row[0]);  // X3 = 2*X0
    const auto fit = gpncast::fit_ols(d.rows, d.y, {"X0", "X1", "X2", "X3"});
    REQUIRE(fit.dropped_collinear == std::vector<std::string>{"X3"});
    REQUIRE(fit.coef.size() == 3);
    REQUIRE_THAT(fit.coef[0], WithinAbs(3.0, 0.2));
}

TEST_CASE("stepwise elimination keeps the real predictors") {
    const auto d = linear_data(400, 0.25, 5);
    const auto res = gpncast::fit_stepwise(d.rows, d.y, {"X0", "X1", "X2"});
    REQUIRE(res.select_list == std::vector<std::string>{"X0", "X1"});
    REQUIRE(res.eliminated == std::vector<std::string>{"X2"});
    REQUIRE(res.rounds == 2);
    REQUIRE_THAT(res.model.coef[0], WithinAbs(3.0, 0.15));
    REQUIRE_THAT(res.model.coef[1], WithinAbs(-1.5, 0.15));
    // the final refit carries only significant slopes
    for (double p : res.model.p_value) REQUIRE(p <= 0.05);
}

TEST_CASE("stepwise on a pure-noise target collapses to the intercept") {
    gpncast::Rng r(7);
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int i = 0; i < 200; ++i) {
        rows.push_back({r.uniform(0.0, 1.0), r.uniform(0.0, 1.0)});
        y.push_back(42.0);  // constant target: nothing can be significant
    }
    const auto res = gpncast::fit_stepwise(rows, y, {"A", "B"});
    REQUIRE(res.select_list.empty());
    REQUIRE(res.model.coef.empty());
    REQUIRE_THAT(res.model.intercept, WithinAbs(42.0, 1e-9));
}

TEST_CASE("stepwise model artifact predicts and round-trips") {
    const auto d = linear_data(300, 0.2, 11);
    const auto res = gpncast::fit_stepwise(d.rows, d.y, {"X0", "X1", "X2"});

    gpncast::FeatureMatrix m;
    m.column_names = {"X0", "X1", "X2"};
    m.rows = d.rows;
    m.target = d.y;
    m.schema_fingerprint = "fp-test";
    const auto model = gpncast::make_stepwise_model(res, m, 99);
    const auto pred = model.predict_ms(m);
    REQUIRE(pred.size() == d.y.size());
    REQUIRE(mse(pred, d.y) < 0.1);

    const auto path = std::filesystem::temp_directory_path() /
                      "gpncast_stepwise_test.json";
    model.save(path.string());
    const auto back = gpncast::TrainedModel::load(path.string());
    std::filesystem::remove(path);
    REQUIRE(back.algorithm == gpncast::Algorithm::Stepwise);
    REQUIRE(back.details == "Backward Elimination");
    REQUIRE(back.columns == model.columns);
    const auto pred2 = back.predict_ms(m);
    for (std::size_t i = 0; i < pred.size(); ++i)
        REQUIRE(pred[i] == pred2[i]);

    // fingerprint mismatch is refused
    gpncast::FeatureMatrix wrong = m;
    wrong.schema_fingerprint = "fp-other";
    REQUIRE_THROWS_AS(model.predict_ms(wrong), gpncast::ValidationError);
}

TEST_CASE("random forest is deterministic per seed") {
    const auto d = bumpy_data(400, 13);
    gpncast::ForestConfig cfg;
    cfg.n_estimators = 30;
    cfg.seed = 5;
    const auto f1 = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    const auto f2 = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    const auto probe = bumpy_data(50, 14);
    REQUIRE(f1.predict(probe.rows) == f2.predict(probe.rows));

    cfg.seed = 6;
    const auto f3 = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    REQUIRE(f1.predict(probe.rows) != f3.predict(probe.rows));
}

TEST_CASE("forest prediction is the mean over its trees") {
    const auto d = bumpy_data(200, 17);
    gpncast::ForestConfig cfg;
    cfg.n_estimators = 7;
    cfg.seed = 3;
    const auto f = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    REQUIRE(f.trees.size() == 7);
    const std::vector<double> row = {0.3, 0.6};
    double sum = 0.0;
    for (const auto& t : f.trees) sum += t.predict_row(row);
    REQUIRE_THAT(f.predict_row(row), WithinAbs(sum / 7.0, 1e-12));
}

TEST_CASE("forest fits the training signal and stays finite") {
    const auto d = bumpy_data(500, 19);
    gpncast::ForestConfig cfg;
    cfg.n_estimators = 60;
    cfg.seed = 1;
    const auto f = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    const auto in_sample = f.predict(d.rows);
    REQUIRE(mse(in_sample, d.y) < 0.05);
    for (double p : in_sample) REQUIRE(std::isfinite(p));

    // held-out error is worse than in-sample but still sane
    const auto held = bumpy_data(300, 20);
    const auto out = f.predict(held.rows);
    for (double p : out) REQUIRE(std::isfinite(p));
    REQUIRE(mse(out, held.y) < 0.2);
}

TEST_CASE("forest respects depth and leaf-size limits") {
    const auto d = bumpy_data(300, 23);
    gpncast::ForestConfig cfg;
    cfg.n_estimators = 5;
    cfg.max_depth = 2;
    cfg.seed = 9;
    const auto shallow = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    for (const auto& t : shallow.trees)
        REQUIRE(t.feature.size() <= 7);  // depth-2 binary tree: at most 7 nodes

    cfg.max_depth = 0;
    cfg.min_samples_leaf = 50;
    const auto chunky = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    // with 300-sample bootstraps and 50-per-leaf, trees stay tiny
    for (const auto& t : chunky.trees) REQUIRE(t.feature.size() <= 15);
}

TEST_CASE("forest json round trip preserves predictions exactly") {
    const auto d = bumpy_data(150, 29);
    gpncast::ForestConfig cfg;
    cfg.n_estimators = 10;
    cfg.seed = 2;
    const auto f = gpncast::RandomForest::fit(d.rows, d.y, cfg);
    const auto back = gpncast::RandomForest::from_json(
        nlohmann::json::parse(f.to_json().dump()));
    const auto probe = bumpy_data(40, 30);
    REQUIRE(f.predict(probe.rows) == back.predict(probe.rows));
    REQUIRE(back.config.n_estimators == 10);
}

TEST_CASE("mlp analytic gradient matches finite differences") {
    const auto d = bumpy_data(40, 31);
    gpncast::MlpConfig cfg;
    cfg.hidden = {6, 4};
    cfg.seed = 8;
    auto net = gpncast::Mlp::init(2, cfg);

    std::vector<std::size_t> batch;
    for (std::size_t i = 0; i < d.rows.size(); ++i) batch.push_back(i);
    auto params = net.get_params();
    std::vector<double> grad(params.size());
    net.loss_and_grad(d.rows, d.y, batch, grad);

    gpncast::Rng pick(33);
    const double h = 1e-6;
    for (int probe = 0; probe < 25; ++probe) {
        const auto k = pick.below(params.size());
        auto up = params, down = params;
        up[k] += h;
        down[k] -= h;
        std::vector<double> scratch(params.size());
        net.set_params(up);
        const double lu = net.loss_and_grad(d.rows, d.y, batch, scratch);
        net.set_params(down);
        const double ld = net.loss_and_grad(d.rows, d.y, batch, scratch);
        const double fd = (lu - ld) / (2.0 * h);
        REQUIRE_THAT(grad[k], WithinAbs(fd, 1e-4 * std::max(1.0, std::abs(fd))));
        net.set_params(params);
    }
}

TEST_CASE("mlp training reduces the loss and is seed-deterministic") {
    const auto d = bumpy_data(300, 37);
    gpncast::MlpConfig cfg;
    cfg.hidden = {16, 8};
    cfg.epochs = 40;
    cfg.batch_size = 32;
    cfg.seed = 4;
    const auto net = gpncast::Mlp::fit(d.rows, d.y, cfg);
    REQUIRE(net.loss_curve.size() == 40);
    REQUIRE(net.loss_curve.back() < 0.5 * net.loss_curve.front());
    for (double l : net.loss_curve) REQUIRE(std::isfinite(l));

    const auto net2 = gpncast::Mlp::fit(d.rows, d.y, cfg);
    REQUIRE(net.predict(d.rows) == net2.predict(d.rows));

    cfg.seed = 5;
    const auto net3 = gpncast::Mlp::fit(d.rows, d.y, cfg);
    REQUIRE(net.predict(d.rows) != net3.predict(d.rows));
}

TEST_CASE("mlp json round trip preserves predictions exactly") {
    const auto d = bumpy_data(120, 41);
    gpncast::MlpConfig cfg;
    cfg.hidden = {8};
    cfg.epochs = 10;
    cfg.seed = 21;
    const auto net = gpncast::Mlp::fit(d.rows, d.y, cfg);
    const auto back =
        gpncast::Mlp::from_json(nlohmann::json::parse(net.to_json().dump()));
    const auto probe = bumpy_data(30, 42);
    REQUIRE(net.predict(probe.rows) == back.predict(probe.rows));
    REQUIRE(back.widths == net.widths);
}

TEST_CASE("svr toy problem matches the frozen dual-solver oracle") {
    // X = {0, 1, 2}, y = {0, 1, 0}, C = 10, epsilon = 0.1, gamma = 1.
    // Reference values come from an interior-point solve of the dense dual QP.
    const std::vector<std::vector<double>> X = {{0.0}, {1.0}, {2.0}};
    const std::vector<double> y = {0.0, 1.0, 0.0};
    gpncast::SvrConfig cfg;
    cfg.c = 10.0;
    cfg.epsilon = 0.1;
    cfg.gamma = 1.0;
    cfg.tol = 1e-6;
    const auto m = gpncast::Svr::fit(X, y, cfg);

    // beta = alpha - alpha*, one per training point
    const std::vector<double> beta_ref = {-0.517197504228, 1.034395008456,
                                          -0.517197504228};
    std::vector<double> beta(3, 0.0);
    for (std::size_t i = 0; i < 3; ++i) beta[i] = m.alpha[i] - m.alpha_star[i];
    for (std::size_t i = 0; i < 3; ++i)
        REQUIRE_THAT(beta[i], WithinAbs(beta_ref[i], 1e-3));
    REQUIRE_THAT(m.bias, WithinAbs(0.246137649247, 1e-3));

    // all three points end exactly on the epsilon tube
    const auto pred = m.predict(X);
    REQUIRE_THAT(pred[0], WithinAbs(0.1, 1e-3));
    REQUIRE_THAT(pred[1], WithinAbs(0.9, 1e-3));
    REQUIRE_THAT(pred[2], WithinAbs(0.1, 1e-3));
    REQUIRE_THAT(m.predict_row({0.5}), WithinAbs(0.594419254651, 1e-3));

    const auto kkt = m.audit_kkt(X, y);
    REQUIRE(kkt.duals_in_box);
    REQUIRE(kkt.max_violation <= 1e-3);
    REQUIRE(kkt.max_pair_product <= 1e-9);
}

TEST_CASE("svr on a constant target is bias only") {
    const std::vector<std::vector<double>> X = {{0.0}, {0.5}, {1.0}, {1.5}};
    const std::vector<double> y = {3.0, 3.0, 3.0, 3.0};
    const auto m = gpncast::Svr::fit(X, y);
    // everything fits strictly inside the epsilon tube: no support vectors
    REQUIRE(m.support_vectors.empty());
    REQUIRE_THAT(m.bias, WithinAbs(3.0, 1e-9));
    REQUIRE_THAT(m.predict_row({0.75}), WithinAbs(3.0, 1e-9));
}

TEST_CASE("svr scale gamma follows the feature-variance convention") {
    const std::vector<std::vector<double>> rows = {{0.0, 0.0}, {1.0, 1.0}};
    // entries {0,0,1,1}: mean 0.5, population variance 0.25; d = 2
    REQUIRE_THAT(gpncast::svr_scale_gamma(rows),
                 WithinAbs(1.0 / (2.0 * 0.25), 1e-12));
    // constant matrix falls back to 1/d
    REQUIRE_THAT(gpncast::svr_scale_gamma({{2.0, 2.0}, {2.0, 2.0}}),
                 WithinAbs(0.5, 1e-12));
}

TEST_CASE("svr satisfies kkt within tolerance on a real-shaped problem") {
    const auto d = bumpy_data(150, 43);
    gpncast::SvrConfig cfg;
    cfg.tol = 1e-3;
    const auto m = gpncast::Svr::fit(d.rows, d.y, cfg);
    const auto kkt = m.audit_kkt(d.rows, d.y);
    REQUIRE(kkt.duals_in_box);
    REQUIRE(kkt.max_violation <= 1e-3);
    REQUIRE(kkt.max_pair_product <= 1e-9);
    REQUIRE(m.iterations > 0);

    // in-sample fit is close and finite
    const auto pred = m.predict(d.rows);
    REQUIRE(mse(pred, d.y) < 0.1);
}

TEST_CASE("svr json round trip preserves predictions exactly") {
    const auto d = bumpy_data(80, 47);
    const auto m = gpncast::Svr::fit(d.rows, d.y);
    const auto back =
        gpncast::Svr::from_json(nlohmann::json::parse(m.to_json().dump()));
    const auto probe = bumpy_data(20, 48);
    REQUIRE(m.predict(probe.rows) == back.predict(probe.rows));
    REQUIRE(back.gamma == m.gamma);
    REQUIRE(back.bias == m.bias);
}

TEST_CASE("trained model wrapper routes each algorithm and unit") {
    const auto d = bumpy_data(100, 53);
    gpncast::FeatureMatrix m;
    m.column_names = {"A", "B"};
    m.rows = d.rows;
    m.target = d.y;
    m.schema_fingerprint = "fp";

    gpncast::TrainedModel rf;
    rf.algorithm = gpncast::Algorithm::RandomForest;
    rf.schema_fingerprint = "fp";
    rf.columns = {"A", "B"};
    gpncast::ForestConfig fc;
    fc.n_estimators = 5;
    rf.forest = gpncast::RandomForest::fit(d.rows, d.y, fc);
    REQUIRE(rf.predict_ms(m).size() == 100);

    // natural-log models exponentiate on the way out
    std::vector<double> log_y;
    for (double v : d.y) log_y.push_back(std::log(v + 3.0));
    gpncast::TrainedModel lnm;
    lnm.algorithm = gpncast::Algorithm::RandomForest;
    lnm.schema_fingerprint = "fp";
    lnm.columns = {"A", "B"};
    lnm.target_transform = gpncast::TargetTransform::NaturalLog;
    lnm.forest = gpncast::RandomForest::fit(d.rows, log_y, fc);
    const auto raw = lnm.raw_predict(m);
    const auto ms = lnm.predict_ms(m);
    for (std::size_t i = 0; i < ms.size(); ++i)
        REQUIRE_THAT(ms[i], WithinAbs(std::exp(raw[i]), 1e-12));

    REQUIRE(std::string(gpncast::algorithm_tag(rf.algorithm)) ==
            "random-forest");
    REQUIRE(gpncast::parse_algorithm("svr") ==
            gpncast::Algorithm::SvrMachine);
    REQUIRE_THROWS_AS(gpncast::parse_algorithm("boosting"),
                      gpncast::ValidationError);
}
