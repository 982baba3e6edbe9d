// Error metrics, latency buckets and leaderboard assembly.
#include <catch2/catch_amalgamated.hpp>

#include <gpncast/evaluation.hpp>
#include <gpncast/model.hpp>
#include <gpncast/rng.hpp>

#include <cmath>
#include <string>
#include <vector>

using Catch::Matchers::WithinAbs;

TEST_CASE("rmse matches the hand-computed oracle") {
    // errors {10, -20, 5, 15}: sqrt((100+400+25+225)/4) = sqrt(187.5)
    const std::vector<double> pred{110.0, 80.0, 55.0, 215.0};
    const std::vector<double> actual{100.0, 100.0, 50.0, 200.0};
    REQUIRE_THAT(gpncast::rmse(pred, actual),
                 WithinAbs(13.693063937629153, 1e-12));
    REQUIRE(gpncast::rmse(actual, actual) == 0.0);
}

TEST_CASE("mape matches the hand-computed oracle") {
    // |rel errors| {0.1, 0.2, 0.1, 0.075} -> mean 0.11875 -> 11.875%
    const std::vector<double> pred{110.0, 80.0, 55.0, 215.0};
    const std::vector<double> actual{100.0, 100.0, 50.0, 200.0};
    REQUIRE_THAT(gpncast::mape(pred, actual), WithinAbs(11.875, 1e-12));
    // uniform 10% over-prediction
    REQUIRE_THAT(gpncast::mape({110.0, 55.0}, {100.0, 50.0}),
                 WithinAbs(10.0, 1e-12));
}

TEST_CASE("metrics reject malformed and zero-actual inputs") {
    REQUIRE_THROWS_AS(gpncast::rmse({}, {}), gpncast::ValidationError);
    REQUIRE_THROWS_AS(gpncast::rmse({1.0}, {1.0, 2.0}),
                      gpncast::ValidationError);
    REQUIRE_THROWS_AS(gpncast::mape({1.0}, {0.0}), gpncast::ValidationError);
    REQUIRE_THROWS_AS(gpncast::mape({1.0, 2.0}, {3.0, 0.0}),
                      gpncast::ValidationError);
}

TEST_CASE("latency buckets have upper-inclusive edges") {
    REQUIRE(gpncast::latency_bucket(0.5) == "0-5ms");
    REQUIRE(gpncast::latency_bucket(5.0) == "0-5ms");
    REQUIRE(gpncast::latency_bucket(5.0001) == "5-50ms");
    REQUIRE(gpncast::latency_bucket(50.0) == "5-50ms");
    REQUIRE(gpncast::latency_bucket(50.1) == "50-200ms");
    REQUIRE(gpncast::latency_bucket(200.0) == "50-200ms");
    REQUIRE(gpncast::latency_bucket(200.1) == ">200ms");
    REQUIRE(gpncast::latency_bucket(5000.0) == ">200ms");
    REQUIRE_THROWS_AS(gpncast::latency_bucket(0.0), gpncast::ValidationError);
    REQUIRE_THROWS_AS(gpncast::latency_bucket(-3.0), gpncast::ValidationError);
    REQUIRE(gpncast::latency_bucket_labels().size() == 4);
}

namespace {

// A tiny deterministic setup: two constant-prediction stand-ins built as
// stepwise artifacts (intercept only), one per unit space.
struct Fixture {
    gpncast::FeatureMatrix test_ms;
    gpncast::FeatureMatrix test_ln;
    gpncast::TrainedModel good_ms;   // predicts 100, actual 100 +/- small
    gpncast::TrainedModel rough_ms;  // predicts 130
    gpncast::TrainedModel model_ln;  // log-space intercept model

    Fixture() {
        test_ms.column_names = {"X"};
        test_ms.schema_fingerprint = "fp-ms";
        for (int i = 0; i < 8; ++i) {
            test_ms.rows.push_back({0.0});
            test_ms.target.push_back(i % 2 == 0 ? 98.0 : 102.0);
        }
        test_ln = test_ms;
        test_ln.schema_fingerprint = "fp-ln";
        test_ln.target_transform = gpncast::TargetTransform::NaturalLog;
        for (auto& t : test_ln.target) t = std::log(t);

        const auto intercept_model = [](double value, const std::string& fp,
                                        gpncast::TargetTransform tt) {
            gpncast::TrainedModel m;
            m.algorithm = gpncast::Algorithm::Stepwise;
            m.details = "Backward Elimination";
            m.feature_option = "All";
            m.schema_fingerprint = fp;
            m.target_transform = tt;
            m.linear.intercept = value;
            return m;
        };
        good_ms = intercept_model(100.0, "fp-ms",
                                  gpncast::TargetTransform::Identity);
        rough_ms = intercept_model(130.0, "fp-ms",
                                   gpncast::TargetTransform::Identity);
        model_ln = intercept_model(std::log(100.0), "fp-ln",
                                   gpncast::TargetTransform::NaturalLog);
    }
};

}  // namespace

TEST_CASE("leaderboard ranks by mape within unit groups") {
    Fixture f;
    // deliberately enter the worse model first: sorting must fix the order
    const std::vector<gpncast::LeaderboardEntry> entries = {
        {&f.rough_ms, &f.test_ms},
        {&f.model_ln, &f.test_ln},
        {&f.good_ms, &f.test_ms},
    };
    gpncast::SplitDescriptor split;
    split.seed = 42;
    split.train_rows = 12;
    split.test_rows = 8;
    const auto report = gpncast::leaderboard(entries, split);
    REQUIRE(report.rows.size() == 3);

    // predicting 100 against {98, 102}: mean of 2/98 and 2/102, as percent
    const double expect_mape = 100.0 * (2.0 / 98.0 + 2.0 / 102.0) / 2.0;

    // ms group first, sorted by MAPE; the ln(ms) group follows
    REQUIRE(report.rows[0].unit == "ms");
    REQUIRE(report.rows[0].algorithm == "stepwise-regression");
    REQUIRE_THAT(report.rows[0].mape, WithinAbs(expect_mape, 1e-12));
    REQUIRE(report.rows[1].unit == "ms");
    REQUIRE(report.rows[1].mape > 25.0);
    REQUIRE(report.rows[2].unit == "ln(ms)");

    // the log row carries a back-transformed ms MAPE distinct from its own
    const auto& ln_row = report.rows[2];
    REQUIRE(ln_row.mape < 1.0);      // log-space percentages are tiny
    REQUIRE_THAT(ln_row.mape_ms, WithinAbs(expect_mape, 1e-12));
    // ms rows duplicate mape into mape_ms
    REQUIRE(report.rows[0].mape_ms == report.rows[0].mape);

    REQUIRE(report.split.seed == 42);
    REQUIRE(report.split.test_rows == 8);
}

TEST_CASE("leaderboard rejects mismatched unit pairings and null entries") {
    Fixture f;
    // ms model against a log test matrix
    REQUIRE_THROWS_AS(
        gpncast::leaderboard({{&f.good_ms, &f.test_ln}}),
        gpncast::ValidationError);
    REQUIRE_THROWS_AS(gpncast::leaderboard({{nullptr, &f.test_ms}}),
                      gpncast::ValidationError);
    REQUIRE_THROWS_AS(gpncast::leaderboard({{&f.good_ms, nullptr}}),
                      gpncast::ValidationError);
    // fingerprint mismatch surfaces from prediction
    gpncast::FeatureMatrix other = f.test_ms;
    other.schema_fingerprint = "fp-other";
    REQUIRE_THROWS_AS(gpncast::leaderboard({{&f.good_ms, &other}}),
                      gpncast::ValidationError);
}

TEST_CASE("csv rendering carries all leaderboard columns") {
    Fixture f;
    const auto report =
        gpncast::leaderboard({{&f.good_ms, &f.test_ms}});
    const auto t = gpncast::eval_report_csv(report);
    REQUIRE(t.header ==
            std::vector<std::string>{"algorithm", "feature", "model_details",
                                     "unit", "rmse", "mape_pct", "mape_ms_pct"});
    REQUIRE(t.rows.size() == 1);
    REQUIRE(t.rows[0][0] == "stepwise-regression");
    REQUIRE(t.rows[0][1] == "All");
    REQUIRE(t.rows[0][2] == "Backward Elimination");
    REQUIRE(t.rows[0][3] == "ms");
    REQUIRE(gpncast::parse_double(t.rows[0][5]) ==
            Catch::Approx(100.0 * (2.0 / 98.0 + 2.0 / 102.0) / 2.0)
                .margin(1e-9));
}

TEST_CASE("markdown rendering annotates log rows with the ms mape") {
    Fixture f;
    const auto report = gpncast::leaderboard(
        {{&f.good_ms, &f.test_ms}, {&f.model_ln, &f.test_ln}});
    const auto md = gpncast::eval_report_markdown(report);
    REQUIRE(md.find("| Algorithm | Feature | Model Details | Unit | RMSE | MAPE |") !=
            std::string::npos);
    REQUIRE(md.find("ln(ms)") != std::string::npos);
    REQUIRE(md.find("in ms)") != std::string::npos);  // back-transform note
    REQUIRE(md.find("Split: seed") != std::string::npos);
    // the plain ms row has no annotation suffix
    const auto ms_line = md.find("| ms |");
    REQUIRE(ms_line != std::string::npos);
    const auto eol = md.find('\n', ms_line);
    REQUIRE(md.substr(ms_line, eol - ms_line).find("in ms)") ==
            std::string::npos);
}
