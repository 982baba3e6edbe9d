// End-to-end checks that drive the installed CLI binary through popen. The
// binary path arrives via the GPNCAST_CLI environment variable set by CTest,
// so these tests exercise exactly what a user would run, exit codes included.
#include <catch2/catch_amalgamated.hpp>

#include <gpncast/csv.hpp>
#include <gpncast/evaluation.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using namespace gpncast;

namespace {

std::string cli_path() {
    const char* p = std::getenv("GPNCAST_CLI");
    REQUIRE(p != nullptr);
    REQUIRE(fs::exists(p));
    return p;
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved

    bool contains(const std::string& needle) const {
        return output.find(needle) != std::string::npos;
    }
};

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

CliResult run_cli(const std::vector<std::string>& args) {
    std::string cmd = shell_quote(cli_path());
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>&1";

    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult res;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        res.output.append(buf, n);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gpncast_it_" + std::to_string(::getpid()) + "_" +
                std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string sub(const std::string& name) const {
        return (path / name).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& path) {
    const std::string text = slurp(path);
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("help, version and usage errors map to the right exit codes") {
    auto help = run_cli({"--help"});
    CHECK(help.exit_code == 0);
    CHECK(help.contains("synth"));
    CHECK(help.contains("train"));
    CHECK(help.contains("evaluate"));

    auto version = run_cli({"--version"});
    CHECK(version.exit_code == 0);

    // no subcommand at all
    CHECK(run_cli({}).exit_code == 2);

    // unknown subcommand
    CHECK(run_cli({"frobnicate"}).exit_code == 2);

    // missing required option
    auto missing = run_cli({"synth", "--rows", "10"});
    CHECK(missing.exit_code == 2);
    CHECK(missing.contains("--out"));

    // subcommand help still exits 0
    CHECK(run_cli({"train", "--help"}).exit_code == 0);
}

TEST_CASE("pipeline errors exit with code 1 and a prefixed message") {
    TempDir tmp;
    auto res = run_cli({"ingest", "--raw", tmp.sub("does_not_exist.csv"),
                        "--warehouse", tmp.sub("wh")});
    CHECK(res.exit_code == 1);
    CHECK(res.contains("gpncast ingest: error:"));
}

TEST_CASE("full pipeline: synth -> ingest -> schema -> train -> evaluate -> qoe") {
    TempDir tmp;
    const std::string raw = tmp.sub("raw");
    const std::string wh = tmp.sub("wh");
    const std::string models = tmp.sub("models");
    const std::string models_log = tmp.sub("models_log");
    const std::string type_map = raw + "/type_map.csv";

    // --- synth with injected rejects over two files
    auto synth = run_cli({"synth", "--out", raw, "--rows", "400", "--seed", "7",
                          "--files", "2", "--inject-rejects",
                          "--rejects-per-reason", "3"});
    REQUIRE(synth.exit_code == 0);
    const std::string part1 = raw + "/sessions_2020-07_part1.csv";
    const std::string part2 = raw + "/sessions_2020-07_part2.csv";
    REQUIRE(fs::exists(part1));
    REQUIRE(fs::exists(part2));
    REQUIRE(fs::exists(type_map));
    REQUIRE(fs::exists(raw + "/expected_rejects.csv"));
    // 400 clean rows + 15 injected + 2 headers
    CHECK(line_count(part1) + line_count(part2) == 417);

    // --- ingest both parts
    auto ingest = run_cli({"ingest", "--raw", part1, "--raw", part2,
                           "--warehouse", wh});
    REQUIRE(ingest.exit_code == 0);
    REQUIRE(fs::exists(wh + "/session_fact.csv"));
    REQUIRE(fs::exists(wh + "/client_dim.csv"));
    REQUIRE(fs::exists(wh + "/server_dim.csv"));
    REQUIRE(fs::exists(wh + "/calendar_dim.csv"));
    REQUIRE(fs::exists(wh + "/rejects.csv"));
    CHECK(line_count(wh + "/session_fact.csv") == 401);  // header + clean rows
    CHECK(line_count(wh + "/rejects.csv") == 16);  // header + 5 reasons x 3

    // --- schemas for both target transforms
    const std::string schema_raw = tmp.sub("schema_raw.json");
    const std::string schema_log = tmp.sub("schema_log.json");
    REQUIRE(run_cli({"fit-schema", "--warehouse", wh, "--out", schema_raw,
                     "--target", "raw"})
                .exit_code == 0);
    REQUIRE(run_cli({"fit-schema", "--warehouse", wh, "--out", schema_log,
                     "--target", "log"})
                .exit_code == 0);
    REQUIRE(fs::exists(schema_raw));
    REQUIRE(fs::exists(schema_log));

    // --- benchmark suite on the raw-target schema (small settings)
    auto train = run_cli({"train", "--warehouse", wh, "--schema", schema_raw,
                          "--type-map", type_map, "--out-dir", models,
                          "--algo", "suite", "--seed", "11", "--trees", "25",
                          "--hidden", "16,8", "--epochs", "8", "--batch", "32"});
    REQUIRE(train.exit_code == 0);
    for (const char* name : {"stepwise_all.json", "rf_all.json",
                             "rf_select.json", "mlp_select.json",
                             "svr_all.json", "select_list.txt"})
        REQUIRE(fs::exists(models + "/" + name));

    // --- one extra forest under the log-target schema, copied into the same
    // model directory so the leaderboard mixes both transforms
    REQUIRE(run_cli({"train", "--warehouse", wh, "--schema", schema_log,
                     "--type-map", type_map, "--out-dir", models_log,
                     "--algo", "rf", "--features", "all", "--seed", "11",
                     "--trees", "25"})
                .exit_code == 0);
    fs::copy_file(models_log + "/rf_all.json", models + "/rf_log.json");

    // --- evaluate against both schemas at once
    const std::string eval_dir = tmp.sub("eval");
    auto eval = run_cli({"evaluate", "--warehouse", wh, "--schema", schema_raw,
                         "--schema", schema_log, "--type-map", type_map,
                         "--models-dir", models, "--out-dir", eval_dir});
    REQUIRE(eval.exit_code == 0);
    REQUIRE(fs::exists(eval_dir + "/leaderboard.csv"));
    REQUIRE(fs::exists(eval_dir + "/leaderboard.md"));
    REQUIRE(fs::exists(eval_dir + "/leaderboard.svg"));

    const CsvTable board = read_csv(eval_dir + "/leaderboard.csv");
    REQUIRE(board.header == std::vector<std::string>{
                                "algorithm", "feature", "model_details", "unit",
                                "rmse", "mape_pct", "mape_ms_pct"});
    REQUIRE(board.rows.size() == 6);  // 5 suite models + the log forest

    // millisecond-unit rows come first, then the log rows; mape ascends
    // within the leading group
    std::vector<std::size_t> ms_rows, ln_rows;
    for (std::size_t i = 0; i < board.rows.size(); ++i) {
        const std::string& unit = board.rows[i][3];
        REQUIRE((unit == "ms" || unit == "ln(ms)"));
        (unit == "ms" ? ms_rows : ln_rows).push_back(i);
    }
    CHECK(ms_rows.size() == 5);
    CHECK(ln_rows.size() == 1);
    CHECK(ln_rows.front() == 5);  // log row ranked after every ms row
    for (std::size_t k = 1; k < ms_rows.size(); ++k) {
        const double prev = std::stod(board.rows[ms_rows[k - 1]][5]);
        const double cur = std::stod(board.rows[ms_rows[k]][5]);
        CHECK(prev <= cur);
    }
    for (const auto& row : board.rows) {
        CHECK(std::stod(row[4]) > 0.0);   // rmse
        CHECK(std::stod(row[6]) > 0.0);   // mape in ms terms
    }
    const std::string board_md = slurp(eval_dir + "/leaderboard.md");
    CHECK(board_md.find("| Algorithm |") != std::string::npos);
    CHECK(board_md.find("ln(ms)") != std::string::npos);
    CHECK(board_md.find("% in ms)") != std::string::npos);
    CHECK(board_md.find("Split: seed") != std::string::npos);

    // --- genre artifacts
    const std::string genres_dir = tmp.sub("genres");
    REQUIRE(run_cli({"genres", "--type-map", type_map, "--warehouse", wh,
                     "--out-dir", genres_dir})
                .exit_code == 0);
    REQUIRE(fs::exists(genres_dir + "/type_distribution.csv"));
    REQUIRE(fs::exists(genres_dir + "/lattice_edges.csv"));
    const CsvTable edges = read_csv(genres_dir + "/lattice_edges.csv");
    REQUIRE(edges.header == std::vector<std::string>{"subset", "superset"});
    CHECK(edges.rows.size() > 0);

    const CsvTable dist = read_csv(genres_dir + "/type_distribution.csv");
    double pct_total = 0.0;
    for (const auto& row : dist.rows) pct_total += std::stod(row.back());
    CHECK_THAT(pct_total, Catch::Matchers::WithinAbs(100.0, 1e-6));

    // --- QoE league
    const std::string qoe_dir = tmp.sub("qoe");
    REQUIRE(run_cli({"qoe", "--warehouse", wh, "--type-map", type_map,
                     "--out-dir", qoe_dir})
                .exit_code == 0);
    REQUIRE(fs::exists(qoe_dir + "/qoe_league.csv"));
    const CsvTable league = read_csv(qoe_dir + "/qoe_league.csv");
    REQUIRE(league.rows.size() > 0);
    for (const auto& row : league.rows) {
        // every score column must be a positive finite number
        for (std::size_t c = row.size() - 3; c < row.size(); ++c)
            CHECK(std::stod(row[c]) > 0.0);
    }

    // --- predictions for every warehouse row
    const std::string pred = tmp.sub("pred.csv");
    REQUIRE(run_cli({"predict", "--warehouse", wh, "--schema", schema_raw,
                     "--type-map", type_map, "--model", models + "/rf_all.json",
                     "--out", pred})
                .exit_code == 0);
    const CsvTable pt = read_csv(pred);
    REQUIRE(pt.header == std::vector<std::string>{"row", "predicted_gpn_ping_ms",
                                                 "actual_gpn_ping_ms"});
    REQUIRE(pt.rows.size() == 400);
    for (const auto& row : pt.rows) CHECK(std::stod(row[1]) > 0.0);

    // --- wrong schema for the model is refused, not silently mispredicted
    auto mismatch = run_cli({"predict", "--warehouse", wh, "--schema",
                             schema_log, "--type-map", type_map, "--model",
                             models + "/rf_all.json", "--out",
                             tmp.sub("bad.csv")});
    CHECK(mismatch.exit_code == 1);
    CHECK(mismatch.contains("fingerprint"));

    // --- combined report bundles every artifact family
    const std::string report_dir = tmp.sub("report");
    REQUIRE(run_cli({"report", "--warehouse", wh, "--schema", schema_raw,
                     "--schema", schema_log, "--type-map", type_map,
                     "--models-dir", models, "--out-dir", report_dir})
                .exit_code == 0);
    for (const char* name :
         {"report.md", "leaderboard.csv", "leaderboard.md", "leaderboard.svg",
          "type_distribution.csv", "type_distribution.md",
          "type_distribution.svg", "latency_buckets.csv", "latency_buckets.md",
          "latency_buckets.svg", "qoe_league.csv", "qoe_league.md",
          "qoe_league.svg"})
        REQUIRE(fs::exists(report_dir + "/" + name));
}

TEST_CASE("config file supplies defaults that explicit flags override") {
    TempDir tmp;
    const std::string cfg = tmp.sub("gpncast.ini");
    {
        std::ofstream out(cfg);
        out << "[synth]\nrows=25\nseed=9\nfiles=1\n";
    }

    const std::string a = tmp.sub("a");
    REQUIRE(run_cli({"--config", cfg, "synth", "--out", a}).exit_code == 0);
    CHECK(line_count(a + "/sessions_2020-07_part1.csv") == 26);

    const std::string b = tmp.sub("b");
    REQUIRE(run_cli({"--config", cfg, "synth", "--out", b, "--rows", "12"})
                .exit_code == 0);
    CHECK(line_count(b + "/sessions_2020-07_part1.csv") == 13);
}

TEST_CASE("same seed produces byte-identical corpus files across runs") {
    TempDir tmp;
    const std::string a = tmp.sub("a");
    const std::string b = tmp.sub("b");
    for (const auto& dir : {a, b})
        REQUIRE(run_cli({"synth", "--out", dir, "--rows", "120", "--seed",
                         "404", "--files", "2"})
                    .exit_code == 0);
    for (const char* name : {"sessions_2020-07_part1.csv",
                             "sessions_2020-07_part2.csv", "type_map.csv"})
        CHECK(slurp(a + "/" + name) == slurp(b + "/" + name));

    const std::string c = tmp.sub("c");
    REQUIRE(run_cli({"synth", "--out", c, "--rows", "120", "--seed", "405",
                     "--files", "2"})
                .exit_code == 0);
    CHECK(slurp(a + "/sessions_2020-07_part1.csv") !=
          slurp(c + "/sessions_2020-07_part1.csv"));
}
