// gpncast command-line front end. Each subcommand is a thin orchestration
// layer over the library: parse options, call the module, write artifacts,
// record a run manifest. All randomness flows from explicit seeds, so any
// invocation is reproducible from its manifest.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpncast/evaluation.hpp"
#include "gpncast/features.hpp"
#include "gpncast/genre.hpp"
#include "gpncast/manifest.hpp"
#include "gpncast/model.hpp"
#include "gpncast/qoe.hpp"
#include "gpncast/split.hpp"
#include "gpncast/svg.hpp"
#include "gpncast/synth.hpp"
#include "gpncast/warehouse.hpp"

namespace fs = std::filesystem;
using namespace gpncast;

namespace {

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::vector<std::string> read_line_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read list file '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (!t.empty() && t[0] != '#') out.push_back(t);
    }
    return out;
}

void write_line_list(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write list file '" + path + "'");
    for (const auto& l : lines) out << l << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(static_cast<int>(parse_long(trim(item))));
    if (out.empty()) throw ValidationError("hidden layer list is empty");
    return out;
}

// ---------------------------------------------------------------------------
// shared pipeline pieces
// ---------------------------------------------------------------------------

struct SplitArgs {
    std::uint64_t seed = 42;
    double fraction = 0.6;
};

void add_split_options(CLI::App* cmd, SplitArgs& s) {
    cmd->add_option("--split-seed", s.seed, "train/test split seed")
        ->capture_default_str();
    cmd->add_option("--split-fraction", s.fraction,
                    "fraction of rows assigned to training")
        ->capture_default_str();
}

struct LoadedWarehouse {
    Warehouse wh;
    std::vector<SessionFact> facts;
};

LoadedWarehouse load_warehouse(const std::string& dir) {
    LoadedWarehouse out{Warehouse::open(dir), {}};
    out.facts = out.wh.facts();
    return out;
}

/// Models in a directory, sorted by file name for stable ordering. Run
/// manifests live alongside model files and are skipped by name.
std::vector<std::pair<std::string, TrainedModel>> load_models_dir(
    const std::string& dir) {
    std::vector<std::string> files;
    if (!fs::is_directory(dir))
        throw IoError("model directory '" + dir + "' does not exist");
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        if (e.path().extension() != ".json") continue;
        if (name.rfind("run_manifest", 0) == 0) continue;
        files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw ValidationError("no model files (*.json) in '" + dir + "'");
    std::vector<std::pair<std::string, TrainedModel>> out;
    for (const auto& f : files) out.emplace_back(f, TrainedModel::load(f));
    return out;
}

/// Test matrices keyed by schema fingerprint, one per schema file. Lets a
/// single leaderboard mix models trained under different target transforms.
struct EvalContext {
    std::map<std::string, FeatureMatrix> test_by_fingerprint;
    SplitDescriptor split;
};

EvalContext build_eval_context(const std::vector<SessionFact>& facts,
                               const TypeMap& tm,
                               const std::vector<std::string>& schema_paths,
                               const SplitArgs& sp) {
    EvalContext ctx;
    for (const auto& path : schema_paths) {
        const FeatureSchema schema = FeatureSchema::load(path);
        FeatureMatrix m = transform(facts, schema, tm);
        auto [train_m, test_m] = split(m, sp.fraction, sp.seed);
        ctx.split = {sp.seed, sp.fraction, train_m.n_rows(), test_m.n_rows()};
        ctx.test_by_fingerprint.emplace(m.schema_fingerprint, std::move(test_m));
    }
    return ctx;
}

EvalReport run_leaderboard(
    const std::vector<std::pair<std::string, TrainedModel>>& models,
    const EvalContext& ctx) {
    std::vector<LeaderboardEntry> entries;
    for (const auto& [path, model] : models) {
        const auto it = ctx.test_by_fingerprint.find(model.schema_fingerprint);
        if (it == ctx.test_by_fingerprint.end())
            throw ValidationError("schema fingerprint mismatch: model '" + path +
                                  "' was trained under fingerprint " +
                                  model.schema_fingerprint +
                                  " but no given schema produces it");
        entries.push_back({&model, &it->second});
    }
    return leaderboard(entries, ctx.split);
}

void emit_leaderboard(const EvalReport& report, const std::string& out_dir,
                      RunManifest& man) {
    const std::string csv_path = path_join(out_dir, "leaderboard.csv");
    const std::string md_path = path_join(out_dir, "leaderboard.md");
    const std::string svg_path = path_join(out_dir, "leaderboard.svg");
    write_csv(csv_path, eval_report_csv(report));
    write_text(md_path, eval_report_markdown(report));
    std::vector<Bar> bars;
    for (const auto& row : report.rows)
        bars.push_back({row.algorithm + " (" + row.feature_option + ")",
                        row.mape_ms});
    write_bar_chart(svg_path, "Test MAPE, ms space", bars, "%");
    man.add_output(csv_path);
    man.add_output(md_path);
    man.add_output(svg_path);
}

// QoE league over facts grouped by game type or game name.
struct QoeLeagueRow {
    std::string scope;
    std::size_t sessions = 0;
    double qos_value = 0.0;
    double si = 0.0;
    double qoe_value = 0.0;
};

std::vector<QoeLeagueRow> qoe_league(const std::vector<SessionFact>& facts,
                                     const TypeMap& tm, const SiTable& si_table,
                                     const QosConfig& qcfg, bool by_game,
                                     std::size_t min_sessions) {
    std::map<std::string, std::pair<GameType, std::vector<double>>> groups;
    for (const auto& f : facts) {
        const GameType type = tm.classify(f.game_name);
        const std::string key = by_game ? f.game_name : type.name();
        auto& slot = groups[key];
        slot.first = type;
        slot.second.push_back(f.wtfast_ping);
    }
    std::vector<QoeLeagueRow> out;
    for (const auto& [key, slot] : groups) {
        if (slot.second.size() < min_sessions) continue;
        QoeLeagueRow row;
        row.scope = key;
        row.sessions = slot.second.size();
        row.qos_value = qos(slot.second, qcfg);
        row.si = si_table.lookup(slot.first);
        if (row.qos_value > 0.0) {
            row.qoe_value = qoe(row.qos_value, row.si).qoe;
        } else {
            // single-session groups have zero QoS; QoE degenerates to zero
            row.qoe_value = 0.0;
        }
        out.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end(), [](const QoeLeagueRow& a, const QoeLeagueRow& b) {
        if (a.qoe_value != b.qoe_value) return a.qoe_value > b.qoe_value;
        return a.scope < b.scope;
    });
    return out;
}

void emit_qoe_league(const std::vector<QoeLeagueRow>& league,
                     const std::string& out_dir, RunManifest& man) {
    CsvTable t;
    t.header = {"scope", "sessions", "qos", "si", "qoe"};
    for (const auto& r : league)
        t.rows.push_back({r.scope, std::to_string(r.sessions), fmt_double(r.qos_value),
                          fmt_double(r.si), fmt_double(r.qoe_value)});
    const std::string csv_path = path_join(out_dir, "qoe_league.csv");
    write_csv(csv_path, t);

    std::ostringstream md;
    md << "| Scope | Sessions | QoS | SI | QoE |\n|---|---|---|---|---|\n";
    char buf[48];
    for (const auto& r : league) {
        std::snprintf(buf, sizeof buf, "%.4f", r.qos_value);
        md << "| " << r.scope << " | " << r.sessions << " | " << buf;
        std::snprintf(buf, sizeof buf, "%.1f", r.si);
        md << " | " << buf;
        std::snprintf(buf, sizeof buf, "%.4f", r.qoe_value);
        md << " | " << buf << " |\n";
    }
    const std::string md_path = path_join(out_dir, "qoe_league.md");
    write_text(md_path, md.str());

    std::vector<Bar> bars;
    const std::size_t top = std::min<std::size_t>(league.size(), 20);
    for (std::size_t i = 0; i < top; ++i)
        bars.push_back({league[i].scope, league[i].qoe_value});
    const std::string svg_path = path_join(out_dir, "qoe_league.svg");
    write_bar_chart(svg_path, "QoE league (top " + std::to_string(top) + ")", bars);
    man.add_output(csv_path);
    man.add_output(md_path);
    man.add_output(svg_path);
}

void emit_type_distribution(const std::vector<TypeShare>& dist,
                            const std::string& out_dir, RunManifest& man) {
    CsvTable t;
    t.header = {"type", "sessions", "share_pct"};
    for (const auto& s : dist)
        t.rows.push_back({s.type.name(), std::to_string(s.count), fmt_double(s.percent)});
    const std::string csv_path = path_join(out_dir, "type_distribution.csv");
    write_csv(csv_path, t);

    std::ostringstream md;
    md << "| Type | Sessions | Share |\n|---|---|---|\n";
    char buf[32];
    for (const auto& s : dist) {
        std::snprintf(buf, sizeof buf, "%.1f%%", s.percent);
        md << "| " << s.type.name() << " | " << s.count << " | " << buf << " |\n";
    }
    const std::string md_path = path_join(out_dir, "type_distribution.md");
    write_text(md_path, md.str());

    std::vector<Bar> bars;
    for (const auto& s : dist) bars.push_back({s.type.name(), s.percent});
    const std::string svg_path = path_join(out_dir, "type_distribution.svg");
    write_bar_chart(svg_path, "Session share by game type", bars, "%");
    man.add_output(csv_path);
    man.add_output(md_path);
    man.add_output(svg_path);
}

void emit_latency_buckets(const std::vector<SessionFact>& facts,
                          const std::string& out_dir, RunManifest& man) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& label : latency_bucket_labels()) counts[label] = {0, 0};
    for (const auto& f : facts) {
        if (f.internet_ping > 0.0) ++counts[latency_bucket(f.internet_ping)].first;
        ++counts[latency_bucket(f.wtfast_ping)].second;
    }
    CsvTable t;
    t.header = {"bucket_ms", "internet_sessions", "gpn_sessions"};
    std::ostringstream md;
    md << "| Bucket (ms) | Internet | GPN |\n|---|---|---|\n";
    std::vector<Bar> bars;
    for (const auto& label : latency_bucket_labels()) {
        const auto& [internet, routed] = counts[label];
        t.rows.push_back({label, std::to_string(internet), std::to_string(routed)});
        md << "| " << label << " | " << internet << " | " << routed << " |\n";
        bars.push_back({label, static_cast<double>(routed)});
    }
    const std::string csv_path = path_join(out_dir, "latency_buckets.csv");
    const std::string md_path = path_join(out_dir, "latency_buckets.md");
    const std::string svg_path = path_join(out_dir, "latency_buckets.svg");
    write_csv(csv_path, t);
    write_text(md_path, md.str());
    write_bar_chart(svg_path, "GPN ping sessions per latency bucket", bars);
    man.add_output(csv_path);
    man.add_output(md_path);
    man.add_output(svg_path);
}

// ---------------------------------------------------------------------------
// subcommand argument bags
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string out_dir;
    SynthConfig cfg;
};

struct IngestArgs {
    std::vector<std::string> raw;
    std::string warehouse_dir;
    bool dedup = false;
};

struct CleanArgs {
    std::vector<std::string> raw;
    std::string rejects_out = "rejects.csv";
};

struct FitSchemaArgs {
    std::string warehouse_dir;
    std::string out = "schema.json";
    bool binning = true;
    std::string target = "raw";
    std::string select_list_path;
    std::string partition = "train";
    SplitArgs split;
};

struct TrainArgs {
    std::string warehouse_dir;
    std::string schema_path;
    std::string type_map_path;
    std::string out_dir;
    std::string algo = "suite";
    std::string features = "all";
    std::string select_list_path;
    std::uint64_t seed = 7;
    SplitArgs split;
    double alpha = 0.05;
    ForestConfig forest;
    MlpConfig mlp;
    std::string hidden = "100,75,50,25";
    SvrConfig svr;
};

struct EvaluateArgs {
    std::string warehouse_dir;
    std::vector<std::string> schema_paths;
    std::string type_map_path;
    std::string models_dir;
    std::string out_dir;
    SplitArgs split;
};

struct PredictArgs {
    std::string warehouse_dir;
    std::string schema_path;
    std::string type_map_path;
    std::string model_path;
    std::string out = "predictions.csv";
};

struct GenresArgs {
    std::string type_map_path;
    std::string out_dir;
    std::string warehouse_dir;
};

struct QoeArgs {
    std::string warehouse_dir;
    std::string type_map_path;
    std::string si_table_path;
    std::string out_dir;
    double k = 100.0;
    double w = 1.0;
    bool by_game = false;
    std::size_t min_sessions = 1;
};

struct ReportArgs {
    std::string warehouse_dir;
    std::vector<std::string> schema_paths;
    std::string type_map_path;
    std::string models_dir;
    std::string si_table_path;
    std::string out_dir;
    double k = 100.0;
    double w = 1.0;
    SplitArgs split;
};

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

void run_synth(const SynthArgs& a) {
    ensure_dir(a.out_dir);
    RunManifest man;
    man.command = "synth";
    man.stamp();
    man.params["rows"] = std::to_string(a.cfg.rows);
    man.params["seed"] = std::to_string(a.cfg.seed);
    man.params["files"] = std::to_string(a.cfg.n_files);
    man.params["weekend_fraction"] = fmt_double(a.cfg.weekend_fraction);
    man.params["ping_distance_rho"] = fmt_double(a.cfg.ping_distance_rho);
    man.params["improvement"] = fmt_double(a.cfg.improvement);
    man.params["noise_sigma"] = fmt_double(a.cfg.noise_sigma);
    man.params["inject_rejects"] = a.cfg.inject_rejects ? "true" : "false";

    SynthGenerator gen(a.cfg);
    const auto files = gen.write_corpus(a.out_dir);
    for (const auto& f : files.raw_files) man.add_output(f);
    man.add_output(files.type_map_file);
    if (!files.expected_rejects_file.empty())
        man.add_output(files.expected_rejects_file);
    man.save(path_join(a.out_dir, "run_manifest_synth.json"));

    std::cout << "synth: wrote " << a.cfg.rows << " rows across "
              << files.raw_files.size() << " file(s) in " << a.out_dir << "\n";
    if (!files.expected_rejects_file.empty())
        std::cout << "synth: injected rule-violating rows listed in "
                  << files.expected_rejects_file << "\n";
}

void run_ingest(const IngestArgs& a) {
    ensure_dir(a.warehouse_dir);
    RunManifest man;
    man.command = "ingest";
    man.stamp();
    for (const auto& f : a.raw) man.add_input(f);
    man.params["dedup"] = a.dedup ? "true" : "false";

    const IngestResult ing = ingest_files(a.raw);
    const CleanResult cln = clean(ing.records);
    Warehouse wh;
    wh.load(cln.facts, a.dedup);
    wh.save(a.warehouse_dir);

    std::vector<RejectRecord> rejects = ing.rejects;
    rejects.insert(rejects.end(), cln.rejects.begin(), cln.rejects.end());
    const std::string rejects_path = path_join(a.warehouse_dir, "rejects.csv");
    Warehouse::save_rejects(rejects_path, rejects);

    for (const char* f : {"client_dim.csv", "server_dim.csv", "calendar_dim.csv",
                          "session_fact.csv", "manifest.json", "rejects.csv"})
        man.add_output(path_join(a.warehouse_dir, f));
    man.save(path_join(a.warehouse_dir, "run_manifest_ingest.json"));

    std::map<std::string, std::size_t> by_reason;
    for (const auto& r : rejects) ++by_reason[reject_reason_code(r.reason)];
    std::size_t rows_read = 0;
    for (const auto& [file, n] : ing.per_file_rows) rows_read += n;
    std::cout << "ingest: " << rows_read << " rows read, " << wh.fact_count()
              << " facts loaded, " << rejects.size() << " rejected\n";
    for (const auto& [reason, n] : by_reason)
        std::cout << "  " << reason << ": " << n << "\n";
}

void run_clean(const CleanArgs& a) {
    const IngestResult ing = ingest_files(a.raw);
    const CleanResult cln = clean(ing.records);
    std::vector<RejectRecord> rejects = ing.rejects;
    rejects.insert(rejects.end(), cln.rejects.begin(), cln.rejects.end());
    Warehouse::save_rejects(a.rejects_out, rejects);

    RunManifest man;
    man.command = "clean";
    man.stamp();
    for (const auto& f : a.raw) man.add_input(f);
    man.add_output(a.rejects_out);
    man.save(path_join(fs::path(a.rejects_out).parent_path().string(),
             "run_manifest_clean.json"));

    std::size_t rows_read = 0;
    for (const auto& [file, n] : ing.per_file_rows) rows_read += n;
    std::map<std::string, std::size_t> by_reason;
    for (const auto& r : rejects) ++by_reason[reject_reason_code(r.reason)];
    std::cout << "clean: " << rows_read << " rows read, " << cln.facts.size()
              << " kept, " << rejects.size() << " rejected -> " << a.rejects_out
              << "\n";
    for (const auto& [reason, n] : by_reason)
        std::cout << "  " << reason << ": " << n << "\n";
}

void run_fit_schema(const FitSchemaArgs& a) {
    auto lw = load_warehouse(a.warehouse_dir);
    FitOptions opts;
    opts.use_binning = a.binning;
    opts.target_transform = iequals(a.target, "log") ? TargetTransform::NaturalLog
                                                     : TargetTransform::Identity;
    if (!iequals(a.target, "log") && !iequals(a.target, "raw"))
        throw ValidationError("--target must be 'raw' or 'log'");
    if (!a.select_list_path.empty())
        opts.select_list = read_line_list(a.select_list_path);

    std::vector<SessionFact> reference = lw.facts;
    if (iequals(a.partition, "train")) {
        const SplitIndices idx =
            split_indices(lw.facts.size(), a.split.fraction, a.split.seed);
        reference.clear();
        reference.reserve(idx.train.size());
        for (std::size_t i : idx.train) reference.push_back(lw.facts[i]);
        opts.reference_partition = "train";
    } else if (iequals(a.partition, "all")) {
        opts.reference_partition = "all";
    } else {
        throw ValidationError("--partition must be 'train' or 'all'");
    }

    const FeatureSchema schema = fit_schema(reference, opts);
    schema.save(a.out);

    RunManifest man;
    man.command = "fit-schema";
    man.stamp();
    man.params["binning"] = a.binning ? "true" : "false";
    man.params["target"] = to_lower(a.target);
    man.params["partition"] = to_lower(a.partition);
    man.params["split_seed"] = std::to_string(a.split.seed);
    man.params["split_fraction"] = fmt_double(a.split.fraction);
    if (!a.select_list_path.empty()) man.add_input(a.select_list_path);
    man.add_output(a.out);
    man.save(path_join(fs::path(a.out).parent_path().string(),
                       "run_manifest_fit_schema.json"));

    std::cout << "fit-schema: fitted on " << reference.size() << " facts ("
              << opts.reference_partition << " partition), fingerprint "
              << schema.fingerprint() << " -> " << a.out << "\n";
}

TrainedModel wrap_model(Algorithm algo, const std::string& feature_option,
                        const std::string& details, const FeatureMatrix& train_m,
                        std::uint64_t seed) {
    TrainedModel m;
    m.algorithm = algo;
    m.feature_option = feature_option;
    m.details = details;
    m.schema_fingerprint = train_m.schema_fingerprint;
    m.target_transform = train_m.target_transform;
    m.seed = seed;
    m.train_rows = train_m.n_rows();
    m.columns = train_m.column_names;
    return m;
}

std::string forest_details(const ForestConfig& fc) {
    return "n_estimators=" + std::to_string(fc.n_estimators);
}

std::string mlp_details(const MlpConfig& mc) {
    std::string h;
    for (std::size_t i = 0; i < mc.hidden.size(); ++i)
        h += (i ? "-" : "") + std::to_string(mc.hidden[i]);
    return std::to_string(mc.hidden.size()) + " hidden layers (" + h +
           "), relu, nadam, mse, epochs=" + std::to_string(mc.epochs) +
           ", batch=" + std::to_string(mc.batch_size);
}

std::string svr_details(const SvrConfig& sc) {
    const std::string gamma =
        sc.gamma > 0.0 ? fmt_double(sc.gamma) : std::string("'scale'");
    return "kernel='rbf', gamma=" + gamma + ", C=" + fmt_double(sc.c) +
           ", epsilon=" + fmt_double(sc.epsilon);
}

void run_train(const TrainArgs& a) {
    ensure_dir(a.out_dir);
    auto lw = load_warehouse(a.warehouse_dir);
    const TypeMap tm = TypeMap::load(a.type_map_path);
    const FeatureSchema schema = FeatureSchema::load(a.schema_path);
    FeatureMatrix matrix = transform(lw.facts, schema, tm);
    auto [train_m, test_m] = split(matrix, a.split.fraction, a.split.seed);

    RunManifest man;
    man.command = "train";
    man.stamp();
    man.add_input(a.schema_path);
    man.add_input(a.type_map_path);
    man.params["algo"] = to_lower(a.algo);
    man.params["seed"] = std::to_string(a.seed);
    man.params["split_seed"] = std::to_string(a.split.seed);
    man.params["split_fraction"] = fmt_double(a.split.fraction);
    man.params["alpha"] = fmt_double(a.alpha);

    MlpConfig mlp_cfg = a.mlp;
    mlp_cfg.hidden = parse_int_list(a.hidden);

    const auto save_model = [&](const TrainedModel& m, const std::string& name) {
        const std::string path = path_join(a.out_dir, name);
        m.save(path);
        man.add_output(path);
        std::cout << "train: wrote " << path << "\n";
    };

    const auto train_forest = [&](const FeatureMatrix& rows_m,
                                  const std::string& feature_option,
                                  std::uint64_t seed) {
        ForestConfig fc = a.forest;
        fc.seed = seed;
        TrainedModel m = wrap_model(Algorithm::RandomForest, feature_option,
                                    forest_details(fc), rows_m, seed);
        m.forest = RandomForest::fit(rows_m.rows, rows_m.target, fc);
        return m;
    };
    const auto train_mlp = [&](const FeatureMatrix& rows_m,
                               const std::string& feature_option,
                               std::uint64_t seed) {
        MlpConfig mc = mlp_cfg;
        mc.seed = seed;
        TrainedModel m = wrap_model(Algorithm::MlpNet, feature_option,
                                    mlp_details(mc), rows_m, seed);
        m.mlp = Mlp::fit(rows_m.rows, rows_m.target, mc);
        return m;
    };
    const auto train_svr = [&](const FeatureMatrix& rows_m,
                               const std::string& feature_option) {
        TrainedModel m = wrap_model(Algorithm::SvrMachine, feature_option,
                                    svr_details(a.svr), rows_m, a.seed);
        m.svr = Svr::fit(rows_m.rows, rows_m.target, a.svr);
        return m;
    };

    if (iequals(a.algo, "suite")) {
        // benchmark suite: stepwise picks the select list, then each family
        // trains on the option it is benchmarked with
        const StepwiseResult sw = fit_stepwise(train_m.rows, train_m.target,
                                               train_m.column_names, a.alpha);
        save_model(make_stepwise_model(sw, train_m, a.seed), "stepwise_all.json");
        const std::string select_path = path_join(a.out_dir, "select_list.txt");
        write_line_list(select_path, sw.select_list);
        man.add_output(select_path);

        const FeatureMatrix train_sel = select_columns(train_m, sw.select_list);
        save_model(train_forest(train_m, "All", Rng::derive(a.seed, 1)),
                   "rf_all.json");
        save_model(train_forest(train_sel, "Select List", Rng::derive(a.seed, 2)),
                   "rf_select.json");
        save_model(train_mlp(train_sel, "Select List", Rng::derive(a.seed, 3)),
                   "mlp_select.json");
        save_model(train_svr(train_m, "All"), "svr_all.json");
    } else {
        const bool use_select = iequals(a.features, "select");
        if (!use_select && !iequals(a.features, "all"))
            throw ValidationError("--features must be 'all' or 'select'");
        FeatureMatrix rows_m = train_m;
        std::string feature_option = "All";
        if (use_select) {
            if (a.select_list_path.empty())
                throw ValidationError("--features select needs --select-list FILE");
            rows_m = select_columns(train_m, read_line_list(a.select_list_path));
            feature_option = "Select List";
            man.add_input(a.select_list_path);
        }
        const std::string stem = to_lower(a.algo) + (use_select ? "_select" : "_all");
        if (iequals(a.algo, "stepwise")) {
            if (use_select)
                throw ValidationError("stepwise performs its own selection; use --features all");
            const StepwiseResult sw = fit_stepwise(train_m.rows, train_m.target,
                                                   train_m.column_names, a.alpha);
            save_model(make_stepwise_model(sw, train_m, a.seed), stem + ".json");
            const std::string select_path = path_join(a.out_dir, "select_list.txt");
            write_line_list(select_path, sw.select_list);
            man.add_output(select_path);
        } else if (iequals(a.algo, "rf")) {
            save_model(train_forest(rows_m, feature_option, a.seed), stem + ".json");
        } else if (iequals(a.algo, "mlp")) {
            save_model(train_mlp(rows_m, feature_option, a.seed), stem + ".json");
        } else if (iequals(a.algo, "svr")) {
            save_model(train_svr(rows_m, feature_option), stem + ".json");
        } else {
            throw ValidationError("--algo must be suite, stepwise, rf, mlp or svr");
        }
    }
    man.save(path_join(a.out_dir, "run_manifest_train.json"));
    std::cout << "train: " << train_m.n_rows() << " train rows / "
              << test_m.n_rows() << " held out\n";
}

void run_evaluate(const EvaluateArgs& a) {
    ensure_dir(a.out_dir);
    auto lw = load_warehouse(a.warehouse_dir);
    const TypeMap tm = TypeMap::load(a.type_map_path);
    const EvalContext ctx = build_eval_context(lw.facts, tm, a.schema_paths, a.split);
    const auto models = load_models_dir(a.models_dir);
    const EvalReport report = run_leaderboard(models, ctx);

    RunManifest man;
    man.command = "evaluate";
    man.stamp();
    for (const auto& s : a.schema_paths) man.add_input(s);
    for (const auto& [path, model] : models) man.add_input(path);
    man.params["split_seed"] = std::to_string(a.split.seed);
    man.params["split_fraction"] = fmt_double(a.split.fraction);
    emit_leaderboard(report, a.out_dir, man);
    man.save(path_join(a.out_dir, "run_manifest_evaluate.json"));

    std::cout << eval_report_markdown(report);
}

void run_predict(const PredictArgs& a) {
    auto lw = load_warehouse(a.warehouse_dir);
    const TypeMap tm = TypeMap::load(a.type_map_path);
    const FeatureSchema schema = FeatureSchema::load(a.schema_path);
    const TrainedModel model = TrainedModel::load(a.model_path);
    const FeatureMatrix m = transform(lw.facts, schema, tm);
    const std::vector<double> pred = model.predict_ms(m);

    CsvTable t;
    t.header = {"row", "predicted_gpn_ping_ms", "actual_gpn_ping_ms"};
    for (std::size_t i = 0; i < pred.size(); ++i)
        t.rows.push_back({std::to_string(i), fmt_double(pred[i]),
                          fmt_double(lw.facts[i].wtfast_ping)});
    write_csv(a.out, t);

    RunManifest man;
    man.command = "predict";
    man.stamp();
    man.add_input(a.schema_path);
    man.add_input(a.model_path);
    man.add_input(a.type_map_path);
    man.add_output(a.out);
    man.save(path_join(fs::path(a.out).parent_path().string(),
                       "run_manifest_predict.json"));

    std::cout << "predict: " << pred.size() << " predictions -> " << a.out << "\n";
}

void run_genres(const GenresArgs& a) {
    ensure_dir(a.out_dir);
    const TypeMap tm = TypeMap::load(a.type_map_path);
    RunManifest man;
    man.command = "genres";
    man.stamp();
    man.add_input(a.type_map_path);

    // lattice over every non-OTHER type present in the map
    std::vector<GameType> types;
    for (const auto& [name, type] : tm.entries())
        if (!type.is_other()) types.push_back(type);
    const auto edges = hasse_edges(types);
    CsvTable et;
    et.header = {"subset", "superset"};
    for (const auto& [lo, hi] : edges)
        et.rows.push_back({lo.name(), hi.name()});
    const std::string edges_path = path_join(a.out_dir, "lattice_edges.csv");
    write_csv(edges_path, et);
    man.add_output(edges_path);
    std::cout << "genres: " << edges.size() << " lattice edges -> " << edges_path
              << "\n";

    if (!a.warehouse_dir.empty()) {
        auto lw = load_warehouse(a.warehouse_dir);
        std::vector<std::string> names;
        names.reserve(lw.facts.size());
        for (const auto& f : lw.facts) names.push_back(f.game_name);
        emit_type_distribution(type_distribution(names, tm), a.out_dir, man);
        std::cout << "genres: type distribution over " << names.size()
                  << " sessions -> " << path_join(a.out_dir, "type_distribution.csv")
                  << "\n";
    }
    man.save(path_join(a.out_dir, "run_manifest_genres.json"));
}

void run_qoe(const QoeArgs& a) {
    ensure_dir(a.out_dir);
    auto lw = load_warehouse(a.warehouse_dir);
    const TypeMap tm = TypeMap::load(a.type_map_path);
    SiTable si_table;
    if (!a.si_table_path.empty()) si_table = SiTable::load(a.si_table_path);
    const QosConfig qcfg{a.k, a.w};
    const auto league =
        qoe_league(lw.facts, tm, si_table, qcfg, a.by_game, a.min_sessions);

    RunManifest man;
    man.command = "qoe";
    man.stamp();
    man.add_input(a.type_map_path);
    if (!a.si_table_path.empty()) man.add_input(a.si_table_path);
    man.params["k"] = fmt_double(a.k);
    man.params["w"] = fmt_double(a.w);
    man.params["scope"] = a.by_game ? "game" : "type";
    man.params["min_sessions"] = std::to_string(a.min_sessions);
    emit_qoe_league(league, a.out_dir, man);
    man.save(path_join(a.out_dir, "run_manifest_qoe.json"));

    std::cout << "qoe: " << league.size() << " scopes ranked -> "
              << path_join(a.out_dir, "qoe_league.csv") << "\n";
}

void run_report(const ReportArgs& a) {
    ensure_dir(a.out_dir);
    auto lw = load_warehouse(a.warehouse_dir);
    const TypeMap tm = TypeMap::load(a.type_map_path);

    RunManifest man;
    man.command = "report";
    man.stamp();
    man.add_input(a.type_map_path);
    for (const auto& s : a.schema_paths) man.add_input(s);
    man.params["split_seed"] = std::to_string(a.split.seed);
    man.params["split_fraction"] = fmt_double(a.split.fraction);

    // (a) model leaderboard
    const EvalContext ctx = build_eval_context(lw.facts, tm, a.schema_paths, a.split);
    const auto models = load_models_dir(a.models_dir);
    for (const auto& [path, model] : models) man.add_input(path);
    const EvalReport report = run_leaderboard(models, ctx);
    emit_leaderboard(report, a.out_dir, man);

    // (b) game-type distribution
    std::vector<std::string> names;
    names.reserve(lw.facts.size());
    for (const auto& f : lw.facts) names.push_back(f.game_name);
    emit_type_distribution(type_distribution(names, tm), a.out_dir, man);

    // (c) latency-bucket histogram
    emit_latency_buckets(lw.facts, a.out_dir, man);

    // (d) QoE league by game type
    SiTable si_table;
    if (!a.si_table_path.empty()) si_table = SiTable::load(a.si_table_path);
    const auto league =
        qoe_league(lw.facts, tm, si_table, QosConfig{a.k, a.w}, false, 1);
    emit_qoe_league(league, a.out_dir, man);

    // index page
    std::ostringstream md;
    md << "# Session report\n\n";
    md << "Facts analysed: " << lw.facts.size() << "\n\n";
    md << "- [Model leaderboard](leaderboard.md)\n";
    md << "- [Game-type distribution](type_distribution.md)\n";
    md << "- [Latency buckets](latency_buckets.md)\n";
    md << "- [QoE league](qoe_league.md)\n";
    const std::string idx_path = path_join(a.out_dir, "report.md");
    write_text(idx_path, md.str());
    man.add_output(idx_path);
    man.save(path_join(a.out_dir, "run_manifest_report.json"));

    std::cout << "report: wrote 4 views + index to " << a.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"session warehouse, feature pipeline, model benchmark and QoE toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "read option defaults from an INI/TOML file");
    app.require_subcommand(1);

    std::map<const CLI::App*, std::function<void()>> runners;

    SynthArgs synth_args;
    {
        CLI::App* c = app.add_subcommand("synth", "generate a synthetic session corpus");
        c->add_option("--out", synth_args.out_dir, "output directory")->required();
        c->add_option("--rows", synth_args.cfg.rows, "number of session rows")
            ->capture_default_str();
        c->add_option("--seed", synth_args.cfg.seed, "master seed")
            ->capture_default_str();
        c->add_option("--files", synth_args.cfg.n_files, "number of raw files")
            ->capture_default_str();
        c->add_option("--weekend-fraction", synth_args.cfg.weekend_fraction,
                      "share of sessions starting on weekend days")
            ->capture_default_str();
        c->add_option("--rho", synth_args.cfg.ping_distance_rho,
                      "ping/distance copula correlation")
            ->capture_default_str();
        c->add_option("--improvement", synth_args.cfg.improvement,
                      "internet-to-GPN ping improvement factor")
            ->capture_default_str();
        c->add_option("--noise-sigma", synth_args.cfg.noise_sigma,
                      "lognormal noise scale on the GPN ping")
            ->capture_default_str();
        c->add_flag("--inject-rejects", synth_args.cfg.inject_rejects,
                    "append rows violating each cleaning rule");
        c->add_option("--rejects-per-reason", synth_args.cfg.rejects_per_reason,
                      "violating rows per cleaning rule")
            ->capture_default_str();
        runners[c] = [&] { run_synth(synth_args); };
    }

    IngestArgs ingest_args;
    {
        CLI::App* c = app.add_subcommand(
            "ingest", "parse and clean raw files into a warehouse");
        c->add_option("--raw", ingest_args.raw, "raw session CSV files")
            ->required()
            ->expected(-1);
        c->add_option("--warehouse", ingest_args.warehouse_dir,
                      "warehouse output directory")
            ->required();
        c->add_flag("--dedup", ingest_args.dedup,
                    "drop byte-identical duplicate facts");
        runners[c] = [&] { run_ingest(ingest_args); };
    }

    CleanArgs clean_args;
    {
        CLI::App* c = app.add_subcommand(
            "clean", "audit cleaning outcomes without writing a warehouse");
        c->add_option("--raw", clean_args.raw, "raw session CSV files")
            ->required()
            ->expected(-1);
        c->add_option("--rejects-out", clean_args.rejects_out,
                      "reject sidecar output path")
            ->capture_default_str();
        runners[c] = [&] { run_clean(clean_args); };
    }

    FitSchemaArgs fit_args;
    {
        CLI::App* c = app.add_subcommand("fit-schema",
                                         "fit the feature transform on warehouse facts");
        c->add_option("--warehouse", fit_args.warehouse_dir, "warehouse directory")
            ->required();
        c->add_option("--out", fit_args.out, "schema output path")
            ->capture_default_str();
        c->add_flag("--binning,!--no-binning", fit_args.binning,
                    "emit bin indicator columns")
            ->capture_default_str();
        c->add_option("--target", fit_args.target, "target transform: raw or log")
            ->capture_default_str();
        c->add_option("--select-list", fit_args.select_list_path,
                      "column list file restricting the transform output");
        c->add_option("--partition", fit_args.partition,
                      "reference partition: train or all")
            ->capture_default_str();
        add_split_options(c, fit_args.split);
        runners[c] = [&] { run_fit_schema(fit_args); };
    }

    TrainArgs train_args;
    {
        CLI::App* c = app.add_subcommand("train", "train one model or the benchmark suite");
        c->add_option("--warehouse", train_args.warehouse_dir, "warehouse directory")
            ->required();
        c->add_option("--schema", train_args.schema_path, "feature schema path")
            ->required();
        c->add_option("--type-map", train_args.type_map_path, "game-type map CSV")
            ->required();
        c->add_option("--out-dir", train_args.out_dir, "model output directory")
            ->required();
        c->add_option("--algo", train_args.algo,
                      "suite, stepwise, rf, mlp or svr")
            ->capture_default_str();
        c->add_option("--features", train_args.features,
                      "feature option for single-model runs: all or select")
            ->capture_default_str();
        c->add_option("--select-list", train_args.select_list_path,
                      "column list file for --features select");
        c->add_option("--seed", train_args.seed, "model seed")
            ->capture_default_str();
        c->add_option("--alpha", train_args.alpha,
                      "stepwise elimination significance level")
            ->capture_default_str();
        add_split_options(c, train_args.split);
        c->add_option("--trees", train_args.forest.n_estimators,
                      "random-forest tree count")
            ->capture_default_str();
        c->add_option("--max-depth", train_args.forest.max_depth,
                      "tree depth limit, 0 grows to purity")
            ->capture_default_str();
        c->add_option("--min-samples-leaf", train_args.forest.min_samples_leaf,
                      "minimum rows per leaf")
            ->capture_default_str();
        c->add_option("--mtry", train_args.forest.mtry,
                      "features tried per split, 0 = n/3")
            ->capture_default_str();
        c->add_option("--hidden", train_args.hidden,
                      "MLP hidden widths, comma separated")
            ->capture_default_str();
        c->add_option("--epochs", train_args.mlp.epochs, "MLP training epochs")
            ->capture_default_str();
        c->add_option("--batch", train_args.mlp.batch_size, "MLP batch size")
            ->capture_default_str();
        c->add_option("--lr", train_args.mlp.learning_rate, "MLP learning rate")
            ->capture_default_str();
        c->add_option("--svr-c", train_args.svr.c, "SVR box constraint C")
            ->capture_default_str();
        c->add_option("--svr-epsilon", train_args.svr.epsilon,
                      "SVR epsilon tube half-width")
            ->capture_default_str();
        c->add_option("--svr-gamma", train_args.svr.gamma,
                      "SVR RBF gamma, <= 0 uses the scale convention")
            ->capture_default_str();
        c->add_option("--svr-tol", train_args.svr.tol, "SVR KKT stop tolerance")
            ->capture_default_str();
        c->add_option("--svr-cache-mb", train_args.svr.cache_mb,
                      "SVR kernel cache budget in MiB")
            ->capture_default_str();
        runners[c] = [&] { run_train(train_args); };
    }

    EvaluateArgs eval_args;
    {
        CLI::App* c = app.add_subcommand("evaluate",
                                         "score saved models and emit the leaderboard");
        c->add_option("--warehouse", eval_args.warehouse_dir, "warehouse directory")
            ->required();
        c->add_option("--schema", eval_args.schema_paths,
                      "schema path(s); one per target transform in play")
            ->required()
            ->expected(-1);
        c->add_option("--type-map", eval_args.type_map_path, "game-type map CSV")
            ->required();
        c->add_option("--models-dir", eval_args.models_dir, "trained model directory")
            ->required();
        c->add_option("--out-dir", eval_args.out_dir, "report output directory")
            ->required();
        add_split_options(c, eval_args.split);
        runners[c] = [&] { run_evaluate(eval_args); };
    }

    PredictArgs predict_args;
    {
        CLI::App* c = app.add_subcommand("predict",
                                         "apply a saved model to warehouse facts");
        c->add_option("--warehouse", predict_args.warehouse_dir, "warehouse directory")
            ->required();
        c->add_option("--schema", predict_args.schema_path, "feature schema path")
            ->required();
        c->add_option("--type-map", predict_args.type_map_path, "game-type map CSV")
            ->required();
        c->add_option("--model", predict_args.model_path, "trained model path")
            ->required();
        c->add_option("--out", predict_args.out, "prediction CSV output path")
            ->capture_default_str();
        runners[c] = [&] { run_predict(predict_args); };
    }

    GenresArgs genres_args;
    {
        CLI::App* c = app.add_subcommand("genres",
                                         "genre lattice and type distribution outputs");
        c->add_option("--type-map", genres_args.type_map_path, "game-type map CSV")
            ->required();
        c->add_option("--out-dir", genres_args.out_dir, "output directory")
            ->required();
        c->add_option("--warehouse", genres_args.warehouse_dir,
                      "warehouse directory for the session-weighted distribution");
        runners[c] = [&] { run_genres(genres_args); };
    }

    QoeArgs qoe_args;
    {
        CLI::App* c = app.add_subcommand("qoe", "QoS/QoE league table");
        c->add_option("--warehouse", qoe_args.warehouse_dir, "warehouse directory")
            ->required();
        c->add_option("--type-map", qoe_args.type_map_path, "game-type map CSV")
            ->required();
        c->add_option("--si-table", qoe_args.si_table_path,
                      "satisfaction-index table CSV (type,si)");
        c->add_option("--out-dir", qoe_args.out_dir, "output directory")->required();
        c->add_option("--k", qoe_args.k, "QoS scale constant K")
            ->capture_default_str();
        c->add_option("--w", qoe_args.w, "QoS deviation weight w")
            ->capture_default_str();
        c->add_flag("--by-game", qoe_args.by_game,
                    "rank individual games instead of game types");
        c->add_option("--min-sessions", qoe_args.min_sessions,
                      "drop scopes with fewer sessions")
            ->capture_default_str();
        runners[c] = [&] { run_qoe(qoe_args); };
    }

    ReportArgs report_args;
    {
        CLI::App* c = app.add_subcommand(
            "report", "leaderboard, type distribution, latency buckets and QoE league");
        c->add_option("--warehouse", report_args.warehouse_dir, "warehouse directory")
            ->required();
        c->add_option("--schema", report_args.schema_paths,
                      "schema path(s); one per target transform in play")
            ->required()
            ->expected(-1);
        c->add_option("--type-map", report_args.type_map_path, "game-type map CSV")
            ->required();
        c->add_option("--models-dir", report_args.models_dir, "trained model directory")
            ->required();
        c->add_option("--si-table", report_args.si_table_path,
                      "satisfaction-index table CSV (type,si)");
        c->add_option("--out-dir", report_args.out_dir, "report output directory")
            ->required();
        c->add_option("--k", report_args.k, "QoS scale constant K")
            ->capture_default_str();
        c->add_option("--w", report_args.w, "QoS deviation weight w")
            ->capture_default_str();
        add_split_options(c, report_args.split);
        runners[c] = [&] { run_report(report_args); };
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage errors, including missing required inputs
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        runners.at(sub)();
    } catch (const std::exception& e) {
        std::cerr << "gpncast " << sub->get_name() << ": error: " << e.what()
                  << "\n";
        return 1;
    }
    return 0;
}
