#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gpncast/common.hpp"
#include "gpncast/csv.hpp"
#include "gpncast/datetime.hpp"
#include "gpncast/genre.hpp"
#include "gpncast/geo.hpp"
#include "gpncast/rng.hpp"
#include "gpncast/session.hpp"

namespace gpncast {

/// Marginal quantile targets for one feature: 25/75/85/95th percentiles and
/// the maximum. Values must be non-decreasing.
struct QuantileAnchors {
    double p25 = 0.0, p75 = 0.0, p85 = 0.0, p95 = 0.0, max = 0.0;
};

/// Reference anchor table for the numeric features the generator draws
/// directly. CALCULATED_DIST is listed too but is realized geometrically
/// (coordinates are placed so the route length matches the drawn value).
inline const std::map<std::string, QuantileAnchors>& reference_quantiles() {
    static const std::map<std::string, QuantileAnchors> q = {
        {"INTERNET_PING", {65, 211, 256, 325, 500}},
        {"INTERNET_FLUX", {1, 7, 12, 27, 368}},
        {"INTERNET_LOSS", {0, 12, 32, 162, 25770}},
        {"INTERNET_SPKE", {0, 30, 72.6, 255, 13217}},
        {"BYTES_UP_TCP", {0.02, 2.47, 4.98, 12.31, 564.01}},
        {"BYTES_UP_UDP", {0, 6.25, 16.37, 52.54, 32226.17}},
        {"BYTES_DOWN_TCP", {0.06, 26.54, 52.14, 136.6, 63300.35}},
        {"BYTES_DOWN_UDP", {0, 22.70, 58.89, 181.1, 30650.83}},
        {"SOCKET_COUNT_TCP", {2, 23, 34, 184, 25405}},
        {"SOCKET_COUNT_UDP", {0, 8, 21, 90, 8449}},
        {"CLIENT_IP_COUNT", {1, 1, 1, 1, 17}},
        {"GAME_IP_COUNT", {2, 8, 15, 45, 2835}},
        {"BYTES_PER_SECOND", {1.59, 9.48, 12.13, 32.74, 11316.87}},
        {"CALCULATED_DIST", {3.05, 12.15, 14.93, 19.84, 35.48}},
        {"DURATION", {2623, 15966, 26901.4, 43941.4, 662624}},
    };
    return q;
}

/// Game-type shares (percent of records) used to weight the game catalog.
inline const std::vector<std::pair<std::string, double>>& reference_type_shares() {
    static const std::vector<std::pair<std::string, double>> shares = {
        {"RPG.MMP", 27.1},
        {"RPG.CASUAL", 20.1},
        {"OTHER", 11.9},
        {"ACT.SHOOTER", 11.6},
        {"ACT.RPG.STRATEGY", 10.6},
        {"ACT.MMP.SHOOTER", 5.1},
        {"ACT.RPG.MMP.ADV", 1.7},
        {"ACT.STRATEGY", 1.6},
        {"ACT", 1.5},
        {"RPG.SHOOTER", 1.3},
        {"STRATEGY", 0.8},
        {"ACT.RPG.MMP", 0.8},
        {"ACT.RPG.STRATEGY.MMP.SIM.ADV", 0.8},
        {"ACT.STRATEGY.MMP.SHOOTER", 0.7},
        {"SPORTS", 0.7},
        {"ACT.MMP.SHOOTER.SIM", 0.7},
        {"ACT.MMP", 0.7},
        {"ACT.SPORTS", 0.6},
        {"ACT.RPG.MMP.ADV.SPORTS", 0.5},
        {"ACT.RPG", 0.5},
        {"SHOOTER", 0.4},
        {"RPG", 0.2},
        {"ACT.STRATEGY.MMP", 0.2},
    };
    return shares;
}

struct SynthConfig {
    std::size_t rows = 50000;
    std::uint64_t seed = 7;
    double weekend_fraction = 0.482;
    double ping_distance_rho = 0.5;  // Gaussian-copula correlation
    double improvement = 1.6;        // internet ping / routed ping scale
    double noise_sigma = 0.28;       // lognormal noise on the routed ping
    std::size_t n_files = 2;         // corpus is split across this many files
    bool inject_rejects = false;     // fabricate rows violating cleaning rules
    std::size_t rejects_per_reason = 5;
    std::map<std::string, QuantileAnchors> quantiles = reference_quantiles();
    std::vector<std::pair<std::string, double>> type_shares =
        reference_type_shares();
};

namespace synth_detail {

/// Inverse CDF through the anchors, piecewise linear on the sqrt scale with
/// short flat plateaus centred on each anchor probability. The plateaus make
/// every anchor an exact quantile of the generated distribution instead of a
/// knife-edge between two segments, which keeps empirical quantiles stable
/// where the upper tail is steep.
class AnchorSampler {
public:
    AnchorSampler() = default;

    AnchorSampler(const std::string& name, const QuantileAnchors& a) {
        constexpr double kHalfWidth = 0.005;
        const std::array<double, 4> probs = {0.25, 0.75, 0.85, 0.95};
        const std::array<double, 4> vals = {a.p25, a.p75, a.p85, a.p95};
        double prev = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (vals[i] < prev)
                throw ValidationError("synth: quantile targets for " + name +
                                      " must be non-decreasing");
            prev = vals[i];
        }
        if (a.max < prev)
            throw ValidationError("synth: max below p95 for " + name);

        knots_u_.push_back(0.0);
        knots_s_.push_back(0.0);
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const double s = std::sqrt(vals[i]);
            knots_u_.push_back(probs[i] - kHalfWidth);
            knots_s_.push_back(s);
            knots_u_.push_back(probs[i] + kHalfWidth);
            knots_s_.push_back(s);
        }
        knots_u_.push_back(1.0);
        knots_s_.push_back(std::sqrt(a.max));
    }

    double operator()(double u) const {
        if (u <= 0.0) return knots_s_.front() * knots_s_.front();
        if (u >= 1.0) return knots_s_.back() * knots_s_.back();
        std::size_t hi = 1;
        while (knots_u_[hi] < u) ++hi;
        const double u0 = knots_u_[hi - 1], u1 = knots_u_[hi];
        const double s0 = knots_s_[hi - 1], s1 = knots_s_[hi];
        const double s =
            u1 > u0 ? s0 + (s1 - s0) * (u - u0) / (u1 - u0) : s0;
        return s * s;
    }

private:
    std::vector<double> knots_u_;
    std::vector<double> knots_s_;
};

inline double round_count(double x) { return std::floor(x + 0.5); }

/// Standard normal CDF, for the Gaussian copula.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

struct City {
    const char* name;
    const char* country;
    double lat, lon;
};

/// Fixed client-city pool: coarse metro coordinates across regions so the
/// geometry can reach the full distance range.
inline const std::vector<City>& city_pool() {
    static const std::vector<City> cities = {
        {"manila", "PH", 14.60, 120.98},    {"singapore", "SG", 1.35, 103.82},
        {"tokyo", "JP", 35.68, 139.69},     {"seoul", "KR", 37.57, 126.98},
        {"sydney", "AU", -33.87, 151.21},   {"auckland", "NZ", -36.85, 174.76},
        {"mumbai", "IN", 19.08, 72.88},     {"dubai", "AE", 25.20, 55.27},
        {"frankfurt", "DE", 50.11, 8.68},   {"london", "GB", 51.51, -0.13},
        {"paris", "FR", 48.86, 2.35},       {"stockholm", "SE", 59.33, 18.07},
        {"warsaw", "PL", 52.23, 21.01},     {"madrid", "ES", 40.42, -3.70},
        {"sao-paulo", "BR", -23.55, -46.63}, {"buenos-aires", "AR", -34.60, -58.38},
        {"santiago", "CL", -33.45, -70.67}, {"mexico-city", "MX", 19.43, -99.13},
        {"toronto", "CA", 43.65, -79.38},   {"seattle", "US", 47.61, -122.33},
        {"dallas", "US", 32.78, -96.80},    {"new-york", "US", 40.71, -74.01},
        {"johannesburg", "ZA", -26.20, 28.05}, {"cairo", "EG", 30.04, 31.24},
    };
    return cities;
}

struct CatalogEntry {
    std::string game_name;
    std::string type;  // "" marks the unmapped pool that classifies as OTHER
};

/// Invented game catalog: two names per mapped type plus an unmapped pool.
inline const std::vector<CatalogEntry>& game_catalog() {
    static const std::vector<CatalogEntry> catalog = [] {
        std::vector<CatalogEntry> c;
        int serial = 0;
        for (const auto& [type, share] : reference_type_shares()) {
            (void)share;
            if (type == "OTHER") continue;
            std::string slug = to_lower(type);
            for (char& ch : slug)
                if (ch == '.') ch = '-';
            c.push_back({"aurora-" + slug, type});
            c.push_back({"nimbus-" + slug + "-" + std::to_string(++serial), type});
        }
        for (const char* name :
             {"driftlands-online", "pocket-farmers", "crystal-courier",
              "retro-karts", "moonlit-anglers"})
            c.push_back({name, ""});
        return c;
    }();
    return catalog;
}

inline const std::vector<std::string>& isp_pool() {
    static const std::vector<std::string> isps = {
        "skyfiber", "metrotel", "baylink", "kompass-net", "volta-broadband",
        "rapidwave", "citycable", "orbit-dsl"};
    return isps;
}

}  // namespace synth_detail

/// Deterministic synthetic corpus generator. Row i is produced entirely from
/// a per-row generator seeded by derive(seed, i), so any slice of the corpus
/// can be regenerated independently and chunked generation stays stable.
class SynthGenerator {
public:
    explicit SynthGenerator(const SynthConfig& cfg) : cfg_(cfg) {
        for (const auto& name : sampled_features_)
            samplers_[name] =
                synth_detail::AnchorSampler(name, cfg_.quantiles.at(name));
        dist_sampler_ = synth_detail::AnchorSampler(
            "CALCULATED_DIST", cfg_.quantiles.at("CALCULATED_DIST"));

        double total = 0.0;
        for (const auto& [type, share] : cfg_.type_shares) {
            if (share < 0.0)
                throw ValidationError("synth: negative type share for " + type);
            total += share;
        }
        if (total <= 0.0) throw ValidationError("synth: type shares sum to zero");
        double acc = 0.0;
        for (const auto& [type, share] : cfg_.type_shares) {
            acc += share / total;
            type_cum_.emplace_back(acc, type);
        }
        type_cum_.back().first = 1.0;

        for (const auto& e : synth_detail::game_catalog()) {
            if (e.type.empty())
                other_names_.push_back(e.game_name);
            else
                names_by_type_[e.type].push_back(e.game_name);
        }

        // July 2020 weekday/weekend day lists for the calendar draw
        for (int day = 1; day <= 31; ++day) {
            const DateTime d{2020, 7, day, 0, 0, 0};
            (is_weekend(d) ? weekend_days_ : weekday_days_).push_back(day);
        }
    }

    RawSessionRecord generate_row(std::size_t index) const {
        Rng rng(Rng::derive(cfg_.seed, index));
        RawSessionRecord r;

        // calendar: pick the day class first, then a day of that class
        const bool weekend = rng.bernoulli(cfg_.weekend_fraction);
        const auto& days = weekend ? weekend_days_ : weekday_days_;
        const int day = days[static_cast<std::size_t>(rng.below(days.size()))];
        DateTime start{2020, 7, day,
                       static_cast<int>(rng.below(24)),
                       static_cast<int>(rng.below(60)),
                       static_cast<int>(rng.below(60))};
        r.session_start = start;
        const double duration = samplers_.at("DURATION")(rng.uniform());
        r.duration_s = std::max(1.0, synth_detail::round_count(duration));
        r.session_end = add_seconds(start, static_cast<std::int64_t>(*r.duration_s));

        // correlated ping and distance through a Gaussian copula
        const double rho = cfg_.ping_distance_rho;
        const double z1 = rng.normal();
        const double z2 = rho * z1 + std::sqrt(1.0 - rho * rho) * rng.normal();
        const double internet_ping =
            samplers_.at("INTERNET_PING")(synth_detail::norm_cdf(z1));
        const double dist_mm =
            dist_sampler_(synth_detail::norm_cdf(z2));
        r.internet_ping = internet_ping;

        // geometry: client at a jittered city; node and game placed so the
        // two-leg route length equals the drawn distance exactly
        const auto& cities = synth_detail::city_pool();
        const auto& city = cities[static_cast<std::size_t>(rng.below(cities.size()))];
        GeoPoint client{city.lat + rng.uniform(-0.5, 0.5),
                        city.lon + rng.uniform(-0.5, 0.5)};
        client.lat = std::clamp(client.lat, -89.9, 89.9);
        const double leg1 = dist_mm * rng.uniform(0.45, 0.55) * 1000.0;  // km
        const double leg2 = dist_mm * 1000.0 - leg1;
        const GeoPoint node = destination(client, rng.uniform(0.0, 360.0), leg1);
        const GeoPoint game = destination(node, rng.uniform(0.0, 360.0), leg2);
        r.client_geo = client;
        r.node_geo = node;
        r.game_geo = game;
        r.reg_country = city.country;
        r.client_isp = synth_detail::isp_pool()[static_cast<std::size_t>(
            rng.below(synth_detail::isp_pool().size()))];
        r.client_ip = "10." + std::to_string(rng.below(250)) + "." +
                      std::to_string(rng.below(250)) + "." +
                      std::to_string(1 + rng.below(250));
        r.server_id = "relay-" + std::string(city.name);
        r.game_ip = "203.0." + std::to_string(rng.below(250)) + "." +
                    std::to_string(1 + rng.below(250));
        r.game_isp = synth_detail::isp_pool()[static_cast<std::size_t>(
            rng.below(synth_detail::isp_pool().size()))];

        // independent marginals
        r.internet_flux = samplers_.at("INTERNET_FLUX")(rng.uniform());
        r.internet_loss =
            synth_detail::round_count(samplers_.at("INTERNET_LOSS")(rng.uniform()));
        r.internet_spke =
            synth_detail::round_count(samplers_.at("INTERNET_SPKE")(rng.uniform()));
        r.bytes_up_tcp = samplers_.at("BYTES_UP_TCP")(rng.uniform());
        r.bytes_up_udp = samplers_.at("BYTES_UP_UDP")(rng.uniform());
        r.bytes_down_tcp = samplers_.at("BYTES_DOWN_TCP")(rng.uniform());
        r.bytes_down_udp = samplers_.at("BYTES_DOWN_UDP")(rng.uniform());
        r.socket_count_tcp = synth_detail::round_count(
            samplers_.at("SOCKET_COUNT_TCP")(rng.uniform()));
        r.socket_count_udp = synth_detail::round_count(
            samplers_.at("SOCKET_COUNT_UDP")(rng.uniform()));
        r.client_ip_count = std::max(
            1.0, synth_detail::round_count(
                     samplers_.at("CLIENT_IP_COUNT")(rng.uniform())));
        r.game_ip_count = std::max(
            1.0, synth_detail::round_count(
                     samplers_.at("GAME_IP_COUNT")(rng.uniform())));

        // routed-path measures: better than the raw internet path
        r.wtfast_flux = r.internet_flux * rng.uniform(0.3, 0.8);
        r.wtfast_loss = synth_detail::round_count(r.internet_loss * rng.uniform(0.0, 0.5));
        r.wtfast_spke = synth_detail::round_count(r.internet_spke * rng.uniform(0.0, 0.6));

        // routed ping: distance-shaped scale-down of the internet ping with
        // weekend/spike congestion bumps and loss cost, lognormal noise
        const double shape = 0.45 + 0.85 * std::pow(dist_mm / 35.48, 2.2);
        const double congest = 1.0 +
                               0.30 * (weekend && dist_mm > 14.0 ? 1.0 : 0.0) +
                               0.20 * (r.internet_spke > 60.0 ? 1.0 : 0.0);
        const double mu = (4.0 + internet_ping / cfg_.improvement * shape) * congest +
                          0.12 * std::pow(r.internet_loss, 0.85);
        r.wtfast_ping =
            std::max(mu * std::exp(cfg_.noise_sigma * rng.normal()), 2.0);

        // game identity from the weighted type mix
        const double u = rng.uniform();
        const std::string* type = &type_cum_.back().second;
        for (const auto& [cum, t] : type_cum_) {
            if (u <= cum) {
                type = &t;
                break;
            }
        }
        if (*type == "OTHER") {
            r.game_name = other_names_[static_cast<std::size_t>(
                rng.below(other_names_.size()))];
        } else {
            const auto& names = names_by_type_.at(*type);
            r.game_name =
                names[static_cast<std::size_t>(rng.below(names.size()))];
        }
        return r;
    }

    std::vector<RawSessionRecord> generate() const {
        std::vector<RawSessionRecord> out;
        out.reserve(cfg_.rows);
        for (std::size_t i = 0; i < cfg_.rows; ++i)
            out.push_back(generate_row(i));
        return out;
    }

    /// Rows violating each cleaning rule, for partition tests. Returned as
    /// raw CSV cell rows (not records) because some violations are
    /// unparseable on purpose.
    struct InjectedReject {
        std::vector<std::string> cells;
        std::string reason;  // designated reject reason code
    };

    std::vector<InjectedReject> generate_rejects() const {
        std::vector<InjectedReject> out;
        const std::vector<std::string> reasons = {
            "missing-ping", "nonpositive-ping", "missing-duration",
            "missing-geo", "parse-error"};
        std::size_t serial = 0;
        for (const auto& reason : reasons) {
            for (std::size_t k = 0; k < cfg_.rejects_per_reason; ++k) {
                // base the bad row on a valid one so only the target rule breaks
                RawSessionRecord r =
                    generate_row(cfg_.rows + serial);
                ++serial;
                std::vector<std::string> cells = to_cells(r);
                if (reason == "missing-ping") {
                    cells[col_wtfast_ping_] = "";
                } else if (reason == "nonpositive-ping") {
                    cells[col_wtfast_ping_] = k % 2 == 0 ? "0" : "-12.5";
                } else if (reason == "missing-duration") {
                    cells[col_duration_] = "";
                    cells[col_session_end_] = "";
                } else if (reason == "missing-geo") {
                    cells[k % 3 == 0 ? col_client_geo_
                                     : (k % 3 == 1 ? col_node_geo_ : col_game_geo_)] = "";
                } else {  // parse-error
                    cells[k % 2 == 0 ? col_wtfast_ping_ : col_internet_flux_] =
                        "not-a-number";
                }
                out.push_back({std::move(cells), reason});
            }
        }
        return out;
    }

    static const std::vector<std::string>& csv_header() {
        static const std::vector<std::string> header = {
            "Client_IP",      "Client_ISP",    "Reg_Country",    "Client_Geo",
            "Server_ID",      "Game_IP",       "Game_ISP",       "Game_Name",
            "Game_Geo",       "Node_Geo",      "Session_Start",  "Session_End",
            "Duration",       "Internet_Ping", "Internet_Flux",  "Internet_Loss",
            "Internet_Spke",  "WTFast_Ping",   "WTFast_Flux",    "WTFast_Loss",
            "WTFast_Spke",    "Bytes_Up_TCP",  "Bytes_Up_UDP",   "Bytes_Down_TCP",
            "Bytes_Down_UDP", "Socket_Count_TCP", "Socket_Count_UDP",
            "Client_IP_Count", "Game_IP_Count",
        };
        return header;
    }

    static std::vector<std::string> to_cells(const RawSessionRecord& r) {
        const auto geo = [](const std::optional<GeoPoint>& g) {
            return g ? format_geo(*g) : std::string();
        };
        const auto when = [](const std::optional<DateTime>& d) {
            return d ? format_datetime(*d) : std::string();
        };
        const auto num = [](const std::optional<double>& v) {
            return v ? fmt_double(*v) : std::string();
        };
        return {
            r.client_ip,
            r.client_isp,
            r.reg_country,
            geo(r.client_geo),
            r.server_id,
            r.game_ip,
            r.game_isp,
            r.game_name,
            geo(r.game_geo),
            geo(r.node_geo),
            when(r.session_start),
            when(r.session_end),
            num(r.duration_s),
            num(r.internet_ping),
            fmt_double(r.internet_flux),
            fmt_double(r.internet_loss),
            fmt_double(r.internet_spke),
            num(r.wtfast_ping),
            fmt_double(r.wtfast_flux),
            fmt_double(r.wtfast_loss),
            fmt_double(r.wtfast_spke),
            fmt_double(r.bytes_up_tcp),
            fmt_double(r.bytes_up_udp),
            fmt_double(r.bytes_down_tcp),
            fmt_double(r.bytes_down_udp),
            fmt_double(r.socket_count_tcp),
            fmt_double(r.socket_count_udp),
            fmt_double(r.client_ip_count),
            fmt_double(r.game_ip_count),
        };
    }

    /// Write the corpus as ingestible raw files plus the game-type map and,
    /// when reject injection is on, the expected-reject sidecar.
    struct CorpusFiles {
        std::vector<std::string> raw_files;
        std::string type_map_file;
        std::string expected_rejects_file;  // empty when injection is off
    };

    CorpusFiles write_corpus(const std::string& dir) const {
        namespace fs = std::filesystem;
        fs::create_directories(dir);
        CorpusFiles out;

        const std::size_t n_files = std::max<std::size_t>(1, cfg_.n_files);
        const std::size_t per_file = (cfg_.rows + n_files - 1) / std::max<std::size_t>(n_files, 1);
        std::vector<CsvTable> tables(n_files);
        for (auto& t : tables) t.header = csv_header();
        for (std::size_t i = 0; i < cfg_.rows; ++i) {
            const std::size_t f = per_file == 0 ? 0 : std::min(i / per_file, n_files - 1);
            tables[f].rows.push_back(to_cells(generate_row(i)));
        }

        std::vector<InjectedReject> injected;
        CsvTable expected;
        expected.header = {"file", "line", "reason"};
        if (cfg_.inject_rejects) {
            injected = generate_rejects();
            // interleave: reject k goes to file (k mod n_files), appended
            for (std::size_t k = 0; k < injected.size(); ++k) {
                auto& table = tables[k % n_files];
                table.rows.push_back(injected[k].cells);
            }
        }

        for (std::size_t f = 0; f < n_files; ++f) {
            const std::string path =
                dir + "/sessions_2020-07_part" + std::to_string(f + 1) + ".csv";
            write_csv(path, tables[f]);
            out.raw_files.push_back(path);
        }

        if (cfg_.inject_rejects) {
            // recover line numbers after the append: rejects sit at the tail
            std::vector<std::size_t> next_tail(n_files);
            for (std::size_t f = 0; f < n_files; ++f) {
                const std::size_t total = tables[f].rows.size();
                std::size_t n_injected = 0;
                for (std::size_t k = 0; k < injected.size(); ++k)
                    if (k % n_files == f) ++n_injected;
                next_tail[f] = total - n_injected;
            }
            for (std::size_t k = 0; k < injected.size(); ++k) {
                const std::size_t f = k % n_files;
                const std::size_t line = 2 + next_tail[f]++;  // header is line 1
                expected.rows.push_back({out.raw_files[f], std::to_string(line),
                                         injected[k].reason});
            }
            out.expected_rejects_file = dir + "/expected_rejects.csv";
            write_csv(out.expected_rejects_file, expected);
        }

        CsvTable type_map;
        type_map.header = {"game_name", "type"};
        for (const auto& e : synth_detail::game_catalog())
            if (!e.type.empty()) type_map.rows.push_back({e.game_name, e.type});
        out.type_map_file = dir + "/type_map.csv";
        write_csv(out.type_map_file, type_map);
        return out;
    }

private:
    SynthConfig cfg_;
    std::vector<std::string> sampled_features_ = {
        "INTERNET_PING",  "INTERNET_FLUX",    "INTERNET_LOSS",
        "INTERNET_SPKE",  "BYTES_UP_TCP",     "BYTES_UP_UDP",
        "BYTES_DOWN_TCP", "BYTES_DOWN_UDP",   "SOCKET_COUNT_TCP",
        "SOCKET_COUNT_UDP", "CLIENT_IP_COUNT", "GAME_IP_COUNT",
        "DURATION",
    };
    std::map<std::string, synth_detail::AnchorSampler> samplers_;
    synth_detail::AnchorSampler dist_sampler_;
    std::vector<std::pair<double, std::string>> type_cum_;
    std::map<std::string, std::vector<std::string>> names_by_type_;
    std::vector<std::string> other_names_;
    std::vector<int> weekday_days_;
    std::vector<int> weekend_days_;

    static constexpr std::size_t col_client_geo_ = 3;
    static constexpr std::size_t col_game_geo_ = 8;
    static constexpr std::size_t col_node_geo_ = 9;
    static constexpr std::size_t col_session_end_ = 11;
    static constexpr std::size_t col_duration_ = 12;
    static constexpr std::size_t col_internet_flux_ = 14;
    static constexpr std::size_t col_wtfast_ping_ = 17;
};

}  // namespace gpncast
