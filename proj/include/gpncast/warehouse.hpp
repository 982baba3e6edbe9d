#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpncast/csv.hpp"
#include "gpncast/datetime.hpp"
#include "gpncast/geo.hpp"
#include "gpncast/session.hpp"
#include "gpncast/stats.hpp"

namespace gpncast {

// ---------------------------------------------------------------------------
// Raw file dialect
// ---------------------------------------------------------------------------

/// Canonical raw-file column set. Header matching is case-insensitive.
/// Duration and Bytes_Total are optional; Bytes_Total is accepted on input
/// but always recomputed as the sum of the four directional byte columns.
inline const std::vector<std::string>& raw_required_columns() {
    static const std::vector<std::string> cols = {
        "Client_IP",      "Client_ISP",    "Reg_Country",    "Client_Geo",
        "Server_ID",      "Game_IP",       "Game_ISP",       "Game_Name",
        "Game_Geo",       "Node_Geo",      "Session_Start",  "Session_End",
        "Internet_Ping",  "Internet_Flux", "Internet_Loss",  "Internet_Spke",
        "WTFast_Ping",    "WTFast_Flux",   "WTFast_Loss",    "WTFast_Spke",
        "Bytes_Up_TCP",   "Bytes_Up_UDP",  "Bytes_Down_TCP", "Bytes_Down_UDP",
        "Socket_Count_TCP", "Socket_Count_UDP", "Client_IP_Count", "Game_IP_Count",
    };
    return cols;
}

inline const std::vector<std::string>& raw_optional_columns() {
    static const std::vector<std::string> cols = {"Duration", "Bytes_Total"};
    return cols;
}

struct IngestResult {
    std::vector<RawSessionRecord> records;
    std::vector<RejectRecord> rejects;
    std::vector<std::pair<std::string, std::size_t>> per_file_rows;  // data rows seen
};

namespace wh_detail {

struct ColumnIndex {
    std::map<std::string, std::size_t> by_name;  // lowercase name -> cell index

    std::optional<std::size_t> find(const std::string& name) const {
        const auto it = by_name.find(to_lower(name));
        return it == by_name.end() ? std::nullopt
                                   : std::optional<std::size_t>(it->second);
    }
};

inline ColumnIndex check_header(const CsvTable& t, const std::string& path) {
    ColumnIndex idx;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        const std::string name = to_lower(trim(t.header[i]));
        bool known = false;
        for (const auto& c : raw_required_columns())
            if (to_lower(c) == name) known = true;
        for (const auto& c : raw_optional_columns())
            if (to_lower(c) == name) known = true;
        if (!known)
            throw ValidationError(path + ": unknown column '" + trim(t.header[i]) +
                                  "' in header");
        if (idx.by_name.count(name))
            throw ValidationError(path + ": duplicate column '" + trim(t.header[i]) +
                                  "' in header");
        idx.by_name[name] = i;
    }
    for (const auto& c : raw_required_columns())
        if (!idx.by_name.count(to_lower(c)))
            throw ValidationError(path + ": missing required column '" + c + "'");
    return idx;
}

inline std::optional<double> opt_number(const std::vector<std::string>& row,
                                        std::optional<std::size_t> col) {
    if (!col) return std::nullopt;
    const std::string cell = trim(row[*col]);
    if (cell.empty()) return std::nullopt;
    return parse_double(cell);
}

inline double req_number(const std::vector<std::string>& row, std::size_t col,
                         const std::string& name) {
    const std::string cell = trim(row[col]);
    if (cell.empty()) throw ValidationError("empty cell in column " + name);
    return parse_double(cell);
}

inline double nonneg(double v, const std::string& name) {
    if (v < 0.0) throw ValidationError("negative value in column " + name);
    return v;
}

inline std::optional<GeoPoint> opt_geo(const std::vector<std::string>& row,
                                       std::size_t col) {
    const std::string cell = trim(row[col]);
    if (cell.empty()) return std::nullopt;
    return parse_geo(cell);
}

inline std::optional<DateTime> opt_datetime(const std::vector<std::string>& row,
                                            std::size_t col) {
    const std::string cell = trim(row[col]);
    if (cell.empty()) return std::nullopt;
    return parse_datetime(cell);
}

inline RawSessionRecord parse_row(const std::vector<std::string>& row,
                                  const ColumnIndex& idx) {
    const auto col = [&](const char* name) { return *idx.find(name); };
    RawSessionRecord r;
    r.client_ip = trim(row[col("client_ip")]);
    r.client_isp = trim(row[col("client_isp")]);
    r.reg_country = trim(row[col("reg_country")]);
    r.client_geo = opt_geo(row, col("client_geo"));
    r.server_id = trim(row[col("server_id")]);
    r.game_ip = trim(row[col("game_ip")]);
    r.game_isp = trim(row[col("game_isp")]);
    r.game_name = trim(row[col("game_name")]);
    r.game_geo = opt_geo(row, col("game_geo"));
    r.node_geo = opt_geo(row, col("node_geo"));
    r.session_start = opt_datetime(row, col("session_start"));
    r.session_end = opt_datetime(row, col("session_end"));
    r.duration_s = opt_number(row, idx.find("duration"));
    r.internet_ping = opt_number(row, idx.find("internet_ping"));
    r.internet_flux = req_number(row, col("internet_flux"), "Internet_Flux");
    r.internet_loss =
        nonneg(req_number(row, col("internet_loss"), "Internet_Loss"), "Internet_Loss");
    r.internet_spke =
        nonneg(req_number(row, col("internet_spke"), "Internet_Spke"), "Internet_Spke");
    r.wtfast_ping = opt_number(row, idx.find("wtfast_ping"));
    r.wtfast_flux = req_number(row, col("wtfast_flux"), "WTFast_Flux");
    r.wtfast_loss =
        nonneg(req_number(row, col("wtfast_loss"), "WTFast_Loss"), "WTFast_Loss");
    r.wtfast_spke =
        nonneg(req_number(row, col("wtfast_spke"), "WTFast_Spke"), "WTFast_Spke");
    r.bytes_up_tcp =
        nonneg(req_number(row, col("bytes_up_tcp"), "Bytes_Up_TCP"), "Bytes_Up_TCP");
    r.bytes_up_udp =
        nonneg(req_number(row, col("bytes_up_udp"), "Bytes_Up_UDP"), "Bytes_Up_UDP");
    r.bytes_down_tcp = nonneg(
        req_number(row, col("bytes_down_tcp"), "Bytes_Down_TCP"), "Bytes_Down_TCP");
    r.bytes_down_udp = nonneg(
        req_number(row, col("bytes_down_udp"), "Bytes_Down_UDP"), "Bytes_Down_UDP");
    r.socket_count_tcp =
        nonneg(req_number(row, col("socket_count_tcp"), "Socket_Count_TCP"),
               "Socket_Count_TCP");
    r.socket_count_udp =
        nonneg(req_number(row, col("socket_count_udp"), "Socket_Count_UDP"),
               "Socket_Count_UDP");
    r.client_ip_count =
        nonneg(req_number(row, col("client_ip_count"), "Client_IP_Count"),
               "Client_IP_Count");
    r.game_ip_count = nonneg(
        req_number(row, col("game_ip_count"), "Game_IP_Count"), "Game_IP_Count");
    if (r.session_start && r.session_end &&
        to_epoch_seconds(*r.session_end) < to_epoch_seconds(*r.session_start))
        throw ValidationError("session_end before session_start");
    return r;
}

}  // namespace wh_detail

/// Parse all files into raw records, in (file order, row order). Unparseable
/// rows become parse-error rejects; a bad header or unreadable file is fatal.
inline IngestResult ingest_files(const std::vector<std::string>& paths) {
    IngestResult out;
    for (const auto& path : paths) {
        CsvTable t;
        try {
            t = read_csv(path);
        } catch (const IoError&) {
            throw IoError("ingest: cannot read file '" + path + "'");
        }
        const auto idx = wh_detail::check_header(t, path);
        out.per_file_rows.emplace_back(path, t.rows.size());
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const std::size_t lineno = i + 2;  // header occupies line 1
            try {
                RawSessionRecord r = wh_detail::parse_row(t.rows[i], idx);
                r.source_file = path;
                r.source_line = lineno;
                out.records.push_back(std::move(r));
            } catch (const ValidationError& e) {
                out.rejects.push_back(
                    {path, lineno, RejectReason::ParseError, e.what()});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cleaning
// ---------------------------------------------------------------------------

struct CleanResult {
    std::vector<SessionFact> facts;
    std::vector<RejectRecord> rejects;
};

/// Apply the cleaning rules. A record survives iff wtfast_ping is present and
/// positive, a positive duration is computable (explicit column preferred,
/// else end - start), and all three geo points exist so the calculated
/// distance is defined. Every record lands in exactly one output list.
inline CleanResult clean(const std::vector<RawSessionRecord>& records) {
    CleanResult out;
    for (const auto& r : records) {
        const auto reject = [&](RejectReason reason, const std::string& detail) {
            out.rejects.push_back({r.source_file, r.source_line, reason, detail});
        };
        if (!r.wtfast_ping) {
            reject(RejectReason::MissingPing, "WTFast_Ping absent");
            continue;
        }
        if (!(*r.wtfast_ping > 0.0)) {
            reject(RejectReason::NonpositivePing,
                   "WTFast_Ping = " + fmt_double(*r.wtfast_ping));
            continue;
        }
        if (!r.session_start) {
            reject(RejectReason::MissingDuration, "Session_Start absent");
            continue;
        }
        std::optional<double> duration = r.duration_s;
        if (!duration && r.session_end)
            duration = static_cast<double>(to_epoch_seconds(*r.session_end) -
                                           to_epoch_seconds(*r.session_start));
        if (!duration) {
            reject(RejectReason::MissingDuration,
                   "no Duration column value and no Session_End");
            continue;
        }
        if (!(*duration > 0.0)) {
            reject(RejectReason::MissingDuration,
                   "nonpositive duration " + fmt_double(*duration));
            continue;
        }
        if (!r.client_geo || !r.node_geo || !r.game_geo) {
            std::string which;
            if (!r.client_geo) which += "client";
            if (!r.node_geo) which += which.empty() ? "node" : "+node";
            if (!r.game_geo) which += which.empty() ? "game" : "+game";
            reject(RejectReason::MissingGeo, which + " geo absent");
            continue;
        }

        SessionFact f;
        f.client_ip = r.client_ip;
        f.client_isp = r.client_isp;
        f.reg_country = r.reg_country;
        f.client_geo = *r.client_geo;
        f.server_id = r.server_id;
        f.game_ip = r.game_ip;
        f.game_isp = r.game_isp;
        f.game_name = r.game_name;
        f.game_geo = *r.game_geo;
        f.node_geo = *r.node_geo;
        f.session_start = *r.session_start;
        f.session_end = r.session_end
                            ? *r.session_end
                            : add_seconds(*r.session_start,
                                          static_cast<std::int64_t>(*duration));
        f.weekend_start = is_weekend(f.session_start);
        f.weekend_end = is_weekend(f.session_end);
        f.internet_ping = r.internet_ping.value_or(0.0);
        f.internet_flux = r.internet_flux;
        f.internet_loss = r.internet_loss;
        f.internet_spke = r.internet_spke;
        f.wtfast_ping = *r.wtfast_ping;
        f.wtfast_flux = r.wtfast_flux;
        f.wtfast_loss = r.wtfast_loss;
        f.wtfast_spke = r.wtfast_spke;
        f.bytes_up_tcp = r.bytes_up_tcp;
        f.bytes_up_udp = r.bytes_up_udp;
        f.bytes_down_tcp = r.bytes_down_tcp;
        f.bytes_down_udp = r.bytes_down_udp;
        f.bytes_total =
            r.bytes_up_tcp + r.bytes_up_udp + r.bytes_down_tcp + r.bytes_down_udp;
        f.socket_count_tcp = r.socket_count_tcp;
        f.socket_count_udp = r.socket_count_udp;
        f.client_ip_count = r.client_ip_count;
        f.game_ip_count = r.game_ip_count;
        f.duration_s = *duration;
        f.calculated_distance =
            calculated_distance_mm(f.client_geo, f.node_geo, f.game_geo);
        f.bytes_per_second = f.bytes_total / f.duration_s;
        out.facts.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Star schema
// ---------------------------------------------------------------------------

struct ClientDim {
    int key = 0;
    std::string client_ip;
    std::string client_isp;
    std::string reg_country;
    GeoPoint geo;
};

struct ServerDim {
    int key = 0;
    std::string server_id;
    std::string game_ip;
    std::string game_isp;
    std::string game_name;
    GeoPoint geo;
};

/// One row per distinct civil minute. Facts reference it twice (start, end)
/// so both weekend flags of the source schema are representable.
struct CalendarDim {
    int key = 0;
    int year = 0, month = 0, day = 0, hour = 0, minute = 0;
    bool weekend = false;
};

struct FactRow {
    int client_key = 0;
    int server_key = 0;
    int start_calendar_key = 0;
    int end_calendar_key = 0;
    int start_second = 0;  // seconds within the start minute
    int end_second = 0;
    double internet_ping = 0.0, internet_flux = 0.0, internet_loss = 0.0,
           internet_spke = 0.0;
    double wtfast_ping = 0.0, wtfast_flux = 0.0, wtfast_loss = 0.0,
           wtfast_spke = 0.0;
    double bytes_up_tcp = 0.0, bytes_up_udp = 0.0, bytes_down_tcp = 0.0,
           bytes_down_udp = 0.0, bytes_total = 0.0;
    double socket_count_tcp = 0.0, socket_count_udp = 0.0;
    double client_ip_count = 0.0, game_ip_count = 0.0;
    double duration_s = 0.0, calculated_distance = 0.0, bytes_per_second = 0.0;
};

struct QueryFilter {
    std::optional<std::string> game;
    std::optional<std::string> country;
    std::optional<int> hour;           // session start hour
    std::optional<bool> weekend;       // session start weekend flag
    std::optional<std::string> date_from;  // "YYYY-MM-DD", inclusive, start date
    std::optional<std::string> date_to;
};

enum class Rollup { Count, Mean, Percentile };
enum class GroupBy { None, Game, Country, Hour, Weekend, Date };

struct QueryRow {
    std::string group;  // "" for GroupBy::None
    std::size_t count = 0;
    double value = 0.0;
};

class Warehouse {
public:
    static constexpr int kSchemaVersion = 1;

    void load(const std::vector<SessionFact>& facts, bool dedup = false) {
        for (const auto& f : facts) {
            if (dedup) {
                const std::string sig = fact_signature(f);
                if (!fact_signatures_.insert(sig).second) continue;
            }
            FactRow row;
            row.client_key = client_key(f);
            row.server_key = server_key(f);
            row.start_calendar_key = calendar_key(f.session_start);
            row.end_calendar_key = calendar_key(f.session_end);
            row.start_second = f.session_start.second;
            row.end_second = f.session_end.second;
            row.internet_ping = f.internet_ping;
            row.internet_flux = f.internet_flux;
            row.internet_loss = f.internet_loss;
            row.internet_spke = f.internet_spke;
            row.wtfast_ping = f.wtfast_ping;
            row.wtfast_flux = f.wtfast_flux;
            row.wtfast_loss = f.wtfast_loss;
            row.wtfast_spke = f.wtfast_spke;
            row.bytes_up_tcp = f.bytes_up_tcp;
            row.bytes_up_udp = f.bytes_up_udp;
            row.bytes_down_tcp = f.bytes_down_tcp;
            row.bytes_down_udp = f.bytes_down_udp;
            row.bytes_total = f.bytes_total;
            row.socket_count_tcp = f.socket_count_tcp;
            row.socket_count_udp = f.socket_count_udp;
            row.client_ip_count = f.client_ip_count;
            row.game_ip_count = f.game_ip_count;
            row.duration_s = f.duration_s;
            row.calculated_distance = f.calculated_distance;
            row.bytes_per_second = f.bytes_per_second;
            facts_.push_back(row);
            node_geos_.push_back(f.node_geo);
        }
    }

    const std::vector<ClientDim>& clients() const { return clients_; }
    const std::vector<ServerDim>& servers() const { return servers_; }
    const std::vector<CalendarDim>& calendar() const { return calendar_; }
    const std::vector<FactRow>& fact_rows() const { return facts_; }
    std::size_t fact_count() const { return facts_.size(); }

    /// Rebuild denormalized facts by joining dimensions back in.
    std::vector<SessionFact> facts() const {
        std::vector<SessionFact> out;
        out.reserve(facts_.size());
        for (const auto& row : facts_) {
            const ClientDim& c = clients_.at(static_cast<std::size_t>(row.client_key) - 1);
            const ServerDim& s = servers_.at(static_cast<std::size_t>(row.server_key) - 1);
            const CalendarDim& cs =
                calendar_.at(static_cast<std::size_t>(row.start_calendar_key) - 1);
            const CalendarDim& ce =
                calendar_.at(static_cast<std::size_t>(row.end_calendar_key) - 1);
            SessionFact f;
            f.client_ip = c.client_ip;
            f.client_isp = c.client_isp;
            f.reg_country = c.reg_country;
            f.client_geo = c.geo;
            f.server_id = s.server_id;
            f.game_ip = s.game_ip;
            f.game_isp = s.game_isp;
            f.game_name = s.game_name;
            f.game_geo = s.geo;
            f.node_geo = node_geo_of(row);
            f.session_start = {cs.year, cs.month, cs.day, cs.hour, cs.minute,
                               row.start_second};
            f.session_end = {ce.year, ce.month, ce.day, ce.hour, ce.minute,
                             row.end_second};
            f.weekend_start = cs.weekend;
            f.weekend_end = ce.weekend;
            f.internet_ping = row.internet_ping;
            f.internet_flux = row.internet_flux;
            f.internet_loss = row.internet_loss;
            f.internet_spke = row.internet_spke;
            f.wtfast_ping = row.wtfast_ping;
            f.wtfast_flux = row.wtfast_flux;
            f.wtfast_loss = row.wtfast_loss;
            f.wtfast_spke = row.wtfast_spke;
            f.bytes_up_tcp = row.bytes_up_tcp;
            f.bytes_up_udp = row.bytes_up_udp;
            f.bytes_down_tcp = row.bytes_down_tcp;
            f.bytes_down_udp = row.bytes_down_udp;
            f.bytes_total = row.bytes_total;
            f.socket_count_tcp = row.socket_count_tcp;
            f.socket_count_udp = row.socket_count_udp;
            f.client_ip_count = row.client_ip_count;
            f.game_ip_count = row.game_ip_count;
            f.duration_s = row.duration_s;
            f.calculated_distance = row.calculated_distance;
            f.bytes_per_second = row.bytes_per_second;
            out.push_back(std::move(f));
        }
        return out;
    }

    // -- rollup queries ------------------------------------------------------

    QueryRow aggregate_rows(const std::vector<double>& values, Rollup rollup,
                            double q) const {
        QueryRow r;
        r.count = values.size();
        switch (rollup) {
            case Rollup::Count: r.value = static_cast<double>(values.size()); break;
            case Rollup::Mean: r.value = values.empty() ? 0.0 : mean(values); break;
            case Rollup::Percentile:
                r.value = values.empty() ? 0.0 : percentile(values, q);
                break;
        }
        return r;
    }

    std::vector<QueryRow> query(const std::string& measure, Rollup rollup,
                                const QueryFilter& filter = {},
                                GroupBy group_by = GroupBy::None,
                                double percentile_q = 0.5) const {
        const auto getter = measure_getter(measure);
        std::optional<std::int64_t> from_day, to_day;
        if (filter.date_from) {
            const DateTime d = parse_date(*filter.date_from);
            from_day = detail::days_from_civil(d.year, d.month, d.day);
        }
        if (filter.date_to) {
            const DateTime d = parse_date(*filter.date_to);
            to_day = detail::days_from_civil(d.year, d.month, d.day);
        }

        std::map<std::string, std::vector<double>> groups;
        for (const auto& row : facts_) {
            const ClientDim& c = clients_.at(static_cast<std::size_t>(row.client_key) - 1);
            const ServerDim& s = servers_.at(static_cast<std::size_t>(row.server_key) - 1);
            const CalendarDim& cs =
                calendar_.at(static_cast<std::size_t>(row.start_calendar_key) - 1);
            if (filter.game && !iequals(s.game_name, *filter.game)) continue;
            if (filter.country && !iequals(c.reg_country, *filter.country)) continue;
            if (filter.hour && cs.hour != *filter.hour) continue;
            if (filter.weekend && cs.weekend != *filter.weekend) continue;
            if (from_day || to_day) {
                const std::int64_t day =
                    detail::days_from_civil(cs.year, cs.month, cs.day);
                if (from_day && day < *from_day) continue;
                if (to_day && day > *to_day) continue;
            }
            std::string key;
            switch (group_by) {
                case GroupBy::None: break;
                case GroupBy::Game: key = s.game_name; break;
                case GroupBy::Country: key = c.reg_country; break;
                case GroupBy::Hour: key = std::to_string(cs.hour); break;
                case GroupBy::Weekend: key = cs.weekend ? "weekend" : "weekday"; break;
                case GroupBy::Date:
                    key = format_date({cs.year, cs.month, cs.day, 0, 0, 0});
                    break;
            }
            groups[key].push_back(getter(row, cs));
        }

        std::vector<QueryRow> out;
        for (const auto& [key, values] : groups) {
            QueryRow r = aggregate_rows(values, rollup, percentile_q);
            r.group = key;
            out.push_back(std::move(r));
        }
        if (out.empty() && group_by == GroupBy::None)
            out.push_back(aggregate_rows({}, rollup, percentile_q));
        return out;
    }

    // -- persistence ---------------------------------------------------------

    void save(const std::string& dir) const {
        namespace fs = std::filesystem;
        fs::create_directories(dir);
        CsvTable ct;
        ct.header = {"key", "client_ip", "client_isp", "reg_country", "client_geo"};
        for (const auto& c : clients_)
            ct.rows.push_back({std::to_string(c.key), c.client_ip, c.client_isp,
                               c.reg_country, format_geo(c.geo)});
        write_csv(dir + "/client_dim.csv", ct);

        CsvTable st;
        st.header = {"key", "server_id", "game_ip", "game_isp", "game_name",
                     "game_geo"};
        for (const auto& s : servers_)
            st.rows.push_back({std::to_string(s.key), s.server_id, s.game_ip,
                               s.game_isp, s.game_name, format_geo(s.geo)});
        write_csv(dir + "/server_dim.csv", st);

        CsvTable kt;
        kt.header = {"key", "year", "month", "day", "hour", "minute", "weekend"};
        for (const auto& k : calendar_)
            kt.rows.push_back({std::to_string(k.key), std::to_string(k.year),
                               std::to_string(k.month), std::to_string(k.day),
                               std::to_string(k.hour), std::to_string(k.minute),
                               k.weekend ? "1" : "0"});
        write_csv(dir + "/calendar_dim.csv", kt);

        CsvTable ft;
        ft.header = {"client_key", "server_key", "start_calendar_key",
                     "end_calendar_key", "start_second", "end_second",
                     "internet_ping", "internet_flux", "internet_loss",
                     "internet_spke", "wtfast_ping", "wtfast_flux", "wtfast_loss",
                     "wtfast_spke", "bytes_up_tcp", "bytes_up_udp",
                     "bytes_down_tcp", "bytes_down_udp", "bytes_total",
                     "socket_count_tcp", "socket_count_udp", "client_ip_count",
                     "game_ip_count", "duration", "calculated_dist",
                     "bytes_per_second", "node_geo"};
        for (const auto& r : facts_) {
            ft.rows.push_back(
                {std::to_string(r.client_key), std::to_string(r.server_key),
                 std::to_string(r.start_calendar_key),
                 std::to_string(r.end_calendar_key), std::to_string(r.start_second),
                 std::to_string(r.end_second), fmt_double(r.internet_ping),
                 fmt_double(r.internet_flux), fmt_double(r.internet_loss),
                 fmt_double(r.internet_spke), fmt_double(r.wtfast_ping),
                 fmt_double(r.wtfast_flux), fmt_double(r.wtfast_loss),
                 fmt_double(r.wtfast_spke), fmt_double(r.bytes_up_tcp),
                 fmt_double(r.bytes_up_udp), fmt_double(r.bytes_down_tcp),
                 fmt_double(r.bytes_down_udp), fmt_double(r.bytes_total),
                 fmt_double(r.socket_count_tcp), fmt_double(r.socket_count_udp),
                 fmt_double(r.client_ip_count), fmt_double(r.game_ip_count),
                 fmt_double(r.duration_s), fmt_double(r.calculated_distance),
                 fmt_double(r.bytes_per_second),
                 format_geo(node_geo_of(r))});
        }
        write_csv(dir + "/session_fact.csv", ft);

        nlohmann::ordered_json manifest;
        manifest["schema_version"] = kSchemaVersion;
        manifest["tool_version"] = kVersion;
        manifest["clients"] = clients_.size();
        manifest["servers"] = servers_.size();
        manifest["calendar"] = calendar_.size();
        manifest["facts"] = facts_.size();
        std::ofstream mf(dir + "/manifest.json");
        if (!mf) throw IoError("cannot write '" + dir + "/manifest.json'");
        mf << manifest.dump(2) << '\n';
    }

    static Warehouse open(const std::string& dir) {
        std::ifstream mf(dir + "/manifest.json");
        if (!mf) throw IoError("not a warehouse directory: '" + dir +
                               "' (missing manifest.json)");
        nlohmann::json manifest = nlohmann::json::parse(mf);
        if (manifest.value("schema_version", -1) != kSchemaVersion)
            throw ValidationError("warehouse schema version mismatch in '" + dir + "'");

        Warehouse w;
        {
            const CsvTable t = read_csv(dir + "/client_dim.csv");
            for (const auto& row : t.rows) {
                ClientDim c;
                c.key = static_cast<int>(parse_long(row[0]));
                c.client_ip = row[1];
                c.client_isp = row[2];
                c.reg_country = row[3];
                c.geo = parse_geo(row[4]);
                w.client_index_[w.client_sig(c.client_ip, c.client_isp,
                                             c.reg_country, c.geo)] = c.key;
                w.clients_.push_back(std::move(c));
            }
        }
        {
            const CsvTable t = read_csv(dir + "/server_dim.csv");
            for (const auto& row : t.rows) {
                ServerDim s;
                s.key = static_cast<int>(parse_long(row[0]));
                s.server_id = row[1];
                s.game_ip = row[2];
                s.game_isp = row[3];
                s.game_name = row[4];
                s.geo = parse_geo(row[5]);
                w.server_index_[w.server_sig(s.server_id, s.game_ip, s.game_isp,
                                             s.game_name, s.geo)] = s.key;
                w.servers_.push_back(std::move(s));
            }
        }
        {
            const CsvTable t = read_csv(dir + "/calendar_dim.csv");
            for (const auto& row : t.rows) {
                CalendarDim k;
                k.key = static_cast<int>(parse_long(row[0]));
                k.year = static_cast<int>(parse_long(row[1]));
                k.month = static_cast<int>(parse_long(row[2]));
                k.day = static_cast<int>(parse_long(row[3]));
                k.hour = static_cast<int>(parse_long(row[4]));
                k.minute = static_cast<int>(parse_long(row[5]));
                k.weekend = row[6] == "1";
                w.calendar_index_[w.calendar_sig(k.year, k.month, k.day, k.hour,
                                                 k.minute)] = k.key;
                w.calendar_.push_back(k);
            }
        }
        {
            const CsvTable t = read_csv(dir + "/session_fact.csv");
            for (const auto& row : t.rows) {
                FactRow r;
                std::size_t i = 0;
                r.client_key = static_cast<int>(parse_long(row[i++]));
                r.server_key = static_cast<int>(parse_long(row[i++]));
                r.start_calendar_key = static_cast<int>(parse_long(row[i++]));
                r.end_calendar_key = static_cast<int>(parse_long(row[i++]));
                r.start_second = static_cast<int>(parse_long(row[i++]));
                r.end_second = static_cast<int>(parse_long(row[i++]));
                r.internet_ping = parse_double(row[i++]);
                r.internet_flux = parse_double(row[i++]);
                r.internet_loss = parse_double(row[i++]);
                r.internet_spke = parse_double(row[i++]);
                r.wtfast_ping = parse_double(row[i++]);
                r.wtfast_flux = parse_double(row[i++]);
                r.wtfast_loss = parse_double(row[i++]);
                r.wtfast_spke = parse_double(row[i++]);
                r.bytes_up_tcp = parse_double(row[i++]);
                r.bytes_up_udp = parse_double(row[i++]);
                r.bytes_down_tcp = parse_double(row[i++]);
                r.bytes_down_udp = parse_double(row[i++]);
                r.bytes_total = parse_double(row[i++]);
                r.socket_count_tcp = parse_double(row[i++]);
                r.socket_count_udp = parse_double(row[i++]);
                r.client_ip_count = parse_double(row[i++]);
                r.game_ip_count = parse_double(row[i++]);
                r.duration_s = parse_double(row[i++]);
                r.calculated_distance = parse_double(row[i++]);
                r.bytes_per_second = parse_double(row[i++]);
                w.node_geos_.push_back(parse_geo(row[i++]));
                w.facts_.push_back(r);
            }
        }
        return w;
    }

    static void save_rejects(const std::string& path,
                             const std::vector<RejectRecord>& rejects) {
        CsvTable t;
        t.header = {"source_file", "source_line", "reason", "detail"};
        for (const auto& r : rejects)
            t.rows.push_back({r.source_file, std::to_string(r.source_line),
                              reject_reason_code(r.reason), r.detail});
        write_csv(path, t);
    }

private:
    std::string client_sig(const std::string& ip, const std::string& isp,
                           const std::string& country, const GeoPoint& geo) const {
        return ip + "\x1f" + isp + "\x1f" + country + "\x1f" + format_geo(geo);
    }
    std::string server_sig(const std::string& id, const std::string& ip,
                           const std::string& isp, const std::string& name,
                           const GeoPoint& geo) const {
        return id + "\x1f" + ip + "\x1f" + isp + "\x1f" + name + "\x1f" +
               format_geo(geo);
    }
    std::string calendar_sig(int y, int mo, int d, int h, int mi) const {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%04d%02d%02d%02d%02d", y, mo, d, h, mi);
        return buf;
    }

    int client_key(const SessionFact& f) {
        const std::string sig =
            client_sig(f.client_ip, f.client_isp, f.reg_country, f.client_geo);
        const auto it = client_index_.find(sig);
        if (it != client_index_.end()) return it->second;
        const int key = static_cast<int>(clients_.size()) + 1;
        clients_.push_back(
            {key, f.client_ip, f.client_isp, f.reg_country, f.client_geo});
        client_index_[sig] = key;
        return key;
    }

    int server_key(const SessionFact& f) {
        const std::string sig =
            server_sig(f.server_id, f.game_ip, f.game_isp, f.game_name, f.game_geo);
        const auto it = server_index_.find(sig);
        if (it != server_index_.end()) return it->second;
        const int key = static_cast<int>(servers_.size()) + 1;
        servers_.push_back(
            {key, f.server_id, f.game_ip, f.game_isp, f.game_name, f.game_geo});
        server_index_[sig] = key;
        return key;
    }

    int calendar_key(const DateTime& dt) {
        const std::string sig =
            calendar_sig(dt.year, dt.month, dt.day, dt.hour, dt.minute);
        const auto it = calendar_index_.find(sig);
        if (it != calendar_index_.end()) return it->second;
        const int key = static_cast<int>(calendar_.size()) + 1;
        calendar_.push_back(
            {key, dt.year, dt.month, dt.day, dt.hour, dt.minute, is_weekend(dt)});
        calendar_index_[sig] = key;
        return key;
    }

    std::string fact_signature(const SessionFact& f) const {
        std::string s = client_sig(f.client_ip, f.client_isp, f.reg_country,
                                   f.client_geo);
        s += "\x1e" + server_sig(f.server_id, f.game_ip, f.game_isp, f.game_name,
                                 f.game_geo);
        s += "\x1e" + format_datetime(f.session_start) + format_datetime(f.session_end);
        s += "\x1e" + format_geo(f.node_geo);
        for (double v : {f.internet_ping, f.internet_flux, f.internet_loss,
                         f.internet_spke, f.wtfast_ping, f.wtfast_flux,
                         f.wtfast_loss, f.wtfast_spke, f.bytes_up_tcp,
                         f.bytes_up_udp, f.bytes_down_tcp, f.bytes_down_udp,
                         f.socket_count_tcp, f.socket_count_udp, f.client_ip_count,
                         f.game_ip_count, f.duration_s})
            s += "\x1e" + fmt_double(v);
        return s;
    }

    /// Node coordinates ride alongside facts_ (same index), since they belong
    /// to neither the client nor the server dimension.
    GeoPoint node_geo_of(const FactRow& row) const {
        const auto idx = static_cast<std::size_t>(&row - facts_.data());
        return idx < node_geos_.size() ? node_geos_[idx] : GeoPoint{};
    }

    using MeasureGetter = std::function<double(const FactRow&, const CalendarDim&)>;

    MeasureGetter measure_getter(const std::string& name) const {
        static const std::map<std::string, double FactRow::*> numeric = {
            {"internet_ping", &FactRow::internet_ping},
            {"internet_flux", &FactRow::internet_flux},
            {"internet_loss", &FactRow::internet_loss},
            {"internet_spke", &FactRow::internet_spke},
            {"wtfast_ping", &FactRow::wtfast_ping},
            {"wtfast_flux", &FactRow::wtfast_flux},
            {"wtfast_loss", &FactRow::wtfast_loss},
            {"wtfast_spke", &FactRow::wtfast_spke},
            {"bytes_up_tcp", &FactRow::bytes_up_tcp},
            {"bytes_up_udp", &FactRow::bytes_up_udp},
            {"bytes_down_tcp", &FactRow::bytes_down_tcp},
            {"bytes_down_udp", &FactRow::bytes_down_udp},
            {"bytes_total", &FactRow::bytes_total},
            {"socket_count_tcp", &FactRow::socket_count_tcp},
            {"socket_count_udp", &FactRow::socket_count_udp},
            {"client_ip_count", &FactRow::client_ip_count},
            {"game_ip_count", &FactRow::game_ip_count},
            {"duration", &FactRow::duration_s},
            {"calculated_dist", &FactRow::calculated_distance},
            {"calculated_distance", &FactRow::calculated_distance},
            {"bytes_per_second", &FactRow::bytes_per_second},
        };
        const std::string key = to_lower(trim(name));
        if (key == "weekend")
            return [](const FactRow&, const CalendarDim& cs) {
                return cs.weekend ? 1.0 : 0.0;
            };
        const auto it = numeric.find(key);
        if (it == numeric.end())
            throw ValidationError("unknown measure '" + name + "'");
        const auto member = it->second;
        return [member](const FactRow& r, const CalendarDim&) { return r.*member; };
    }

    std::vector<ClientDim> clients_;
    std::vector<ServerDim> servers_;
    std::vector<CalendarDim> calendar_;
    std::vector<FactRow> facts_;
    std::vector<GeoPoint> node_geos_;
    std::map<std::string, int> client_index_;
    std::map<std::string, int> server_index_;
    std::map<std::string, int> calendar_index_;
    std::set<std::string> fact_signatures_;
};

}  // namespace gpncast
