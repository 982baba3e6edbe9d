#pragma once

#include <optional>
#include <string>

#include "gpncast/datetime.hpp"
#include "gpncast/geo.hpp"

namespace gpncast {

/// One raw session row as parsed from an input file, before cleaning.
/// Optionals model absent cells; the cleaning rules decide what absence
/// means for each field.
struct RawSessionRecord {
    // client
    std::string client_ip;
    std::string client_isp;
    std::string reg_country;
    std::optional<GeoPoint> client_geo;

    // server / game
    std::string server_id;
    std::string game_ip;
    std::string game_isp;
    std::string game_name;
    std::optional<GeoPoint> game_geo;
    std::optional<GeoPoint> node_geo;

    // timing
    std::optional<DateTime> session_start;
    std::optional<DateTime> session_end;
    std::optional<double> duration_s;  // explicit column, preferred over end-start

    // latency measures
    std::optional<double> internet_ping;  // ms
    double internet_flux = 0.0;           // ms
    double internet_loss = 0.0;           // count
    double internet_spke = 0.0;           // count
    std::optional<double> wtfast_ping;    // ms, the prediction target
    double wtfast_flux = 0.0;
    double wtfast_loss = 0.0;
    double wtfast_spke = 0.0;

    // volume / configuration measures
    double bytes_up_tcp = 0.0;
    double bytes_up_udp = 0.0;
    double bytes_down_tcp = 0.0;
    double bytes_down_udp = 0.0;
    double socket_count_tcp = 0.0;
    double socket_count_udp = 0.0;
    double client_ip_count = 0.0;
    double game_ip_count = 0.0;

    // provenance, for the reject audit trail
    std::string source_file;
    std::size_t source_line = 0;  // 1-based line in the source file
};

enum class RejectReason {
    MissingPing,
    NonpositivePing,
    MissingDuration,
    MissingGeo,
    ParseError,
};

inline const char* reject_reason_code(RejectReason r) {
    switch (r) {
        case RejectReason::MissingPing: return "missing-ping";
        case RejectReason::NonpositivePing: return "nonpositive-ping";
        case RejectReason::MissingDuration: return "missing-duration";
        case RejectReason::MissingGeo: return "missing-geo";
        case RejectReason::ParseError: return "parse-error";
    }
    return "unknown";
}

inline RejectReason parse_reject_reason(std::string_view s) {
    for (RejectReason r :
         {RejectReason::MissingPing, RejectReason::NonpositivePing,
          RejectReason::MissingDuration, RejectReason::MissingGeo,
          RejectReason::ParseError}) {
        if (iequals(s, reject_reason_code(r))) return r;
    }
    throw ValidationError("unknown reject reason '" + std::string(s) + "'");
}

struct RejectRecord {
    std::string source_file;
    std::size_t source_line = 0;
    RejectReason reason = RejectReason::ParseError;
    std::string detail;
};

/// One cleaned session, denormalized: everything the warehouse dimensions
/// and the feature pipeline need, with derived measures already populated.
struct SessionFact {
    // client dimension attributes
    std::string client_ip;
    std::string client_isp;
    std::string reg_country;
    GeoPoint client_geo;

    // server dimension attributes
    std::string server_id;
    std::string game_ip;
    std::string game_isp;
    std::string game_name;
    GeoPoint game_geo;
    GeoPoint node_geo;

    // calendar
    DateTime session_start;
    DateTime session_end;
    bool weekend_start = false;
    bool weekend_end = false;

    // measures
    double internet_ping = 0.0;  // 0 when the raw cell was absent
    double internet_flux = 0.0;
    double internet_loss = 0.0;
    double internet_spke = 0.0;
    double wtfast_ping = 0.0;  // > 0, guaranteed by cleaning
    double wtfast_flux = 0.0;
    double wtfast_loss = 0.0;
    double wtfast_spke = 0.0;
    double bytes_up_tcp = 0.0;
    double bytes_up_udp = 0.0;
    double bytes_down_tcp = 0.0;
    double bytes_down_udp = 0.0;
    double bytes_total = 0.0;
    double socket_count_tcp = 0.0;
    double socket_count_udp = 0.0;
    double client_ip_count = 0.0;
    double game_ip_count = 0.0;

    // derived
    double duration_s = 0.0;            // > 0, guaranteed by cleaning
    double calculated_distance = 0.0;   // megameters, client->node->game
    double bytes_per_second = 0.0;
};

}  // namespace gpncast
