#pragma once

#include <map>
#include <string>
#include <vector>

#include "gpncast/common.hpp"
#include "gpncast/csv.hpp"
#include "gpncast/genre.hpp"
#include "gpncast/stats.hpp"

namespace gpncast {

struct QosConfig {
    double k = 100.0;  // numerator constant; sets the scale of QoS
    double w = 1.0;    // weight of latency variability relative to the mean
};

/// Quality of service for one scope of sessions: K / (mean + w * std) over
/// the scope's ping values. Inversely proportional to both latency and
/// latency variance. std is the sample standard deviation; a single-session
/// scope gets std = 0.
inline double qos(const std::vector<double>& pings, const QosConfig& cfg = {}) {
    if (pings.empty()) throw ValidationError("qos: empty session scope");
    for (double p : pings)
        if (!(p > 0.0)) throw ValidationError("qos: all pings must be > 0");
    const double sd = pings.size() == 1 ? 0.0 : stddev(pings, 1);
    return cfg.k / (mean(pings) + cfg.w * sd);
}

struct QoEScore {
    double qos = 0.0;
    double si = 0.0;
    double qoe = 0.0;  // always qos * si
};

inline QoEScore qoe(double qos_value, double si) {
    if (!(qos_value > 0.0)) throw ValidationError("qoe: qos must be > 0");
    if (si < 1.0 || si > 5.0)
        throw ValidationError("qoe: sensitivity index must be in [1,5], got " +
                              fmt_double(si));
    return QoEScore{qos_value, si, qos_value * si};
}

/// Default sensitivity index for a game type when no table entry exists.
/// First matching rule wins; grounded in genre latency tolerance: twitch
/// shooters and action MMOs are most demanding, casual and simulation least.
inline double default_si(const GameType& t) {
    if (t.is_other()) return 3.0;
    if (t.contains(Genre::SHOOTER) ||
        (t.contains(Genre::ACTION) && t.contains(Genre::MMP)))
        return 5.0;
    if (t.contains(Genre::ACTION) || t.contains(Genre::SPORTS)) return 4.0;
    if (t.contains(Genre::STRATEGY)) return 3.0;
    if (t.contains(Genre::RPG) || t.contains(Genre::MMP)) return 2.0;
    return 1.0;  // CASUAL, SIMULATION, ADVENTURE and their combinations
}

/// Editable per-type sensitivity index table; falls back to default_si.
class SiTable {
public:
    SiTable() = default;

    void set(const GameType& type, double si) {
        if (si < 1.0 || si > 5.0)
            throw ValidationError("sensitivity index must be in [1,5], got " +
                                  fmt_double(si));
        map_[type] = si;
    }

    static SiTable load(const std::string& path) {
        const CsvTable t = read_csv(path);
        const std::size_t type_col = t.require_column("type");
        const std::size_t si_col = t.require_column("si");
        SiTable out;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const std::size_t lineno = i + 2;
            try {
                out.set(GameType::parse(t.rows[i][type_col]),
                        parse_double(t.rows[i][si_col]));
            } catch (const ValidationError& e) {
                throw ValidationError(path + " line " + std::to_string(lineno) +
                                      ": " + e.what());
            }
        }
        return out;
    }

    void save(const std::string& path) const {
        CsvTable t;
        t.header = {"type", "si"};
        for (const auto& [type, si] : map_)
            t.rows.push_back({type.name(), fmt_double(si)});
        write_csv(path, t);
    }

    double lookup(const GameType& type) const {
        const auto it = map_.find(type);
        return it == map_.end() ? default_si(type) : it->second;
    }

    std::size_t size() const { return map_.size(); }

private:
    std::map<GameType, double> map_;
};

}  // namespace gpncast
