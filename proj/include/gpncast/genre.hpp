#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gpncast/common.hpp"
#include "gpncast/csv.hpp"

namespace gpncast {

/// Closed genre enumeration. The first six are the primary genres; the last
/// three only appear inside composite types. Enum order is also the spelling
/// order of composite type names (ACT before RPG before STRATEGY, ...).
enum class Genre : std::uint8_t {
    ACTION = 0,
    RPG,
    STRATEGY,
    MMP,
    SHOOTER,
    SIMULATION,
    ADVENTURE,
    CASUAL,
    SPORTS,
};

inline constexpr int kGenreCount = 9;

inline constexpr std::array<const char*, kGenreCount> kGenreToken = {
    "ACT", "RPG", "STRATEGY", "MMP", "SHOOTER", "SIM", "ADV", "CASUAL", "SPORTS"};

inline constexpr std::array<const char*, kGenreCount> kGenreName = {
    "ACTION",    "RPG",       "STRATEGY", "MMP",    "SHOOTER",
    "SIMULATION", "ADVENTURE", "CASUAL",   "SPORTS"};

/// A game type: a non-empty set of genres, or the distinguished OTHER type
/// for games that are not in the classification map.
class GameType {
public:
    GameType() = default;

    static GameType other() {
        GameType t;
        t.other_ = true;
        return t;
    }

    static GameType of(std::initializer_list<Genre> genres) {
        GameType t;
        for (Genre g : genres) t.bits_ |= bit(g);
        if (t.bits_ == 0) throw ValidationError("game type needs at least one genre");
        return t;
    }

    /// Parse a canonical type string like "ACT.RPG.MMP" or "OTHER".
    /// Tokens are case-insensitive; order in the input does not matter.
    static GameType parse(std::string_view s) {
        const std::string t = trim(s);
        if (iequals(t, "OTHER")) return other();
        GameType out;
        std::size_t pos = 0;
        while (pos <= t.size()) {
            const auto dot = t.find('.', pos);
            const auto end = dot == std::string::npos ? t.size() : dot;
            const std::string tok = trim(t.substr(pos, end - pos));
            bool found = false;
            for (int g = 0; g < kGenreCount; ++g) {
                if (iequals(tok, kGenreToken[static_cast<std::size_t>(g)])) {
                    out.bits_ |= bit(static_cast<Genre>(g));
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ValidationError("unknown genre token '" + tok + "' in '" + t + "'");
            if (dot == std::string::npos) break;
            pos = dot + 1;
        }
        if (out.bits_ == 0)
            throw ValidationError("empty game type '" + t + "'");
        return out;
    }

    bool is_other() const { return other_; }
    bool contains(Genre g) const { return !other_ && (bits_ & bit(g)) != 0; }

    int size() const {
        if (other_) return 0;
        int n = 0;
        for (std::uint16_t b = bits_; b; b >>= 1) n += b & 1;
        return n;
    }

    std::vector<Genre> genres() const {
        std::vector<Genre> out;
        for (int g = 0; g < kGenreCount; ++g)
            if (contains(static_cast<Genre>(g))) out.push_back(static_cast<Genre>(g));
        return out;
    }

    /// Canonical name: tokens joined in spelling order, e.g. "ACT.RPG.MMP".
    std::string name() const {
        if (other_) return "OTHER";
        std::string out;
        for (int g = 0; g < kGenreCount; ++g) {
            if (!contains(static_cast<Genre>(g))) continue;
            if (!out.empty()) out += '.';
            out += kGenreToken[static_cast<std::size_t>(g)];
        }
        return out;
    }

    /// Subset relation on genre sets. OTHER is not comparable with anything.
    bool subset_of(const GameType& b) const {
        if (other_ || b.other_) return false;
        return (bits_ & b.bits_) == bits_;
    }

    bool proper_subset_of(const GameType& b) const {
        return subset_of(b) && bits_ != b.bits_;
    }

    friend bool operator==(const GameType& a, const GameType& b) {
        return a.other_ == b.other_ && a.bits_ == b.bits_;
    }
    friend bool operator!=(const GameType& a, const GameType& b) { return !(a == b); }
    friend bool operator<(const GameType& a, const GameType& b) {
        if (a.other_ != b.other_) return b.other_;  // OTHER sorts last
        return a.bits_ < b.bits_;
    }

private:
    static std::uint16_t bit(Genre g) {
        return static_cast<std::uint16_t>(1u << static_cast<unsigned>(g));
    }
    std::uint16_t bits_ = 0;
    bool other_ = false;
};

/// The 23 one-up game-type names, in the order they are listed in the type
/// vocabulary (includes OTHER; the WEEKEND indicator is separate).
inline const std::vector<std::string>& default_type_vocabulary() {
    static const std::vector<std::string> v = {
        "RPG.MMP",
        "RPG.CASUAL",
        "OTHER",
        "ACT.SHOOTER",
        "ACT.RPG.STRATEGY",
        "ACT.MMP.SHOOTER",
        "ACT.RPG.MMP.ADV",
        "ACT.STRATEGY",
        "ACT",
        "RPG.SHOOTER",
        "STRATEGY",
        "ACT.RPG.MMP",
        "ACT.RPG.STRATEGY.MMP.SIM.ADV",
        "ACT.STRATEGY.MMP.SHOOTER",
        "SPORTS",
        "ACT.MMP.SHOOTER.SIM",
        "ACT.MMP",
        "ACT.SPORTS",
        "ACT.RPG.MMP.ADV.SPORTS",
        "ACT.RPG",
        "SHOOTER",
        "RPG",
        "ACT.STRATEGY.MMP",
    };
    return v;
}

/// game_name -> GameType lookup table, loaded from a two-column file.
/// Lookups are case-insensitive and trimmed; misses classify as OTHER.
class TypeMap {
public:
    TypeMap() = default;

    void add(std::string_view game_name, GameType type) {
        map_[to_lower(trim(game_name))] = type;
    }

    static TypeMap load(const std::string& path) {
        const CsvTable t = read_csv(path);
        if (t.header.size() < 2)
            throw ValidationError(path + ": expected columns game_name,type");
        const std::size_t name_col = t.require_column("game_name");
        const std::size_t type_col = t.require_column("type");
        TypeMap m;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const std::size_t lineno = i + 2;  // header is line 1
            try {
                m.add(t.rows[i][name_col], GameType::parse(t.rows[i][type_col]));
            } catch (const ValidationError& e) {
                throw ValidationError(path + " line " + std::to_string(lineno) +
                                      ": " + e.what());
            }
        }
        return m;
    }

    void save(const std::string& path) const {
        CsvTable t;
        t.header = {"game_name", "type"};
        for (const auto& [name, type] : map_) t.rows.push_back({name, type.name()});
        write_csv(path, t);
    }

    GameType classify(std::string_view game_name) const {
        const auto it = map_.find(to_lower(trim(game_name)));
        return it == map_.end() ? GameType::other() : it->second;
    }

    std::size_t size() const { return map_.size(); }

    const std::map<std::string, GameType>& entries() const { return map_; }

private:
    std::map<std::string, GameType> map_;
};

/// Covering edges (A, B) of the Hasse diagram of `types` under subset
/// inclusion: A is a proper subset of B with no intermediate type present.
inline std::vector<std::pair<GameType, GameType>> hasse_edges(
    std::vector<GameType> types) {
    for (const auto& t : types)
        if (t.is_other())
            throw ValidationError("OTHER is not a genre subset; exclude it from the lattice");
    std::sort(types.begin(), types.end());
    types.erase(std::unique(types.begin(), types.end()), types.end());
    std::vector<std::pair<GameType, GameType>> edges;
    for (const auto& a : types) {
        for (const auto& b : types) {
            if (!a.proper_subset_of(b)) continue;
            bool covered = true;
            for (const auto& c : types) {
                if (a.proper_subset_of(c) && c.proper_subset_of(b)) {
                    covered = false;
                    break;
                }
            }
            if (covered) edges.emplace_back(a, b);
        }
    }
    std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second < y.second;
    });
    return edges;
}

struct TypeShare {
    GameType type;
    std::size_t count = 0;
    double percent = 0.0;
};

/// Share of records per game type, sorted by share descending
/// (ties broken by canonical name for stable output).
inline std::vector<TypeShare> type_distribution(
    const std::vector<std::string>& game_names, const TypeMap& map) {
    if (game_names.empty())
        throw ValidationError("type distribution needs at least one record");
    std::map<GameType, std::size_t> counts;
    for (const auto& name : game_names) ++counts[map.classify(name)];
    std::vector<TypeShare> out;
    const double n = static_cast<double>(game_names.size());
    for (const auto& [type, count] : counts)
        out.push_back({type, count, 100.0 * static_cast<double>(count) / n});
    std::sort(out.begin(), out.end(), [](const TypeShare& a, const TypeShare& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.type.name() < b.type.name();
    });
    return out;
}

}  // namespace gpncast
