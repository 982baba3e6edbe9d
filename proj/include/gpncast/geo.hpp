#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "gpncast/common.hpp"

namespace gpncast {

inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline bool validate_geo(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
           p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

namespace detail {
inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }
}  // namespace detail

/// Great-circle distance in km (haversine).
inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    using detail::deg2rad;
    const double phi1 = deg2rad(a.lat), phi2 = deg2rad(b.lat);
    const double dphi = deg2rad(b.lat - a.lat);
    const double dlam = deg2rad(b.lon - a.lon);
    const double s = std::sin(dphi / 2.0), t = std::sin(dlam / 2.0);
    const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Point reached by travelling `dist_km` from `start` along `bearing_deg`
/// (clockwise from north) on the great circle.
inline GeoPoint destination(const GeoPoint& start, double bearing_deg,
                            double dist_km) {
    using detail::deg2rad;
    using detail::rad2deg;
    const double delta = dist_km / kEarthRadiusKm;
    const double theta = deg2rad(bearing_deg);
    const double phi1 = deg2rad(start.lat);
    const double lam1 = deg2rad(start.lon);
    const double sin_phi2 = std::sin(phi1) * std::cos(delta) +
                            std::cos(phi1) * std::sin(delta) * std::cos(theta);
    const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
    const double y = std::sin(theta) * std::sin(delta) * std::cos(phi1);
    const double x = std::cos(delta) - std::sin(phi1) * sin_phi2;
    double lam2 = lam1 + std::atan2(y, x);
    // normalize longitude to [-180, 180]
    double lon = rad2deg(lam2);
    while (lon > 180.0) lon -= 360.0;
    while (lon < -180.0) lon += 360.0;
    return GeoPoint{rad2deg(phi2), lon};
}

/// Route-length proxy for a session, in megameters: the client connects
/// through the relay node to the game server, so the path is the sum of the
/// two great-circle legs.
inline double calculated_distance_mm(const GeoPoint& client,
                                     const GeoPoint& node,
                                     const GeoPoint& game) {
    return (haversine_km(client, node) + haversine_km(node, game)) / 1000.0;
}

/// Geo cells are "lat lon", space separated. Empty cell means absent and is
/// handled by the caller; this parser requires both numbers.
inline GeoPoint parse_geo(std::string_view s) {
    const std::string t = trim(s);
    const auto sp = t.find(' ');
    if (sp == std::string::npos)
        throw ValidationError("bad geo point: '" + t + "'");
    GeoPoint p;
    p.lat = parse_double(t.substr(0, sp));
    p.lon = parse_double(t.substr(sp + 1));
    if (!validate_geo(p))
        throw ValidationError("geo point out of range: '" + t + "'");
    return p;
}

inline std::string format_geo(const GeoPoint& p) {
    return fmt_double(p.lat) + " " + fmt_double(p.lon);
}

}  // namespace gpncast
