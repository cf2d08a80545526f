#include "hubshift/geo.hpp"

#include <algorithm>

namespace hubshift {

namespace {
inline double deg2rad(double d) { return d * kPi / 180.0; }
}  // namespace

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    if (a.lat == b.lat && a.lon == b.lon) return 0.0;
    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double dlat = lat2 - lat1;
    const double dlon = deg2rad(b.lon - a.lon);
    const double sl = std::sin(dlat * 0.5);
    const double so = std::sin(dlon * 0.5);
    const double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

}  // namespace hubshift
