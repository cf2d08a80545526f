#pragma once

#include <cmath>

namespace hubshift {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kPi = 3.14159265358979323846;

// Kilometers spanned by one degree of latitude (and of longitude at the
// equator) on the 6371 km sphere.
inline constexpr double kKmPerDegree = kEarthRadiusKm * kPi / 180.0;

struct GeoPoint {
    double lat = 0.0;  // degrees, WGS84, [-90, 90]
    double lon = 0.0;  // degrees, WGS84, [-180, 180]

    bool valid() const {
        return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
               lon >= -180.0 && lon <= 180.0;
    }

    friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
        return a.lat == b.lat && a.lon == b.lon;
    }
};

// Great-circle distance in km on a sphere of radius 6371.0 km.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

}  // namespace hubshift
