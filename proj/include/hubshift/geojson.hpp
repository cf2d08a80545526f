#pragma once

#include <string>

#include "hubshift/analytics.hpp"

namespace hubshift::analytics {

// FeatureCollection of Polygon/MultiPolygon features, each with an `id`
// property. Coordinates are GeoJSON order: [lon, lat].
SubdistrictSet load_subdistricts(const std::string& geojson_path);

// Census CSV `subdistrict_id,employment,population` merged into the set.
void load_reference_series(SubdistrictSet& s, const std::string& csv_path);

// FeatureCollection of ring polygons; ordered innermost first by their
// numeric `id` property (e.g. 4, 5, 6 for the ring roads).
RingModel load_rings(const std::string& geojson_path);

void write_subdistricts(const SubdistrictSet& s, const std::string& path);
void write_rings(const RingModel& rings, const std::string& path);

}  // namespace hubshift::analytics
