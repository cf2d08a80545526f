#include "hubshift/geojson.hpp"

#include <fstream>
#include <sstream>

#include "hubshift/csvio.hpp"
#include "hubshift/errors.hpp"
#include "json.hpp"

namespace hubshift::analytics {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + std::string(e.what()));
    }
}

std::vector<GeoPoint> parse_ring(const json& coords, const std::string& path) {
    std::vector<GeoPoint> ring;
    for (const auto& pair : coords) {
        if (!pair.is_array() || pair.size() < 2)
            throw DataError(path + ": ring coordinate is not [lon, lat]");
        GeoPoint p{pair[1].get<double>(), pair[0].get<double>()};
        if (!p.valid()) throw DataError(path + ": coordinate out of range");
        ring.push_back(p);
    }
    // drop an explicit closing vertex; the ray caster closes rings itself
    if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
    if (ring.size() < 3) throw DataError(path + ": ring has fewer than 3 vertices");
    return ring;
}

Polygon parse_polygon(const json& coords, const std::string& path) {
    Polygon poly;
    for (const auto& ring : coords) poly.rings.push_back(parse_ring(ring, path));
    if (poly.rings.empty()) throw DataError(path + ": polygon with no rings");
    return poly;
}

std::vector<Polygon> parse_geometry(const json& geom, const std::string& path) {
    const auto type = geom.at("type").get<std::string>();
    std::vector<Polygon> polys;
    if (type == "Polygon") {
        polys.push_back(parse_polygon(geom.at("coordinates"), path));
    } else if (type == "MultiPolygon") {
        for (const auto& c : geom.at("coordinates")) polys.push_back(parse_polygon(c, path));
    } else {
        throw DataError(path + ": unsupported geometry type '" + type + "'");
    }
    return polys;
}

std::string feature_id(const json& feature, const std::string& path) {
    const auto& props = feature.at("properties");
    if (!props.contains("id")) throw DataError(path + ": feature without an 'id' property");
    const auto& id = props.at("id");
    if (id.is_string()) return id.get<std::string>();
    if (id.is_number_integer()) return std::to_string(id.get<long long>());
    throw DataError(path + ": feature 'id' must be a string or integer");
}

json ring_to_json(const std::vector<GeoPoint>& ring) {
    json arr = json::array();
    for (const auto& p : ring) arr.push_back({p.lon, p.lat});
    arr.push_back({ring.front().lon, ring.front().lat});  // close the ring
    return arr;
}

json polygon_geometry(const std::vector<Polygon>& polys) {
    if (polys.size() == 1) {
        json rings = json::array();
        for (const auto& r : polys[0].rings) rings.push_back(ring_to_json(r));
        return {{"type", "Polygon"}, {"coordinates", rings}};
    }
    json multi = json::array();
    for (const auto& poly : polys) {
        json rings = json::array();
        for (const auto& r : poly.rings) rings.push_back(ring_to_json(r));
        multi.push_back(rings);
    }
    return {{"type", "MultiPolygon"}, {"coordinates", multi}};
}

}  // namespace

SubdistrictSet load_subdistricts(const std::string& path) {
    const json j = read_json(path);
    if (j.value("type", "") != "FeatureCollection")
        throw DataError(path + ": expected a FeatureCollection");
    SubdistrictSet s;
    for (const auto& feature : j.at("features")) {
        const auto id = feature_id(feature, path);
        if (s.polygons.count(id)) throw DataError(path + ": duplicate subdistrict id " + id);
        s.polygons[id] = parse_geometry(feature.at("geometry"), path);
    }
    if (s.polygons.empty()) throw DataError(path + ": no subdistrict features");
    return s;
}

void load_reference_series(SubdistrictSet& s, const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || lines[0] != "subdistrict_id,employment,population")
        throw DataError(path + ": expected header 'subdistrict_id,employment,population'");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split_fields(lines[i]);
        if (f.size() != 3)
            throw DataError(path + " line " + std::to_string(i + 1) + ": expected 3 fields");
        const auto employment = csv::parse_double(f[1]);
        const auto population = csv::parse_double(f[2]);
        if (!employment || !population || *employment < 0.0 || *population < 0.0)
            throw DataError(path + " line " + std::to_string(i + 1) + ": bad counts");
        s.reference_series[std::string(f[0])] = {*employment, *population};
    }
}

RingModel load_rings(const std::string& path) {
    const json j = read_json(path);
    if (j.value("type", "") != "FeatureCollection")
        throw DataError(path + ": expected a FeatureCollection");
    std::vector<std::pair<long long, Polygon>> ordered;
    for (const auto& feature : j.at("features")) {
        const auto& props = feature.at("properties");
        if (!props.contains("id")) throw DataError(path + ": ring feature without 'id'");
        long long order = 0;
        if (props.at("id").is_number_integer())
            order = props.at("id").get<long long>();
        else
            order = std::stoll(props.at("id").get<std::string>());
        auto polys = parse_geometry(feature.at("geometry"), path);
        if (polys.size() != 1) throw DataError(path + ": each ring must be a single polygon");
        ordered.emplace_back(order, std::move(polys[0]));
    }
    if (ordered.size() != 3)
        throw DataError(path + ": expected exactly 3 nested rings, got " +
                        std::to_string(ordered.size()));
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    RingModel model;
    for (auto& [order, poly] : ordered) model.rings.push_back(std::move(poly));
    return model;
}

void write_subdistricts(const SubdistrictSet& s, const std::string& path) {
    json features = json::array();
    for (const auto& [id, polys] : s.polygons) {
        features.push_back({{"type", "Feature"},
                            {"properties", {{"id", id}}},
                            {"geometry", polygon_geometry(polys)}});
    }
    const json j = {{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

void write_rings(const RingModel& rings, const std::string& path) {
    json features = json::array();
    for (std::size_t i = 0; i < rings.rings.size(); ++i) {
        features.push_back({{"type", "Feature"},
                            {"properties", {{"id", static_cast<int>(i + 1)}}},
                            {"geometry", polygon_geometry({rings.rings[i]})}});
    }
    const json j = {{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace hubshift::analytics
