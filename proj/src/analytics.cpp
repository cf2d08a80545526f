#include "hubshift/analytics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "hubshift/csvio.hpp"
#include "hubshift/errors.hpp"

namespace hubshift::analytics {

// ---- geometry -------------------------------------------------------------

bool point_in_polygon(const GeoPoint& p, const Polygon& poly) {
    // even-odd ray casting, ray towards +lon
    bool inside = false;
    for (const auto& ring : poly.rings) {
        const std::size_t n = ring.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const auto& a = ring[j];
            const auto& b = ring[i];
            const bool crosses = (b.lat > p.lat) != (a.lat > p.lat);
            if (!crosses) continue;
            const double x = b.lon + (p.lat - b.lat) / (a.lat - b.lat) * (a.lon - b.lon);
            if (p.lon < x) inside = !inside;
        }
    }
    return inside;
}

bool point_on_boundary(const GeoPoint& p, const Polygon& poly) {
    for (const auto& ring : poly.rings) {
        const std::size_t n = ring.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const auto& a = ring[j];
            const auto& b = ring[i];
            const double cross =
                (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
            if (cross != 0.0) continue;
            if (p.lon < std::min(a.lon, b.lon) || p.lon > std::max(a.lon, b.lon)) continue;
            if (p.lat < std::min(a.lat, b.lat) || p.lat > std::max(a.lat, b.lat)) continue;
            return true;
        }
    }
    return false;
}

bool IdLess::operator()(const std::string& a, const std::string& b) const {
    const auto numeric = [](const std::string& s) {
        return !s.empty() &&
               std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    if (numeric(a) && numeric(b)) {
        if (a.size() != b.size()) return a.size() < b.size();
    }
    return a < b;
}

std::optional<std::string> point_to_subdistrict(const GeoPoint& p, const SubdistrictSet& s) {
    // map iteration is id-ascending, so the first hit is the lowest id
    for (const auto& [id, polys] : s.polygons)
        for (const auto& poly : polys)
            if (point_in_polygon(p, poly) || point_on_boundary(p, poly)) return id;
    return std::nullopt;
}

// ---- move aggregation -------------------------------------------------------

std::map<YearMonth, std::size_t> monthly_move_counts(std::span<const moves::Move> mv,
                                                     moves::MoveKind kind, YearMonth span_lo,
                                                     YearMonth span_hi) {
    std::map<YearMonth, std::size_t> counts;
    for (int m = span_lo.index; m <= span_hi.index; ++m) counts[YearMonth{m}] = 0;
    for (const auto& move : mv) {
        if (move.kind != kind) continue;
        ++counts[move.move_month];  // months outside the span still count once
    }
    return counts;
}

FlowGraph flow_graph(std::span<const moves::Move> mv, const SubdistrictSet& s) {
    FlowGraph g;
    for (const auto& move : mv) {
        const auto from = point_to_subdistrict(move.from_center, s);
        const auto to = point_to_subdistrict(move.to_center, s);
        if (!from || !to) {
            ++g.spilled;
            continue;
        }
        ++g.edges[{*from, *to}];
        if (*from == *to) {
            g.nodes[*from].total += 1;
        } else {
            g.nodes[*from].total += 1;
            g.nodes[*from].in_minus_out -= 1;
            g.nodes[*to].total += 1;
            g.nodes[*to].in_minus_out += 1;
        }
    }
    return g;
}

// ---- work-home ratio --------------------------------------------------------

RatioReport work_home_ratio_correlation(std::span<const HubPoint> hubs, const SubdistrictSet& s) {
    std::map<std::string, std::pair<std::size_t, std::size_t>, IdLess> counts;  // (W, H)
    RatioReport rep;
    for (const auto& h : hubs) {
        if (h.label == hubprofile::HubLabel::Other) continue;
        const auto sd = point_to_subdistrict(h.center, s);
        if (!sd) {
            ++rep.spilled_hubs;
            continue;
        }
        if (h.label == hubprofile::HubLabel::Work)
            ++counts[*sd].first;
        else
            ++counts[*sd].second;
    }
    for (const auto& [id, wh] : counts) {
        if (wh.second == 0) {
            ++rep.excluded_no_home;
            continue;
        }
        rep.ratios[id] = static_cast<double>(wh.first) / static_cast<double>(wh.second);
    }

    std::vector<double> detected, reference;
    for (const auto& [id, ratio] : rep.ratios) {
        const auto it = s.reference_series.find(id);
        if (it == s.reference_series.end()) continue;
        const auto [employment, population] = it->second;
        if (!(population > 0.0)) continue;
        detected.push_back(ratio);
        reference.push_back(employment / population);
    }
    rep.common_subdistricts = detected.size();
    if (detected.size() >= 3) rep.pearson_vs_reference = pearson_r(detected, reference);
    return rep;
}

// ---- statistics -------------------------------------------------------------

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DataError("pearson_r: length mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw DataError("pearson_r: need at least 3 samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DataError("pearson_r: zero variance input");
    return sxy / std::sqrt(sxx * syy);
}

namespace {

// regularized incomplete beta I_x(a, b) via the Lentz continued fraction
double ibeta_cf(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
        b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
    return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_sf(double t, double dof) {
    if (dof <= 0.0) throw DataError("student_t_sf: dof must be positive");
    const double x = dof / (dof + t * t);
    const double tail = 0.5 * ibeta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw DataError("welch_t: each sample needs >= 2 values");
    const auto mean_var = [](std::span<const double> s) {
        const double n = static_cast<double>(s.size());
        double m = 0.0;
        for (const double v : s) {
            if (!std::isfinite(v)) throw DataError("welch_t: non-finite sample value");
            m += v;
        }
        m /= n;
        double var = 0.0;
        for (const double v : s) var += (v - m) * (v - m);
        var /= (n - 1.0);
        return std::pair{m, var};
    };
    const auto [ma, va] = mean_var(a);
    const auto [mb, vb] = mean_var(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double sa = va / na, sb = vb / nb;
    if (sa + sb == 0.0) throw DataError("welch_t: both samples have zero variance");

    WelchResult r;
    r.t = (ma - mb) / std::sqrt(sa + sb);
    r.dof = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    r.p_two_sided = 2.0 * student_t_sf(std::fabs(r.t), r.dof);
    return r;
}

// ---- housing prices ----------------------------------------------------------

std::vector<Transaction> load_transactions(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || lines[0] != "lat,lon,month,price_per_m2")
        throw DataError(path + ": expected header 'lat,lon,month,price_per_m2'");
    std::vector<Transaction> txns;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split_fields(lines[i]);
        const auto bad = [&](const std::string& why) {
            throw DataError(path + " line " + std::to_string(i + 1) + ": " + why);
        };
        if (f.size() != 4) bad("expected 4 fields");
        const auto lat = csv::parse_double(f[0]);
        const auto lon = csv::parse_double(f[1]);
        const auto ym = YearMonth::parse(f[2]);
        const auto price = csv::parse_double(f[3]);
        if (!lat || !lon || !GeoPoint{*lat, *lon}.valid()) bad("bad coordinates");
        if (!ym) bad("bad month, expected YYYY-MM");
        if (!price || !(*price > 0.0)) bad("price must be > 0");
        txns.push_back({GeoPoint{*lat, *lon}, *ym, *price});
    }
    return txns;
}

std::optional<double> match_housing_price(const GeoPoint& h_hub_center, YearMonth month,
                                          std::span<const Transaction> txns, double radius_km) {
    std::vector<double> prices;
    for (const auto& t : txns) {
        if (t.month != month) continue;
        if (haversine_km(h_hub_center, t.location) > radius_km) continue;
        prices.push_back(t.price_per_m2);
    }
    if (prices.empty()) return std::nullopt;
    std::sort(prices.begin(), prices.end());
    const std::size_t n = prices.size();
    if (n % 2 == 1) return prices[n / 2];
    return 0.5 * (prices[n / 2 - 1] + prices[n / 2]);
}

// ---- binned differences -------------------------------------------------------

std::map<std::int64_t, BinStats> binned_post_pre_diff(
    std::span<const std::pair<double, double>> pre_post_pairs, double bin_width) {
    if (!(bin_width > 0.0)) throw ConfigError("binned_post_pre_diff: bin_width must be > 0");
    std::map<std::int64_t, BinStats> bins;
    for (const auto& [pre, post] : pre_post_pairs) {
        const auto key = static_cast<std::int64_t>(std::floor(pre / bin_width));
        auto& bin = bins[key];
        bin.mean_diff += post - pre;
        bin.count += 1;
    }
    for (auto& [key, bin] : bins) bin.mean_diff /= static_cast<double>(bin.count);
    return bins;
}

// ---- ring-road regions ----------------------------------------------------------

const char* region_name(Region r) {
    switch (r) {
        case Region::CityCore: return "city_core";
        case Region::InnerSuburb: return "inner_suburbs";
        case Region::OuterSuburb: return "outer_suburbs";
        case Region::Outside: return "outside";
    }
    return "?";
}

Region RingModel::classify(const GeoPoint& p) const {
    for (std::size_t i = 0; i < rings.size() && i < 3; ++i) {
        if (point_in_polygon(p, rings[i]) || point_on_boundary(p, rings[i]))
            return static_cast<Region>(i);
    }
    return Region::Outside;
}

RegionTransitionTable region_transitions(std::span<const HousingMoveEconomics> mv,
                                         const RingModel& rings) {
    RegionTransitionTable table;
    for (const auto& m : mv) {
        const Region from = rings.classify(m.from);
        const Region to = rings.classify(m.to);
        if (from == Region::Outside || to == Region::Outside) {
            ++table.spilled;
            continue;
        }
        auto& cell = table.cells[{from, to}];
        cell.mean_price_diff += m.price_diff;
        cell.mean_commute_diff += m.commute_diff;
        cell.count += 1;
    }
    for (auto& [key, cell] : table.cells) {
        cell.mean_price_diff /= static_cast<double>(cell.count);
        cell.mean_commute_diff /= static_cast<double>(cell.count);
    }
    return table;
}

// ---- density grids ----------------------------------------------------------------

DensityGrid kde_hotspot_grid(std::span<const GeoPoint> points, double cell_km,
                             double bandwidth_km) {
    if (points.empty()) throw DataError("kde_hotspot_grid: no points");
    if (!(cell_km > 0.0) || !(bandwidth_km > 0.0))
        throw ConfigError("kde_hotspot_grid: cell_km and bandwidth_km must be > 0");

    double lat_min = points[0].lat, lat_max = points[0].lat;
    double lon_min = points[0].lon, lon_max = points[0].lon;
    for (const auto& p : points) {
        lat_min = std::min(lat_min, p.lat);
        lat_max = std::max(lat_max, p.lat);
        lon_min = std::min(lon_min, p.lon);
        lon_max = std::max(lon_max, p.lon);
    }
    const double mid_lat = 0.5 * (lat_min + lat_max);
    const double km_per_deg_lon =
        std::max(1e-9, kKmPerDegree * std::cos(mid_lat * kPi / 180.0));

    DensityGrid g;
    g.dlat = cell_km / kKmPerDegree;
    g.dlon = cell_km / km_per_deg_lon;
    const double pad_lat = 3.0 * bandwidth_km / kKmPerDegree;
    const double pad_lon = 3.0 * bandwidth_km / km_per_deg_lon;
    g.lat0 = lat_min - pad_lat;
    g.lon0 = lon_min - pad_lon;
    g.rows = static_cast<std::size_t>((lat_max + pad_lat - g.lat0) / g.dlat) + 1;
    g.cols = static_cast<std::size_t>((lon_max + pad_lon - g.lon0) / g.dlon) + 1;
    g.cell_area_km2 = cell_km * cell_km;
    g.density.assign(g.rows * g.cols, 0.0);

    const double inv_two_h2 = 1.0 / (2.0 * bandwidth_km * bandwidth_km);
    for (std::size_t r = 0; r < g.rows; ++r) {
        for (std::size_t c = 0; c < g.cols; ++c) {
            const GeoPoint cell = g.cell_center(r, c);
            double sum = 0.0;
            for (const auto& p : points) {
                const double d = haversine_km(cell, p);
                sum += std::exp(-d * d * inv_two_h2);
            }
            g.density[r * g.cols + c] = sum;
        }
    }
    double total = 0.0;
    for (const double v : g.density) total += v;
    const double norm = total * g.cell_area_km2;
    for (auto& v : g.density) v /= norm;
    return g;
}

}  // namespace hubshift::analytics
