#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hubshift/geo.hpp"
#include "hubshift/hubprofile.hpp"
#include "hubshift/moves.hpp"
#include "hubshift/timeutil.hpp"

namespace hubshift::analytics {

// ---- geometry -------------------------------------------------------------

// First ring is the outer boundary; extra rings are holes (even-odd rule).
struct Polygon {
    std::vector<std::vector<GeoPoint>> rings;
};

bool point_in_polygon(const GeoPoint& p, const Polygon& poly);    // even-odd
bool point_on_boundary(const GeoPoint& p, const Polygon& poly);   // exact collinearity

// Orders subdistrict ids numerically when both sides are integers, else
// lexicographically, so "lowest id wins" is well defined for either style.
struct IdLess {
    bool operator()(const std::string& a, const std::string& b) const;
};

struct SubdistrictSet {
    std::map<std::string, std::vector<Polygon>, IdLess> polygons;
    // subdistrict -> (employment, population), user-supplied census series
    std::map<std::string, std::pair<double, double>, IdLess> reference_series;
};

// Lowest containing subdistrict id (boundary points included), or nullopt
// when the point lies outside every polygon.
std::optional<std::string> point_to_subdistrict(const GeoPoint& p, const SubdistrictSet& s);

// ---- move aggregation -------------------------------------------------------

// Per-kind counts for every month of [span_lo, span_hi], zero months included.
std::map<YearMonth, std::size_t> monthly_move_counts(std::span<const moves::Move> mv,
                                                     moves::MoveKind kind, YearMonth span_lo,
                                                     YearMonth span_hi);

struct FlowNode {
    std::size_t total = 0;      // moves touching this subdistrict
    long long in_minus_out = 0;
};

struct FlowGraph {
    std::map<std::string, FlowNode, IdLess> nodes;
    std::map<std::pair<std::string, std::string>, std::size_t> edges;
    std::size_t spilled = 0;  // moves with an endpoint outside the study area
};

FlowGraph flow_graph(std::span<const moves::Move> mv, const SubdistrictSet& s);

// ---- work-home ratio --------------------------------------------------------

struct RatioReport {
    std::map<std::string, double, IdLess> ratios;  // W hubs / H hubs
    std::size_t excluded_no_home = 0;              // subdistricts with zero H hubs
    std::size_t spilled_hubs = 0;
    std::size_t common_subdistricts = 0;
    std::optional<double> pearson_vs_reference;
};

struct HubPoint {
    GeoPoint center;
    hubprofile::HubLabel label;
};

RatioReport work_home_ratio_correlation(std::span<const HubPoint> hubs, const SubdistrictSet& s);

// ---- statistics -------------------------------------------------------------

double pearson_r(std::span<const double> xs, std::span<const double> ys);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_two_sided = 1.0;
};

// Welch's unequal-variance t-test with Welch-Satterthwaite degrees of freedom.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

// Survival function of Student's t distribution, P(T > t).
double student_t_sf(double t, double dof);

// ---- housing prices ----------------------------------------------------------

struct Transaction {
    GeoPoint location;
    YearMonth month;
    double price_per_m2 = 0.0;
};

std::vector<Transaction> load_transactions(const std::string& path);

// Median price over same-month transactions within radius_km; nullopt when
// nothing matches. Even counts take the mean of the middle two.
std::optional<double> match_housing_price(const GeoPoint& h_hub_center, YearMonth month,
                                          std::span<const Transaction> txns,
                                          double radius_km = 3.0);

// ---- binned differences -------------------------------------------------------

struct BinStats {
    double mean_diff = 0.0;
    std::size_t count = 0;
};

// Keyed by floor(pre / bin_width); empty bins omitted.
std::map<std::int64_t, BinStats> binned_post_pre_diff(
    std::span<const std::pair<double, double>> pre_post_pairs, double bin_width);

// ---- ring-road regions ----------------------------------------------------------

enum class Region : std::uint8_t { CityCore, InnerSuburb, OuterSuburb, Outside };
const char* region_name(Region r);

// Nested ring polygons ordered innermost first: inside rings[0] is the city
// core, rings[1] the inner suburbs, rings[2] the outer suburbs.
struct RingModel {
    std::vector<Polygon> rings;

    Region classify(const GeoPoint& p) const;
};

struct HousingMoveEconomics {
    GeoPoint from;
    GeoPoint to;
    double price_diff = 0.0;    // post - pre, matched prices
    double commute_diff = 0.0;  // post - pre commuting distance, km
};

struct RegionCell {
    double mean_price_diff = 0.0;
    double mean_commute_diff = 0.0;
    std::size_t count = 0;
};

struct RegionTransitionTable {
    std::map<std::pair<Region, Region>, RegionCell> cells;
    std::size_t spilled = 0;
};

RegionTransitionTable region_transitions(std::span<const HousingMoveEconomics> mv,
                                         const RingModel& rings);

// ---- density grids ----------------------------------------------------------------

struct DensityGrid {
    double lat0 = 0.0, lon0 = 0.0;   // center of cell (0, 0)
    double dlat = 0.0, dlon = 0.0;   // cell pitch in degrees
    std::size_t rows = 0, cols = 0;
    std::vector<double> density;     // row-major, 1/km^2, integrates to ~1

    double at(std::size_t r, std::size_t c) const { return density[r * cols + c]; }
    GeoPoint cell_center(std::size_t r, std::size_t c) const {
        return GeoPoint{lat0 + static_cast<double>(r) * dlat,
                        lon0 + static_cast<double>(c) * dlon};
    }
    double cell_area_km2 = 0.0;
};

// Gaussian KDE on a regular grid covering the points' bounding box padded by
// three bandwidths; densities normalized to integrate to 1 over the grid.
DensityGrid kde_hotspot_grid(std::span<const GeoPoint> points, double cell_km,
                             double bandwidth_km);

}  // namespace hubshift::analytics
