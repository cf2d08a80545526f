#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hubshift/analytics.hpp"
#include "hubshift/moves.hpp"
#include "hubshift/orders.hpp"
#include "hubshift/timeutil.hpp"
#include "hubshift/wkms.hpp"

namespace hubshift::synthcity {

struct BoundingBox {
    double lat_min = 39.70, lat_max = 40.10;
    double lon_min = 116.10, lon_max = 116.70;
};

struct ArchetypeShares {
    double stayer = 0.40;
    double job_hopper = 0.25;
    double home_mover = 0.25;
    double both = 0.10;
};

std::array<double, kSlotLabelCount> default_home_slot_profile();
std::array<double, kSlotLabelCount> default_work_slot_profile();
std::array<double, 12> equal_month_weights();

// Scripted city used to validate the detection pipeline against known truth.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    BoundingBox extent;
    std::size_t n_users = 1000;
    std::size_t n_restaurants = 6000;

    // delivery-method shares and per-method 95th-percentile radii
    std::map<std::string, double> delivery_method_mix = {{"baidulogistics", 0.6011},
                                                         {"baiduzhongbao", 0.0473},
                                                         {"cityexpress", 0.2357},
                                                         {"self", 0.1158}};
    std::map<std::string, double> per_method_radius_p95_km = {{"baidulogistics", 3.35},
                                                              {"baiduzhongbao", 3.70},
                                                              {"cityexpress", 4.18},
                                                              {"self", 14.87}};

    ArchetypeShares archetype_shares;
    int orders_min = 40;  // per-user order count, uniform
    int orders_max = 80;
    int span_months = 36;
    CivilDate span_start = days_from_civil(2015, 1, 1);

    std::array<double, 12> move_month_weights = equal_month_weights();  // Jan..Dec
    std::array<double, kSlotLabelCount> home_slot_profile = default_home_slot_profile();
    std::array<double, kSlotLabelCount> work_slot_profile = default_work_slot_profile();
    double noise = 0.0;  // fraction of orders from random temporary locations

    double work_order_share = 0.5;          // orders placed from the work anchor
    double restaurant_preference_km = 1.5;  // taste for nearby restaurants
    // anchors and displacements stay beyond ~2*sigma so that distinct stay
    // points produce distinct density modes
    double min_move_displacement_km = 10.0;
    double max_move_displacement_km = 15.0;
    double home_work_min_km = 11.0;
    double home_work_max_km = 20.0;
    bool outward_moves = false;  // script home moves radially away from the center

    // companion city files
    int subdistrict_grid_nx = 8;
    int subdistrict_grid_ny = 8;
    std::size_t transactions_per_month = 300;
    double price_center_per_m2 = 60000.0;
    double price_slope_per_km = 2500.0;
    double price_floor_per_m2 = 8000.0;
    std::array<double, 3> ring_radii_km = {6.0, 12.0, 20.0};

    void validate() const;  // throws ConfigError
    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig load(const std::string& path);
    std::string to_json_text() const;
};

// ---- ground truth -----------------------------------------------------------

struct AnchorPhase {
    GeoPoint position;
    CivilDate start = 0;  // inclusive
    CivilDate end = 0;    // inclusive
};

struct TrueUser {
    std::string user_id;
    std::string archetype;  // stayer | job_hopper | home_mover | both
    std::vector<AnchorPhase> home_phases;
    std::vector<AnchorPhase> work_phases;
};

struct TrueMove {
    std::string user_id;
    moves::MoveKind kind = moves::MoveKind::Housing;
    YearMonth month;
    GeoPoint from;
    GeoPoint to;
};

struct RestaurantInfo {
    std::string id;
    GeoPoint location;
    std::string method;
    double radius_km = 0.0;
};

struct GroundTruth {
    std::vector<TrueUser> users;
    std::vector<TrueMove> moves;
    std::vector<RestaurantInfo> restaurants;

    // anchor each order was generated from, parallel to the OrderLog
    // (in-memory only; not part of the JSON file)
    std::vector<GeoPoint> order_anchor;

    const TrueUser* find_user(const std::string& user_id) const;
    static GroundTruth load(const std::string& path);  // without order_anchor
    void save(const std::string& path) const;
};

struct Synthetic {
    OrderLog log;
    GroundTruth truth;
};

// Deterministic in cfg.seed: same config, byte-identical output, independent
// of worker count.
Synthetic generate(const ScenarioConfig& cfg, int workers = 1);

// Fixed holiday blocks (new year, May, October) per calendar year of the span.
HolidayCalendar make_holiday_calendar(CivilDate span_start, int span_months);

// Per-restaurant delivery radii for a method mix; each method's empirical
// nearest-rank p95 is rescaled onto its configured value.
std::vector<wkms::DeliveryDistance> sample_delivery_radii(
    const std::map<std::string, double>& method_mix,
    const std::map<std::string, double>& p95_km, std::size_t n, std::uint64_t seed);

// companion city files derived from a scenario
analytics::SubdistrictSet make_subdistricts(const ScenarioConfig& cfg);
void fill_reference_series(analytics::SubdistrictSet& s, const GroundTruth& truth);
analytics::RingModel make_rings(const ScenarioConfig& cfg);
std::vector<analytics::Transaction> make_transactions(const ScenarioConfig& cfg);
double price_field(const ScenarioConfig& cfg, const GeoPoint& p);

// ---- evaluation ---------------------------------------------------------------

struct DetectedHub {
    std::string user_id;
    hubprofile::HubLabel label = hubprofile::HubLabel::Other;
    GeoPoint center;
};

struct DetectedMove {
    std::string user_id;
    moves::MoveKind kind = moves::MoveKind::Housing;
    GeoPoint from;
    GeoPoint to;
    YearMonth month;
};

struct DistSummary {
    std::size_t count = 0;
    double min = 0.0, median = 0.0, p95 = 0.0, max = 0.0, mean = 0.0;

    static DistSummary of(std::vector<double> values);
};

struct KindEval {
    std::size_t detected = 0;
    std::size_t truth = 0;
    std::size_t matched = 0;
    std::optional<double> precision;  // unset when nothing was detected
    std::optional<double> recall;     // unset when the truth has no moves
    bool no_detections = false;
    DistSummary month_error;               // |detected month - true month|
    double month_within_slack_share = 0.0;
};

struct EvalReport {
    KindEval housing;
    KindEval job;
    std::size_t hubs_detected = 0;
    std::size_t hubs_matched = 0;
    std::optional<double> label_accuracy;
    DistSummary hub_center_error_km;
    double match_radius_km = 0.0;
    int month_slack = 0;

    std::string to_json_text() const;
};

// Greedy matching by smallest endpoint error; a detected move matches a true
// move of the same user and kind when both endpoints are within
// match_radius_km and the months differ by at most month_slack. Throws
// DataError when detected users are unknown to the truth.
EvalReport evaluate(std::span<const DetectedHub> hubs, std::span<const DetectedMove> mv,
                    const GroundTruth& truth, double match_radius_km = 2.0, int month_slack = 1);

}  // namespace hubshift::synthcity
