#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hubshift/hubprofile.hpp"
#include "hubshift/moves.hpp"
#include "hubshift/orders.hpp"
#include "hubshift/synthcity.hpp"
#include "hubshift/wkms.hpp"

namespace hubshift::pipeline {

struct AnalysisConfig {
    double kde_cell_km = 0.5;
    double kde_bandwidth_km = 2.0;
    double price_match_radius_km = 3.0;
    double commute_bin_km = 5.0;
    double overtime_bin = 0.1;
    double price_bin_per_m2 = 20000.0;
    double match_radius_km = 2.0;  // evaluation
    int month_slack = 1;
};

struct PipelinePaths {
    std::string orders;
    std::string holidays;
    std::string subdistricts;
    std::string rings;
    std::string transactions;
    std::string census;
    std::string ground_truth;
};

struct PipelineConfig {
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t min_user_orders = 10;
    wkms::KernelConfig kernel;
    hubprofile::ClassifierConfig classifier;
    moves::MoveConfig move;
    AnalysisConfig analysis;
    PipelinePaths paths;
    std::optional<synthcity::ScenarioConfig> scenario;

    static PipelineConfig load(const std::string& path);
    static PipelineConfig from_json_text(const std::string& text);
    void validate() const;
};

// ---- detection ---------------------------------------------------------------

struct UserResult {
    std::string user_id;
    std::vector<moves::LabeledHub> hubs;   // surviving, labeled
    std::vector<moves::Move> moves;
    std::optional<moves::UserGroup> group; // unset => lacked a home or work hub
    bool clusterable = false;
    std::size_t temporary_hubs = 0;
    std::size_t outlier_restaurants = 0;
    std::size_t non_converged_seeds = 0;
    std::size_t total_orders = 0;
};

struct DetectReport {
    std::size_t users_in = 0;
    std::size_t users_after_order_filter = 0;
    std::size_t users_unclusterable = 0;
    std::size_t hubs_before_filter = 0;
    std::size_t temporary_hubs = 0;
    std::size_t hubs = 0;
    std::size_t home_hubs = 0, work_hubs = 0, other_hubs = 0;
    std::size_t users_with_home_and_work = 0;
    std::size_t users_excluded_no_home_or_work = 0;
    std::size_t stayers = 0, job_hoppers = 0, home_movers = 0, both_movers = 0;
    std::size_t housing_moves = 0, job_moves = 0;
    std::size_t non_converged_seeds = 0;
    std::string labeling_mode;  // "kmeans" or "direct"
    int chosen_k = 0;
    double silhouette = 0.0;

    std::string to_json_text() const;
};

struct DetectResult {
    std::vector<UserResult> users;  // sorted by user_id
    DetectReport report;
};

// filter -> WKMS -> temporary-hub filter -> features -> K-means -> labels ->
// transitions -> groups. Deterministic for a fixed config and seed,
// independent of the worker count.
DetectResult run_detect(const OrderLog& log, const HolidayCalendar& cal,
                        const PipelineConfig& cfg);

// ---- stage files ---------------------------------------------------------------

inline constexpr const char* kHubsCsvHeader =
    "user_id,hub_id,center_lat,center_lon,n_restaurants,n_orders,first_order,last_order,label";
inline constexpr const char* kMovesCsvHeader =
    "user_id,kind,from_lat,from_lon,to_lat,to_lon,move_month,displacement_km,pre_commute_km,"
    "post_commute_km";

void write_hubs_csv(const DetectResult& result, const std::string& path);
void write_moves_csv(const DetectResult& result, const std::string& path);
void write_moves_detail_csv(const DetectResult& result, const std::string& path);
void write_groups_csv(const DetectResult& result, const std::string& path);
void write_hub_stats_csv(const DetectResult& result, const HolidayCalendar& cal,
                         const std::string& path);

struct HubRow {
    std::string user_id;
    int hub_id = 0;
    GeoPoint center;
    std::size_t n_restaurants = 0;
    std::size_t n_orders = 0;
    CivilMinute first_order = 0;
    CivilMinute last_order = 0;
    hubprofile::HubLabel label = hubprofile::HubLabel::Other;
};
std::vector<HubRow> read_hubs_csv(const std::string& path);

struct MoveRow {
    std::string user_id;
    moves::MoveKind kind = moves::MoveKind::Housing;
    GeoPoint from, to;
    YearMonth move_month;
    double displacement_km = 0.0;
    std::optional<double> pre_commute_km, post_commute_km;
};
std::vector<MoveRow> read_moves_csv(const std::string& path);

struct MoveDetailRow {
    std::string user_id;
    moves::MoveKind kind = moves::MoveKind::Housing;
    int from_hub = 0, to_hub = 0;
    YearMonth move_month;
};
std::vector<MoveDetailRow> read_moves_detail_csv(const std::string& path);

struct HubStatsRow {
    std::string user_id;
    int hub_id = 0;
    hubprofile::HubLabel label = hubprofile::HubLabel::Other;
    std::size_t n_orders = 0;
    double overtime_ratio = 0.0;
};
std::vector<HubStatsRow> read_hub_stats_csv(const std::string& path);

struct GroupRow {
    std::string user_id;
    moves::UserGroup group;
};
std::vector<GroupRow> read_groups_csv(const std::string& path);

// ---- commands -------------------------------------------------------------------

// Each command writes its outputs under out_dir and returns log lines that the
// CLI prints. Errors surface as ConfigError/DataError.
std::vector<std::string> cmd_synth(const PipelineConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_detect(const PipelineConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_analyze(const PipelineConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_evaluate(const PipelineConfig& cfg, const std::string& out_dir,
                                      std::optional<double> match_radius_km = std::nullopt,
                                      std::optional<int> month_slack = std::nullopt);
std::vector<std::string> cmd_run_all(const PipelineConfig& cfg, const std::string& out_dir);

}  // namespace hubshift::pipeline
