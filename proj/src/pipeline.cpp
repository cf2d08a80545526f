#include "hubshift/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hubshift/analytics.hpp"
#include "hubshift/csvio.hpp"
#include "hubshift/errors.hpp"
#include "hubshift/geojson.hpp"
#include "hubshift/parallel.hpp"
#include "json.hpp"

namespace hubshift::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config ---------------------------------------------------------------------

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    PipelineConfig cfg;
    read_field(j, "seed", cfg.seed);
    read_field(j, "workers", cfg.workers);
    read_field(j, "min_user_orders", cfg.min_user_orders);
    if (j.contains("kernel")) {
        const auto& k = j.at("kernel");
        read_field(k, "sigma_km", cfg.kernel.sigma_km);
        read_field(k, "convergence_tol_km", cfg.kernel.convergence_tol_km);
        read_field(k, "max_iterations", cfg.kernel.max_iterations);
        read_field(k, "mode_merge_km", cfg.kernel.mode_merge_km);
    }
    cfg.classifier.seed = cfg.seed;
    if (j.contains("classifier")) {
        const auto& c = j.at("classifier");
        read_field(c, "min_order_share", cfg.classifier.min_order_share);
        read_field(c, "min_duration_days", cfg.classifier.min_duration_days);
        if (c.contains("k_range")) {
            const auto range = c.at("k_range").get<std::vector<int>>();
            if (range.size() != 2) throw ConfigError("config: classifier.k_range needs [min, max]");
            cfg.classifier.k_min = range[0];
            cfg.classifier.k_max = range[1];
        }
        if (c.contains("fixed_k")) {
            if (c.at("fixed_k").is_null())
                cfg.classifier.fixed_k.reset();
            else
                cfg.classifier.fixed_k = c.at("fixed_k").get<int>();
        }
        read_field(c, "kmeans_restarts", cfg.classifier.kmeans_restarts);
        read_field(c, "seed", cfg.classifier.seed);
        read_field(c, "label_margin", cfg.classifier.label_margin);
        read_field(c, "silhouette_max_n", cfg.classifier.silhouette_max_n);
    }
    if (j.contains("move")) read_field(j.at("move"), "min_separation_km", cfg.move.min_separation_km);
    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        read_field(a, "kde_cell_km", cfg.analysis.kde_cell_km);
        read_field(a, "kde_bandwidth_km", cfg.analysis.kde_bandwidth_km);
        read_field(a, "price_match_radius_km", cfg.analysis.price_match_radius_km);
        read_field(a, "commute_bin_km", cfg.analysis.commute_bin_km);
        read_field(a, "overtime_bin", cfg.analysis.overtime_bin);
        read_field(a, "price_bin_per_m2", cfg.analysis.price_bin_per_m2);
        read_field(a, "match_radius_km", cfg.analysis.match_radius_km);
        read_field(a, "month_slack", cfg.analysis.month_slack);
    }
    if (j.contains("paths")) {
        const auto& p = j.at("paths");
        read_field(p, "orders", cfg.paths.orders);
        read_field(p, "holidays", cfg.paths.holidays);
        read_field(p, "subdistricts", cfg.paths.subdistricts);
        read_field(p, "rings", cfg.paths.rings);
        read_field(p, "transactions", cfg.paths.transactions);
        read_field(p, "census", cfg.paths.census);
        read_field(p, "ground_truth", cfg.paths.ground_truth);
    }
    if (j.contains("scenario")) {
        auto scenario_json = j.at("scenario");
        if (!scenario_json.contains("seed")) scenario_json["seed"] = cfg.seed;
        cfg.scenario = synthcity::ScenarioConfig::from_json_text(scenario_json.dump());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void PipelineConfig::validate() const {
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
    if (min_user_orders < 1) throw ConfigError("config: min_user_orders must be >= 1");
    kernel.validate();
    classifier.validate();
    move.validate();
    const auto& a = analysis;
    if (!(a.kde_cell_km > 0.0 && a.kde_bandwidth_km > 0.0))
        throw ConfigError("config: analysis KDE parameters must be > 0");
    if (!(a.price_match_radius_km > 0.0))
        throw ConfigError("config: analysis.price_match_radius_km must be > 0");
    if (!(a.commute_bin_km > 0.0 && a.overtime_bin > 0.0 && a.price_bin_per_m2 > 0.0))
        throw ConfigError("config: analysis bin widths must be > 0");
    if (!(a.match_radius_km > 0.0)) throw ConfigError("config: analysis.match_radius_km must be > 0");
    if (a.month_slack < 0) throw ConfigError("config: analysis.month_slack must be >= 0");
    for (const std::string* p : {&paths.orders, &paths.holidays, &paths.subdistricts, &paths.rings,
                                 &paths.transactions, &paths.census, &paths.ground_truth}) {
        if (!p->empty() && !fs::exists(*p))
            throw ConfigError("config: referenced file does not exist: " + *p);
    }
}

// ---- detection ---------------------------------------------------------------------

DetectResult run_detect(const OrderLog& log, const HolidayCalendar& cal,
                        const PipelineConfig& cfg) {
    DetectResult result;
    result.report.users_in = user_spans(log).size();

    const OrderLog filtered = filter_adhoc_users(log, cfg.min_user_orders);
    const auto spans = user_spans(filtered);
    result.report.users_after_order_filter = spans.size();

    struct UserStage {
        wkms::ClusterOutcome outcome;
        std::vector<hubprofile::HubFeatures> features;
    };
    std::vector<UserStage> stages(spans.size());

    parallel_for(spans.size(), cfg.workers, [&](std::size_t i) {
        const auto& span = spans[i];
        const std::span<const Order> orders{filtered.orders.data() + span.begin,
                                            span.end - span.begin};
        auto outcome = wkms::cluster_user(orders, cfg.kernel);
        stages[i].outcome = hubprofile::filter_temporary_hubs(std::move(outcome), cfg.classifier);
        auto& stage = stages[i];
        stage.features.reserve(stage.outcome.hubs.size());
        for (std::size_t h = 0; h < stage.outcome.hubs.size(); ++h)
            stage.features.push_back(
                hubprofile::hub_features(stage.outcome.hubs[h], static_cast<int>(h), cal));
    });

    // pool features in user order and label them
    std::vector<hubprofile::FeatureVec> pooled;
    for (const auto& stage : stages)
        for (const auto& f : stage.features) pooled.push_back(f.freq);

    const int k_needed = cfg.classifier.fixed_k.value_or(cfg.classifier.k_min);
    std::vector<hubprofile::HubLabel> pooled_labels(pooled.size(), hubprofile::HubLabel::Other);
    if (pooled.size() >= static_cast<std::size_t>(k_needed)) {
        const auto km = hubprofile::kmeans_with_silhouette(pooled, cfg.classifier);
        const auto cluster_labels =
            hubprofile::label_clusters(km.centroids, cfg.classifier.label_margin);
        for (std::size_t i = 0; i < pooled.size(); ++i)
            pooled_labels[i] = cluster_labels[static_cast<std::size_t>(km.assignment[i])];
        result.report.labeling_mode = "kmeans";
        result.report.chosen_k = km.chosen_k;
        result.report.silhouette = km.silhouette;
    } else {
        // too few hubs to cluster: judge each hub's own profile
        for (std::size_t i = 0; i < pooled.size(); ++i) {
            const double dom = hubprofile::work_home_dominance(pooled[i]);
            pooled_labels[i] = dom > cfg.classifier.label_margin ? hubprofile::HubLabel::Work
                               : dom < -cfg.classifier.label_margin
                                   ? hubprofile::HubLabel::Home
                                   : hubprofile::HubLabel::Other;
        }
        result.report.labeling_mode = "direct";
    }

    // assemble per-user results
    result.users.resize(spans.size());
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        auto& user = result.users[i];
        auto& stage = stages[i];
        user.user_id = spans[i].user_id;
        user.clusterable = stage.outcome.clusterable;
        user.temporary_hubs = stage.outcome.temporary.size();
        user.outlier_restaurants = stage.outcome.outliers.size();
        user.non_converged_seeds = stage.outcome.non_converged.size();
        user.total_orders = stage.outcome.total_orders;
        for (std::size_t h = 0; h < stage.outcome.hubs.size(); ++h) {
            moves::LabeledHub lh;
            lh.hub = std::move(stage.outcome.hubs[h]);
            lh.label = pooled_labels[cursor + h];
            lh.hub_id = static_cast<int>(h);
            user.hubs.push_back(std::move(lh));
        }
        cursor += stage.outcome.hubs.size();
        result.report.hubs_before_filter +=
            stage.outcome.hubs.size() + stage.outcome.temporary.size();
        result.report.temporary_hubs += stage.outcome.temporary.size();
        result.report.non_converged_seeds += stage.outcome.non_converged.size();
        if (!user.clusterable) ++result.report.users_unclusterable;
    }

    // transitions, commutes and groups are independent per user
    parallel_for(result.users.size(), cfg.workers, [&](std::size_t i) {
        auto& user = result.users[i];
        user.moves = moves::detect_transitions(user.hubs, cfg.move);
        for (auto& mv : user.moves) {
            CivilDate to_start = 0;
            for (const auto& h : user.hubs)
                if (h.hub_id == mv.to_hub) to_start = date_of(h.hub.first_order);
            const auto pre = moves::commuting_distance(user.hubs, to_start - 1);
            const auto post = moves::commuting_distance(user.hubs, to_start);
            if (pre.status == moves::CommuteDistance::Status::Ok) mv.pre_commute_km = pre.km;
            if (post.status == moves::CommuteDistance::Status::Ok) mv.post_commute_km = post.km;
        }
        user.group = moves::classify_user(user.hubs, user.moves);
    });

    for (const auto& user : result.users) {
        for (const auto& h : user.hubs) {
            switch (h.label) {
                case hubprofile::HubLabel::Home: ++result.report.home_hubs; break;
                case hubprofile::HubLabel::Work: ++result.report.work_hubs; break;
                case hubprofile::HubLabel::Other: ++result.report.other_hubs; break;
            }
        }
        result.report.hubs += user.hubs.size();
        if (user.group) {
            ++result.report.users_with_home_and_work;
            if (user.group->stayer) ++result.report.stayers;
            if (user.group->job_hopper) ++result.report.job_hoppers;
            if (user.group->home_mover) ++result.report.home_movers;
            if (user.group->job_hopper && user.group->home_mover) ++result.report.both_movers;
        } else if (!user.hubs.empty()) {
            ++result.report.users_excluded_no_home_or_work;
        }
        for (const auto& mv : user.moves) {
            if (mv.kind == moves::MoveKind::Housing)
                ++result.report.housing_moves;
            else
                ++result.report.job_moves;
        }
    }
    return result;
}

std::string DetectReport::to_json_text() const {
    json j;
    j["users_in"] = users_in;
    j["users_after_order_filter"] = users_after_order_filter;
    j["users_unclusterable"] = users_unclusterable;
    j["hubs_before_filter"] = hubs_before_filter;
    j["temporary_hubs"] = temporary_hubs;
    j["hubs"] = hubs;
    j["labels"] = {{"H", home_hubs}, {"W", work_hubs}, {"O", other_hubs}};
    j["users_with_home_and_work"] = users_with_home_and_work;
    j["users_excluded_no_home_or_work"] = users_excluded_no_home_or_work;
    j["groups"] = {{"stayers", stayers},
                   {"job_hoppers", job_hoppers},
                   {"home_movers", home_movers},
                   {"both", both_movers}};
    j["moves"] = {{"housing", housing_moves}, {"job", job_moves}};
    j["non_converged_seeds"] = non_converged_seeds;
    j["labeling_mode"] = labeling_mode;
    j["chosen_k"] = chosen_k;
    j["silhouette"] = silhouette;
    return j.dump(2);
}

// ---- stage files ----------------------------------------------------------------------

void write_hubs_csv(const DetectResult& result, const std::string& path) {
    csv::Writer w(path);
    w.raw_line(kHubsCsvHeader);
    for (const auto& user : result.users) {
        for (const auto& h : user.hubs) {
            w.row({user.user_id, std::to_string(h.hub_id), csv::fmt_double(h.hub.center.lat),
                   csv::fmt_double(h.hub.center.lon), std::to_string(h.hub.members.size()),
                   std::to_string(h.hub.orders.size()), format_minute(h.hub.first_order),
                   format_minute(h.hub.last_order), std::string(1, label_code(h.label))});
        }
    }
    w.close();
}

void write_moves_csv(const DetectResult& result, const std::string& path) {
    csv::Writer w(path);
    w.raw_line(kMovesCsvHeader);
    for (const auto& user : result.users) {
        for (const auto& m : user.moves) {
            w.row({user.user_id, moves::move_kind_name(m.kind), csv::fmt_double(m.from_center.lat),
                   csv::fmt_double(m.from_center.lon), csv::fmt_double(m.to_center.lat),
                   csv::fmt_double(m.to_center.lon), m.move_month.str(),
                   csv::fmt_double(m.displacement_km),
                   m.pre_commute_km ? csv::fmt_double(*m.pre_commute_km) : "",
                   m.post_commute_km ? csv::fmt_double(*m.post_commute_km) : ""});
        }
    }
    w.close();
}

void write_moves_detail_csv(const DetectResult& result, const std::string& path) {
    csv::Writer w(path);
    w.raw_line("user_id,kind,from_hub,to_hub,move_month");
    for (const auto& user : result.users)
        for (const auto& m : user.moves)
            w.row({user.user_id, moves::move_kind_name(m.kind), std::to_string(m.from_hub),
                   std::to_string(m.to_hub), m.move_month.str()});
    w.close();
}

void write_groups_csv(const DetectResult& result, const std::string& path) {
    csv::Writer w(path);
    w.raw_line("user_id,stayer,job_hopper,home_mover");
    for (const auto& user : result.users) {
        if (!user.group) continue;
        w.row({user.user_id, user.group->stayer ? "1" : "0", user.group->job_hopper ? "1" : "0",
               user.group->home_mover ? "1" : "0"});
    }
    w.close();
}

void write_hub_stats_csv(const DetectResult& result, const HolidayCalendar& cal,
                         const std::string& path) {
    csv::Writer w(path);
    w.raw_line("user_id,hub_id,label,n_orders,overtime_ratio");
    for (const auto& user : result.users)
        for (const auto& h : user.hubs)
            w.row({user.user_id, std::to_string(h.hub_id), std::string(1, label_code(h.label)),
                   std::to_string(h.hub.orders.size()),
                   csv::fmt_double(moves::overtime_ratio(h.hub, cal))});
    w.close();
}

namespace {

std::vector<std::vector<std::string_view>> read_csv_rows(const std::string& path,
                                                         const char* header,
                                                         std::vector<std::string>& storage) {
    storage = csv::read_lines(path);
    if (storage.empty() || storage[0] != header)
        throw DataError(path + ": expected header '" + header + "'");
    std::vector<std::vector<std::string_view>> rows;
    for (std::size_t i = 1; i < storage.size(); ++i) {
        if (storage[i].empty()) continue;
        rows.push_back(csv::split_fields(storage[i]));
    }
    return rows;
}

[[noreturn]] void row_error(const std::string& path, std::size_t row, const std::string& why) {
    throw DataError(path + " row " + std::to_string(row + 1) + ": " + why);
}

}  // namespace

std::vector<HubRow> read_hubs_csv(const std::string& path) {
    std::vector<std::string> storage;
    const auto rows = read_csv_rows(path, kHubsCsvHeader, storage);
    std::vector<HubRow> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 9) row_error(path, i, "expected 9 fields");
        HubRow r;
        r.user_id = std::string(f[0]);
        const auto hub_id = csv::parse_int(f[1]);
        const auto lat = csv::parse_double(f[2]);
        const auto lon = csv::parse_double(f[3]);
        const auto n_rest = csv::parse_int(f[4]);
        const auto n_orders = csv::parse_int(f[5]);
        const auto first = parse_minute(f[6]);
        const auto last = parse_minute(f[7]);
        const auto label = f[8].size() == 1 ? hubprofile::label_from_code(f[8][0]) : std::nullopt;
        if (!hub_id || !lat || !lon || !n_rest || !n_orders || !first || !last || !label)
            row_error(path, i, "malformed hub row");
        r.hub_id = static_cast<int>(*hub_id);
        r.center = {*lat, *lon};
        r.n_restaurants = static_cast<std::size_t>(*n_rest);
        r.n_orders = static_cast<std::size_t>(*n_orders);
        r.first_order = *first;
        r.last_order = *last;
        r.label = *label;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<MoveRow> read_moves_csv(const std::string& path) {
    std::vector<std::string> storage;
    const auto rows = read_csv_rows(path, kMovesCsvHeader, storage);
    std::vector<MoveRow> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 10) row_error(path, i, "expected 10 fields");
        MoveRow r;
        r.user_id = std::string(f[0]);
        const auto kind = moves::move_kind_from_name(f[1]);
        const auto flat = csv::parse_double(f[2]);
        const auto flon = csv::parse_double(f[3]);
        const auto tlat = csv::parse_double(f[4]);
        const auto tlon = csv::parse_double(f[5]);
        const auto month = YearMonth::parse(f[6]);
        const auto disp = csv::parse_double(f[7]);
        if (!kind || !flat || !flon || !tlat || !tlon || !month || !disp)
            row_error(path, i, "malformed move row");
        r.kind = *kind;
        r.from = {*flat, *flon};
        r.to = {*tlat, *tlon};
        r.move_month = *month;
        r.displacement_km = *disp;
        if (!f[8].empty()) r.pre_commute_km = csv::parse_double(f[8]);
        if (!f[9].empty()) r.post_commute_km = csv::parse_double(f[9]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<MoveDetailRow> read_moves_detail_csv(const std::string& path) {
    std::vector<std::string> storage;
    const auto rows = read_csv_rows(path, "user_id,kind,from_hub,to_hub,move_month", storage);
    std::vector<MoveDetailRow> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 5) row_error(path, i, "expected 5 fields");
        MoveDetailRow r;
        r.user_id = std::string(f[0]);
        const auto kind = moves::move_kind_from_name(f[1]);
        const auto from = csv::parse_int(f[2]);
        const auto to = csv::parse_int(f[3]);
        const auto month = YearMonth::parse(f[4]);
        if (!kind || !from || !to || !month) row_error(path, i, "malformed row");
        r.kind = *kind;
        r.from_hub = static_cast<int>(*from);
        r.to_hub = static_cast<int>(*to);
        r.move_month = *month;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<HubStatsRow> read_hub_stats_csv(const std::string& path) {
    std::vector<std::string> storage;
    const auto rows = read_csv_rows(path, "user_id,hub_id,label,n_orders,overtime_ratio", storage);
    std::vector<HubStatsRow> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 5) row_error(path, i, "expected 5 fields");
        HubStatsRow r;
        r.user_id = std::string(f[0]);
        const auto hub_id = csv::parse_int(f[1]);
        const auto label = f[2].size() == 1 ? hubprofile::label_from_code(f[2][0]) : std::nullopt;
        const auto n_orders = csv::parse_int(f[3]);
        const auto ratio = csv::parse_double(f[4]);
        if (!hub_id || !label || !n_orders || !ratio) row_error(path, i, "malformed row");
        r.hub_id = static_cast<int>(*hub_id);
        r.label = *label;
        r.n_orders = static_cast<std::size_t>(*n_orders);
        r.overtime_ratio = *ratio;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<GroupRow> read_groups_csv(const std::string& path) {
    std::vector<std::string> storage;
    const auto rows = read_csv_rows(path, "user_id,stayer,job_hopper,home_mover", storage);
    std::vector<GroupRow> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 4) row_error(path, i, "expected 4 fields");
        GroupRow r;
        r.user_id = std::string(f[0]);
        r.group.stayer = f[1] == "1";
        r.group.job_hopper = f[2] == "1";
        r.group.home_mover = f[3] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

// ---- commands -------------------------------------------------------------------------

namespace {

std::string join_path(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

HolidayCalendar calendar_for(const PipelineConfig& cfg, const std::string& out_dir) {
    if (!cfg.paths.holidays.empty()) return HolidayCalendar::load(cfg.paths.holidays);
    const auto local = join_path(out_dir, "holidays.json");
    if (fs::exists(local)) return HolidayCalendar::load(local);
    return HolidayCalendar{};  // weekends only
}

json sample_stats(const std::vector<double>& v) {
    if (v.empty()) return {{"n", 0}};
    double sum = 0.0;
    for (const double x : v) sum += x;
    return {{"n", v.size()}, {"mean", sum / static_cast<double>(v.size())}};
}

json welch_or_null(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) return json();
    try {
        const auto w = analytics::welch_t(a, b);
        return {{"t", w.t}, {"dof", w.dof}, {"p_two_sided", w.p_two_sided}};
    } catch (const DataError&) {
        return json();  // degenerate samples
    }
}

void write_bins_csv(const std::map<std::int64_t, analytics::BinStats>& bins, double width,
                    const std::string& path) {
    csv::Writer w(path);
    w.raw_line("bin_lo,bin_hi,mean_post_pre_diff,count");
    for (const auto& [key, stats] : bins)
        w.row({csv::fmt_double(static_cast<double>(key) * width),
               csv::fmt_double(static_cast<double>(key + 1) * width),
               csv::fmt_double(stats.mean_diff), std::to_string(stats.count)});
    w.close();
}

}  // namespace

std::vector<std::string> cmd_synth(const PipelineConfig& cfg, const std::string& out_dir) {
    if (!cfg.scenario) throw ConfigError("config: missing field 'scenario' (required by synth)");
    ensure_dir(out_dir);
    const auto& scenario = *cfg.scenario;
    const auto result = synthcity::generate(scenario, cfg.workers);

    save_orders(result.log, join_path(out_dir, "orders.csv"));
    result.truth.save(join_path(out_dir, "ground_truth.json"));

    const auto cal = synthcity::make_holiday_calendar(scenario.span_start, scenario.span_months);
    {
        json holidays = json::array();
        std::vector<CivilDate> dates(cal.holiday_dates.begin(), cal.holiday_dates.end());
        std::sort(dates.begin(), dates.end());
        for (const auto d : dates) holidays.push_back(format_date(d));
        json j = {{"holidays", holidays}, {"weekend_days", {5, 6}}};
        std::ofstream out(join_path(out_dir, "holidays.json"), std::ios::binary);
        out << j.dump(2) << '\n';
    }

    auto subdistricts = synthcity::make_subdistricts(scenario);
    synthcity::fill_reference_series(subdistricts, result.truth);
    analytics::write_subdistricts(subdistricts, join_path(out_dir, "subdistricts.geojson"));
    {
        csv::Writer w(join_path(out_dir, "census.csv"));
        w.raw_line("subdistrict_id,employment,population");
        for (const auto& [id, counts] : subdistricts.reference_series)
            w.row({id, csv::fmt_double(counts.first), csv::fmt_double(counts.second)});
        w.close();
    }
    analytics::write_rings(synthcity::make_rings(scenario), join_path(out_dir, "rings.geojson"));
    {
        const auto txns = synthcity::make_transactions(scenario);
        csv::Writer w(join_path(out_dir, "transactions.csv"));
        w.raw_line("lat,lon,month,price_per_m2");
        for (const auto& t : txns)
            w.row({csv::fmt_double(t.location.lat), csv::fmt_double(t.location.lon),
                   t.month.str(), csv::fmt_double(t.price_per_m2)});
        w.close();
    }

    return {"synth: users=" + std::to_string(result.truth.users.size()) +
            " orders=" + std::to_string(result.log.size()) +
            " restaurants=" + std::to_string(result.truth.restaurants.size()) +
            " true_moves=" + std::to_string(result.truth.moves.size())};
}

std::vector<std::string> cmd_detect(const PipelineConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    std::string orders_path = cfg.paths.orders;
    if (orders_path.empty()) {
        orders_path = join_path(out_dir, "orders.csv");
        if (!fs::exists(orders_path))
            throw ConfigError("config: missing field 'paths.orders' and no orders.csv in " +
                              out_dir);
    }
    const auto cal = calendar_for(cfg, out_dir);

    LoadReport load_report;
    const OrderLog log = load_orders(orders_path, &load_report);
    const auto result = run_detect(log, cal, cfg);

    write_hubs_csv(result, join_path(out_dir, "hubs.csv"));
    write_moves_csv(result, join_path(out_dir, "moves.csv"));
    write_moves_detail_csv(result, join_path(out_dir, "moves_detail.csv"));
    write_groups_csv(result, join_path(out_dir, "groups.csv"));
    write_hub_stats_csv(result, cal, join_path(out_dir, "hub_stats.csv"));
    {
        std::ofstream out(join_path(out_dir, "detect_report.json"), std::ios::binary);
        out << result.report.to_json_text() << '\n';
    }

    const auto& r = result.report;
    return {"detect: users=" + std::to_string(r.users_after_order_filter) + "/" +
                std::to_string(r.users_in) + " unclusterable=" +
                std::to_string(r.users_unclusterable) + " hubs=" + std::to_string(r.hubs) +
                " (H=" + std::to_string(r.home_hubs) + " W=" + std::to_string(r.work_hubs) +
                " O=" + std::to_string(r.other_hubs) + ")",
            "detect: groups stayers=" + std::to_string(r.stayers) +
                " job_hoppers=" + std::to_string(r.job_hoppers) +
                " home_movers=" + std::to_string(r.home_movers) +
                " moves housing=" + std::to_string(r.housing_moves) +
                " job=" + std::to_string(r.job_moves)};
}

std::vector<std::string> cmd_analyze(const PipelineConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    std::vector<std::string> lines;
    std::vector<std::string> notices;
    json summary;

    const auto hubs = read_hubs_csv(join_path(out_dir, "hubs.csv"));
    const auto mv = read_moves_csv(join_path(out_dir, "moves.csv"));
    const auto details = read_moves_detail_csv(join_path(out_dir, "moves_detail.csv"));
    const auto stats = read_hub_stats_csv(join_path(out_dir, "hub_stats.csv"));
    const auto groups = read_groups_csv(join_path(out_dir, "groups.csv"));

    // monthly series over the observed hub span
    {
        YearMonth lo{}, hi{};
        if (!hubs.empty()) {
            lo = YearMonth::of_date(date_of(hubs.front().first_order));
            hi = lo;
            for (const auto& h : hubs) {
                lo = std::min(lo, YearMonth::of_date(date_of(h.first_order)));
                hi = std::max(hi, YearMonth::of_date(date_of(h.last_order)));
            }
        }
        std::vector<moves::Move> as_moves;
        as_moves.reserve(mv.size());
        for (const auto& m : mv) {
            moves::Move x;
            x.kind = m.kind;
            x.move_month = m.move_month;
            as_moves.push_back(std::move(x));
        }
        const auto housing =
            analytics::monthly_move_counts(as_moves, moves::MoveKind::Housing, lo, hi);
        const auto job = analytics::monthly_move_counts(as_moves, moves::MoveKind::Job, lo, hi);
        csv::Writer w(join_path(out_dir, "monthly_moves.csv"));
        w.raw_line("month,housing_moves,job_moves");
        for (const auto& [month, count] : housing)
            w.row({month.str(), std::to_string(count),
                   std::to_string(job.count(month) ? job.at(month) : 0)});
        w.close();
        std::size_t housing_total = 0, job_total = 0;
        for (const auto& [month, count] : housing) housing_total += count;
        for (const auto& [month, count] : job) job_total += count;
        summary["monthly"] = {{"housing_total", housing_total}, {"job_total", job_total}};
    }

    // flows and work-home ratio need subdistricts
    if (!cfg.paths.subdistricts.empty()) {
        auto subdistricts = analytics::load_subdistricts(cfg.paths.subdistricts);
        std::vector<moves::Move> job_moves, housing_moves;
        for (const auto& m : mv) {
            moves::Move x;
            x.kind = m.kind;
            x.from_center = m.from;
            x.to_center = m.to;
            x.move_month = m.move_month;
            (m.kind == moves::MoveKind::Job ? job_moves : housing_moves).push_back(std::move(x));
        }
        for (const auto kind : {moves::MoveKind::Job, moves::MoveKind::Housing}) {
            const auto& source = kind == moves::MoveKind::Job ? job_moves : housing_moves;
            const auto graph = analytics::flow_graph(source, subdistricts);
            const std::string tag = kind == moves::MoveKind::Job ? "job" : "housing";
            {
                csv::Writer w(join_path(out_dir, ("flow_nodes_" + tag + ".csv").c_str()));
                w.raw_line("subdistrict_id,total_moves,in_minus_out");
                for (const auto& [id, node] : graph.nodes)
                    w.row({id, std::to_string(node.total), std::to_string(node.in_minus_out)});
                w.close();
            }
            {
                csv::Writer w(join_path(out_dir, ("flow_edges_" + tag + ".csv").c_str()));
                w.raw_line("from_id,to_id,count");
                for (const auto& [edge, count] : graph.edges)
                    w.row({edge.first, edge.second, std::to_string(count)});
                w.close();
            }
            summary["flow"][tag] = {{"nodes", graph.nodes.size()},
                                    {"edges", graph.edges.size()},
                                    {"spilled", graph.spilled}};
        }

        if (!cfg.paths.census.empty()) {
            analytics::load_reference_series(subdistricts, cfg.paths.census);
        } else {
            notices.push_back("census file absent: work-home ratio correlation skipped");
        }
        std::vector<analytics::HubPoint> points;
        for (const auto& h : hubs) points.push_back({h.center, h.label});
        const auto ratio = analytics::work_home_ratio_correlation(points, subdistricts);
        {
            csv::Writer w(join_path(out_dir, "work_home_ratio.csv"));
            w.raw_line("subdistrict_id,work_home_ratio");
            for (const auto& [id, value] : ratio.ratios) w.row({id, csv::fmt_double(value)});
            w.close();
        }
        summary["work_home_ratio"] = {
            {"subdistricts_with_ratio", ratio.ratios.size()},
            {"excluded_no_home", ratio.excluded_no_home},
            {"spilled_hubs", ratio.spilled_hubs},
            {"common_subdistricts", ratio.common_subdistricts}};
        summary["work_home_ratio"]["pearson_vs_reference"] =
            ratio.pearson_vs_reference ? json(*ratio.pearson_vs_reference) : json();
        if (ratio.pearson_vs_reference)
            lines.push_back("analyze: work-home ratio pearson_r=" +
                            csv::fmt_double(*ratio.pearson_vs_reference));
    } else {
        notices.push_back("subdistricts file absent: flow graphs and ratio skipped");
    }

    // hotspot density grids
    {
        std::vector<GeoPoint> home_centers, work_centers;
        for (const auto& h : hubs) {
            if (h.label == hubprofile::HubLabel::Home) home_centers.push_back(h.center);
            if (h.label == hubprofile::HubLabel::Work) work_centers.push_back(h.center);
        }
        const auto write_grid = [&](const std::vector<GeoPoint>& pts, const char* name) {
            if (pts.empty()) {
                notices.push_back(std::string(name) + ": no hub centers, grid skipped");
                return;
            }
            const auto grid = analytics::kde_hotspot_grid(pts, cfg.analysis.kde_cell_km,
                                                          cfg.analysis.kde_bandwidth_km);
            csv::Writer w(join_path(out_dir, name));
            w.raw_line("lat,lon,density");
            for (std::size_t r = 0; r < grid.rows; ++r)
                for (std::size_t c = 0; c < grid.cols; ++c) {
                    const auto p = grid.cell_center(r, c);
                    w.row({csv::fmt_double(p.lat), csv::fmt_double(p.lon),
                           csv::fmt_double(grid.at(r, c))});
                }
            w.close();
        };
        write_grid(home_centers, "kde_home.csv");
        write_grid(work_centers, "kde_work.csv");
        summary["kde"] = {{"home_points",
                           std::count_if(hubs.begin(), hubs.end(),
                                         [](const HubRow& h) {
                                             return h.label == hubprofile::HubLabel::Home;
                                         })},
                          {"work_points",
                           std::count_if(hubs.begin(), hubs.end(), [](const HubRow& h) {
                               return h.label == hubprofile::HubLabel::Work;
                           })}};
    }

    // per-user and per-hub lookups for group statistics
    std::map<std::string, std::vector<const HubRow*>> hubs_by_user;
    for (const auto& h : hubs) hubs_by_user[h.user_id].push_back(&h);
    std::map<std::pair<std::string, int>, const HubStatsRow*> stats_by_hub;
    for (const auto& s : stats) stats_by_hub[{s.user_id, s.hub_id}] = &s;
    std::map<std::pair<std::string, int>, const HubRow*> hub_by_id;
    for (const auto& h : hubs) hub_by_id[{h.user_id, h.hub_id}] = &h;

    std::size_t group_stayers = 0, group_hoppers = 0, group_movers = 0, group_both = 0;
    for (const auto& g : groups) {
        if (g.group.stayer) ++group_stayers;
        if (g.group.job_hopper) ++group_hoppers;
        if (g.group.home_mover) ++group_movers;
        if (g.group.job_hopper && g.group.home_mover) ++group_both;
    }
    summary["groups"] = {{"stayers", group_stayers},
                         {"job_hoppers", group_hoppers},
                         {"home_movers", group_movers},
                         {"both", group_both}};

    // commuting distance: stayers vs pre-move for each mover group
    {
        std::vector<double> stayer_commute, hopper_pre, mover_pre;
        std::size_t ambiguous = 0;
        for (const auto& g : groups) {
            if (!g.group.stayer) continue;
            const auto it = hubs_by_user.find(g.user_id);
            if (it == hubs_by_user.end()) continue;
            const HubRow* home = nullptr;
            const HubRow* work = nullptr;
            bool dup = false;
            for (const auto* h : it->second) {
                if (h->label == hubprofile::HubLabel::Home) {
                    dup |= home != nullptr;
                    home = h;
                }
                if (h->label == hubprofile::HubLabel::Work) {
                    dup |= work != nullptr;
                    work = h;
                }
            }
            if (dup) {
                ++ambiguous;
                continue;
            }
            if (home && work) stayer_commute.push_back(haversine_km(home->center, work->center));
        }
        std::set<std::string> seen_job, seen_housing;
        for (const auto& m : mv) {
            if (!m.pre_commute_km) continue;
            if (m.kind == moves::MoveKind::Job && seen_job.insert(m.user_id).second)
                hopper_pre.push_back(*m.pre_commute_km);
            if (m.kind == moves::MoveKind::Housing && seen_housing.insert(m.user_id).second)
                mover_pre.push_back(*m.pre_commute_km);
        }
        summary["commute_km"] = {{"stayers", sample_stats(stayer_commute)},
                                 {"job_hoppers_pre", sample_stats(hopper_pre)},
                                 {"home_movers_pre", sample_stats(mover_pre)},
                                 {"ambiguous_stayers", ambiguous}};
        summary["commute_km"]["welch_job_vs_stayer"] = welch_or_null(hopper_pre, stayer_commute);
        summary["commute_km"]["welch_home_vs_stayer"] = welch_or_null(mover_pre, stayer_commute);

        // post-pre differences binned by the pre-move distance
        for (const auto kind : {moves::MoveKind::Job, moves::MoveKind::Housing}) {
            std::vector<std::pair<double, double>> pairs;
            for (const auto& m : mv)
                if (m.kind == kind && m.pre_commute_km && m.post_commute_km)
                    pairs.emplace_back(*m.pre_commute_km, *m.post_commute_km);
            const std::string tag = kind == moves::MoveKind::Job ? "job" : "housing";
            if (!pairs.empty()) {
                const auto bins =
                    analytics::binned_post_pre_diff(pairs, cfg.analysis.commute_bin_km);
                write_bins_csv(bins, cfg.analysis.commute_bin_km,
                               join_path(out_dir, ("bins_commute_" + tag + ".csv").c_str()));
            }
            summary["commute_km"]["pairs_" + tag] = pairs.size();
        }
    }

    // working-overtime ratio: stayers' work hubs vs job hoppers' pre-move hubs
    {
        std::vector<double> stayer_ratio, hopper_pre_ratio;
        std::vector<std::pair<double, double>> pre_post;
        for (const auto& g : groups) {
            if (!g.group.stayer) continue;
            const auto it = hubs_by_user.find(g.user_id);
            if (it == hubs_by_user.end()) continue;
            for (const auto* h : it->second) {
                if (h->label != hubprofile::HubLabel::Work) continue;
                const auto s = stats_by_hub.find({g.user_id, h->hub_id});
                if (s != stats_by_hub.end()) stayer_ratio.push_back(s->second->overtime_ratio);
            }
        }
        std::set<std::string> seen;
        for (const auto& d : details) {
            if (d.kind != moves::MoveKind::Job) continue;
            const auto pre = stats_by_hub.find({d.user_id, d.from_hub});
            const auto post = stats_by_hub.find({d.user_id, d.to_hub});
            if (pre == stats_by_hub.end()) continue;
            if (seen.insert(d.user_id).second)
                hopper_pre_ratio.push_back(pre->second->overtime_ratio);
            if (post != stats_by_hub.end())
                pre_post.emplace_back(pre->second->overtime_ratio, post->second->overtime_ratio);
        }
        summary["overtime_ratio"] = {{"stayers", sample_stats(stayer_ratio)},
                                     {"job_hoppers_pre", sample_stats(hopper_pre_ratio)}};
        summary["overtime_ratio"]["welch_job_vs_stayer"] =
            welch_or_null(hopper_pre_ratio, stayer_ratio);
        if (!pre_post.empty())
            write_bins_csv(analytics::binned_post_pre_diff(pre_post, cfg.analysis.overtime_bin),
                           cfg.analysis.overtime_bin, join_path(out_dir, "bins_overtime_job.csv"));
        summary["overtime_ratio"]["pairs_job"] = pre_post.size();
    }

    // housing prices, matched moves, region transitions
    if (!cfg.paths.transactions.empty()) {
        const auto txns = analytics::load_transactions(cfg.paths.transactions);
        std::vector<double> stayer_price, mover_pre_price;
        std::vector<std::pair<double, double>> price_pairs;
        std::size_t housing_count = 0, matched_count = 0;
        std::vector<analytics::HousingMoveEconomics> economics;

        for (const auto& g : groups) {
            if (!g.group.stayer) continue;
            const auto it = hubs_by_user.find(g.user_id);
            if (it == hubs_by_user.end()) continue;
            for (const auto* h : it->second) {
                if (h->label != hubprofile::HubLabel::Home) continue;
                const auto mid = YearMonth::of_date(
                    date_of((h->first_order + h->last_order) / 2));
                const auto price = analytics::match_housing_price(
                    h->center, mid, txns, cfg.analysis.price_match_radius_km);
                if (price) stayer_price.push_back(*price);
            }
        }

        csv::Writer w(join_path(out_dir, "price_matches.csv"));
        w.raw_line("user_id,move_month,pre_price,post_price");
        std::set<std::string> seen;
        for (const auto& m : mv) {
            if (m.kind != moves::MoveKind::Housing) continue;
            ++housing_count;
            const auto pre = analytics::match_housing_price(m.from, YearMonth{m.move_month.index - 1},
                                                            txns,
                                                            cfg.analysis.price_match_radius_km);
            const auto post = analytics::match_housing_price(
                m.to, m.move_month, txns, cfg.analysis.price_match_radius_km);
            w.row({m.user_id, m.move_month.str(), pre ? csv::fmt_double(*pre) : "",
                   post ? csv::fmt_double(*post) : ""});
            if (pre && seen.insert(m.user_id).second) mover_pre_price.push_back(*pre);
            if (pre && post) {
                ++matched_count;
                price_pairs.emplace_back(*pre, *post);
                if (m.pre_commute_km && m.post_commute_km)
                    economics.push_back({m.from, m.to, *post - *pre,
                                         *m.post_commute_km - *m.pre_commute_km});
            }
        }
        w.close();

        summary["housing_price"] = {{"stayers", sample_stats(stayer_price)},
                                    {"home_movers_pre", sample_stats(mover_pre_price)},
                                    {"housing_moves", housing_count},
                                    {"matched_moves", matched_count}};
        summary["housing_price"]["matched_rate"] =
            housing_count ? json(static_cast<double>(matched_count) /
                                 static_cast<double>(housing_count))
                          : json();
        summary["housing_price"]["welch_home_vs_stayer"] =
            welch_or_null(mover_pre_price, stayer_price);
        if (!price_pairs.empty())
            write_bins_csv(
                analytics::binned_post_pre_diff(price_pairs, cfg.analysis.price_bin_per_m2),
                cfg.analysis.price_bin_per_m2, join_path(out_dir, "bins_price_housing.csv"));

        if (!cfg.paths.rings.empty()) {
            const auto rings = analytics::load_rings(cfg.paths.rings);
            const auto table = analytics::region_transitions(economics, rings);
            csv::Writer rw(join_path(out_dir, "region_transitions.csv"));
            rw.raw_line("from_region,to_region,mean_price_diff,mean_commute_diff,count");
            for (const auto& [key, cell] : table.cells)
                rw.row({analytics::region_name(key.first), analytics::region_name(key.second),
                        csv::fmt_double(cell.mean_price_diff),
                        csv::fmt_double(cell.mean_commute_diff), std::to_string(cell.count)});
            rw.close();
            summary["region_transitions"] = {{"cells", table.cells.size()},
                                             {"spilled", table.spilled},
                                             {"moves_with_economics", economics.size()}};
        } else {
            notices.push_back("rings file absent: region transition table skipped");
        }
    } else {
        notices.push_back("transactions file absent: housing price reports skipped");
    }

    summary["notices"] = notices;
    {
        std::ofstream out(join_path(out_dir, "analysis_summary.json"), std::ios::binary);
        out << summary.dump(2) << '\n';
    }
    for (const auto& n : notices) lines.push_back("analyze: " + n);
    lines.push_back("analyze: summary written to " + join_path(out_dir, "analysis_summary.json"));
    return lines;
}

std::vector<std::string> cmd_evaluate(const PipelineConfig& cfg, const std::string& out_dir,
                                      std::optional<double> match_radius_km,
                                      std::optional<int> month_slack) {
    ensure_dir(out_dir);
    std::string truth_path = cfg.paths.ground_truth;
    if (truth_path.empty()) {
        truth_path = join_path(out_dir, "ground_truth.json");
        if (!fs::exists(truth_path))
            throw ConfigError(
                "config: missing field 'paths.ground_truth' and no ground_truth.json in " +
                out_dir);
    }
    const auto truth = synthcity::GroundTruth::load(truth_path);
    const auto hubs = read_hubs_csv(join_path(out_dir, "hubs.csv"));
    const auto mv = read_moves_csv(join_path(out_dir, "moves.csv"));

    std::vector<synthcity::DetectedHub> dhubs;
    dhubs.reserve(hubs.size());
    for (const auto& h : hubs) dhubs.push_back({h.user_id, h.label, h.center});
    std::vector<synthcity::DetectedMove> dmoves;
    dmoves.reserve(mv.size());
    for (const auto& m : mv) dmoves.push_back({m.user_id, m.kind, m.from, m.to, m.move_month});

    const auto report = synthcity::evaluate(
        dhubs, dmoves, truth, match_radius_km.value_or(cfg.analysis.match_radius_km),
        month_slack.value_or(cfg.analysis.month_slack));
    {
        std::ofstream out(join_path(out_dir, "eval_report.json"), std::ios::binary);
        out << report.to_json_text() << '\n';
    }

    const auto fmt = [](const std::optional<double>& v) {
        return v ? csv::fmt_double(*v) : std::string("n/a");
    };
    return {"evaluate: housing precision=" + fmt(report.housing.precision) +
                " recall=" + fmt(report.housing.recall),
            "evaluate: job precision=" + fmt(report.job.precision) +
                " recall=" + fmt(report.job.recall),
            "evaluate: label_accuracy=" + fmt(report.label_accuracy) +
                " median_center_error_km=" +
                csv::fmt_double(report.hub_center_error_km.median)};
}

std::vector<std::string> cmd_run_all(const PipelineConfig& cfg, const std::string& out_dir) {
    std::vector<std::string> lines;
    PipelineConfig local = cfg;
    if (local.scenario) {
        const auto synth_lines = cmd_synth(local, out_dir);
        lines.insert(lines.end(), synth_lines.begin(), synth_lines.end());
        local.paths.orders = join_path(out_dir, "orders.csv");
        local.paths.holidays = join_path(out_dir, "holidays.json");
        local.paths.subdistricts = join_path(out_dir, "subdistricts.geojson");
        local.paths.census = join_path(out_dir, "census.csv");
        local.paths.rings = join_path(out_dir, "rings.geojson");
        local.paths.transactions = join_path(out_dir, "transactions.csv");
        local.paths.ground_truth = join_path(out_dir, "ground_truth.json");
    }
    for (const auto& stage :
         {&cmd_detect, &cmd_analyze}) {
        const auto stage_lines = (*stage)(local, out_dir);
        lines.insert(lines.end(), stage_lines.begin(), stage_lines.end());
    }
    if (!local.paths.ground_truth.empty() || fs::exists(join_path(out_dir, "ground_truth.json"))) {
        const auto eval_lines = cmd_evaluate(local, out_dir);
        lines.insert(lines.end(), eval_lines.begin(), eval_lines.end());
    }
    return lines;
}

}  // namespace hubshift::pipeline
