#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>

#include "doctest.h"
#include "hubshift/errors.hpp"
#include "hubshift/pipeline.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace hubshift;
using namespace hubshift::pipeline;

namespace {

synthcity::ScenarioConfig tiny_scenario(std::uint64_t seed = 101) {
    synthcity::ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.n_users = 30;
    cfg.n_restaurants = 900;
    cfg.orders_min = 35;
    cfg.orders_max = 55;
    cfg.span_months = 18;
    cfg.move_month_weights.fill(1.0);
    cfg.home_slot_profile = synthcity::default_home_slot_profile();
    cfg.work_slot_profile = synthcity::default_work_slot_profile();
    return cfg;
}

std::string detect_fingerprint(const DetectResult& r) {
    std::string out;
    for (const auto& u : r.users) {
        out += u.user_id + ":";
        for (const auto& h : u.hubs) {
            out += std::to_string(h.hub.center.lat) + "," + std::to_string(h.hub.center.lon) +
                   "," + label_code(h.label) + ";";
        }
        for (const auto& m : u.moves)
            out += moves::move_kind_name(m.kind) + m.move_month.str() + ";";
        out += "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("run_detect is independent of the worker count") {
    const auto scenario = tiny_scenario();
    const auto synthetic = synthcity::generate(scenario, 2);
    const auto cal =
        synthcity::make_holiday_calendar(scenario.span_start, scenario.span_months);

    PipelineConfig one;
    one.workers = 1;
    PipelineConfig eight;
    eight.workers = 8;
    const auto a = run_detect(synthetic.log, cal, one);
    const auto b = run_detect(synthetic.log, cal, eight);
    CHECK(detect_fingerprint(a) == detect_fingerprint(b));
    CHECK(a.report.hubs == b.report.hubs);
    CHECK(a.report.home_hubs == b.report.home_hubs);
}

TEST_CASE("stage files round-trip") {
    testutil::TempDir dir;
    const auto scenario = tiny_scenario();
    const auto synthetic = synthcity::generate(scenario, 2);
    const auto cal =
        synthcity::make_holiday_calendar(scenario.span_start, scenario.span_months);
    PipelineConfig cfg;
    cfg.workers = 2;
    const auto result = run_detect(synthetic.log, cal, cfg);

    const auto hubs_path = dir.file("hubs.csv");
    const auto moves_path = dir.file("moves.csv");
    write_hubs_csv(result, hubs_path);
    write_moves_csv(result, moves_path);
    write_groups_csv(result, dir.file("groups.csv"));
    write_hub_stats_csv(result, cal, dir.file("hub_stats.csv"));
    write_moves_detail_csv(result, dir.file("moves_detail.csv"));

    const auto hubs = read_hubs_csv(hubs_path);
    std::size_t expected_hubs = 0;
    for (const auto& u : result.users) expected_hubs += u.hubs.size();
    CHECK(hubs.size() == expected_hubs);

    const auto mv = read_moves_csv(moves_path);
    std::size_t expected_moves = 0;
    for (const auto& u : result.users) expected_moves += u.moves.size();
    CHECK(mv.size() == expected_moves);

    // centers and months survive the round trip exactly
    std::size_t i = 0;
    for (const auto& u : result.users) {
        for (const auto& h : u.hubs) {
            CHECK(hubs[i].center == h.hub.center);
            CHECK(hubs[i].label == h.label);
            CHECK(hubs[i].first_order == h.hub.first_order);
            ++i;
        }
    }

    const auto stats = read_hub_stats_csv(dir.file("hub_stats.csv"));
    CHECK(stats.size() == expected_hubs);
    const auto details = read_moves_detail_csv(dir.file("moves_detail.csv"));
    CHECK(details.size() == expected_moves);
    const auto groups = read_groups_csv(dir.file("groups.csv"));
    CHECK(groups.size() <= result.users.size());
}

TEST_CASE("degenerate single-restaurant scenario recovers one home hub") {
    // one user, one restaurant, everything at the home anchor
    synthcity::ScenarioConfig scenario;
    scenario.seed = 9;
    scenario.n_users = 1;
    scenario.n_restaurants = 1;
    scenario.extent = {39.900, 39.903, 116.400, 116.403};  // a few hundred meters
    scenario.archetype_shares = {1.0, 0.0, 0.0, 0.0};
    scenario.orders_min = 25;
    scenario.orders_max = 25;
    scenario.span_months = 6;
    scenario.work_order_share = 0.0;
    scenario.move_month_weights.fill(1.0);
    scenario.home_slot_profile = synthcity::default_home_slot_profile();
    scenario.work_slot_profile = synthcity::default_work_slot_profile();

    const auto synthetic = synthcity::generate(scenario, 1);
    REQUIRE(synthetic.log.size() == 25);
    for (const auto& o : synthetic.log.orders) CHECK(o.restaurant_id == "r0");

    const auto cal =
        synthcity::make_holiday_calendar(scenario.span_start, scenario.span_months);
    PipelineConfig cfg;
    const auto result = run_detect(synthetic.log, cal, cfg);
    CHECK(result.report.labeling_mode == "direct");
    REQUIRE(result.users.size() == 1);
    REQUIRE(result.users[0].hubs.size() == 1);
    const auto& hub = result.users[0].hubs[0];
    CHECK(hub.label == hubprofile::HubLabel::Home);
    const auto home = synthetic.truth.users[0].home_phases[0].position;
    CHECK(haversine_km(hub.hub.center, home) <= 0.5);
}

TEST_CASE("single-restaurant users yield zero moves") {
    auto scenario = tiny_scenario();
    scenario.n_users = 8;
    scenario.archetype_shares = {1.0, 0.0, 0.0, 0.0};
    const auto synthetic = synthcity::generate(scenario, 1);
    const auto cal =
        synthcity::make_holiday_calendar(scenario.span_start, scenario.span_months);
    PipelineConfig cfg;
    const auto result = run_detect(synthetic.log, cal, cfg);
    CHECK(result.report.housing_moves == 0);
    CHECK(result.report.job_moves == 0);
    CHECK(result.report.stayers == result.report.users_with_home_and_work);
}

TEST_CASE("pipeline config json") {
    SUBCASE("defaults parse") {
        const auto cfg = PipelineConfig::from_json_text("{}");
        CHECK(cfg.kernel.sigma_km == 4.4);
        CHECK(cfg.classifier.fixed_k == 4);
        CHECK(cfg.move.min_separation_km == 4.4);
        CHECK(cfg.min_user_orders == 10);
    }
    SUBCASE("overrides apply and propagate the seed") {
        const auto cfg = PipelineConfig::from_json_text(R"({
            "seed": 123,
            "kernel": {"sigma_km": 2.0, "mode_merge_km": 0.05},
            "classifier": {"fixed_k": null, "k_range": [2, 5]},
            "move": {"min_separation_km": 3.0},
            "scenario": {"n_users": 12, "n_restaurants": 500}
        })");
        CHECK(cfg.kernel.sigma_km == 2.0);
        CHECK(!cfg.classifier.fixed_k.has_value());
        CHECK(cfg.classifier.seed == 123);
        CHECK(cfg.move.min_separation_km == 3.0);
        REQUIRE(cfg.scenario.has_value());
        CHECK(cfg.scenario->seed == 123);
        CHECK(cfg.scenario->n_users == 12);
    }
    SUBCASE("bad values named") {
        CHECK_THROWS_AS(PipelineConfig::from_json_text(R"({"kernel": {"sigma_km": -1}})"),
                        ConfigError);
        CHECK_THROWS_AS(PipelineConfig::from_json_text(R"({"workers": 0})"), ConfigError);
        CHECK_THROWS_AS(
            PipelineConfig::from_json_text(R"({"paths": {"orders": "/no/such/file.csv"}})"),
            ConfigError);
    }
}

TEST_CASE("commands write a consistent stage directory") {
    testutil::TempDir dir;
    PipelineConfig cfg;
    cfg.workers = 2;
    cfg.seed = 55;
    cfg.scenario = tiny_scenario(55);
    cfg.classifier.seed = 55;

    const auto out = dir.file("run");
    const auto lines = cmd_run_all(cfg, out);
    CHECK(!lines.empty());

    for (const char* name :
         {"orders.csv", "ground_truth.json", "holidays.json", "subdistricts.geojson",
          "census.csv", "rings.geojson", "transactions.csv", "hubs.csv", "moves.csv",
          "groups.csv", "hub_stats.csv", "detect_report.json", "monthly_moves.csv",
          "analysis_summary.json", "eval_report.json"}) {
        CAPTURE(name);
        CHECK(std::filesystem::exists(std::filesystem::path(out) / name));
    }

    // reports parse as JSON and carry the core statistics
    const auto summary =
        nlohmann::json::parse(testutil::read_file((std::filesystem::path(out) /
                                                   "analysis_summary.json").string()));
    CHECK(summary.contains("monthly"));
    CHECK(summary.contains("work_home_ratio"));
    const auto eval =
        nlohmann::json::parse(testutil::read_file((std::filesystem::path(out) /
                                                   "eval_report.json").string()));
    CHECK(eval.contains("housing"));
    CHECK(eval.contains("hubs"));

    SUBCASE("rerunning with the same seed is byte-identical") {
        const auto out2 = dir.file("run2");
        cmd_run_all(cfg, out2);
        for (const char* name : {"orders.csv", "hubs.csv", "moves.csv", "eval_report.json",
                                 "analysis_summary.json"}) {
            CAPTURE(name);
            CHECK(testutil::read_file((std::filesystem::path(out) / name).string()) ==
                  testutil::read_file((std::filesystem::path(out2) / name).string()));
        }
    }
}

TEST_CASE("analyze skips reports whose inputs are absent") {
    testutil::TempDir dir;
    PipelineConfig cfg;
    cfg.workers = 2;
    cfg.seed = 56;
    cfg.scenario = tiny_scenario(56);

    const auto out = dir.file("run");
    cmd_synth(cfg, out);
    PipelineConfig detect_cfg = cfg;
    detect_cfg.paths.orders = (std::filesystem::path(out) / "orders.csv").string();
    detect_cfg.paths.holidays = (std::filesystem::path(out) / "holidays.json").string();
    cmd_detect(detect_cfg, out);

    // no geo/census/transaction paths configured: analyze still succeeds
    const auto lines = cmd_analyze(detect_cfg, out);
    bool noticed = false;
    for (const auto& l : lines) noticed |= l.find("skipped") != std::string::npos;
    CHECK(noticed);
    CHECK(std::filesystem::exists(std::filesystem::path(out) / "monthly_moves.csv"));
    CHECK(!std::filesystem::exists(std::filesystem::path(out) / "region_transitions.csv"));

    const auto summary = nlohmann::json::parse(
        testutil::read_file((std::filesystem::path(out) / "analysis_summary.json").string()));
    CHECK(!summary["notices"].empty());
}

TEST_CASE("evaluate error on mismatched universes") {
    testutil::TempDir dir;
    PipelineConfig cfg;
    cfg.workers = 2;
    cfg.seed = 57;
    cfg.scenario = tiny_scenario(57);
    const auto out = dir.file("run");
    cmd_run_all(cfg, out);

    // truth from a different scenario has different users
    PipelineConfig other = cfg;
    other.scenario = tiny_scenario(58);
    other.scenario->n_users = 5;
    const auto out2 = dir.file("other");
    cmd_synth(other, out2);

    PipelineConfig eval_cfg = cfg;
    eval_cfg.paths.ground_truth = (std::filesystem::path(out2) / "ground_truth.json").string();
    CHECK_THROWS_AS(cmd_evaluate(eval_cfg, out), DataError);
}
