#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "hubshift/errors.hpp"
#include "hubshift/geo.hpp"
#include "hubshift/orders.hpp"
#include "hubshift/timeutil.hpp"
#include "test_util.hpp"

using namespace hubshift;

TEST_CASE("haversine basics") {
    const GeoPoint beijing{39.9042, 116.4074};
    CHECK(haversine_km(beijing, beijing) == 0.0);
    CHECK(std::fabs(haversine_km({0.0, 0.0}, {0.0, 1.0}) - 111.195) < 0.001);
    CHECK(std::fabs(haversine_km(beijing, {39.9142, 116.4074}) - 1.112) < 0.001);
}

TEST_CASE("haversine is symmetric and satisfies the triangle inequality") {
    std::mt19937_64 eng(42);
    std::uniform_real_distribution<double> lat(-80.0, 80.0), lon(-180.0, 180.0);
    for (int i = 0; i < 500; ++i) {
        const GeoPoint a{lat(eng), lon(eng)}, b{lat(eng), lon(eng)}, c{lat(eng), lon(eng)};
        const double ab = haversine_km(a, b);
        const double ba = haversine_km(b, a);
        CHECK(ab == ba);
        CHECK(ab <= haversine_km(a, c) + haversine_km(c, b) + 1e-9);
    }
}

TEST_CASE("time_slot follows the slot scheme") {
    HolidayCalendar cal;

    // 2015-01-07 is a Wednesday
    const auto wed_noon = time_slot(*parse_minute("2015-01-07 12:30"), cal);
    CHECK(wed_noon.day_type == DayType::Weekday);
    CHECK(wed_noon.slot == Slot::Noon);

    // 2015-01-10 is a Saturday; 02:00 is night attributed to Saturday
    const auto sat_night = time_slot(*parse_minute("2015-01-10 02:00"), cal);
    CHECK(sat_night.day_type == DayType::Weekend);
    CHECK(sat_night.slot == Slot::Night);

    // holiday precedence over weekday (2015-01-05 is a Monday)
    HolidayCalendar with_holiday;
    with_holiday.holiday_dates.insert(*parse_date("2015-01-05"));
    const auto hol = time_slot(*parse_minute("2015-01-05 12:00"), with_holiday);
    CHECK(hol.day_type == DayType::Holiday);
    CHECK(hol.slot == Slot::Noon);

    // holiday precedence over weekend too
    with_holiday.holiday_dates.insert(*parse_date("2015-01-10"));
    CHECK(time_slot(*parse_minute("2015-01-10 12:00"), with_holiday).day_type ==
          DayType::Holiday);

    SUBCASE("half-open boundaries") {
        CHECK(time_slot(*parse_minute("2015-01-07 11:00"), cal).slot == Slot::Noon);
        CHECK(time_slot(*parse_minute("2015-01-07 10:59"), cal).slot == Slot::Morning);
        CHECK(time_slot(*parse_minute("2015-01-07 06:00"), cal).slot == Slot::Morning);
        CHECK(time_slot(*parse_minute("2015-01-07 05:59"), cal).slot == Slot::Night);
        CHECK(time_slot(*parse_minute("2015-01-07 22:00"), cal).slot == Slot::Night);
        CHECK(time_slot(*parse_minute("2015-01-07 21:59"), cal).slot == Slot::Evening);
        CHECK(time_slot(*parse_minute("2015-01-07 15:00"), cal).slot == Slot::Afternoon);
        CHECK(time_slot(*parse_minute("2015-01-07 19:00"), cal).slot == Slot::Evening);
    }
}

TEST_CASE("time_slot is total over a two-year scan") {
    HolidayCalendar cal;
    cal.holiday_dates.insert(*parse_date("2015-10-01"));
    const CivilMinute start = *parse_minute("2015-01-01 00:00");
    const CivilMinute end = *parse_minute("2017-01-01 00:00");
    std::array<std::size_t, kSlotLabelCount> seen{};
    for (CivilMinute t = start; t < end; t += 7) {  // stride keeps the scan fast
        const auto s = time_slot(t, cal);
        const int idx = s.index();
        REQUIRE(idx >= 0);
        REQUIRE(idx < kSlotLabelCount);
        ++seen[idx];
    }
    for (int day = 0; day < kDayTypeCount; ++day)
        for (int slot = 0; slot < kSlotCount; ++slot)
            CHECK(seen[day * kSlotCount + slot] > 0);
}

TEST_CASE("calendar parsing") {
    CHECK(parse_minute("2015-02-29 10:00") == std::nullopt);  // not a leap year
    CHECK(parse_minute("2016-02-29 10:00").has_value());
    CHECK(parse_minute("2015-13-01 10:00") == std::nullopt);
    CHECK(parse_minute("2015-01-01 24:00") == std::nullopt);
    CHECK(parse_minute("2015-01-01T10:00") == std::nullopt);
    CHECK(format_minute(*parse_minute("2015-06-05 09:07")) == "2015-06-05 09:07");
    CHECK(YearMonth::parse("2016-03")->str() == "2016-03");
    CHECK(YearMonth::of_date(*parse_date("2016-03-31")).str() == "2016-03");
    CHECK(weekday_index(*parse_date("2015-01-05")) == 0);  // Monday
    CHECK(weekday_index(*parse_date("2015-01-11")) == 6);  // Sunday
}

TEST_CASE("holiday calendar json") {
    const auto cal = HolidayCalendar::from_json_text(
        R"({"holidays": ["2016-10-01", "2016-10-02"], "weekend_days": [4, 5]})");
    CHECK(cal.is_holiday(*parse_date("2016-10-01")));
    CHECK(!cal.is_holiday(*parse_date("2016-10-03")));
    CHECK(cal.weekend_days == std::set<int>{4, 5});

    const auto bare = HolidayCalendar::from_json_text(R"(["2016-01-01"])");
    CHECK(bare.is_holiday(*parse_date("2016-01-01")));
    CHECK(bare.weekend_days == std::set<int>{5, 6});

    CHECK_THROWS_AS(HolidayCalendar::from_json_text(R"({"weekend_days": []})"), DataError);
    CHECK_THROWS_AS(HolidayCalendar::from_json_text(R"(["2016-13-01"])"), DataError);
}

namespace {

const char* kSmallCsv =
    "user_id,restaurant_id,lat,lon,arrive_time,cost_time_min\n"
    "u2,r1,39.9,116.4,2015-03-02 12:10,25\n"
    "u1,r2,39.91,116.41,2015-03-01 19:30,40\n"
    "u1,r1,39.9,116.4,2015-03-01 12:05,30\n";

}  // namespace

TEST_CASE("load_orders parses, sorts and reports") {
    testutil::TempDir dir;
    const auto path = dir.file("orders.csv");

    SUBCASE("well-formed file") {
        testutil::write_file(path, kSmallCsv);
        LoadReport report;
        const auto log = load_orders(path, &report);
        CHECK(log.size() == 3);
        CHECK(report.rows_loaded == 3);
        CHECK(report.rows_rejected == 0);
        // sorted by user, then time
        CHECK(log.orders[0].user_id == "u1");
        CHECK(log.orders[0].restaurant_id == "r1");
        CHECK(log.orders[2].user_id == "u2");
        CHECK(log.span_min == *parse_minute("2015-03-01 12:05"));
        CHECK(log.span_max == *parse_minute("2015-03-02 12:10"));
    }

    SUBCASE("negative delivery minutes rejected with line number") {
        testutil::write_file(path,
                             "user_id,restaurant_id,lat,lon,arrive_time,cost_time_min\n"
                             "u1,r1,39.9,116.4,2015-03-01 12:05,-3\n");
        LoadReport report;
        const auto log = load_orders(path, &report);
        CHECK(log.size() == 0);
        REQUIRE(report.rows_rejected == 1);
        CHECK(report.diagnostics[0].find("line 2") != std::string::npos);
    }

    SUBCASE("exact duplicates collapse") {
        testutil::write_file(path,
                             "user_id,restaurant_id,lat,lon,arrive_time,cost_time_min\n"
                             "u1,r1,39.9,116.4,2015-03-01 12:05,30\n"
                             "u1,r1,39.9,116.4,2015-03-01 12:05,30\n");
        LoadReport report;
        const auto log = load_orders(path, &report);
        CHECK(log.size() == 1);
        CHECK(report.duplicates_removed == 1);
    }

    SUBCASE("bad header refused") {
        testutil::write_file(path, "user,restaurant\nx,y\n");
        CHECK_THROWS_AS(load_orders(path), DataError);
    }

    SUBCASE("out-of-range coordinates rejected") {
        testutil::write_file(path,
                             "user_id,restaurant_id,lat,lon,arrive_time,cost_time_min\n"
                             "u1,r1,95.0,116.4,2015-03-01 12:05,30\n");
        LoadReport report;
        load_orders(path, &report);
        CHECK(report.rows_rejected == 1);
    }
}

TEST_CASE("load -> save -> load is a fixed point") {
    testutil::TempDir dir;
    const auto path = dir.file("orders.csv");
    testutil::write_file(path, kSmallCsv);
    const auto log = load_orders(path);
    const auto again_path = dir.file("again.csv");
    save_orders(log, again_path);
    const auto again = load_orders(again_path);
    REQUIRE(again.size() == log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(again.orders[i].user_id == log.orders[i].user_id);
        CHECK(again.orders[i].restaurant_id == log.orders[i].restaurant_id);
        CHECK(again.orders[i].location == log.orders[i].location);
        CHECK(again.orders[i].delivered_at == log.orders[i].delivered_at);
        CHECK(again.orders[i].delivery_minutes == log.orders[i].delivery_minutes);
    }
    const auto third_path = dir.file("third.csv");
    save_orders(again, third_path);
    CHECK(testutil::read_file(again_path) == testutil::read_file(third_path));
}

TEST_CASE("filter_adhoc_users keeps users at the threshold") {
    OrderLog log;
    for (int i = 0; i < 9; ++i)
        log.orders.push_back(testutil::make_order("gone", "r1", 39.9, 116.4,
                                                  "2015-03-0" + std::to_string(i % 9 + 1) +
                                                      " 12:00",
                                                  30));
    for (int i = 0; i < 10; ++i)
        log.orders.push_back(testutil::make_order(
            "kept", "r1", 39.9, 116.4,
            "2015-04-" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1) + " 12:00", 30));
    log.sort_and_update_span();

    const auto filtered = filter_adhoc_users(log, 10);
    const auto spans = user_spans(filtered);
    REQUIRE(spans.size() == 1);
    CHECK(spans[0].user_id == "kept");
    CHECK(spans[0].end - spans[0].begin == 10);

    SUBCASE("empty log stays empty") {
        CHECK(filter_adhoc_users(OrderLog{}, 10).empty());
    }
    SUBCASE("idempotent") {
        const auto twice = filter_adhoc_users(filtered, 10);
        CHECK(twice.size() == filtered.size());
    }
    SUBCASE("monotone in the threshold") {
        for (std::size_t t = 1; t < 14; ++t) {
            const auto a = filter_adhoc_users(log, t);
            const auto b = filter_adhoc_users(log, t + 1);
            CHECK(b.size() <= a.size());
            // users of b are a subset of users of a
            for (const auto& span : user_spans(b)) {
                bool found = false;
                for (const auto& other : user_spans(a)) found |= other.user_id == span.user_id;
                CHECK(found);
            }
        }
    }
}
