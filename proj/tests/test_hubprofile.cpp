#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "hubshift/errors.hpp"
#include "hubshift/hubprofile.hpp"
#include "test_util.hpp"

using namespace hubshift;
using namespace hubshift::hubprofile;

namespace {

wkms::DiningHub hub_with_orders(const std::vector<std::string>& stamps) {
    wkms::DiningHub hub;
    hub.user_id = "u";
    hub.center = {39.9, 116.4};
    hub.members = {"r1"};
    for (const auto& s : stamps)
        hub.orders.push_back(testutil::make_order("u", "r1", 39.9, 116.4, s, 25));
    std::sort(hub.orders.begin(), hub.orders.end(),
              [](const Order& a, const Order& b) { return a.delivered_at < b.delivered_at; });
    hub.first_order = hub.orders.front().delivered_at;
    hub.last_order = hub.orders.back().delivered_at;
    return hub;
}

FeatureVec vec_at(std::initializer_list<std::pair<int, double>> entries) {
    FeatureVec v{};
    for (const auto& [idx, value] : entries) v[idx] = value;
    return v;
}

constexpr int kWeekdayMorning = 0;
constexpr int kWeekdayNoon = 1;
constexpr int kWeekdayAfternoon = 2;
constexpr int kWeekdayEvening = 3;
constexpr int kWeekendMorning = 5;
constexpr int kWeekendNoon = 6;
constexpr int kWeekendEvening = 8;
constexpr int kHolidayNoon = 11;

}  // namespace

TEST_CASE("filter_temporary_hubs applies frequency and duration constraints") {
    ClassifierConfig cfg;
    wkms::ClusterOutcome outcome;
    outcome.user_id = "u";
    outcome.total_orders = 100;
    outcome.clusterable = true;

    SUBCASE("hub below the order share is dropped") {
        std::vector<std::string> stamps;
        for (int i = 0; i < 5; ++i)
            stamps.push_back("2015-03-" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1) +
                             " 12:00");
        stamps.push_back("2015-05-01 12:00");  // long enough duration
        outcome.hubs.push_back(hub_with_orders(stamps));
        outcome.hubs[0].orders.resize(5);  // 5 of 100 orders
        outcome.hubs[0].last_order = outcome.hubs[0].orders.back().delivered_at;
        const auto filtered = filter_temporary_hubs(std::move(outcome), cfg);
        CHECK(filtered.hubs.empty());
        CHECK(filtered.temporary.size() == 1);
        CHECK(!filtered.clusterable);
    }

    SUBCASE("29 days dropped, 30 days kept") {
        outcome.total_orders = 20;
        // 20 orders so the 10% share holds either way
        std::vector<std::string> short_stamps, long_stamps;
        for (int i = 0; i < 19; ++i) short_stamps.push_back("2015-03-02 12:00");
        short_stamps.push_back("2015-03-31 12:00");  // 29 days
        for (int i = 0; i < 19; ++i) long_stamps.push_back("2015-03-02 12:00");
        long_stamps.push_back("2015-04-01 12:00");  // 30 days
        auto dropped = outcome;
        dropped.hubs.push_back(hub_with_orders(short_stamps));
        CHECK(filter_temporary_hubs(std::move(dropped), cfg).hubs.empty());

        auto kept = outcome;
        kept.hubs.push_back(hub_with_orders(long_stamps));
        CHECK(filter_temporary_hubs(std::move(kept), cfg).hubs.size() == 1);
    }

    SUBCASE("dominant long-lived hub unchanged") {
        outcome.total_orders = 40;
        std::vector<std::string> stamps;
        for (int i = 0; i < 40; ++i)
            stamps.push_back(i == 0 ? "2015-03-01 12:00"
                                    : i == 39 ? "2015-09-17 12:00" : "2015-05-01 12:00");
        outcome.hubs.push_back(hub_with_orders(stamps));
        const auto filtered = filter_temporary_hubs(std::move(outcome), cfg);
        CHECK(filtered.hubs.size() == 1);
        CHECK(filtered.temporary.empty());
        CHECK(filtered.clusterable);
    }
}

TEST_CASE("hub_features counts slots") {
    HolidayCalendar cal;

    SUBCASE("all orders in one slot") {
        // 2015-03-04 is a Wednesday
        const auto hub = hub_with_orders({"2015-03-04 12:00", "2015-03-04 12:30"});
        const auto f = hub_features(hub, 0, cal);
        CHECK(f.freq[kWeekdayNoon] == doctest::Approx(1.0));
        double sum = 0.0;
        for (const double v : f.freq) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("two slots split evenly") {
        const auto hub = hub_with_orders({"2015-03-04 12:00", "2015-03-04 13:00",
                                          "2015-03-07 20:00", "2015-03-08 19:30"});
        const auto f = hub_features(hub, 0, cal);
        CHECK(f.freq[kWeekdayNoon] == doctest::Approx(0.5));
        CHECK(f.freq[kWeekendEvening] == doctest::Approx(0.5));
    }

    SUBCASE("ten orders over ten distinct slots") {
        HolidayCalendar hcal;
        hcal.holiday_dates.insert(*parse_date("2015-05-01"));
        const auto hub = hub_with_orders({
            "2015-03-04 08:00",  // weekday morning
            "2015-03-04 12:00",  // weekday noon
            "2015-03-04 16:00",  // weekday afternoon
            "2015-03-04 20:00",  // weekday evening
            "2015-03-04 23:00",  // weekday night
            "2015-03-07 08:00",  // weekend morning
            "2015-03-07 12:00",  // weekend noon
            "2015-03-07 16:00",  // weekend afternoon
            "2015-05-01 12:00",  // holiday noon
            "2015-05-01 20:00",  // holiday evening
        });
        const auto f = hub_features(hub, 0, hcal);
        int nonzero = 0;
        for (const double v : f.freq) {
            if (v > 0.0) {
                CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
                ++nonzero;
            }
        }
        CHECK(nonzero == 10);
    }

    SUBCASE("order permutation does not change features") {
        auto hub = hub_with_orders({"2015-03-04 12:00", "2015-03-07 20:00", "2015-03-04 08:30",
                                    "2015-03-08 13:00"});
        const auto f1 = hub_features(hub, 0, cal);
        std::reverse(hub.orders.begin(), hub.orders.end());
        const auto f2 = hub_features(hub, 0, cal);
        CHECK(f1.freq == f2.freq);
    }
}

TEST_CASE("kmeans separates two tight blobs and picks k=2") {
    ClassifierConfig cfg;
    cfg.fixed_k.reset();
    cfg.k_min = 2;
    cfg.k_max = 4;
    cfg.seed = 11;

    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    std::vector<FeatureVec> features;
    for (int i = 0; i < 40; ++i) {
        // weekday-noon-heavy blob
        auto v = vec_at({{kWeekdayNoon, 0.7}, {kWeekdayMorning, 0.2}, {kWeekdayAfternoon, 0.1}});
        v[kWeekdayNoon] += jitter(eng);
        v[kWeekdayMorning] -= jitter(eng);
        features.push_back(v);
        // weekend-heavy blob
        auto w = vec_at({{kWeekendNoon, 0.5}, {kWeekendEvening, 0.3}, {kWeekendMorning, 0.2}});
        w[kWeekendNoon] += jitter(eng);
        w[kWeekendEvening] -= jitter(eng);
        features.push_back(w);
    }
    const auto result = kmeans_with_silhouette(features, cfg);
    CHECK(result.chosen_k == 2);
    CHECK(result.silhouette > 0.8);

    // the two blobs land in different clusters
    for (std::size_t i = 0; i + 2 < features.size(); i += 2) {
        CHECK(result.assignment[i] == result.assignment[i + 2]);
        CHECK(result.assignment[i] != result.assignment[i + 1]);
    }

    SUBCASE("objective is non-increasing and the assignment is a fixed point") {
        for (std::size_t i = 1; i < result.objective_curve.size(); ++i)
            CHECK(result.objective_curve[i] <= result.objective_curve[i - 1] + 1e-9);
        // recomputing nearest centroids reproduces the assignment
        for (std::size_t i = 0; i < features.size(); ++i) {
            double best = 1e300;
            int best_c = -1;
            for (std::size_t c = 0; c < result.centroids.size(); ++c) {
                double d = 0.0;
                for (int j = 0; j < kSlotLabelCount; ++j) {
                    const double diff = features[i][j] - result.centroids[c][j];
                    d += diff * diff;
                }
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            CHECK(best_c == result.assignment[i]);
        }
    }

    SUBCASE("bitwise reproducible for a fixed seed") {
        const auto again = kmeans_with_silhouette(features, cfg);
        CHECK(again.assignment == result.assignment);
        CHECK(again.centroids == result.centroids);
        CHECK(again.silhouette == result.silhouette);
    }
}

TEST_CASE("kmeans error paths") {
    ClassifierConfig cfg;
    std::vector<FeatureVec> two(2, vec_at({{kWeekdayNoon, 1.0}}));
    SUBCASE("fewer features than k") {
        cfg.fixed_k = 4;
        CHECK_THROWS_AS(kmeans_with_silhouette(two, cfg), DataError);
    }
    SUBCASE("k=1 is rejected, silhouette undefined") {
        cfg.fixed_k = 1;
        CHECK_THROWS_AS(kmeans_with_silhouette(two, cfg), ConfigError);
    }
    SUBCASE("fixed_k=4 yields 4 centroids") {
        cfg.fixed_k = 4;
        std::mt19937_64 eng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<FeatureVec> features;
        for (int i = 0; i < 50; ++i) {
            FeatureVec v{};
            double sum = 0.0;
            for (auto& x : v) {
                x = u(eng);
                sum += x;
            }
            for (auto& x : v) x /= sum;
            features.push_back(v);
        }
        const auto result = kmeans_with_silhouette(features, cfg);
        CHECK(result.centroids.size() == 4);
        CHECK(result.chosen_k == 4);
    }
}

TEST_CASE("label_clusters applies the dominance rule") {
    const double margin = 0.1;

    SUBCASE("weekday-noon-heavy centroid is Work") {
        const auto c = vec_at({{kWeekdayNoon, 0.7},
                               {kWeekdayMorning, 0.1},
                               {kWeekdayAfternoon, 0.1},
                               {kWeekendNoon, 0.1}});
        CHECK(label_clusters({c}, margin)[0] == HubLabel::Work);
    }

    SUBCASE("weekend/holiday-heavy centroid is Home") {
        // 0.8 mass on weekend+holiday, the rest spread over weekday slots
        FeatureVec c{};
        for (int s = 5; s < 15; ++s) c[s] = 0.08;
        for (int s = 0; s < 5; ++s) c[s] = 0.04;
        CHECK(label_clusters({c}, margin)[0] == HubLabel::Home);
    }

    SUBCASE("uniform centroid is Other") {
        FeatureVec c{};
        c.fill(1.0 / kSlotLabelCount);
        CHECK(work_home_dominance(c) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(label_clusters({c}, margin)[0] == HubLabel::Other);
    }

    SUBCASE("labels depend only on centroid contents") {
        const auto work = vec_at({{kWeekdayNoon, 0.8}, {kWeekdayMorning, 0.2}});
        FeatureVec home{};
        for (int s = 5; s < 15; ++s) home[s] = 0.1;
        FeatureVec other{};
        other.fill(1.0 / kSlotLabelCount);
        const auto l1 = label_clusters({work, home, other}, margin);
        const auto l2 = label_clusters({other, work, home}, margin);
        CHECK(l1[0] == l2[1]);
        CHECK(l1[1] == l2[2]);
        CHECK(l1[2] == l2[0]);
        CHECK(l1[0] == HubLabel::Work);
        CHECK(l1[1] == HubLabel::Home);
        CHECK(l1[2] == HubLabel::Other);
    }

    SUBCASE("balanced per-slot rates stay Other") {
        // work and home groups at the same mean per-slot rate of 0.05
        FeatureVec c{};
        c[kWeekdayMorning] = 0.05;
        c[kWeekdayNoon] = 0.05;
        c[kWeekdayEvening] = 0.05;
        c[4] = 0.05;  // weekday night
        for (int s = 5; s < 15; ++s) c[s] = 0.05;
        c[kWeekdayAfternoon] = 0.3;
        CHECK(std::fabs(work_home_dominance(c)) <= margin);
        CHECK(label_clusters({c}, margin)[0] == HubLabel::Other);
    }
}
