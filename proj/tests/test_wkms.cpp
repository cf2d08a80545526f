#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <set>

#include "doctest.h"
#include "hubshift/errors.hpp"
#include "hubshift/hubprofile.hpp"
#include "hubshift/wkms.hpp"
#include "test_util.hpp"

using namespace hubshift;
using namespace hubshift::wkms;

namespace {

WeightedSite site(double lat, double lon, double weight, const std::string& id) {
    return WeightedSite{GeoPoint{lat, lon}, weight, id, 1};
}

// sites scattered around a base point, offsets in km
GeoPoint km_offset(const GeoPoint& base, double north_km, double east_km) {
    const double dlat = north_km / kKmPerDegree;
    const double dlon = east_km / (kKmPerDegree * std::cos(base.lat * kPi / 180.0));
    return GeoPoint{base.lat + dlat, base.lon + dlon};
}

}  // namespace

TEST_CASE("restaurant_weights inverts the mean delivery time") {
    std::vector<Order> orders;
    orders.push_back(testutil::make_order("u1", "r1", 39.9, 116.4, "2015-03-01 12:00", 30));
    auto sites = restaurant_weights(orders);
    REQUIRE(sites.size() == 1);
    CHECK(sites[0].weight == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
    CHECK(sites[0].order_count == 1);

    SUBCASE("arithmetic mean over the user's orders at the restaurant") {
        orders.push_back(testutil::make_order("u1", "r1", 39.9, 116.4, "2015-03-02 12:00", 20));
        orders.push_back(testutil::make_order("u1", "r1", 39.9, 116.4, "2015-03-03 12:00", 40));
        orders[0].delivery_minutes = 30;
        sites = restaurant_weights(orders);
        REQUIRE(sites.size() == 1);
        CHECK(sites[0].weight == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
        CHECK(sites[0].order_count == 3);
    }

    SUBCASE("zero minutes floored before inversion") {
        orders[0].delivery_minutes = 0.0;
        sites = restaurant_weights(orders);
        CHECK(sites[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("one site per distinct restaurant, sorted by id") {
        orders.push_back(testutil::make_order("u1", "r0", 39.91, 116.41, "2015-03-04 12:00", 20));
        sites = restaurant_weights(orders);
        REQUIRE(sites.size() == 2);
        CHECK(sites[0].restaurant_id == "r0");
        CHECK(sites[1].restaurant_id == "r1");
    }
}

TEST_CASE("mean_shift_modes fixed points") {
    KernelConfig cfg;

    SUBCASE("one site is its own mode") {
        const auto result = mean_shift_modes({site(39.9, 116.4, 0.05, "r1")}, cfg);
        REQUIRE(result.modes.size() == 1);
        CHECK(haversine_km(result.modes[0], {39.9, 116.4}) < 1e-9);
        CHECK(result.non_converged.empty());
    }

    SUBCASE("two equal sites 1 km apart merge at the midpoint") {
        const GeoPoint a{39.9, 116.4};
        const GeoPoint b = km_offset(a, 1.0, 0.0);
        const auto result = mean_shift_modes({site(a.lat, a.lon, 0.05, "r1"),
                                              site(b.lat, b.lon, 0.05, "r2")}, cfg);
        REQUIRE(result.modes.size() == 1);
        const GeoPoint midpoint{0.5 * (a.lat + b.lat), 0.5 * (a.lon + b.lon)};
        CHECK(haversine_km(result.modes[0], midpoint) <= cfg.mode_merge_km);
    }

    SUBCASE("two groups 20 km apart give exactly two modes") {
        const GeoPoint base{39.9, 116.4};
        const GeoPoint far = km_offset(base, 20.0, 0.0);
        std::vector<WeightedSite> sites;
        for (int i = 0; i < 5; ++i) {
            sites.push_back(site(km_offset(base, 0.1 * i, 0.15 * i).lat,
                                 km_offset(base, 0.1 * i, 0.15 * i).lon, 0.04, "a" +
                                     std::to_string(i)));
            sites.push_back(site(km_offset(far, 0.12 * i, -0.1 * i).lat,
                                 km_offset(far, 0.12 * i, -0.1 * i).lon, 0.04,
                                 "b" + std::to_string(i)));
        }
        const auto result = mean_shift_modes(sites, cfg);
        CHECK(result.modes.size() == 2);
    }
}

TEST_CASE("the heavier site pulls the mode") {
    KernelConfig cfg;
    const GeoPoint a{39.9, 116.4};
    const GeoPoint b = km_offset(a, 2.0, 0.0);
    const auto result = mean_shift_modes({site(a.lat, a.lon, 1.0 / 12.0, "heavy"),
                                          site(b.lat, b.lon, 1.0 / 40.0, "light")}, cfg);
    REQUIRE(result.modes.size() == 1);
    CHECK(haversine_km(result.modes[0], a) < haversine_km(result.modes[0], b));
}

TEST_CASE("mode count is non-increasing in sigma") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> spread(-6.0, 6.0), minutes(8.0, 50.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<WeightedSite> sites;
        const int n = 3 + static_cast<int>(eng() % 9);
        for (int i = 0; i < n; ++i) {
            const auto p = km_offset({39.9, 116.4}, spread(eng), spread(eng));
            sites.push_back(site(p.lat, p.lon, 1.0 / minutes(eng), "r" + std::to_string(i)));
        }
        std::size_t prev = sites.size() + 1;
        for (const double sigma : {1.0, 2.0, 4.4, 8.0}) {
            KernelConfig cfg;
            cfg.sigma_km = sigma;
            const auto result = mean_shift_modes(sites, cfg);
            CHECK(result.modes.size() <= prev);
            prev = result.modes.size();
        }
    }
}

TEST_CASE("assign_hubs enforces the sigma constraint") {
    KernelConfig cfg;
    std::vector<Order> orders;
    orders.push_back(testutil::make_order("u1", "r1", 39.90, 116.40, "2015-03-01 12:00", 20));
    orders.push_back(testutil::make_order("u1", "r2", 39.91, 116.41, "2015-03-02 12:00", 25));
    orders.push_back(testutil::make_order("u1", "r3", 39.92, 116.40, "2015-03-03 12:00", 30));

    SUBCASE("all restaurants within sigma of one mode") {
        const auto outcome = cluster_user(orders, cfg);
        CHECK(outcome.clusterable);
        REQUIRE(outcome.hubs.size() == 1);
        CHECK(outcome.outliers.empty());
        CHECK(outcome.hubs[0].members.size() == 3);
        CHECK(outcome.hubs[0].orders.size() == 3);
        CHECK(outcome.total_orders == 3);
    }

    SUBCASE("a distant restaurant becomes an outlier") {
        // ~10 km north of the cluster, single low-weight order so the merged
        // mode stays near the main group
        const auto far = km_offset({39.90, 116.40}, 10.0, 0.0);
        orders.push_back(
            testutil::make_order("u1", "rfar", far.lat, far.lon, "2015-03-04 12:00", 45));
        const auto sites = restaurant_weights(orders);
        ModeSearchResult modes;
        modes.modes = {GeoPoint{39.91, 116.403}};  // only the main mode survives merging
        const auto outcome = assign_hubs(orders, modes, cfg);
        REQUIRE(outcome.hubs.size() == 1);
        REQUIRE(outcome.outliers.size() == 1);
        CHECK(outcome.outliers[0] == "rfar");
    }
}

TEST_CASE("partition property and sigma invariant on random users") {
    KernelConfig cfg;
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> spread(-9.0, 9.0), minutes(8.0, 50.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n_rest = 2 + static_cast<int>(eng() % 10);
        std::vector<Order> orders;
        for (int r = 0; r < n_rest; ++r) {
            const auto p = km_offset({39.9, 116.4}, spread(eng), spread(eng));
            const int n_orders = 1 + static_cast<int>(eng() % 4);
            for (int k = 0; k < n_orders; ++k) {
                const int day = 1 + static_cast<int>(eng() % 28);
                orders.push_back(testutil::make_order(
                    "u", "r" + std::to_string(r), p.lat, p.lon,
                    "2015-03-" + std::string(day < 10 ? "0" : "") + std::to_string(day) +
                        " 12:00",
                    minutes(eng)));
            }
        }
        std::sort(orders.begin(), orders.end(), [](const Order& a, const Order& b) {
            return std::tie(a.delivered_at, a.restaurant_id) <
                   std::tie(b.delivered_at, b.restaurant_id);
        });
        const auto outcome = cluster_user(orders, cfg);

        // every restaurant lands in exactly one hub or in the outliers
        std::set<std::string> seen;
        std::size_t order_total = 0;
        for (const auto& hub : outcome.hubs) {
            for (const auto& m : hub.members) CHECK(seen.insert(m).second);
            order_total += hub.orders.size();
            for (const auto& o : hub.orders)
                CHECK(haversine_km(o.location, hub.center) <= cfg.sigma_km);
        }
        for (const auto& id : outcome.outliers) CHECK(seen.insert(id).second);
        CHECK(seen.size() == static_cast<std::size_t>(n_rest));

        std::size_t outlier_orders = 0;
        for (const auto& o : orders)
            if (std::find(outcome.outliers.begin(), outcome.outliers.end(), o.restaurant_id) !=
                outcome.outliers.end())
                ++outlier_orders;
        CHECK(order_total + outlier_orders == orders.size());
    }
}

TEST_CASE("clustering is deterministic") {
    KernelConfig cfg;
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> spread(-8.0, 8.0);
    std::vector<Order> orders;
    for (int r = 0; r < 9; ++r) {
        const auto p = km_offset({39.9, 116.4}, spread(eng), spread(eng));
        orders.push_back(testutil::make_order("u", "r" + std::to_string(r), p.lat, p.lon,
                                              "2015-03-10 12:00", 20.0 + r));
    }
    const auto a = cluster_user(orders, cfg);
    const auto b = cluster_user(orders, cfg);
    REQUIRE(a.hubs.size() == b.hubs.size());
    for (std::size_t h = 0; h < a.hubs.size(); ++h) {
        CHECK(a.hubs[h].center == b.hubs[h].center);
        CHECK(a.hubs[h].members == b.hubs[h].members);
    }
}

TEST_CASE("unclusterable when every hub is temporary") {
    // three isolated single-order restaurants: three one-restaurant hubs, all
    // dropped by the duration filter
    KernelConfig cfg;
    std::vector<Order> orders;
    const GeoPoint base{39.9, 116.4};
    orders.push_back(testutil::make_order("u", "a", base.lat, base.lon, "2015-03-01 12:00", 20));
    const auto b = km_offset(base, 15.0, 0.0);
    orders.push_back(testutil::make_order("u", "b", b.lat, b.lon, "2015-03-05 12:00", 20));
    const auto c = km_offset(base, 0.0, 15.0);
    orders.push_back(testutil::make_order("u", "c", c.lat, c.lon, "2015-03-09 12:00", 20));

    auto outcome = cluster_user(orders, cfg);
    CHECK(outcome.clusterable);
    CHECK(outcome.hubs.size() == 3);

    hubprofile::ClassifierConfig ccfg;
    const auto filtered = hubprofile::filter_temporary_hubs(std::move(outcome), ccfg);
    CHECK(!filtered.clusterable);
    CHECK(filtered.hubs.empty());
    CHECK(filtered.temporary.size() == 3);
}

TEST_CASE("estimate_bandwidth nearest-rank percentile") {
    SUBCASE("all distances equal") {
        std::vector<DeliveryDistance> pool(10, DeliveryDistance{"m", 3.3});
        CHECK(estimate_bandwidth(pool, 95.0) == 3.3);
    }
    SUBCASE("1..100 km") {
        std::vector<DeliveryDistance> pool;
        for (int i = 100; i >= 1; --i) pool.push_back({"m", static_cast<double>(i)});
        CHECK(estimate_bandwidth(pool, 95.0) == 95.0);
        CHECK(estimate_bandwidth(pool, 99.0) == 99.0);
        CHECK(estimate_bandwidth(pool, 50.0) == 50.0);
    }
    SUBCASE("empty pool is an error") {
        CHECK_THROWS_AS(estimate_bandwidth({}, 95.0), DataError);
    }
    SUBCASE("percentile range validated") {
        std::vector<DeliveryDistance> pool(3, DeliveryDistance{"m", 1.0});
        CHECK_THROWS_AS(estimate_bandwidth(pool, 0.0), ConfigError);
        CHECK_THROWS_AS(estimate_bandwidth(pool, 100.0), ConfigError);
    }
}
