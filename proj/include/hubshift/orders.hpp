#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hubshift/geo.hpp"
#include "hubshift/timeutil.hpp"

namespace hubshift {

struct Order {
    std::string user_id;
    std::string restaurant_id;
    GeoPoint location;          // restaurant geolocation
    CivilMinute delivered_at = 0;
    double delivery_minutes = 0.0;
};

// Orders kept sorted by (user_id, delivered_at, restaurant_id) so that every
// downstream stage sees a stable iteration order.
struct OrderLog {
    std::vector<Order> orders;
    CivilMinute span_min = 0;
    CivilMinute span_max = 0;

    bool empty() const { return orders.empty(); }
    std::size_t size() const { return orders.size(); }
    void sort_and_update_span();
};

struct LoadReport {
    std::size_t rows_total = 0;
    std::size_t rows_loaded = 0;
    std::size_t rows_rejected = 0;
    std::size_t duplicates_removed = 0;
    std::vector<std::string> diagnostics;  // "line N: reason"
};

inline constexpr const char* kOrderCsvHeader =
    "user_id,restaurant_id,lat,lon,arrive_time,cost_time_min";

// Strict CSV loader for the order schema above; arrive_time is
// "YYYY-MM-DD HH:MM". Malformed rows are rejected with line-numbered
// diagnostics, exact duplicate rows are dropped and counted. Throws DataError
// when the file is missing or the header does not match.
OrderLog load_orders(const std::string& path, LoadReport* report = nullptr);

void save_orders(const OrderLog& log, const std::string& path);

// Keeps exactly the users with at least min_orders orders.
OrderLog filter_adhoc_users(const OrderLog& log, std::size_t min_orders = 10);

// Half-open ranges [begin, end) of equal user_id runs in a sorted log.
struct UserSpan {
    std::string user_id;
    std::size_t begin = 0;
    std::size_t end = 0;
};
std::vector<UserSpan> user_spans(const OrderLog& log);

}  // namespace hubshift
