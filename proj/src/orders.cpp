#include "hubshift/orders.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "hubshift/csvio.hpp"
#include "hubshift/errors.hpp"

namespace hubshift {

namespace {

bool order_less(const Order& a, const Order& b) {
    return std::tie(a.user_id, a.delivered_at, a.restaurant_id) <
           std::tie(b.user_id, b.delivered_at, b.restaurant_id);
}

bool order_eq(const Order& a, const Order& b) {
    return a.user_id == b.user_id && a.restaurant_id == b.restaurant_id &&
           a.location == b.location && a.delivered_at == b.delivered_at &&
           a.delivery_minutes == b.delivery_minutes;
}

}  // namespace

void OrderLog::sort_and_update_span() {
    std::stable_sort(orders.begin(), orders.end(), order_less);
    if (orders.empty()) {
        span_min = span_max = 0;
        return;
    }
    span_min = orders.front().delivered_at;
    span_max = span_min;
    for (const auto& o : orders) {
        span_min = std::min(span_min, o.delivered_at);
        span_max = std::max(span_max, o.delivered_at);
    }
}

OrderLog load_orders(const std::string& path, LoadReport* report) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file, expected header");
    if (lines[0] != kOrderCsvHeader)
        throw DataError(path + ": bad header '" + lines[0] + "', expected '" + kOrderCsvHeader +
                        "'");

    LoadReport local;
    LoadReport& rep = report ? *report : local;

    OrderLog log;
    log.orders.reserve(lines.size() > 0 ? lines.size() - 1 : 0);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.empty()) continue;
        ++rep.rows_total;
        const auto reject = [&](const std::string& why) {
            ++rep.rows_rejected;
            rep.diagnostics.push_back("line " + std::to_string(i + 1) + ": " + why);
        };
        const auto fields = csv::split_fields(line);
        if (fields.size() != 6) {
            reject("expected 6 fields, got " + std::to_string(fields.size()));
            continue;
        }
        Order o;
        o.user_id = std::string(fields[0]);
        o.restaurant_id = std::string(fields[1]);
        if (o.user_id.empty() || o.restaurant_id.empty()) {
            reject("empty user_id or restaurant_id");
            continue;
        }
        const auto lat = csv::parse_double(fields[2]);
        const auto lon = csv::parse_double(fields[3]);
        if (!lat || !lon) {
            reject("unparseable lat/lon");
            continue;
        }
        o.location = GeoPoint{*lat, *lon};
        if (!o.location.valid()) {
            reject("lat/lon out of range");
            continue;
        }
        const auto ts = parse_minute(fields[4]);
        if (!ts) {
            reject("bad arrive_time '" + std::string(fields[4]) + "', expected YYYY-MM-DD HH:MM");
            continue;
        }
        o.delivered_at = *ts;
        const auto cost = csv::parse_double(fields[5]);
        if (!cost || !(*cost >= 0.0) || !std::isfinite(*cost)) {
            reject("cost_time_min must be a non-negative number");
            continue;
        }
        o.delivery_minutes = *cost;
        log.orders.push_back(std::move(o));
        ++rep.rows_loaded;
    }

    log.sort_and_update_span();
    // exact-duplicate rows collapse to one order
    auto last = std::unique(log.orders.begin(), log.orders.end(), order_eq);
    rep.duplicates_removed = static_cast<std::size_t>(log.orders.end() - last);
    rep.rows_loaded -= rep.duplicates_removed;
    log.orders.erase(last, log.orders.end());
    return log;
}

void save_orders(const OrderLog& log, const std::string& path) {
    csv::Writer w(path);
    w.raw_line(kOrderCsvHeader);
    for (const auto& o : log.orders) {
        w.row({o.user_id, o.restaurant_id, csv::fmt_double(o.location.lat),
               csv::fmt_double(o.location.lon), format_minute(o.delivered_at),
               csv::fmt_double(o.delivery_minutes)});
    }
    w.close();
}

OrderLog filter_adhoc_users(const OrderLog& log, std::size_t min_orders) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& o : log.orders) ++counts[o.user_id];
    OrderLog out;
    out.orders.reserve(log.orders.size());
    for (const auto& o : log.orders)
        if (counts[o.user_id] >= min_orders) out.orders.push_back(o);
    out.sort_and_update_span();
    return out;
}

std::vector<UserSpan> user_spans(const OrderLog& log) {
    std::vector<UserSpan> spans;
    std::size_t i = 0;
    while (i < log.orders.size()) {
        std::size_t j = i + 1;
        while (j < log.orders.size() && log.orders[j].user_id == log.orders[i].user_id) ++j;
        spans.push_back({log.orders[i].user_id, i, j});
        i = j;
    }
    return spans;
}

}  // namespace hubshift
