#include "hubshift/synthcity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hubshift/errors.hpp"
#include "hubshift/parallel.hpp"
#include "hubshift/rng.hpp"
#include "json.hpp"

namespace hubshift::synthcity {

using nlohmann::json;

namespace {

// rng stream ids
constexpr std::uint64_t kStreamRestaurants = 0x52455354ULL;
constexpr std::uint64_t kStreamTransactions = 0x5458ULL;
constexpr std::uint64_t kStreamUserBase = 1ULL << 32;

// Radius shape families, scaled so the distribution's 95th percentile sits at
// the configured per-method value. Non-self methods are a plain log-normal;
// the self method mixes a short-range body with a calibrated long-haul
// component so that the default method mix pools to p95 ~ 4.4 km and
// p99 ~ 13.1 km.
constexpr double kZ95 = 1.6448536269514722;
constexpr double kNonSelfSigma = 0.25;
constexpr double kSelfMixShort = 0.806183;      // weight of the short component
constexpr double kSelfShortMedianRel = 0.190407;  // medians relative to p95
constexpr double kSelfShortSigma = 0.5;
constexpr double kSelfLongMedianRel = 0.848855;
constexpr double kSelfLongSigma = 0.25;

double sample_radius(rng::Engine& eng, const std::string& method, double p95) {
    if (method == "self") {
        if (rng::uniform01(eng) < kSelfMixShort)
            return p95 * kSelfShortMedianRel *
                   std::exp(kSelfShortSigma * rng::normal(eng, 0.0, 1.0));
        return p95 * kSelfLongMedianRel * std::exp(kSelfLongSigma * rng::normal(eng, 0.0, 1.0));
    }
    return p95 * std::exp(kNonSelfSigma * (rng::normal(eng, 0.0, 1.0) - kZ95));
}

double nearest_rank(std::vector<double> v, double pct) {
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

}  // namespace

std::array<double, kSlotLabelCount> default_home_slot_profile() {
    // weekday, weekend, holiday x (morning, noon, afternoon, evening, night)
    return {0.01, 0.02, 0.02, 0.16, 0.08,   // weekday: evenings at home
            0.05, 0.14, 0.10, 0.16, 0.06,   // weekend
            0.02, 0.06, 0.04, 0.06, 0.02};  // holiday
}

std::array<double, kSlotLabelCount> default_work_slot_profile() {
    return {0.14, 0.47, 0.20, 0.05, 0.02,   // weekday: lunch at the office
            0.01, 0.04, 0.02, 0.01, 0.01,
            0.00, 0.02, 0.01, 0.00, 0.00};
}

std::array<double, 12> equal_month_weights() {
    std::array<double, 12> w{};
    w.fill(1.0);
    return w;
}

void ScenarioConfig::validate() const {
    const auto near_one = [](double s) { return std::fabs(s - 1.0) <= 1e-9; };
    if (n_users == 0) throw ConfigError("scenario: n_users must be >= 1");
    if (n_restaurants == 0) throw ConfigError("scenario: n_restaurants must be >= 1");
    if (!(extent.lat_min < extent.lat_max) || !(extent.lon_min < extent.lon_max))
        throw ConfigError("scenario: extent must be a non-empty box");
    if (delivery_method_mix.empty()) throw ConfigError("scenario: delivery_method_mix is empty");
    double mix_sum = 0.0;
    for (const auto& [method, share] : delivery_method_mix) {
        if (!(share >= 0.0)) throw ConfigError("scenario: negative share for " + method);
        if (!per_method_radius_p95_km.count(method))
            throw ConfigError("scenario: missing per_method_radius_p95_km for " + method);
        if (!(per_method_radius_p95_km.at(method) > 0.0))
            throw ConfigError("scenario: radius p95 must be > 0 for " + method);
        mix_sum += share;
    }
    // published method percentages are rounded (they sum to 99.99%), so the
    // mix is checked loosely and normalized by the sampler
    if (std::fabs(mix_sum - 1.0) > 1e-3)
        throw ConfigError("scenario: delivery_method_mix must sum to 1");
    const auto& a = archetype_shares;
    for (const double s : {a.stayer, a.job_hopper, a.home_mover, a.both})
        if (!(s >= 0.0)) throw ConfigError("scenario: archetype shares must be >= 0");
    if (!near_one(a.stayer + a.job_hopper + a.home_mover + a.both))
        throw ConfigError("scenario: archetype_shares must sum to 1");
    if (orders_min < 10) throw ConfigError("scenario: orders_min must be >= 10");
    if (orders_max < orders_min) throw ConfigError("scenario: orders_max < orders_min");
    if (span_months < 2) throw ConfigError("scenario: span_months must be >= 2");
    const bool has_mover = a.home_mover > 0.0 || a.job_hopper > 0.0 || a.both > 0.0;
    if (has_mover && span_months < 5)
        throw ConfigError("scenario: span_months must be >= 5 when movers are scripted");
    double wsum = 0.0;
    for (const double w : move_month_weights) {
        if (!(w >= 0.0)) throw ConfigError("scenario: move_month_weights must be >= 0");
        wsum += w;
    }
    if (has_mover && !(wsum > 0.0))
        throw ConfigError("scenario: move_month_weights are all zero");
    for (const auto* prof : {&home_slot_profile, &work_slot_profile}) {
        double psum = 0.0;
        for (const double p : *prof) {
            if (!(p >= 0.0)) throw ConfigError("scenario: slot profiles must be >= 0");
            psum += p;
        }
        if (!near_one(psum)) throw ConfigError("scenario: slot profiles must sum to 1");
    }
    if (!(noise >= 0.0 && noise < 1.0)) throw ConfigError("scenario: noise must be in [0, 1)");
    if (!(work_order_share >= 0.0 && work_order_share <= 1.0))
        throw ConfigError("scenario: work_order_share must be in [0, 1]");
    if (!(restaurant_preference_km > 0.0))
        throw ConfigError("scenario: restaurant_preference_km must be > 0");
    if (!(min_move_displacement_km > 0.0) ||
        !(max_move_displacement_km >= min_move_displacement_km))
        throw ConfigError("scenario: bad move displacement range");
    if (subdistrict_grid_nx < 1 || subdistrict_grid_ny < 1)
        throw ConfigError("scenario: subdistrict grid must be >= 1x1");
    if (!(ring_radii_km[0] > 0.0 && ring_radii_km[0] < ring_radii_km[1] &&
          ring_radii_km[1] < ring_radii_km[2]))
        throw ConfigError("scenario: ring_radii_km must be increasing");
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
    }
    ScenarioConfig cfg;
    read_field(j, "seed", cfg.seed);
    if (j.contains("extent")) {
        const auto& e = j.at("extent");
        cfg.extent = {e.at("lat_min").get<double>(), e.at("lat_max").get<double>(),
                      e.at("lon_min").get<double>(), e.at("lon_max").get<double>()};
    }
    read_field(j, "n_users", cfg.n_users);
    read_field(j, "n_restaurants", cfg.n_restaurants);
    if (j.contains("delivery_method_mix"))
        cfg.delivery_method_mix =
            j.at("delivery_method_mix").get<std::map<std::string, double>>();
    if (j.contains("per_method_radius_p95_km"))
        cfg.per_method_radius_p95_km =
            j.at("per_method_radius_p95_km").get<std::map<std::string, double>>();
    if (j.contains("archetype_shares")) {
        const auto& s = j.at("archetype_shares");
        cfg.archetype_shares = {s.at("stayer").get<double>(), s.at("job_hopper").get<double>(),
                                s.at("home_mover").get<double>(), s.at("both").get<double>()};
    }
    read_field(j, "orders_min", cfg.orders_min);
    read_field(j, "orders_max", cfg.orders_max);
    read_field(j, "span_months", cfg.span_months);
    if (j.contains("span_start")) {
        const auto d = parse_date(j.at("span_start").get<std::string>());
        if (!d) throw ConfigError("scenario: span_start must be YYYY-MM-DD");
        cfg.span_start = *d;
    }
    read_field(j, "move_month_weights", cfg.move_month_weights);
    read_field(j, "home_slot_profile", cfg.home_slot_profile);
    read_field(j, "work_slot_profile", cfg.work_slot_profile);
    read_field(j, "noise", cfg.noise);
    read_field(j, "work_order_share", cfg.work_order_share);
    read_field(j, "restaurant_preference_km", cfg.restaurant_preference_km);
    read_field(j, "min_move_displacement_km", cfg.min_move_displacement_km);
    read_field(j, "max_move_displacement_km", cfg.max_move_displacement_km);
    read_field(j, "home_work_min_km", cfg.home_work_min_km);
    read_field(j, "home_work_max_km", cfg.home_work_max_km);
    read_field(j, "outward_moves", cfg.outward_moves);
    read_field(j, "subdistrict_grid_nx", cfg.subdistrict_grid_nx);
    read_field(j, "subdistrict_grid_ny", cfg.subdistrict_grid_ny);
    read_field(j, "transactions_per_month", cfg.transactions_per_month);
    read_field(j, "price_center_per_m2", cfg.price_center_per_m2);
    read_field(j, "price_slope_per_km", cfg.price_slope_per_km);
    read_field(j, "price_floor_per_m2", cfg.price_floor_per_m2);
    read_field(j, "ring_radii_km", cfg.ring_radii_km);
    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ScenarioConfig::to_json_text() const {
    json j;
    j["seed"] = seed;
    j["extent"] = {{"lat_min", extent.lat_min},
                   {"lat_max", extent.lat_max},
                   {"lon_min", extent.lon_min},
                   {"lon_max", extent.lon_max}};
    j["n_users"] = n_users;
    j["n_restaurants"] = n_restaurants;
    j["delivery_method_mix"] = delivery_method_mix;
    j["per_method_radius_p95_km"] = per_method_radius_p95_km;
    j["archetype_shares"] = {{"stayer", archetype_shares.stayer},
                             {"job_hopper", archetype_shares.job_hopper},
                             {"home_mover", archetype_shares.home_mover},
                             {"both", archetype_shares.both}};
    j["orders_min"] = orders_min;
    j["orders_max"] = orders_max;
    j["span_months"] = span_months;
    j["span_start"] = format_date(span_start);
    j["move_month_weights"] = move_month_weights;
    j["home_slot_profile"] = home_slot_profile;
    j["work_slot_profile"] = work_slot_profile;
    j["noise"] = noise;
    j["work_order_share"] = work_order_share;
    j["restaurant_preference_km"] = restaurant_preference_km;
    j["min_move_displacement_km"] = min_move_displacement_km;
    j["max_move_displacement_km"] = max_move_displacement_km;
    j["home_work_min_km"] = home_work_min_km;
    j["home_work_max_km"] = home_work_max_km;
    j["outward_moves"] = outward_moves;
    j["subdistrict_grid_nx"] = subdistrict_grid_nx;
    j["subdistrict_grid_ny"] = subdistrict_grid_ny;
    j["transactions_per_month"] = transactions_per_month;
    j["price_center_per_m2"] = price_center_per_m2;
    j["price_slope_per_km"] = price_slope_per_km;
    j["price_floor_per_m2"] = price_floor_per_m2;
    j["ring_radii_km"] = ring_radii_km;
    return j.dump(2);
}

// ---- calendars ----------------------------------------------------------------

HolidayCalendar make_holiday_calendar(CivilDate span_start, int span_months) {
    HolidayCalendar cal;
    int y0;
    unsigned m0, d0;
    civil_from_days(span_start, y0, m0, d0);
    const int y1_months = y0 * 12 + static_cast<int>(m0) - 1 + span_months;
    const int y1 = (y1_months - 1) / 12;
    for (int y = y0; y <= y1; ++y) {
        for (unsigned d = 1; d <= 3; ++d) cal.holiday_dates.insert(days_from_civil(y, 1, d));
        for (unsigned d = 1; d <= 3; ++d) cal.holiday_dates.insert(days_from_civil(y, 5, d));
        for (unsigned d = 1; d <= 7; ++d) cal.holiday_dates.insert(days_from_civil(y, 10, d));
    }
    return cal;
}

// ---- radii ----------------------------------------------------------------------

std::vector<wkms::DeliveryDistance> sample_delivery_radii(
    const std::map<std::string, double>& method_mix,
    const std::map<std::string, double>& p95_km, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample_delivery_radii: n must be >= 1");
    std::vector<std::pair<std::string, double>> cumulative;
    double acc = 0.0;
    for (const auto& [method, share] : method_mix) {
        acc += share;
        cumulative.emplace_back(method, acc);
    }
    rng::Engine eng(rng::substream(seed, kStreamRestaurants));
    std::vector<wkms::DeliveryDistance> out(n);
    for (auto& dd : out) {
        const double u = rng::uniform01(eng) * acc;
        dd.method = cumulative.back().first;
        for (const auto& [method, edge] : cumulative) {
            if (u <= edge) {
                dd.method = method;
                break;
            }
        }
        dd.km = sample_radius(eng, dd.method, p95_km.at(dd.method));
    }
    // pin each method's empirical nearest-rank p95 onto its configured value
    std::map<std::string, std::vector<double>> per_method;
    for (const auto& dd : out) per_method[dd.method].push_back(dd.km);
    std::map<std::string, double> scale;
    for (const auto& [method, v] : per_method)
        scale[method] = p95_km.at(method) / nearest_rank(v, 95.0);
    for (auto& dd : out) dd.km *= scale[dd.method];
    return out;
}

// ---- generation -------------------------------------------------------------------

namespace {

struct Restaurant {
    GeoPoint location;
    double radius_km = 0.0;
    std::string id;
    std::string method;
};

GeoPoint uniform_point(rng::Engine& eng, const BoundingBox& box) {
    return GeoPoint{rng::uniform(eng, box.lat_min, box.lat_max),
                    rng::uniform(eng, box.lon_min, box.lon_max)};
}

bool in_box(const GeoPoint& p, const BoundingBox& box) {
    return p.lat >= box.lat_min && p.lat <= box.lat_max && p.lon >= box.lon_min &&
           p.lon <= box.lon_max;
}

// destination at distance_km towards bearing (radians) on the local tangent plane
GeoPoint offset_km(const GeoPoint& from, double distance_km, double bearing) {
    const double dlat = distance_km * std::cos(bearing) / kKmPerDegree;
    const double km_per_deg_lon = kKmPerDegree * std::cos(from.lat * kPi / 180.0);
    const double dlon = distance_km * std::sin(bearing) / km_per_deg_lon;
    return GeoPoint{from.lat + dlat, from.lon + dlon};
}

struct Candidates {
    std::vector<std::size_t> index;   // restaurants serving this anchor
    std::vector<double> cum_weight;   // cumulative preference weights
};

Candidates reachable_from(const GeoPoint& anchor, const std::vector<Restaurant>& restaurants,
                          double preference_km) {
    // preference for nearby restaurants decays fast; beyond 5 preference radii
    // the weight is ~1e-5 of the peak, so such candidates are dropped unless
    // nothing closer serves the anchor
    Candidates c;
    const double inv_two_pref2 = 1.0 / (2.0 * preference_km * preference_km);
    for (int pass = 0; pass < 2 && c.index.empty(); ++pass) {
        const double cut = pass == 0 ? 5.0 * preference_km : 1e18;
        c.index.clear();
        c.cum_weight.clear();
        double acc = 0.0;
        for (std::size_t i = 0; i < restaurants.size(); ++i) {
            const auto& r = restaurants[i];
            const double box = std::max(r.radius_km, cut) / kKmPerDegree + 1e-6;
            if (std::fabs(r.location.lat - anchor.lat) > box) continue;
            const double d = haversine_km(anchor, r.location);
            if (d > r.radius_km || d > cut) continue;
            acc += std::exp(-d * d * inv_two_pref2) + 1e-12;
            c.index.push_back(i);
            c.cum_weight.push_back(acc);
        }
    }
    return c;
}

std::size_t pick_candidate(rng::Engine& eng, const Candidates& c) {
    const double u = rng::uniform01(eng) * c.cum_weight.back();
    const auto it = std::lower_bound(c.cum_weight.begin(), c.cum_weight.end(), u);
    const auto k = static_cast<std::size_t>(it - c.cum_weight.begin());
    return c.index[std::min(k, c.index.size() - 1)];
}

int draw_slot(rng::Engine& eng, std::span<const double> weights) {
    double total = 0.0;
    for (const double w : weights) total += w;
    if (total <= 0.0) return static_cast<int>(rng::uniform_index(eng, weights.size()));
    double u = rng::uniform01(eng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size() - 1);
}

CivilMinute minute_in_slot(rng::Engine& eng, CivilDate date, Slot slot) {
    int lo = 0, span = 0;
    switch (slot) {
        case Slot::Morning: lo = 6 * 60; span = 5 * 60; break;
        case Slot::Afternoon: lo = 15 * 60; span = 4 * 60; break;
        case Slot::Noon: lo = 11 * 60; span = 4 * 60; break;
        case Slot::Evening: lo = 19 * 60; span = 3 * 60; break;
        case Slot::Night: lo = 22 * 60; span = 8 * 60; break;  // wraps past midnight
    }
    int offset = static_cast<int>(rng::uniform_index(eng, static_cast<std::size_t>(span)));
    int mod = lo + offset;
    if (mod >= kMinutesPerDay) mod -= kMinutesPerDay;  // early-morning night minutes
    return static_cast<CivilMinute>(date) * kMinutesPerDay + mod;
}

struct DayIndex {
    std::vector<CivilDate> by_type[kDayTypeCount];
};

DayIndex index_days(CivilDate lo, CivilDate hi, const HolidayCalendar& cal) {
    DayIndex idx;
    for (CivilDate d = lo; d <= hi; ++d) {
        DayType t = DayType::Weekday;
        if (cal.is_holiday(d))
            t = DayType::Holiday;
        else if (cal.is_weekend(d))
            t = DayType::Weekend;
        idx.by_type[static_cast<int>(t)].push_back(d);
    }
    return idx;
}

struct PendingOrder {
    Order order;
    GeoPoint anchor;
};

bool order_key_less(const PendingOrder& a, const PendingOrder& b) {
    return std::tie(a.order.user_id, a.order.delivered_at, a.order.restaurant_id) <
           std::tie(b.order.user_id, b.order.delivered_at, b.order.restaurant_id);
}

std::string padded_id(const char* prefix, std::size_t i, std::size_t n) {
    std::size_t width = 1;
    for (std::size_t v = n > 0 ? n - 1 : 0; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(i);
    return std::string(prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

int binomial_halves(rng::Engine& eng, int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += rng::uniform01(eng) < p ? 1 : 0;
    return k;
}

struct UserScript {
    std::string archetype;
    std::vector<AnchorPhase> home_phases;
    std::vector<AnchorPhase> work_phases;
};

}  // namespace

Synthetic generate(const ScenarioConfig& cfg, int workers) {
    cfg.validate();

    const CivilDate span_end_excl = [&] {
        int y;
        unsigned m, d;
        civil_from_days(cfg.span_start, y, m, d);
        const int months = y * 12 + static_cast<int>(m) - 1 + cfg.span_months;
        return days_from_civil(months / 12, static_cast<unsigned>(months % 12) + 1, d);
    }();
    const CivilDate span_last = span_end_excl - 1;
    const auto cal = make_holiday_calendar(cfg.span_start, cfg.span_months);
    const DayIndex whole_span = index_days(cfg.span_start, span_last, cal);

    const GeoPoint center{0.5 * (cfg.extent.lat_min + cfg.extent.lat_max),
                          0.5 * (cfg.extent.lon_min + cfg.extent.lon_max)};

    // restaurants
    std::vector<Restaurant> restaurants(cfg.n_restaurants);
    {
        const auto radii = sample_delivery_radii(cfg.delivery_method_mix,
                                                 cfg.per_method_radius_p95_km,
                                                 cfg.n_restaurants, cfg.seed);
        rng::Engine eng(rng::substream(cfg.seed, kStreamRestaurants + 1));
        for (std::size_t i = 0; i < cfg.n_restaurants; ++i) {
            restaurants[i].id = padded_id("r", i, cfg.n_restaurants);
            restaurants[i].location = uniform_point(eng, cfg.extent);
            restaurants[i].method = radii[i].method;
            restaurants[i].radius_km = radii[i].km;
        }
    }

    // archetype by index range, largest-remainder counts
    const auto& shares = cfg.archetype_shares;
    const std::array<std::pair<const char*, double>, 4> arch_list = {
        std::pair{"stayer", shares.stayer}, std::pair{"job_hopper", shares.job_hopper},
        std::pair{"home_mover", shares.home_mover}, std::pair{"both", shares.both}};
    std::array<std::size_t, 4> arch_counts{};
    {
        std::size_t assigned = 0;
        std::array<double, 4> remainders{};
        for (std::size_t a = 0; a < 4; ++a) {
            const double exact = arch_list[a].second * static_cast<double>(cfg.n_users);
            arch_counts[a] = static_cast<std::size_t>(exact);
            remainders[a] = exact - static_cast<double>(arch_counts[a]);
            assigned += arch_counts[a];
        }
        while (assigned < cfg.n_users) {
            std::size_t best = 0;
            for (std::size_t a = 1; a < 4; ++a)
                if (remainders[a] > remainders[best]) best = a;
            ++arch_counts[best];
            remainders[best] = -1.0;
            ++assigned;
        }
    }
    const auto archetype_of = [&](std::size_t u) -> std::size_t {
        std::size_t edge = 0;
        for (std::size_t a = 0; a < 4; ++a) {
            edge += arch_counts[a];
            if (u < edge) return a;
        }
        return 0;
    };

    // eligible absolute months for moves: two clear months on both sides
    std::vector<int> eligible_months;
    std::vector<double> eligible_weights;
    {
        int y;
        unsigned m, d;
        civil_from_days(cfg.span_start, y, m, d);
        const int base = y * 12 + static_cast<int>(m) - 1;
        for (int rel = 2; rel <= cfg.span_months - 2 && rel < cfg.span_months; ++rel) {
            const int abs_month = base + rel;
            eligible_months.push_back(abs_month);
            eligible_weights.push_back(cfg.move_month_weights[abs_month % 12]);
        }
    }
    const auto draw_move_date = [&](rng::Engine& eng) -> CivilDate {
        const int idx = draw_slot(eng, eligible_weights);
        const int abs_month = eligible_months[static_cast<std::size_t>(idx)];
        return days_from_civil(abs_month / 12, static_cast<unsigned>(abs_month % 12) + 1, 1);
    };

    // per-user generation
    struct UserOut {
        TrueUser user;
        std::vector<TrueMove> moves;
        std::vector<PendingOrder> orders;
    };
    std::vector<UserOut> per_user(cfg.n_users);

    parallel_for(cfg.n_users, workers, [&](std::size_t u) {
        rng::Engine eng(rng::substream(cfg.seed, kStreamUserBase + u));
        UserOut& out = per_user[u];
        out.user.user_id = padded_id("u", u, cfg.n_users);
        const std::size_t arch = archetype_of(u);
        out.user.archetype = arch_list[arch].first;
        const bool moves_home = arch == 2 || arch == 3;
        const bool moves_work = arch == 1 || arch == 3;

        constexpr int kAnchorRetries = 60;
        const auto feasible = [&](const GeoPoint& p) {
            return in_box(p, cfg.extent) &&
                   !reachable_from(p, restaurants, cfg.restaurant_preference_km).index.empty();
        };

        // home anchor
        GeoPoint home;
        {
            int tries = 0;
            do {
                if (cfg.outward_moves) {
                    // start in the middle ring, one commute away from the center
                    const double r = rng::uniform(eng, cfg.home_work_min_km + 0.5,
                                                  cfg.home_work_min_km + 2.5);
                    home = offset_km(center, r, rng::uniform(eng, 0.0, 2.0 * kPi));
                } else {
                    home = uniform_point(eng, cfg.extent);
                }
                if (++tries > kAnchorRetries)
                    throw DataError("generate: no reachable home anchor for " + out.user.user_id);
            } while (!feasible(home));
        }

        // work anchor at commuting distance from home
        GeoPoint work;
        {
            int tries = 0;
            bool ok = false;
            while (!ok && tries <= kAnchorRetries) {
                ++tries;
                if (cfg.outward_moves) {
                    work = offset_km(center, rng::uniform(eng, 0.0, 0.5),
                                     rng::uniform(eng, 0.0, 2.0 * kPi));
                } else {
                    const double d = rng::uniform(eng, cfg.home_work_min_km, cfg.home_work_max_km);
                    work = offset_km(home, d, rng::uniform(eng, 0.0, 2.0 * kPi));
                }
                ok = feasible(work);
            }
            while (!ok) {  // cramped extents: fall back to any reachable point
                work = uniform_point(eng, cfg.extent);
                ok = feasible(work);
                if (!ok && ++tries > 3 * kAnchorRetries)
                    throw DataError("generate: no reachable work anchor for " + out.user.user_id);
            }
        }

        // moving anchors relocate at the start of a drawn month; the new
        // position keeps its distance from the opposite anchor's positions so
        // the stay points stay separable
        const auto split_phases = [&](GeoPoint from, bool outward,
                                      std::vector<AnchorPhase>& phases, moves::MoveKind kind,
                                      const std::vector<GeoPoint>& keep_away) {
            const CivilDate move_date = draw_move_date(eng);
            GeoPoint to;
            int tries = 0;
            bool ok = false;
            do {
                const double disp = rng::uniform(eng, cfg.min_move_displacement_km,
                                                 cfg.max_move_displacement_km);
                double bearing = rng::uniform(eng, 0.0, 2.0 * kPi);
                if (outward) {
                    // radially away from the center, with a little wobble
                    const double north = (from.lat - center.lat) * kKmPerDegree;
                    const double east = (from.lon - center.lon) * kKmPerDegree *
                                        std::cos(from.lat * kPi / 180.0);
                    bearing = std::atan2(east, north) + rng::uniform(eng, -0.15, 0.15);
                }
                to = offset_km(from, disp, bearing);
                if (++tries > 3 * kAnchorRetries)
                    throw DataError("generate: no reachable post-move anchor for " +
                                    out.user.user_id);
                ok = feasible(to);
                // the separation preference is dropped when the extent leaves
                // no room; reachability never is
                if (tries <= kAnchorRetries)
                    for (const auto& p : keep_away)
                        ok = ok && haversine_km(to, p) >= cfg.home_work_min_km;
            } while (!ok);
            phases.clear();
            phases.push_back({from, cfg.span_start, move_date - 1});
            phases.push_back({to, move_date, span_last});
            out.moves.push_back(
                {out.user.user_id, kind, YearMonth::of_date(move_date), from, to});
        };

        out.user.home_phases = {{home, cfg.span_start, span_last}};
        out.user.work_phases = {{work, cfg.span_start, span_last}};
        if (moves_home)
            split_phases(home, cfg.outward_moves, out.user.home_phases, moves::MoveKind::Housing,
                         {work});
        if (moves_work && cfg.work_order_share > 0.0) {
            std::vector<GeoPoint> home_positions;
            for (const auto& phase : out.user.home_phases)
                home_positions.push_back(phase.position);
            split_phases(work, false, out.user.work_phases, moves::MoveKind::Job,
                         home_positions);
        }

        // order budget
        const int n_orders =
            cfg.orders_min +
            static_cast<int>(rng::uniform_index(
                eng, static_cast<std::size_t>(cfg.orders_max - cfg.orders_min + 1)));
        int n_noise = 0;
        for (int i = 0; i < n_orders; ++i) n_noise += rng::uniform01(eng) < cfg.noise ? 1 : 0;
        const int n_regular = n_orders - n_noise;

        int n_work = 0;
        if (cfg.work_order_share > 0.0 && cfg.work_order_share < 1.0) {
            n_work = binomial_halves(eng, n_regular, cfg.work_order_share);
            const int lo = static_cast<int>(std::ceil(0.3 * n_regular));
            const int hi = static_cast<int>(std::floor(0.7 * n_regular));
            n_work = std::clamp(n_work, std::min(lo, hi), std::max(lo, hi));
        } else if (cfg.work_order_share >= 1.0) {
            n_work = n_regular;
        }
        const int n_home = n_regular - n_work;

        const auto emit_anchor_orders = [&](const std::vector<AnchorPhase>& phases, int total,
                                            const std::array<double, kSlotLabelCount>& profile) {
            if (total <= 0) return;
            // split across phases, each side clamped away from the share filter
            std::vector<int> counts(phases.size(), total);
            if (phases.size() == 2) {
                int first = binomial_halves(eng, total, 0.5);
                const int lo = static_cast<int>(std::ceil(0.4 * total));
                const int hi = static_cast<int>(std::floor(0.6 * total));
                first = std::clamp(first, std::min(lo, hi), std::max(lo, hi));
                counts = {first, total - first};
            }
            for (std::size_t p = 0; p < phases.size(); ++p) {
                const auto& phase = phases[p];
                const int n = counts[p];
                if (n <= 0) continue;
                const auto candidates =
                    reachable_from(phase.position, restaurants, cfg.restaurant_preference_km);
                if (candidates.index.empty())
                    throw DataError("generate: anchor lost its restaurants for " +
                                    out.user.user_id);
                const DayIndex days = index_days(phase.start, phase.end, cal);

                for (int i = 0; i < n; ++i) {
                    // first and last order pinned to the phase edges so the
                    // hub's active interval covers the whole phase
                    CivilDate date;
                    if (i == 0) {
                        date = phase.start;
                    } else if (i == 1 && n >= 2) {
                        date = phase.end;
                    } else {
                        int slot_idx = draw_slot(eng, profile);
                        DayType want = static_cast<DayType>(slot_idx / kSlotCount);
                        const auto* pool = &days.by_type[static_cast<int>(want)];
                        for (int attempt = 0; attempt < 20 && pool->empty(); ++attempt) {
                            slot_idx = draw_slot(eng, profile);
                            want = static_cast<DayType>(slot_idx / kSlotCount);
                            pool = &days.by_type[static_cast<int>(want)];
                        }
                        if (pool->empty())
                            pool = !days.by_type[0].empty() ? &days.by_type[0]
                                   : !days.by_type[1].empty() ? &days.by_type[1]
                                                              : &days.by_type[2];
                        date = (*pool)[rng::uniform_index(eng, pool->size())];
                        const Slot slot = static_cast<Slot>(slot_idx % kSlotCount);
                        const auto rest = restaurants[pick_candidate(eng, candidates)];
                        const CivilMinute at = minute_in_slot(eng, date, slot);
                        const double dist = haversine_km(phase.position, rest.location);
                        const double minutes = std::max(
                            5.0, 15.0 + 8.0 * dist + rng::normal(eng, 0.0, 5.0));
                        out.orders.push_back({{out.user.user_id, rest.id, rest.location, at,
                                               std::round(minutes * 10.0) / 10.0},
                                              phase.position});
                        continue;
                    }
                    // pinned dates draw a slot consistent with that date's type
                    const DayType dt = cal.is_holiday(date)   ? DayType::Holiday
                                       : cal.is_weekend(date) ? DayType::Weekend
                                                              : DayType::Weekday;
                    const auto row = std::span<const double>(
                        profile.data() + static_cast<int>(dt) * kSlotCount, kSlotCount);
                    const Slot slot = static_cast<Slot>(draw_slot(eng, row));
                    const auto rest = restaurants[pick_candidate(eng, candidates)];
                    const CivilMinute at = minute_in_slot(eng, date, slot);
                    const double dist = haversine_km(phase.position, rest.location);
                    const double minutes =
                        std::max(5.0, 15.0 + 8.0 * dist + rng::normal(eng, 0.0, 5.0));
                    out.orders.push_back({{out.user.user_id, rest.id, rest.location, at,
                                           std::round(minutes * 10.0) / 10.0},
                                          phase.position});
                }
            }
        };

        emit_anchor_orders(out.user.home_phases, n_home, cfg.home_slot_profile);
        emit_anchor_orders(out.user.work_phases, n_work, cfg.work_slot_profile);

        // temporary locations: uniform date and slot anywhere in the span
        for (int i = 0; i < n_noise; ++i) {
            GeoPoint spot;
            Candidates candidates;
            int tries = 0;
            do {
                spot = uniform_point(eng, cfg.extent);
                candidates = reachable_from(spot, restaurants, cfg.restaurant_preference_km);
                if (++tries > kAnchorRetries)
                    throw DataError("generate: no reachable temporary spot for " +
                                    out.user.user_id);
            } while (candidates.index.empty());
            const CivilDate date =
                cfg.span_start + static_cast<CivilDate>(rng::uniform_index(
                                     eng, static_cast<std::size_t>(span_last - cfg.span_start + 1)));
            const Slot slot = static_cast<Slot>(rng::uniform_index(eng, kSlotCount));
            const auto rest = restaurants[pick_candidate(eng, candidates)];
            const CivilMinute at = minute_in_slot(eng, date, slot);
            const double dist = haversine_km(spot, rest.location);
            const double minutes = std::max(5.0, 15.0 + 8.0 * dist + rng::normal(eng, 0.0, 5.0));
            out.orders.push_back(
                {{out.user.user_id, rest.id, rest.location, at,
                  std::round(minutes * 10.0) / 10.0},
                 spot});
        }
    });

    // assemble deterministically in user order, then sort by the log's key
    Synthetic result;
    std::vector<PendingOrder> pending;
    for (auto& uo : per_user) {
        result.truth.users.push_back(std::move(uo.user));
        for (auto& mv : uo.moves) result.truth.moves.push_back(std::move(mv));
        for (auto& po : uo.orders) pending.push_back(std::move(po));
    }
    std::stable_sort(pending.begin(), pending.end(), order_key_less);
    result.log.orders.reserve(pending.size());
    result.truth.order_anchor.reserve(pending.size());
    for (auto& po : pending) {
        result.log.orders.push_back(std::move(po.order));
        result.truth.order_anchor.push_back(po.anchor);
    }
    result.log.sort_and_update_span();

    std::sort(result.truth.moves.begin(), result.truth.moves.end(),
              [](const TrueMove& a, const TrueMove& b) {
                  return std::tie(a.user_id, a.month.index, a.kind) <
                         std::tie(b.user_id, b.month.index, b.kind);
              });
    result.truth.restaurants.reserve(restaurants.size());
    for (const auto& r : restaurants)
        result.truth.restaurants.push_back({r.id, r.location, r.method, r.radius_km});
    return result;
}

// ---- city files -----------------------------------------------------------------

analytics::SubdistrictSet make_subdistricts(const ScenarioConfig& cfg) {
    analytics::SubdistrictSet s;
    const double dlat = (cfg.extent.lat_max - cfg.extent.lat_min) / cfg.subdistrict_grid_ny;
    const double dlon = (cfg.extent.lon_max - cfg.extent.lon_min) / cfg.subdistrict_grid_nx;
    std::size_t next = 1;
    const auto total = static_cast<std::size_t>(cfg.subdistrict_grid_nx) *
                       static_cast<std::size_t>(cfg.subdistrict_grid_ny);
    for (int row = 0; row < cfg.subdistrict_grid_ny; ++row) {
        for (int col = 0; col < cfg.subdistrict_grid_nx; ++col, ++next) {
            const double lat0 = cfg.extent.lat_min + row * dlat;
            const double lon0 = cfg.extent.lon_min + col * dlon;
            analytics::Polygon poly;
            poly.rings.push_back({GeoPoint{lat0, lon0}, GeoPoint{lat0, lon0 + dlon},
                                  GeoPoint{lat0 + dlat, lon0 + dlon},
                                  GeoPoint{lat0 + dlat, lon0}});
            s.polygons[padded_id("sd", next, total + 1)] = {std::move(poly)};
        }
    }
    return s;
}

void fill_reference_series(analytics::SubdistrictSet& s, const GroundTruth& truth) {
    std::map<std::string, std::pair<double, double>, analytics::IdLess> counts;
    for (const auto& [id, polys] : s.polygons) counts[id] = {0.0, 0.0};
    for (const auto& u : truth.users) {
        for (const auto& phase : u.work_phases) {
            const auto sd = analytics::point_to_subdistrict(phase.position, s);
            if (sd) counts[*sd].first += 1.0;
        }
        for (const auto& phase : u.home_phases) {
            const auto sd = analytics::point_to_subdistrict(phase.position, s);
            if (sd) counts[*sd].second += 1.0;
        }
    }
    s.reference_series.clear();
    for (const auto& [id, c] : counts) s.reference_series[id] = c;
}

analytics::RingModel make_rings(const ScenarioConfig& cfg) {
    const GeoPoint center{0.5 * (cfg.extent.lat_min + cfg.extent.lat_max),
                          0.5 * (cfg.extent.lon_min + cfg.extent.lon_max)};
    analytics::RingModel model;
    for (const double radius : cfg.ring_radii_km) {
        std::vector<GeoPoint> ring;
        constexpr int kVertices = 72;
        for (int i = 0; i < kVertices; ++i)
            ring.push_back(offset_km(center, radius, 2.0 * kPi * i / kVertices));
        analytics::Polygon poly;
        poly.rings.push_back(std::move(ring));
        model.rings.push_back(std::move(poly));
    }
    return model;
}

double price_field(const ScenarioConfig& cfg, const GeoPoint& p) {
    const GeoPoint center{0.5 * (cfg.extent.lat_min + cfg.extent.lat_max),
                          0.5 * (cfg.extent.lon_min + cfg.extent.lon_max)};
    const double d = haversine_km(center, p);
    return std::max(cfg.price_floor_per_m2, cfg.price_center_per_m2 - cfg.price_slope_per_km * d);
}

std::vector<analytics::Transaction> make_transactions(const ScenarioConfig& cfg) {
    rng::Engine eng(rng::substream(cfg.seed, kStreamTransactions));
    std::vector<analytics::Transaction> txns;
    int y;
    unsigned m, d;
    civil_from_days(cfg.span_start, y, m, d);
    const int base = y * 12 + static_cast<int>(m) - 1;
    for (int rel = 0; rel < cfg.span_months; ++rel) {
        for (std::size_t i = 0; i < cfg.transactions_per_month; ++i) {
            const GeoPoint p = uniform_point(eng, cfg.extent);
            const double price = price_field(cfg, p) * rng::uniform(eng, 0.98, 1.02);
            txns.push_back({p, YearMonth{base + rel}, std::round(price)});
        }
    }
    return txns;
}

// ---- ground truth io ---------------------------------------------------------------

const TrueUser* GroundTruth::find_user(const std::string& user_id) const {
    const auto it = std::lower_bound(
        users.begin(), users.end(), user_id,
        [](const TrueUser& u, const std::string& id) { return u.user_id < id; });
    if (it == users.end() || it->user_id != user_id) return nullptr;
    return &*it;
}

namespace {

json phases_to_json(const std::vector<AnchorPhase>& phases) {
    json arr = json::array();
    for (const auto& p : phases)
        arr.push_back({{"lat", p.position.lat},
                       {"lon", p.position.lon},
                       {"start", format_date(p.start)},
                       {"end", format_date(p.end)}});
    return arr;
}

std::vector<AnchorPhase> phases_from_json(const json& arr) {
    std::vector<AnchorPhase> phases;
    for (const auto& p : arr) {
        const auto start = parse_date(p.at("start").get<std::string>());
        const auto end = parse_date(p.at("end").get<std::string>());
        if (!start || !end) throw DataError("ground truth: bad phase dates");
        phases.push_back(
            {GeoPoint{p.at("lat").get<double>(), p.at("lon").get<double>()}, *start, *end});
    }
    return phases;
}

}  // namespace

void GroundTruth::save(const std::string& path) const {
    json j;
    j["users"] = json::array();
    for (const auto& u : users)
        j["users"].push_back({{"user_id", u.user_id},
                              {"archetype", u.archetype},
                              {"home_phases", phases_to_json(u.home_phases)},
                              {"work_phases", phases_to_json(u.work_phases)}});
    j["moves"] = json::array();
    for (const auto& m : moves)
        j["moves"].push_back({{"user_id", m.user_id},
                              {"kind", moves::move_kind_name(m.kind)},
                              {"month", m.month.str()},
                              {"from_lat", m.from.lat},
                              {"from_lon", m.from.lon},
                              {"to_lat", m.to.lat},
                              {"to_lon", m.to.lon}});
    j["restaurants"] = json::array();
    for (const auto& r : restaurants)
        j["restaurants"].push_back({{"id", r.id},
                                    {"lat", r.location.lat},
                                    {"lon", r.location.lon},
                                    {"method", r.method},
                                    {"radius_km", r.radius_km}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

GroundTruth GroundTruth::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("ground truth: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + std::string(e.what()));
    }
    GroundTruth truth;
    for (const auto& u : j.at("users")) {
        TrueUser tu;
        tu.user_id = u.at("user_id").get<std::string>();
        tu.archetype = u.at("archetype").get<std::string>();
        tu.home_phases = phases_from_json(u.at("home_phases"));
        tu.work_phases = phases_from_json(u.at("work_phases"));
        truth.users.push_back(std::move(tu));
    }
    for (const auto& m : j.at("moves")) {
        TrueMove tm;
        tm.user_id = m.at("user_id").get<std::string>();
        const auto kind = moves::move_kind_from_name(m.at("kind").get<std::string>());
        if (!kind) throw DataError("ground truth: bad move kind");
        tm.kind = *kind;
        const auto month = YearMonth::parse(m.at("month").get<std::string>());
        if (!month) throw DataError("ground truth: bad move month");
        tm.month = *month;
        tm.from = {m.at("from_lat").get<double>(), m.at("from_lon").get<double>()};
        tm.to = {m.at("to_lat").get<double>(), m.at("to_lon").get<double>()};
        truth.moves.push_back(std::move(tm));
    }
    if (j.contains("restaurants")) {
        for (const auto& r : j.at("restaurants"))
            truth.restaurants.push_back({r.at("id").get<std::string>(),
                                         GeoPoint{r.at("lat").get<double>(),
                                                  r.at("lon").get<double>()},
                                         r.at("method").get<std::string>(),
                                         r.at("radius_km").get<double>()});
    }
    std::sort(truth.users.begin(), truth.users.end(),
              [](const TrueUser& a, const TrueUser& b) { return a.user_id < b.user_id; });
    return truth;
}

// ---- evaluation ----------------------------------------------------------------------

DistSummary DistSummary::of(std::vector<double> values) {
    DistSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.min = values.front();
    s.max = values.back();
    const std::size_t n = values.size();
    s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
    s.p95 = values[std::clamp<std::size_t>(rank, 1, n) - 1];
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / static_cast<double>(n);
    return s;
}

namespace {

json summary_json(const DistSummary& s) {
    return {{"count", s.count}, {"min", s.min},   {"median", s.median},
            {"p95", s.p95},     {"max", s.max},   {"mean", s.mean}};
}

json kind_json(const KindEval& k) {
    json j = {{"detected", k.detected},
              {"truth", k.truth},
              {"matched", k.matched},
              {"no_detections", k.no_detections},
              {"month_error", summary_json(k.month_error)},
              {"month_within_slack_share", k.month_within_slack_share}};
    j["precision"] = k.precision ? json(*k.precision) : json();
    j["recall"] = k.recall ? json(*k.recall) : json();
    return j;
}

}  // namespace

std::string EvalReport::to_json_text() const {
    json j;
    j["housing"] = kind_json(housing);
    j["job"] = kind_json(job);
    j["hubs"] = {{"detected", hubs_detected},
                 {"matched", hubs_matched},
                 {"center_error_km", summary_json(hub_center_error_km)}};
    j["hubs"]["label_accuracy"] = label_accuracy ? json(*label_accuracy) : json();
    j["match_radius_km"] = match_radius_km;
    j["month_slack"] = month_slack;
    return j.dump(2);
}

EvalReport evaluate(std::span<const DetectedHub> hubs, std::span<const DetectedMove> mv,
                    const GroundTruth& truth, double match_radius_km, int month_slack) {
    for (const auto& h : hubs)
        if (!truth.find_user(h.user_id))
            throw DataError("evaluate: detected hub for unknown user " + h.user_id);
    for (const auto& m : mv)
        if (!truth.find_user(m.user_id))
            throw DataError("evaluate: detected move for unknown user " + m.user_id);

    EvalReport report;
    report.match_radius_km = match_radius_km;
    report.month_slack = month_slack;

    for (const auto kind : {moves::MoveKind::Housing, moves::MoveKind::Job}) {
        KindEval& ke = kind == moves::MoveKind::Housing ? report.housing : report.job;

        std::vector<const DetectedMove*> detected;
        for (const auto& m : mv)
            if (m.kind == kind) detected.push_back(&m);
        std::vector<const TrueMove*> truths;
        for (const auto& t : truth.moves)
            if (t.kind == kind) truths.push_back(&t);
        ke.detected = detected.size();
        ke.truth = truths.size();

        struct Pair {
            double err;
            std::size_t d, t;
        };
        std::vector<Pair> pairs;
        for (std::size_t di = 0; di < detected.size(); ++di) {
            for (std::size_t ti = 0; ti < truths.size(); ++ti) {
                const auto* d = detected[di];
                const auto* t = truths[ti];
                if (d->user_id != t->user_id) continue;
                if (std::abs(d->month.index - t->month.index) > month_slack) continue;
                const double e_from = haversine_km(d->from, t->from);
                const double e_to = haversine_km(d->to, t->to);
                if (e_from > match_radius_km || e_to > match_radius_km) continue;
                pairs.push_back({e_from + e_to, di, ti});
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            return std::tie(a.err, a.d, a.t) < std::tie(b.err, b.d, b.t);
        });
        std::vector<bool> d_used(detected.size(), false), t_used(truths.size(), false);
        std::vector<double> month_errors;
        std::size_t within_slack = 0;
        for (const auto& p : pairs) {
            if (d_used[p.d] || t_used[p.t]) continue;
            d_used[p.d] = t_used[p.t] = true;
            ++ke.matched;
            const auto err =
                std::abs(detected[p.d]->month.index - truths[p.t]->month.index);
            month_errors.push_back(static_cast<double>(err));
            if (err <= month_slack) ++within_slack;
        }
        if (ke.detected > 0)
            ke.precision = static_cast<double>(ke.matched) / static_cast<double>(ke.detected);
        else if (ke.truth > 0)
            ke.no_detections = true;
        if (ke.truth > 0)
            ke.recall = static_cast<double>(ke.matched) / static_cast<double>(ke.truth);
        ke.month_error = DistSummary::of(std::move(month_errors));
        ke.month_within_slack_share =
            ke.matched ? static_cast<double>(within_slack) / static_cast<double>(ke.matched) : 0.0;
    }

    // hubs match the nearest true anchor position of their user
    report.hubs_detected = hubs.size();
    std::vector<double> center_errors;
    std::size_t correct_labels = 0;
    for (const auto& h : hubs) {
        const TrueUser* u = truth.find_user(h.user_id);
        double best = match_radius_km;
        bool is_home = false, matched = false;
        for (const auto& phase : u->home_phases) {
            const double d = haversine_km(h.center, phase.position);
            if (d <= best) {
                best = d;
                is_home = true;
                matched = true;
            }
        }
        for (const auto& phase : u->work_phases) {
            const double d = haversine_km(h.center, phase.position);
            if (d <= best) {
                best = d;
                is_home = false;
                matched = true;
            }
        }
        if (!matched) continue;
        ++report.hubs_matched;
        center_errors.push_back(best);
        const auto want = is_home ? hubprofile::HubLabel::Home : hubprofile::HubLabel::Work;
        if (h.label == want) ++correct_labels;
    }
    if (report.hubs_matched > 0)
        report.label_accuracy =
            static_cast<double>(correct_labels) / static_cast<double>(report.hubs_matched);
    report.hub_center_error_km = DistSummary::of(std::move(center_errors));
    return report;
}

}  // namespace hubshift::synthcity
