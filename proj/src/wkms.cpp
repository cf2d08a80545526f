#include "hubshift/wkms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hubshift/errors.hpp"

namespace hubshift::wkms {

void KernelConfig::validate() const {
    if (!(sigma_km > 0.0)) throw ConfigError("kernel: sigma_km must be > 0");
    if (!(convergence_tol_km > 0.0)) throw ConfigError("kernel: convergence_tol_km must be > 0");
    if (max_iterations < 1) throw ConfigError("kernel: max_iterations must be >= 1");
    if (!(mode_merge_km > 0.0)) throw ConfigError("kernel: mode_merge_km must be > 0");
    if (!(mode_merge_km < sigma_km)) throw ConfigError("kernel: mode_merge_km must be < sigma_km");
}

std::vector<WeightedSite> restaurant_weights(std::span<const Order> orders_of_user) {
    std::map<std::string, WeightedSite> by_restaurant;
    std::map<std::string, double> minute_sum;
    for (const auto& o : orders_of_user) {
        auto [it, fresh] = by_restaurant.try_emplace(o.restaurant_id);
        if (fresh) {
            it->second.location = o.location;
            it->second.restaurant_id = o.restaurant_id;
        }
        it->second.order_count += 1;
        minute_sum[o.restaurant_id] += o.delivery_minutes;
    }
    std::vector<WeightedSite> sites;
    sites.reserve(by_restaurant.size());
    for (auto& [id, site] : by_restaurant) {
        const double mean = minute_sum[id] / static_cast<double>(site.order_count);
        site.weight = 1.0 / std::max(mean, kEpsilonMinutes);
        sites.push_back(std::move(site));
    }
    return sites;  // std::map iteration is already sorted by restaurant_id
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

GeoPoint weighted_centroid(const std::vector<WeightedSite>& sites,
                           const std::vector<std::size_t>& members) {
    double wsum = 0.0, lat = 0.0, lon = 0.0;
    for (const auto i : members) {
        wsum += sites[i].weight;
        lat += sites[i].weight * sites[i].location.lat;
        lon += sites[i].weight * sites[i].location.lon;
    }
    return GeoPoint{lat / wsum, lon / wsum};
}

}  // namespace

ModeSearchResult mean_shift_modes(const std::vector<WeightedSite>& sites,
                                  const KernelConfig& cfg) {
    cfg.validate();
    ModeSearchResult result;
    if (sites.empty()) return result;

    const double trunc_km = 3.0 * cfg.sigma_km;
    const double inv_two_sigma2 = 1.0 / (2.0 * cfg.sigma_km * cfg.sigma_km);

    const std::size_t n = sites.size();
    std::vector<GeoPoint> converged(n);
    std::vector<bool> did_converge(n, false);

    const auto shift_step = [&](const GeoPoint& x, double cutoff_km) {
        double ksum = 0.0, lat = 0.0, lon = 0.0;
        for (const auto& site : sites) {
            const double d = haversine_km(x, site.location);
            if (d > cutoff_km) continue;
            const double k = site.weight * std::exp(-d * d * inv_two_sigma2);
            ksum += k;
            lat += k * site.location.lat;
            lon += k * site.location.lon;
        }
        if (ksum <= 0.0) return x;  // empty neighborhood, stationary by convention
        return GeoPoint{lat / ksum, lon / ksum};
    };
    constexpr double kNoCutoff = 1e18;

    for (std::size_t s = 0; s < n; ++s) {
        GeoPoint x = sites[s].location;
        // fast approach with the truncated neighborhood, then a full-kernel
        // finish: the truncated map can stall on a density flank where the
        // cut-off tail balances the pull
        bool refine = false;
        for (int iter = 0; iter < cfg.max_iterations; ++iter) {
            const GeoPoint next = shift_step(x, refine ? kNoCutoff : trunc_km);
            const double shift = haversine_km(x, next);
            x = next;
            if (shift < cfg.convergence_tol_km) {
                if (refine) {
                    did_converge[s] = true;
                    break;
                }
                refine = true;
            }
        }
        converged[s] = x;
        if (!did_converge[s]) result.non_converged.push_back(sites[s].restaurant_id);
    }

    // single-linkage merge of converged points within mode_merge_km; the mode
    // sits at the weighted centroid of the merged basin's converged points,
    // which is within the merge radius of the density maximum. Seeds still in
    // flight at the iteration cap do not mint modes; their sites get assigned
    // to the nearest surviving mode like any other (unless nothing converged).
    bool any_converged = false;
    for (std::size_t i = 0; i < n; ++i) any_converged |= did_converge[i];
    const auto usable = [&](std::size_t i) { return did_converge[i] || !any_converged; };

    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (usable(i) && usable(j) &&
                haversine_km(converged[i], converged[j]) <= cfg.mode_merge_km)
                uf.unite(i, j);

    std::map<std::size_t, std::vector<std::size_t>> basins;
    for (std::size_t i = 0; i < n; ++i)
        if (usable(i)) basins[uf.find(i)].push_back(i);

    for (const auto& [root, members] : basins) {
        double wsum = 0.0, lat = 0.0, lon = 0.0;
        for (const auto i : members) {
            wsum += sites[i].weight;
            lat += sites[i].weight * converged[i].lat;
            lon += sites[i].weight * converged[i].lon;
        }
        result.modes.push_back(GeoPoint{lat / wsum, lon / wsum});
    }
    std::sort(result.modes.begin(), result.modes.end(), [](const GeoPoint& a, const GeoPoint& b) {
        return a.lat != b.lat ? a.lat < b.lat : a.lon < b.lon;
    });
    return result;
}

SitePartition assign_sites(const std::vector<WeightedSite>& sites,
                           const std::vector<GeoPoint>& modes, const KernelConfig& cfg) {
    SitePartition part;
    part.hub_members.assign(modes.size(), {});
    part.hub_centers = modes;

    for (std::size_t i = 0; i < sites.size(); ++i) {
        double best = cfg.sigma_km;
        std::ptrdiff_t best_mode = -1;
        for (std::size_t m = 0; m < modes.size(); ++m) {
            const double d = haversine_km(sites[i].location, modes[m]);
            if (d <= best) {
                best = d;
                best_mode = static_cast<std::ptrdiff_t>(m);
            }
        }
        if (best_mode < 0)
            part.outliers.push_back(i);
        else
            part.hub_members[static_cast<std::size_t>(best_mode)].push_back(i);
    }

    // recenter on the weighted centroid; evict members the new center cannot
    // cover, until the sigma constraint holds for every member
    for (std::size_t m = 0; m < part.hub_members.size(); ++m) {
        auto& members = part.hub_members[m];
        while (!members.empty()) {
            const GeoPoint center = weighted_centroid(sites, members);
            std::vector<std::size_t> keep;
            keep.reserve(members.size());
            for (const auto i : members) {
                if (haversine_km(sites[i].location, center) <= cfg.sigma_km)
                    keep.push_back(i);
                else
                    part.outliers.push_back(i);
            }
            const bool stable = keep.size() == members.size();
            members = std::move(keep);
            part.hub_centers[m] = center;
            if (stable) break;
        }
    }

    // drop empty hubs
    std::vector<std::vector<std::size_t>> hub_members;
    std::vector<GeoPoint> hub_centers;
    for (std::size_t m = 0; m < part.hub_members.size(); ++m) {
        if (part.hub_members[m].empty()) continue;
        hub_members.push_back(std::move(part.hub_members[m]));
        hub_centers.push_back(part.hub_centers[m]);
    }
    part.hub_members = std::move(hub_members);
    part.hub_centers = std::move(hub_centers);
    std::sort(part.outliers.begin(), part.outliers.end());
    return part;
}

ClusterOutcome assign_hubs(std::span<const Order> orders_of_user, const ModeSearchResult& modes,
                           const KernelConfig& cfg) {
    ClusterOutcome out;
    out.total_orders = orders_of_user.size();
    out.non_converged = modes.non_converged;
    if (orders_of_user.empty()) return out;
    out.user_id = orders_of_user.front().user_id;

    const auto sites = restaurant_weights(orders_of_user);
    const auto part = assign_sites(sites, modes.modes, cfg);

    for (const auto i : part.outliers) out.outliers.push_back(sites[i].restaurant_id);
    std::sort(out.outliers.begin(), out.outliers.end());

    for (std::size_t m = 0; m < part.hub_members.size(); ++m) {
        DiningHub hub;
        hub.user_id = out.user_id;
        hub.center = part.hub_centers[m];
        for (const auto i : part.hub_members[m]) hub.members.push_back(sites[i].restaurant_id);
        std::sort(hub.members.begin(), hub.members.end());
        for (const auto& o : orders_of_user)
            if (std::binary_search(hub.members.begin(), hub.members.end(), o.restaurant_id))
                hub.orders.push_back(o);
        hub.first_order = hub.orders.front().delivered_at;  // orders arrive time-sorted
        hub.last_order = hub.orders.back().delivered_at;
        out.hubs.push_back(std::move(hub));
    }

    std::sort(out.hubs.begin(), out.hubs.end(), [](const DiningHub& a, const DiningHub& b) {
        if (a.first_order != b.first_order) return a.first_order < b.first_order;
        if (a.center.lat != b.center.lat) return a.center.lat < b.center.lat;
        return a.center.lon < b.center.lon;
    });
    out.clusterable = !out.hubs.empty();
    return out;
}

ClusterOutcome cluster_user(std::span<const Order> orders_of_user, const KernelConfig& cfg) {
    const auto sites = restaurant_weights(orders_of_user);
    const auto modes = mean_shift_modes(sites, cfg);
    return assign_hubs(orders_of_user, modes, cfg);
}

double estimate_bandwidth(std::span<const DeliveryDistance> distances, double percentile) {
    if (distances.empty()) throw DataError("estimate_bandwidth: empty distance pool");
    if (!(percentile > 0.0) || !(percentile < 100.0))
        throw ConfigError("estimate_bandwidth: percentile must be in (0, 100)");
    std::vector<double> pool;
    pool.reserve(distances.size());
    for (const auto& d : distances) pool.push_back(d.km);
    std::sort(pool.begin(), pool.end());
    // nearest-rank: smallest value with at least p% of the pool at or below it
    const auto n = static_cast<double>(pool.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    rank = std::clamp<std::size_t>(rank, 1, pool.size());
    return pool[rank - 1];
}

}  // namespace hubshift::wkms
