#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hubshift/geo.hpp"
#include "hubshift/orders.hpp"

namespace hubshift::wkms {

// One distinct restaurant of one user, weighted by the inverse of the user's
// mean delivery time from it. Short deliveries pull the density estimate
// harder, since they indicate the restaurant sits close to the user.
struct WeightedSite {
    GeoPoint location;
    double weight = 0.0;  // 1 / mean delivery minutes
    std::string restaurant_id;
    std::size_t order_count = 0;
};

struct KernelConfig {
    double sigma_km = 4.4;            // kernel bandwidth and hub radius
    double convergence_tol_km = 0.001;
    int max_iterations = 200;
    double mode_merge_km = 0.1;

    void validate() const;  // throws ConfigError
};

struct DiningHub {
    std::string user_id;
    GeoPoint center;
    std::vector<std::string> members;  // restaurant ids, sorted
    std::vector<Order> orders;         // sorted by (delivered_at, restaurant_id)
    CivilMinute first_order = 0;
    CivilMinute last_order = 0;

    // whole civil days between first and last order
    int duration_days() const { return date_of(last_order) - date_of(first_order); }
};

struct ClusterOutcome {
    std::string user_id;
    std::vector<DiningHub> hubs;         // surviving hubs, by first order time
    std::vector<DiningHub> temporary;    // dropped by the frequency/duration filter
    std::vector<std::string> outliers;   // restaurants beyond sigma of every center
    std::vector<std::string> non_converged;  // seeds that hit max_iterations
    std::size_t total_orders = 0;
    bool clusterable = false;            // false iff no hub survived
};

// Mean delivery minutes are floored at this value before inversion so the
// weight stays finite.
inline constexpr double kEpsilonMinutes = 1.0;

// One WeightedSite per distinct restaurant in a single user's orders,
// sorted by restaurant_id.
std::vector<WeightedSite> restaurant_weights(std::span<const Order> orders_of_user);

struct ModeSearchResult {
    std::vector<GeoPoint> modes;             // sorted by (lat, lon)
    std::vector<std::string> non_converged;  // restaurant ids
};

// Mean-shift iteration with the weighted Gaussian kernel, one seed per site.
// The neighborhood of a point is every site within 3*sigma (kernel
// truncation); iteration stops when the shift is below convergence_tol_km.
// Converged points within mode_merge_km of each other (single linkage) merge
// into one mode at the weighted centroid of the merged converged points.
ModeSearchResult mean_shift_modes(const std::vector<WeightedSite>& sites,
                                  const KernelConfig& cfg);

// Site-level assignment: nearest mode within sigma_km, else outlier. Hub
// centers are recomputed as the weight-weighted centroid of their members;
// members that end up beyond sigma of the recomputed center are evicted to
// the outliers and the center recomputed, until stable. Every surviving
// (member, center) pair therefore satisfies the sigma constraint exactly.
struct SitePartition {
    std::vector<std::vector<std::size_t>> hub_members;  // indices into sites
    std::vector<GeoPoint> hub_centers;
    std::vector<std::size_t> outliers;
};
SitePartition assign_sites(const std::vector<WeightedSite>& sites,
                           const std::vector<GeoPoint>& modes, const KernelConfig& cfg);

// Full per-user assignment; orders follow their restaurant.
ClusterOutcome assign_hubs(std::span<const Order> orders_of_user, const ModeSearchResult& modes,
                           const KernelConfig& cfg);

// restaurant_weights + mean_shift_modes + assign_hubs for one user.
ClusterOutcome cluster_user(std::span<const Order> orders_of_user, const KernelConfig& cfg);

struct DeliveryDistance {
    std::string method;
    double km = 0.0;
};

// Nearest-rank percentile of the pooled delivery distances; this is how the
// kernel bandwidth is anchored to delivery-zone data.
double estimate_bandwidth(std::span<const DeliveryDistance> distances, double percentile = 95.0);

}  // namespace hubshift::wkms
