#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hubshift/timeutil.hpp"
#include "hubshift/wkms.hpp"

namespace hubshift::hubprofile {

using FeatureVec = std::array<double, kSlotLabelCount>;

// Relative ordering frequencies of one hub over the 15 (day type, slot)
// combinations; entries sum to 1.
struct HubFeatures {
    std::string user_id;
    int hub_index = 0;
    FeatureVec freq{};
};

enum class HubLabel : std::uint8_t { Home, Work, Other };

inline char label_code(HubLabel l) {
    switch (l) {
        case HubLabel::Home: return 'H';
        case HubLabel::Work: return 'W';
        case HubLabel::Other: return 'O';
    }
    return '?';
}
std::optional<HubLabel> label_from_code(char c);

struct ClassifierConfig {
    double min_order_share = 0.10;   // hub orders / user total
    int min_duration_days = 30;      // first-to-last order, in civil days
    int k_min = 2;
    int k_max = 8;
    std::optional<int> fixed_k = 4;  // fixed number of K-means clusters
    int kmeans_restarts = 16;
    std::uint64_t seed = 0;
    double label_margin = 0.1;       // dominance needed before H/W is assigned
    std::size_t silhouette_max_n = 10000;

    void validate() const;  // throws ConfigError
};

// Drops hubs holding fewer than min_order_share of the user's orders or
// active for fewer than min_duration_days; dropped hubs move to `temporary`.
// clusterable flips to false when nothing survives.
wkms::ClusterOutcome filter_temporary_hubs(wkms::ClusterOutcome outcome,
                                           const ClassifierConfig& cfg);

HubFeatures hub_features(const wkms::DiningHub& hub, int hub_index, const HolidayCalendar& cal);

struct KMeansResult {
    std::vector<int> assignment;          // feature index -> cluster
    std::vector<FeatureVec> centroids;
    int chosen_k = 0;
    double silhouette = 0.0;              // mean silhouette of the chosen k
    double wcss = 0.0;                    // within-cluster sum of squares
    std::vector<double> objective_curve;  // WCSS after each Lloyd iteration (best restart)
};

// Lloyd's algorithm with D^2-weighted seeding, kmeans_restarts restarts (best
// by WCSS, ties by restart index). When fixed_k is unset, k in
// [k_min, k_max] is chosen to maximize the mean silhouette, computed on a
// seeded subsample of at most silhouette_max_n points.
KMeansResult kmeans_with_silhouette(const std::vector<FeatureVec>& features,
                                    const ClassifierConfig& cfg);

// Work-vs-home dominance of a centroid in [-1, 1].
//
// The work mass lives on weekday morning+noon (2 slots); the home mass on
// every weekend/holiday slot plus weekday evening+night (12 slots). Raw
// masses are not comparable (12 slots vs 2), so each is converted to a mean
// per-slot rate and the score is the normalized rate difference. Positive =
// work-like, negative = home-like, near zero = ambiguous.
double work_home_dominance(const FeatureVec& centroid);

// One label per centroid: Work when dominance > margin, Home when dominance
// < -margin, Other in between. Depends only on centroid contents, so the
// labeling is invariant under re-indexing of clusters.
std::vector<HubLabel> label_clusters(const std::vector<FeatureVec>& centroids, double margin);

}  // namespace hubshift::hubprofile
