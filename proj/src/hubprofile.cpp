#include "hubshift/hubprofile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hubshift/errors.hpp"
#include "hubshift/rng.hpp"

namespace hubshift::hubprofile {

std::optional<HubLabel> label_from_code(char c) {
    switch (c) {
        case 'H': return HubLabel::Home;
        case 'W': return HubLabel::Work;
        case 'O': return HubLabel::Other;
    }
    return std::nullopt;
}

void ClassifierConfig::validate() const {
    if (!(min_order_share > 0.0 && min_order_share < 1.0))
        throw ConfigError("classifier: min_order_share must be in (0, 1)");
    if (min_duration_days < 1) throw ConfigError("classifier: min_duration_days must be >= 1");
    if (k_min < 2) throw ConfigError("classifier: k range must start at 2 or above");
    if (k_max < k_min) throw ConfigError("classifier: k_max must be >= k_min");
    if (fixed_k && *fixed_k < 2)
        throw ConfigError("classifier: fixed_k must be >= 2 (silhouette is undefined for k=1)");
    if (kmeans_restarts < 1) throw ConfigError("classifier: kmeans_restarts must be >= 1");
    if (!(label_margin >= 0.0 && label_margin < 1.0))
        throw ConfigError("classifier: label_margin must be in [0, 1)");
}

wkms::ClusterOutcome filter_temporary_hubs(wkms::ClusterOutcome outcome,
                                           const ClassifierConfig& cfg) {
    cfg.validate();
    const double min_orders = cfg.min_order_share * static_cast<double>(outcome.total_orders);
    std::vector<wkms::DiningHub> kept;
    for (auto& hub : outcome.hubs) {
        const bool frequent = static_cast<double>(hub.orders.size()) >= min_orders;
        const bool durable = hub.duration_days() >= cfg.min_duration_days;
        if (frequent && durable)
            kept.push_back(std::move(hub));
        else
            outcome.temporary.push_back(std::move(hub));
    }
    outcome.hubs = std::move(kept);
    outcome.clusterable = !outcome.hubs.empty();
    return outcome;
}

HubFeatures hub_features(const wkms::DiningHub& hub, int hub_index, const HolidayCalendar& cal) {
    HubFeatures f;
    f.user_id = hub.user_id;
    f.hub_index = hub_index;
    if (hub.orders.empty()) throw DataError("hub_features: hub has no orders");
    for (const auto& o : hub.orders) f.freq[time_slot(o.delivered_at, cal).index()] += 1.0;
    const double n = static_cast<double>(hub.orders.size());
    for (auto& v : f.freq) v /= n;
    return f;
}

namespace {

double sqdist(const FeatureVec& a, const FeatureVec& b) {
    double s = 0.0;
    for (int i = 0; i < kSlotLabelCount; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct LloydRun {
    std::vector<int> assignment;
    std::vector<FeatureVec> centroids;
    double wcss = 0.0;
    std::vector<double> objective_curve;
};

// D^2-weighted seeding (k-means++), then Lloyd iterations to a fixed point.
LloydRun lloyd(const std::vector<FeatureVec>& xs, int k, std::uint64_t seed) {
    const std::size_t n = xs.size();
    rng::Engine eng(rng::substream(seed, 0x6b6d65616e73ULL));

    std::vector<FeatureVec> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    centroids.push_back(xs[rng::uniform_index(eng, n)]);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sqdist(xs[i], centroids.back()));
            total += d2[i];
        }
        if (total <= 0.0) {
            centroids.push_back(xs[rng::uniform_index(eng, n)]);
            continue;
        }
        double r = rng::uniform01(eng) * total;
        std::size_t pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            r -= d2[i];
            if (r <= 0.0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(xs[pick]);
    }

    LloydRun run;
    run.assignment.assign(n, -1);
    constexpr int kMaxIter = 200;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        bool changed = false;
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double d = sqdist(xs[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            if (run.assignment[i] != best_c) {
                run.assignment[i] = best_c;
                changed = true;
            }
            wcss += best;
        }
        run.objective_curve.push_back(wcss);
        run.wcss = wcss;
        if (!changed && iter > 0) break;

        std::vector<FeatureVec> sums(static_cast<std::size_t>(k), FeatureVec{});
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(run.assignment[i]);
            ++counts[c];
            for (int j = 0; j < kSlotLabelCount; ++j) sums[c][j] += xs[i][j];
        }
        for (int c = 0; c < k; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            if (counts[cc] == 0) {
                // restart an empty cluster at the point farthest from its centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        sqdist(xs[i], centroids[static_cast<std::size_t>(run.assignment[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids[cc] = xs[far];
                continue;
            }
            for (int j = 0; j < kSlotLabelCount; ++j)
                centroids[cc][j] = sums[cc][j] / static_cast<double>(counts[cc]);
        }
    }
    run.centroids = std::move(centroids);
    return run;
}

double mean_silhouette(const std::vector<FeatureVec>& xs, const std::vector<int>& assignment,
                       int k, const std::vector<std::size_t>& sample) {
    std::vector<std::size_t> cluster_size(static_cast<std::size_t>(k), 0);
    for (const auto a : assignment) ++cluster_size[static_cast<std::size_t>(a)];

    double total = 0.0;
    std::size_t counted = 0;
    std::vector<double> dist_sum(static_cast<std::size_t>(k));
    for (const auto i : sample) {
        const auto ci = static_cast<std::size_t>(assignment[i]);
        if (cluster_size[ci] <= 1) continue;  // silhouette of a singleton is 0 by convention
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            dist_sum[static_cast<std::size_t>(assignment[j])] += std::sqrt(sqdist(xs[i], xs[j]));
        }
        const double a = dist_sum[ci] / static_cast<double>(cluster_size[ci] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            if (cc == ci || cluster_size[cc] == 0) continue;
            b = std::min(b, dist_sum[cc] / static_cast<double>(cluster_size[cc]));
        }
        if (!std::isfinite(b)) continue;
        total += (b - a) / std::max(a, b);
        ++counted;
    }
    return counted ? total / static_cast<double>(counted) : 0.0;
}

KMeansResult best_of_restarts(const std::vector<FeatureVec>& xs, int k,
                              const ClassifierConfig& cfg) {
    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.kmeans_restarts; ++r) {
        auto run = lloyd(xs, k, rng::substream(cfg.seed, 0x7265737461ULL + static_cast<std::uint64_t>(r)));
        if (run.wcss < best.wcss) {
            best.assignment = std::move(run.assignment);
            best.centroids = std::move(run.centroids);
            best.wcss = run.wcss;
            best.objective_curve = std::move(run.objective_curve);
        }
    }
    best.chosen_k = k;
    return best;
}

}  // namespace

KMeansResult kmeans_with_silhouette(const std::vector<FeatureVec>& features,
                                    const ClassifierConfig& cfg) {
    cfg.validate();
    const std::size_t n = features.size();
    const int k_lo = cfg.fixed_k ? *cfg.fixed_k : cfg.k_min;
    const int k_hi = cfg.fixed_k ? *cfg.fixed_k : cfg.k_max;
    if (n < static_cast<std::size_t>(k_lo))
        throw DataError("kmeans: " + std::to_string(n) + " features but k >= " +
                        std::to_string(k_lo));

    std::vector<std::size_t> sample(n);
    std::iota(sample.begin(), sample.end(), 0);
    if (n > cfg.silhouette_max_n) {
        rng::Engine eng(rng::substream(cfg.seed, 0x73696c68ULL));
        for (std::size_t i = 0; i < cfg.silhouette_max_n; ++i) {
            const auto j = i + rng::uniform_index(eng, n - i);
            std::swap(sample[i], sample[j]);
        }
        sample.resize(cfg.silhouette_max_n);
        std::sort(sample.begin(), sample.end());
    }

    KMeansResult best;
    bool have = false;
    for (int k = k_lo; k <= std::min<int>(k_hi, static_cast<int>(n)); ++k) {
        auto result = best_of_restarts(features, k, cfg);
        result.silhouette = mean_silhouette(features, result.assignment, k, sample);
        if (!have || result.silhouette > best.silhouette) {
            best = std::move(result);
            have = true;
        }
    }
    return best;
}

double work_home_dominance(const FeatureVec& c) {
    const auto at = [&](DayType d, Slot s) { return c[SlotLabel{d, s}.index()]; };
    double work_mass = at(DayType::Weekday, Slot::Morning) + at(DayType::Weekday, Slot::Noon);
    double home_mass = at(DayType::Weekday, Slot::Evening) + at(DayType::Weekday, Slot::Night);
    for (const auto day : {DayType::Weekend, DayType::Holiday})
        for (int s = 0; s < kSlotCount; ++s) home_mass += at(day, static_cast<Slot>(s));

    const double work_rate = work_mass / 2.0;
    const double home_rate = home_mass / 12.0;
    const double denom = work_rate + home_rate;
    if (denom <= 0.0) return 0.0;
    return (work_rate - home_rate) / denom;
}

std::vector<HubLabel> label_clusters(const std::vector<FeatureVec>& centroids, double margin) {
    std::vector<HubLabel> labels;
    labels.reserve(centroids.size());
    for (const auto& c : centroids) {
        const double dom = work_home_dominance(c);
        if (dom > margin)
            labels.push_back(HubLabel::Work);
        else if (dom < -margin)
            labels.push_back(HubLabel::Home);
        else
            labels.push_back(HubLabel::Other);
    }
    return labels;
}

}  // namespace hubshift::hubprofile
