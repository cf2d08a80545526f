#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hubshift/hubprofile.hpp"
#include "hubshift/wkms.hpp"

namespace hubshift::moves {

enum class MoveKind : std::uint8_t { Housing, Job };  // H->H, W->W

inline const char* move_kind_name(MoveKind k) {
    return k == MoveKind::Housing ? "housing" : "job";
}
std::optional<MoveKind> move_kind_from_name(std::string_view s);

struct LabeledHub {
    wkms::DiningHub hub;
    hubprofile::HubLabel label = hubprofile::HubLabel::Other;
    int hub_id = 0;  // per-user index, ordered by first order time
};

struct Move {
    std::string user_id;
    MoveKind kind = MoveKind::Housing;
    int from_hub = 0;
    int to_hub = 0;
    GeoPoint from_center;
    GeoPoint to_center;
    YearMonth move_month;          // first month of destination-hub activity
    double displacement_km = 0.0;
    std::optional<double> pre_commute_km;   // commute the day before to_hub starts
    std::optional<double> post_commute_km;  // commute on the first day of to_hub
};

struct MoveConfig {
    // A move must displace the hub center beyond one delivery radius; defaults
    // to the kernel bandwidth.
    double min_separation_km = 4.4;

    void validate() const;
};

// Hub transitions per Definition: same-label hub pairs whose order intervals
// are strictly disjoint and whose centers are at least min_separation_km
// apart. Chains emit consecutive moves only: a pair (A, B) is suppressed when
// a third same-label hub lies strictly between them in time.
// pre/post commute fields are left unset; the pipeline fills them.
std::vector<Move> detect_transitions(std::span<const LabeledHub> hubs_of_user,
                                     const MoveConfig& cfg);

struct UserGroup {
    bool stayer = false;
    bool job_hopper = false;
    bool home_mover = false;
};

// Requires at least one Home and one Work hub; users lacking either are
// excluded from mobility analysis (nullopt).
std::optional<UserGroup> classify_user(std::span<const LabeledHub> hubs_of_user,
                                       std::span<const Move> moves_of_user);

struct CommuteDistance {
    enum class Status { Ok, NoHomeHub, NoWorkHub, AmbiguousHome, AmbiguousWork };
    Status status = Status::Ok;
    double km = 0.0;
};

// Home-to-work distance for the hubs active on the given date; ambiguous when
// multiple same-label hubs are simultaneously active.
CommuteDistance commuting_distance(std::span<const LabeledHub> hubs_of_user, CivilDate at);

// Fraction of a work hub's orders outside regular working slots: weekday
// evening/night plus anything on weekends or holidays.
double overtime_ratio(const wkms::DiningHub& w_hub, const HolidayCalendar& cal);

}  // namespace hubshift::moves
