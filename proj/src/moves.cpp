#include "hubshift/moves.hpp"

#include <algorithm>

#include "hubshift/errors.hpp"

namespace hubshift::moves {

using hubprofile::HubLabel;

std::optional<MoveKind> move_kind_from_name(std::string_view s) {
    if (s == "housing") return MoveKind::Housing;
    if (s == "job") return MoveKind::Job;
    return std::nullopt;
}

void MoveConfig::validate() const {
    if (!(min_separation_km > 0.0)) throw ConfigError("moves: min_separation_km must be > 0");
}

namespace {

bool strictly_before(const wkms::DiningHub& a, const wkms::DiningHub& b) {
    return a.last_order < b.first_order;
}

}  // namespace

std::vector<Move> detect_transitions(std::span<const LabeledHub> hubs_of_user,
                                     const MoveConfig& cfg) {
    cfg.validate();
    std::vector<Move> out;
    for (const auto label : {HubLabel::Home, HubLabel::Work}) {
        std::vector<const LabeledHub*> group;
        for (const auto& h : hubs_of_user)
            if (h.label == label) group.push_back(&h);

        for (const auto* a : group) {
            for (const auto* b : group) {
                if (a == b || !strictly_before(a->hub, b->hub)) continue;
                // consecutive links only: skip when some hub sits between
                bool chained = false;
                for (const auto* x : group) {
                    if (x == a || x == b) continue;
                    if (strictly_before(a->hub, x->hub) && strictly_before(x->hub, b->hub)) {
                        chained = true;
                        break;
                    }
                }
                if (chained) continue;
                const double d = haversine_km(a->hub.center, b->hub.center);
                if (d < cfg.min_separation_km) continue;

                Move m;
                m.user_id = a->hub.user_id;
                m.kind = label == HubLabel::Home ? MoveKind::Housing : MoveKind::Job;
                m.from_hub = a->hub_id;
                m.to_hub = b->hub_id;
                m.from_center = a->hub.center;
                m.to_center = b->hub.center;
                m.move_month = YearMonth::of_date(date_of(b->hub.first_order));
                m.displacement_km = d;
                out.push_back(std::move(m));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Move& a, const Move& b) {
        if (a.move_month != b.move_month) return a.move_month < b.move_month;
        if (a.kind != b.kind) return a.kind < b.kind;
        return std::tie(a.from_hub, a.to_hub) < std::tie(b.from_hub, b.to_hub);
    });
    return out;
}

std::optional<UserGroup> classify_user(std::span<const LabeledHub> hubs_of_user,
                                       std::span<const Move> moves_of_user) {
    bool has_home = false, has_work = false;
    for (const auto& h : hubs_of_user) {
        has_home |= h.label == HubLabel::Home;
        has_work |= h.label == HubLabel::Work;
    }
    if (!has_home || !has_work) return std::nullopt;

    UserGroup g;
    for (const auto& m : moves_of_user) {
        if (m.kind == MoveKind::Job) g.job_hopper = true;
        if (m.kind == MoveKind::Housing) g.home_mover = true;
    }
    g.stayer = !g.job_hopper && !g.home_mover;
    return g;
}

CommuteDistance commuting_distance(std::span<const LabeledHub> hubs_of_user, CivilDate at) {
    const LabeledHub* home = nullptr;
    const LabeledHub* work = nullptr;
    bool home_dup = false, work_dup = false;
    for (const auto& h : hubs_of_user) {
        const bool active =
            date_of(h.hub.first_order) <= at && at <= date_of(h.hub.last_order);
        if (!active) continue;
        if (h.label == HubLabel::Home) {
            home_dup |= home != nullptr;
            home = &h;
        } else if (h.label == HubLabel::Work) {
            work_dup |= work != nullptr;
            work = &h;
        }
    }
    if (home_dup) return {CommuteDistance::Status::AmbiguousHome, 0.0};
    if (work_dup) return {CommuteDistance::Status::AmbiguousWork, 0.0};
    if (!home) return {CommuteDistance::Status::NoHomeHub, 0.0};
    if (!work) return {CommuteDistance::Status::NoWorkHub, 0.0};
    return {CommuteDistance::Status::Ok, haversine_km(home->hub.center, work->hub.center)};
}

double overtime_ratio(const wkms::DiningHub& w_hub, const HolidayCalendar& cal) {
    if (w_hub.orders.empty()) throw DataError("overtime_ratio: hub has no orders");
    std::size_t overtime = 0;
    for (const auto& o : w_hub.orders) {
        const SlotLabel s = time_slot(o.delivered_at, cal);
        const bool off_day = s.day_type != DayType::Weekday;
        const bool late = s.slot == Slot::Evening || s.slot == Slot::Night;
        if (off_day || late) ++overtime;
    }
    return static_cast<double>(overtime) / static_cast<double>(w_hub.orders.size());
}

}  // namespace hubshift::moves
