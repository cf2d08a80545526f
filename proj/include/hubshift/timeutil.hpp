#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>

namespace hubshift {

// All timestamps are naive local civil time at minute resolution.
// CivilMinute counts minutes since 1970-01-01 00:00, CivilDate counts days
// since 1970-01-01. No timezone arithmetic anywhere.
using CivilMinute = std::int64_t;
using CivilDate = std::int32_t;

inline constexpr int kMinutesPerDay = 24 * 60;

CivilDate days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(CivilDate z, int& y, unsigned& m, unsigned& d);
bool valid_ymd(int y, unsigned m, unsigned d);

inline CivilDate date_of(CivilMinute t) {
    // floor division; timestamps before 1970 are not produced but keep it exact
    return static_cast<CivilDate>(t >= 0 ? t / kMinutesPerDay : (t - kMinutesPerDay + 1) / kMinutesPerDay);
}
inline int minute_of_day(CivilMinute t) {
    const auto m = t % kMinutesPerDay;
    return static_cast<int>(m >= 0 ? m : m + kMinutesPerDay);
}

// Monday = 0 ... Sunday = 6.
inline int weekday_index(CivilDate d) {
    const auto w = (static_cast<std::int64_t>(d) + 3) % 7;
    return static_cast<int>(w >= 0 ? w : w + 7);
}

// "YYYY-MM-DD HH:MM" / "YYYY-MM-DD" / "YYYY-MM"
std::optional<CivilMinute> parse_minute(std::string_view s);
std::optional<CivilDate> parse_date(std::string_view s);
std::string format_minute(CivilMinute t);
std::string format_date(CivilDate d);

// Civil year-month encoded as year*12 + (month-1); printable as "YYYY-MM".
struct YearMonth {
    int index = 0;

    static YearMonth of_date(CivilDate d);
    static std::optional<YearMonth> parse(std::string_view s);
    int year() const { return index >= 0 ? index / 12 : (index - 11) / 12; }
    unsigned month() const { return static_cast<unsigned>(index - year() * 12) + 1; }
    std::string str() const;

    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

struct HolidayCalendar {
    std::unordered_set<CivilDate> holiday_dates;
    std::set<int> weekend_days{5, 6};  // Monday = 0 ... Sunday = 6

    bool is_holiday(CivilDate d) const { return holiday_dates.count(d) != 0; }
    bool is_weekend(CivilDate d) const { return weekend_days.count(weekday_index(d)) != 0; }

    // JSON file: either a bare list of "YYYY-MM-DD" strings or an object
    // {"holidays": [...], "weekend_days": [5, 6]}.
    static HolidayCalendar load(const std::string& path);
    static HolidayCalendar from_json_text(const std::string& text);
};

enum class DayType : std::uint8_t { Weekday = 0, Weekend = 1, Holiday = 2 };
enum class Slot : std::uint8_t { Morning = 0, Noon = 1, Afternoon = 2, Evening = 3, Night = 4 };

inline constexpr int kDayTypeCount = 3;
inline constexpr int kSlotCount = 5;
inline constexpr int kSlotLabelCount = kDayTypeCount * kSlotCount;  // 15

struct SlotLabel {
    DayType day_type = DayType::Weekday;
    Slot slot = Slot::Morning;

    int index() const { return static_cast<int>(day_type) * kSlotCount + static_cast<int>(slot); }
    friend bool operator==(const SlotLabel&, const SlotLabel&) = default;
};

const char* day_type_name(DayType d);
const char* slot_name(Slot s);
std::string slot_label_name(int index);  // e.g. "weekday_noon"

// Slot intervals are half-open: morning [06:00,11:00), noon [11:00,15:00),
// afternoon [15:00,19:00), evening [19:00,22:00), night [22:00,06:00).
// Night minutes are attributed to the civil date of the timestamp, and
// holiday takes precedence over weekend.
SlotLabel time_slot(CivilMinute ts, const HolidayCalendar& cal);

}  // namespace hubshift
