#include "hubshift/timeutil.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hubshift/errors.hpp"
#include "json.hpp"

namespace hubshift {

// Howard Hinnant's civil-date algorithms.
CivilDate days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<CivilDate>(era * 146097 + static_cast<int>(doe) - 719468);
}

void civil_from_days(CivilDate z, int& y, unsigned& m, unsigned& d) {
    std::int64_t zz = static_cast<std::int64_t>(z) + 719468;
    const std::int64_t era = (zz >= 0 ? zz : zz - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(zz - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

bool valid_ymd(int y, unsigned m, unsigned d) {
    if (m < 1 || m > 12 || d < 1) return false;
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    unsigned dim = kDays[m - 1];
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (m == 2 && leap) dim = 29;
    return d <= dim;
}

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    unsigned v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return false;
    out = v;
    return true;
}

bool parse_ymd(std::string_view s, int& y, unsigned& m, unsigned& d) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    unsigned yy = 0, mm = 0, dd = 0;
    if (!parse_uint(s.substr(0, 4), yy) || !parse_uint(s.substr(5, 2), mm) ||
        !parse_uint(s.substr(8, 2), dd))
        return false;
    if (!valid_ymd(static_cast<int>(yy), mm, dd)) return false;
    y = static_cast<int>(yy);
    m = mm;
    d = dd;
    return true;
}

}  // namespace

std::optional<CivilDate> parse_date(std::string_view s) {
    int y;
    unsigned m, d;
    if (!parse_ymd(s, y, m, d)) return std::nullopt;
    return days_from_civil(y, m, d);
}

std::optional<CivilMinute> parse_minute(std::string_view s) {
    if (s.size() != 16 || s[10] != ' ' || s[13] != ':') return std::nullopt;
    const auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    unsigned hh = 0, mm = 0;
    if (!parse_uint(s.substr(11, 2), hh) || !parse_uint(s.substr(14, 2), mm)) return std::nullopt;
    if (hh > 23 || mm > 59) return std::nullopt;
    return static_cast<CivilMinute>(*date) * kMinutesPerDay + hh * 60 + mm;
}

std::string format_date(CivilDate d) {
    int y;
    unsigned m, dd;
    civil_from_days(d, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, dd);
    return buf;
}

std::string format_minute(CivilMinute t) {
    const CivilDate d = date_of(t);
    const int mod = minute_of_day(t);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s %02d:%02d", format_date(d).c_str(), mod / 60, mod % 60);
    return buf;
}

YearMonth YearMonth::of_date(CivilDate d) {
    int y;
    unsigned m, dd;
    civil_from_days(d, y, m, dd);
    return YearMonth{y * 12 + static_cast<int>(m) - 1};
}

std::optional<YearMonth> YearMonth::parse(std::string_view s) {
    if (s.size() != 7 || s[4] != '-') return std::nullopt;
    unsigned y = 0, m = 0;
    if (!parse_uint(s.substr(0, 4), y) || !parse_uint(s.substr(5, 2), m)) return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    return YearMonth{static_cast<int>(y) * 12 + static_cast<int>(m) - 1};
}

std::string YearMonth::str() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", year(), month());
    return buf;
}

HolidayCalendar HolidayCalendar::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("holiday calendar: invalid JSON: ") + e.what());
    }
    HolidayCalendar cal;
    const nlohmann::json* dates = &j;
    if (j.is_object()) {
        if (j.contains("weekend_days")) {
            cal.weekend_days.clear();
            for (const auto& w : j.at("weekend_days")) {
                const int idx = w.get<int>();
                if (idx < 0 || idx > 6)
                    throw DataError("holiday calendar: weekend day index out of range [0,6]");
                cal.weekend_days.insert(idx);
            }
            if (cal.weekend_days.empty())
                throw DataError("holiday calendar: weekend_days must be non-empty");
        }
        if (!j.contains("holidays")) return cal;
        dates = &j.at("holidays");
    }
    if (!dates->is_array()) throw DataError("holiday calendar: expected a list of dates");
    for (const auto& s : *dates) {
        const auto d = parse_date(s.get<std::string>());
        if (!d) throw DataError("holiday calendar: bad date '" + s.get<std::string>() + "'");
        cal.holiday_dates.insert(*d);
    }
    return cal;
}

HolidayCalendar HolidayCalendar::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("holiday calendar: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

const char* day_type_name(DayType d) {
    switch (d) {
        case DayType::Weekday: return "weekday";
        case DayType::Weekend: return "weekend";
        case DayType::Holiday: return "holiday";
    }
    return "?";
}

const char* slot_name(Slot s) {
    switch (s) {
        case Slot::Morning: return "morning";
        case Slot::Noon: return "noon";
        case Slot::Afternoon: return "afternoon";
        case Slot::Evening: return "evening";
        case Slot::Night: return "night";
    }
    return "?";
}

std::string slot_label_name(int index) {
    const auto day = static_cast<DayType>(index / kSlotCount);
    const auto slot = static_cast<Slot>(index % kSlotCount);
    return std::string(day_type_name(day)) + "_" + slot_name(slot);
}

SlotLabel time_slot(CivilMinute ts, const HolidayCalendar& cal) {
    const CivilDate date = date_of(ts);
    const int mod = minute_of_day(ts);

    Slot slot;
    if (mod >= 6 * 60 && mod < 11 * 60)
        slot = Slot::Morning;
    else if (mod >= 11 * 60 && mod < 15 * 60)
        slot = Slot::Noon;
    else if (mod >= 15 * 60 && mod < 19 * 60)
        slot = Slot::Afternoon;
    else if (mod >= 19 * 60 && mod < 22 * 60)
        slot = Slot::Evening;
    else
        slot = Slot::Night;

    DayType day;
    if (cal.is_holiday(date))
        day = DayType::Holiday;
    else if (cal.is_weekend(date))
        day = DayType::Weekend;
    else
        day = DayType::Weekday;

    return SlotLabel{day, slot};
}

}  // namespace hubshift
