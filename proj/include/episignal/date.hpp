#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace episignal {

// Calendar date with day precision (proleptic Gregorian, UTC).
// Stored as days since 1970-01-01 so arithmetic and ordering are integer ops.
struct Date {
    std::int32_t days = 0;

    static Date from_ymd(int year, int month, int day) {
        // Howard Hinnant's days_from_civil.
        year -= month <= 2;
        const int era = (year >= 0 ? year : year - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(year - era * 400);
        const unsigned doy =
            (153u * static_cast<unsigned>(month + (month > 2 ? -3 : 9)) + 2u) / 5u +
            static_cast<unsigned>(day) - 1u;
        const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
        return Date{era * 146097 + static_cast<std::int32_t>(doe) - 719468};
    }

    struct Ymd {
        int year;
        int month;
        int day;
    };

    Ymd to_ymd() const {
        std::int64_t z = days + 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp + (mp < 10 ? 3 : -9);
        return Ymd{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
    }

    // Parses strict "YYYY-MM-DD". Anything else yields nullopt.
    static std::optional<Date> parse(std::string_view iso) {
        if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
        auto digits = [](std::string_view s) -> std::optional<int> {
            int v = 0;
            for (char c : s) {
                if (c < '0' || c > '9') return std::nullopt;
                v = v * 10 + (c - '0');
            }
            return v;
        };
        auto y = digits(iso.substr(0, 4));
        auto m = digits(iso.substr(5, 2));
        auto d = digits(iso.substr(8, 2));
        if (!y || !m || !d) return std::nullopt;
        if (*m < 1 || *m > 12 || *d < 1 || *d > 31) return std::nullopt;
        Date date = from_ymd(*y, *m, *d);
        auto back = date.to_ymd();
        if (back.year != *y || back.month != *m || back.day != *d) return std::nullopt;
        return date;
    }

    std::string to_iso() const {
        auto ymd = to_ymd();
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", ymd.year, ymd.month, ymd.day);
        return std::string(buf);
    }

    friend bool operator==(Date a, Date b) { return a.days == b.days; }
    friend bool operator!=(Date a, Date b) { return a.days != b.days; }
    friend bool operator<(Date a, Date b) { return a.days < b.days; }
    friend bool operator<=(Date a, Date b) { return a.days <= b.days; }
    friend bool operator>(Date a, Date b) { return a.days > b.days; }
    friend bool operator>=(Date a, Date b) { return a.days >= b.days; }
    friend Date operator+(Date a, int n) { return Date{a.days + n}; }
    friend Date operator-(Date a, int n) { return Date{a.days - n}; }
    friend int operator-(Date a, Date b) { return a.days - b.days; }
    Date& operator++() { ++days; return *this; }
};

// Half-open [begin, end). An interval with begin == end is empty.
struct DateInterval {
    Date begin;
    Date end;

    bool empty() const { return end <= begin; }
    int length() const { return empty() ? 0 : end - begin; }
    bool contains(Date d) const { return begin <= d && d < end; }
};

}  // namespace episignal
