#include "kbfresh/timeutil.hpp"

#include <cctype>
#include <cstdio>

#include "kbfresh/error.hpp"

namespace kbfresh {

namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool parse_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (!std::isdigit(c)) return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

}  // namespace

Timestamp parse_iso8601(std::string_view s) {
    int y, mo, d;
    if (!parse_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
        !parse_int(s, 5, 2, mo) || !parse_int(s, 8, 2, d) || mo < 1 || mo > 12 || d < 1 ||
        d > 31) {
        throw ParseError("bad timestamp: '" + std::string(s) + "'");
    }
    int h = 0, mi = 0, sec = 0;
    if (s.size() > 10) {
        if ((s[10] != 'T' && s[10] != ' ') || s.size() < 19 || s[13] != ':' || s[16] != ':' ||
            !parse_int(s, 11, 2, h) || !parse_int(s, 14, 2, mi) || !parse_int(s, 17, 2, sec) ||
            h > 23 || mi > 59 || sec > 60) {
            throw ParseError("bad timestamp: '" + std::string(s) + "'");
        }
        std::size_t rest = 19;
        if (rest < s.size() && s[rest] == '.') {  // drop fractional seconds
            ++rest;
            while (rest < s.size() && std::isdigit(static_cast<unsigned char>(s[rest]))) ++rest;
        }
        if (rest < s.size() && s[rest] == 'Z') ++rest;
        if (rest != s.size()) throw ParseError("bad timestamp: '" + std::string(s) + "'");
    }
    return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
           h * 3600 + mi * 60 + sec;
}

std::string format_iso8601(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem / 60) % 60), static_cast<long long>(rem % 60));
    return buf;
}

LabelWindow parse_window(std::string_view spec) {
    auto pos = spec.find("..");
    if (pos == std::string_view::npos)
        throw ParameterError("window must be 'start..end', got '" + std::string(spec) + "'");
    LabelWindow w;
    w.start = parse_iso8601(spec.substr(0, pos));
    w.end = parse_iso8601(spec.substr(pos + 2));
    if (w.start >= w.end) throw ParameterError("window start must precede end");
    return w;
}

}  // namespace kbfresh
