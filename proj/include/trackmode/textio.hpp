#ifndef TRACKMODE_TEXTIO_HPP
#define TRACKMODE_TEXTIO_HPP

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "trackmode/error.hpp"

namespace trackmode {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double x) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
}

inline bool try_parse_double(std::string_view s, double& out) {
    // Skip leading spaces; from_chars accepts none.
    size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    auto r = std::from_chars(s.data() + b, s.data() + s.size(), out);
    if (r.ec != std::errc()) return false;
    for (const char* p = r.ptr; p != s.data() + s.size(); ++p)
        if (*p != ' ' && *p != '\t' && *p != '\r') return false;
    return true;
}

inline double parse_double_or_throw(std::string_view s, const std::string& what, size_t line) {
    double x;
    if (!try_parse_double(s, x)) throw DataError("invalid " + what + " '" + std::string(s) + "'", line);
    return x;
}

inline bool try_parse_int(std::string_view s, long long& out) {
    size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    auto r = std::from_chars(s.data() + b, s.data() + s.size(), out);
    if (r.ec != std::errc()) return false;
    for (const char* p = r.ptr; p != s.data() + s.size(); ++p)
        if (*p != ' ' && *p != '\t' && *p != '\r') return false;
    return true;
}

/// Split on a single-character delimiter, keeping empty fields.
inline std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

} // namespace trackmode

#endif // TRACKMODE_TEXTIO_HPP
