#pragma once

#include <charconv>
#include <sstream>
#include <string>
#include <type_traits>

#include "spiderlab/errors.hpp"

namespace spiderlab::detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
        std::size_t used = 0;
        try {
            out = static_cast<T>(std::stod(value, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty())
            throw ArgumentError("invalid value '" + value + "' for " + key);
    } else {
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc() || ptr != value.data() + value.size())
            throw ArgumentError("invalid value '" + value + "' for " + key);
    }
    return out;
}

/// Shortest text that reads back to the same double.
inline std::string fmt_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Parses key=value lines with '#' comments into cfg via cfg.set(); unknown keys throw LoadError.
template <typename Config>
Config parse_key_values(std::istream& in, const std::string& what) {
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw LoadError("expected key=value", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (!cfg.set(key, value))
                throw LoadError("unknown " + what + " key '" + key + "'", lineno);
        } catch (const ArgumentError& e) {
            throw LoadError(e.what(), lineno);
        }
    }
    return cfg;
}

} // namespace spiderlab::detail
