#pragma once

// Locale-independent number formatting/parsing and stable content hashing.

#include <charconv>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "kgl/errors.hpp"

namespace kgl::text {

/// 17-significant-digit rendering; round-trips every finite double bitwise.
inline std::string fmt(double value) {
    char buf[64];
    if (value == 0.0) value = 0.0;  // folds -0 into +0
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return {buf, res.ptr};
}

inline std::string fmt(std::uint64_t value) { return std::to_string(value); }

inline std::string hex(std::uint64_t value) {
    char buf[24];
    buf[0] = '0';
    buf[1] = 'x';
    auto res = std::to_chars(buf + 2, buf + sizeof(buf), value, 16);
    return {buf, res.ptr};
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double out = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("not a number: '" + std::string(s) + "'");
    }
    return out;
}

inline std::uint64_t parse_u64(std::string_view s, int base = 10) {
    if (base == 16 && s.starts_with("0x")) s.remove_prefix(2);
    std::uint64_t out = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out, base);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("not an unsigned integer: '" + std::string(s) + "'");
    }
    return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

/// 64-bit FNV-1a. Used for content fingerprints recorded in manifests and model files.
class Fnv1a {
public:
    Fnv1a& update(const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            state_ ^= bytes[i];
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Fnv1a& update(std::string_view s) { return update(s.data(), s.size()); }
    Fnv1a& update(std::span<const double> values) {
        for (double v : values) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, &v, sizeof bits);
            update(&bits, sizeof bits);
        }
        return *this;
    }
    [[nodiscard]] std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t hash(std::string_view s) { return Fnv1a{}.update(s).digest(); }

}  // namespace kgl::text
