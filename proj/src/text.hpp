#pragma once

// Small ASCII string helpers shared by the library sources.

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace groupkb::text {

inline char lower(char c) noexcept {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline bool is_alnum(char c) noexcept { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// ASCII case fold; bytes >= 0x80 pass through unchanged.
inline std::string fold(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

inline std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); });
    return out;
}

inline std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool iequals(std::string_view a, std::string_view b) noexcept {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) { return lower(x) == lower(y); });
}

// "Think Tanks" -> "think-tanks": lowercase, runs of non-alphanumerics
// collapse to a single hyphen, no leading/trailing hyphen.
inline std::string hyphenate(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (is_alnum(c) || static_cast<unsigned char>(c) >= 0x80) {
            if (pending && !out.empty()) out += '-';
            pending = false;
            out += lower(c);
        } else {
            pending = true;
        }
    }
    return out;
}

}  // namespace groupkb::text
