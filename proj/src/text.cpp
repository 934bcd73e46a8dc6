#include "dualctx/text.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "dualctx/error.hpp"

namespace dualctx {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        if (nl == std::string_view::npos) {
            break;
        }
        pos = nl + 1;
    }
    return lines;
}

std::string join_lines(const std::vector<std::string_view>& lines, std::size_t first, std::size_t count) {
    std::string out;
    const std::size_t last = std::min(lines.size(), first + count);
    for (std::size_t i = first; i < last; ++i) {
        if (i != first) {
            out.push_back('\n');
        }
        out.append(lines[i]);
    }
    return out;
}

std::vector<std::string_view> lines_through_cursor(std::string_view text, int cursor_line) {
    auto lines = split_lines(text);
    const int n = static_cast<int>(lines.size());
    const bool open_line = text.empty() || text.back() == '\n';
    if (cursor_line < 1 || cursor_line > n + (open_line ? 1 : 0)) {
        throw ParameterError("cursor line " + std::to_string(cursor_line) + " outside 1.." +
                             std::to_string(n + (open_line ? 1 : 0)));
    }
    if (cursor_line == n + 1) {
        lines.emplace_back();
    } else {
        lines.resize(static_cast<std::size_t>(cursor_line));
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::string dedent(std::string_view text) {
    auto lines = split_lines(text);
    std::size_t common = std::numeric_limits<std::size_t>::max();
    for (auto line : lines) {
        if (trim(line).empty()) {
            continue;
        }
        std::size_t n = 0;
        while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) {
            ++n;
        }
        common = std::min(common, n);
    }
    if (common == std::numeric_limits<std::size_t>::max()) {
        common = 0;
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) {
            out.push_back('\n');
        }
        auto line = lines[i];
        out.append(line.size() >= common ? line.substr(common) : std::string_view{});
    }
    return out;
}

std::string dedent_from_column(std::string_view text, int start_col) {
    std::string indented(static_cast<std::size_t>(std::max(0, start_col - 1)), ' ');
    indented.append(text);
    return dedent(indented);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double keyed_uniform(std::uint64_t seed, std::string_view key) {
    const std::uint64_t bits = splitmix64(splitmix64(seed) ^ fnv1a64(key));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace dualctx
