#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dualctx {

// Splits text into '\n'-delimited lines. A trailing newline terminates the last
// line rather than opening an empty one; a trailing '\r' on each line is dropped.
std::vector<std::string_view> split_lines(std::string_view text);

// Joins lines [first, first + count) with '\n' (0-based indices, no trailing newline).
std::string join_lines(const std::vector<std::string_view>& lines, std::size_t first, std::size_t count);

// Lines 1..cursor_line of text. A cursor on the empty line after a trailing
// newline (or on line 1 of an empty text) is allowed and yields an empty last
// line. Throws ParameterError for other out-of-range cursors.
std::vector<std::string_view> lines_through_cursor(std::string_view text, int cursor_line);

std::string_view trim(std::string_view s);

// Removes the common leading whitespace of all non-blank lines.
std::string dedent(std::string_view text);

// Entity text starts at a 1-based column of its first line; later lines keep their
// absolute indentation. Re-indents the first line and dedents the whole block.
std::string dedent_from_column(std::string_view text, int start_col);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);

// splitmix64 finalizer, used to derive independent pseudo-random streams from keys.
std::uint64_t splitmix64(std::uint64_t x);

// Maps (seed, key) to a uniform double in [0, 1).
double keyed_uniform(std::uint64_t seed, std::string_view key);

}  // namespace dualctx
