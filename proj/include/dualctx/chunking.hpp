#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualctx/source_model.hpp"

namespace dualctx {

struct CodeChunk {
    std::string file;
    int start_line = 1;  // 1-based
    int n_lines = 0;
    std::string text;

    int end_line() const { return start_line + n_lines - 1; }
    // "chunk@file:start-end"
    std::string id() const;

    bool operator==(const CodeChunk&) const = default;
};

// Fixed-length sliding windows over every file. Chunks of a file are contiguous
// in `chunks` and ordered by start line; chunks never span files.
class ChunkCover {
public:
    ChunkCover() = default;
    ChunkCover(std::vector<CodeChunk> chunks, int ell, int eta);

    const std::vector<CodeChunk>& chunks() const { return chunks_; }
    int ell() const { return ell_; }
    int eta() const { return eta_; }

    // Position of a chunk (matched by file and start line), if it belongs to the cover.
    std::optional<std::size_t> position(const CodeChunk& ck) const;

private:
    std::vector<CodeChunk> chunks_;
    int ell_ = 10;
    int eta_ = 5;
    std::map<std::pair<std::string, int>, std::size_t> by_key_;
};

struct UnfinishedChunk {
    std::string text;
    int start_line = 1;
    int end_line = 1;
};

// Windows start at 1, 1+eta, 1+2*eta, ...; when the regular windows miss the
// last line a final window is shifted back to end on it. Files shorter than ell
// contribute one whole-file chunk; empty files contribute nothing.
// Throws ParameterError unless 1 <= eta <= ell.
ChunkCover build_cover(const std::vector<SourceFile>& files, int ell, int eta);

// The next window of the same file, if any.
std::optional<CodeChunk> successor(const ChunkCover& cover, const CodeChunk& ck);

// The last min(ell, cursor_line) lines of edited_text ending at cursor_line.
UnfinishedChunk unfinished_chunk(std::string_view edited_text, int cursor_line, int ell);

// Chunk index file: JSON list of {file, start_line, n_lines}.
std::string serialize_chunk_index(const ChunkCover& cover);
// Rehydrates chunk text from the given sources (keyed by repo-relative path).
ChunkCover parse_chunk_index(std::string_view json_text, const std::map<std::string, std::string>& sources, int ell,
                             int eta);

}  // namespace dualctx
