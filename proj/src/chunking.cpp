#include "dualctx/chunking.hpp"

#include <algorithm>

#include <json.hpp>

#include "dualctx/error.hpp"
#include "dualctx/text.hpp"

namespace dualctx {

std::string CodeChunk::id() const {
    return "chunk@" + file + ":" + std::to_string(start_line) + "-" + std::to_string(end_line());
}

ChunkCover::ChunkCover(std::vector<CodeChunk> chunks, int ell, int eta)
    : chunks_(std::move(chunks)), ell_(ell), eta_(eta) {
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        by_key_.emplace(std::pair(chunks_[i].file, chunks_[i].start_line), i);
    }
}

std::optional<std::size_t> ChunkCover::position(const CodeChunk& ck) const {
    auto it = by_key_.find(std::pair(ck.file, ck.start_line));
    if (it == by_key_.end()) {
        return std::nullopt;
    }
    return it->second;
}

ChunkCover build_cover(const std::vector<SourceFile>& files, int ell, int eta) {
    if (eta < 1 || ell < 1 || eta > ell) {
        throw ParameterError("chunk parameters require 1 <= eta <= ell (got ell=" + std::to_string(ell) +
                             ", eta=" + std::to_string(eta) + ")");
    }
    std::vector<const SourceFile*> ordered;
    for (const auto& f : files) {
        ordered.push_back(&f);
    }
    std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->path < b->path; });

    std::vector<CodeChunk> chunks;
    for (const SourceFile* f : ordered) {
        const auto lines = split_lines(f->text);
        const int n = static_cast<int>(lines.size());
        if (n == 0) {
            continue;
        }
        if (n < ell) {
            chunks.push_back(CodeChunk{f->path, 1, n, join_lines(lines, 0, n)});
            continue;
        }
        int start = 1;
        for (; start + ell - 1 <= n; start += eta) {
            chunks.push_back(CodeChunk{f->path, start, ell, join_lines(lines, start - 1, ell)});
        }
        if (chunks.back().end_line() < n) {
            const int tail = n - ell + 1;
            chunks.push_back(CodeChunk{f->path, tail, ell, join_lines(lines, tail - 1, ell)});
        }
    }
    return ChunkCover(std::move(chunks), ell, eta);
}

std::optional<CodeChunk> successor(const ChunkCover& cover, const CodeChunk& ck) {
    auto pos = cover.position(ck);
    if (!pos || *pos + 1 >= cover.chunks().size()) {
        return std::nullopt;
    }
    const CodeChunk& next = cover.chunks()[*pos + 1];
    if (next.file != ck.file) {
        return std::nullopt;
    }
    return next;
}

UnfinishedChunk unfinished_chunk(std::string_view edited_text, int cursor_line, int ell) {
    if (ell < 1) {
        throw ParameterError("ell must be positive");
    }
    const auto lines = lines_through_cursor(edited_text, cursor_line);
    const int count = std::min(ell, cursor_line);
    const int first = cursor_line - count + 1;
    return UnfinishedChunk{join_lines(lines, first - 1, count), first, cursor_line};
}

std::string serialize_chunk_index(const ChunkCover& cover) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& ck : cover.chunks()) {
        out.push_back({{"file", ck.file}, {"start_line", ck.start_line}, {"n_lines", ck.n_lines}});
    }
    return out.dump(1) + "\n";
}

ChunkCover parse_chunk_index(std::string_view json_text, const std::map<std::string, std::string>& sources, int ell,
                             int eta) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("corrupt chunk index at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw DataError("chunk index must be a JSON list");
    }
    std::map<std::string, std::vector<std::string_view>> split;
    std::vector<CodeChunk> chunks;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& rec = doc[i];
        CodeChunk ck;
        try {
            ck.file = rec.at("file").get<std::string>();
            ck.start_line = rec.at("start_line").get<int>();
            ck.n_lines = rec.at("n_lines").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError("chunk record " + std::to_string(i) + ": " + e.what());
        }
        auto src = sources.find(ck.file);
        if (src == sources.end()) {
            throw DataError("chunk record " + std::to_string(i) + ": no source text for " + ck.file);
        }
        auto& lines = split[ck.file];
        if (lines.empty()) {
            lines = split_lines(src->second);
        }
        if (ck.start_line < 1 || ck.n_lines < 1 || ck.n_lines > ell ||
            ck.end_line() > static_cast<int>(lines.size())) {
            throw DataError("chunk record " + std::to_string(i) + " does not fit " + ck.file +
                            " under ell=" + std::to_string(ell));
        }
        ck.text = join_lines(lines, ck.start_line - 1, ck.n_lines);
        chunks.push_back(std::move(ck));
    }
    return ChunkCover(std::move(chunks), ell, eta);
}

}  // namespace dualctx
