#include "dualctx/prompt.hpp"

#include <algorithm>

#include "dualctx/text.hpp"

namespace dualctx {

std::string_view to_string(PromptOrder order) {
    switch (order) {
        case PromptOrder::HighToLow:
            return "HighToLow";
        case PromptOrder::LowToHigh:
            return "LowToHigh";
        case PromptOrder::Random:
            return "Random";
    }
    return "HighToLow";
}

std::optional<PromptOrder> parse_prompt_order(std::string_view s) {
    for (auto o : {PromptOrder::HighToLow, PromptOrder::LowToHigh, PromptOrder::Random}) {
        if (to_string(o) == s) {
            return o;
        }
    }
    return std::nullopt;
}

std::vector<const ScoredItem*> order_items(const TruncatedDualContext& tdc, PromptOrder order, std::uint64_t seed) {
    std::vector<const ScoredItem*> items;
    for (const auto& it : tdc.selected) {
        items.push_back(&it);
    }
    if (order == PromptOrder::LowToHigh) {
        std::reverse(items.begin(), items.end());
    } else if (order == PromptOrder::Random) {
        std::vector<std::pair<double, const ScoredItem*>> keyed;
        for (const auto* it : items) {
            keyed.emplace_back(keyed_uniform(seed, it->item_id), it);
        }
        std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first < b.first : a.second->item_id < b.second->item_id;
        });
        for (std::size_t i = 0; i < keyed.size(); ++i) {
            items[i] = keyed[i].second;
        }
    }
    return items;
}

std::string render_item(const ScoredItem& item) {
    std::string out = "# ";
    out += to_string(item.source);
    out += ": ";
    out += item.origin_path;
    out += '\n';
    for (auto line : split_lines(item.text)) {
        out += line.empty() ? "#" : "# ";
        out += line;
        out += '\n';
    }
    return out;
}

std::string infile_prefix(std::string_view edited_text, int cursor_line, std::size_t budget,
                          const TokenCounter& counter) {
    const auto lines = lines_through_cursor(edited_text, cursor_line);
    const std::size_t n = lines.size();
    auto fits_from = [&](std::size_t first) { return counter.count(join_lines(lines, first, n - first)) <= budget; };

    // Smallest first line index whose suffix fits; token counts only shrink as
    // lines are dropped from the top.
    std::size_t lo = 0;
    std::size_t hi = n - 1;
    if (!fits_from(hi)) {
        const std::string_view last = lines.back();
        std::size_t a = 0;
        std::size_t b = last.size();
        while (a < b) {
            const std::size_t mid = (a + b) / 2;
            if (counter.count(last.substr(mid)) <= budget) {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        return std::string(last.substr(a));
    }
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (fits_from(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return join_lines(lines, lo, n - lo);
}

PromptBundle assemble(const TruncatedDualContext& tdc, std::string_view edited_text, int cursor_line,
                      const PromptOptions& options, const TokenCounter& counter) {
    PromptBundle bundle;
    for (const auto* item : order_items(tdc, options.order, options.seed)) {
        bundle.cross_file_block += render_item(*item);
        bundle.cross_file_block += '\n';
        if (item->source == SourceKind::Analogy) {
            ++bundle.stats.n_ac;
        } else {
            ++bundle.stats.n_rc;
        }
    }
    bundle.infile_block = infile_prefix(edited_text, cursor_line, options.infile_budget, counter);
    bundle.full_prompt = bundle.cross_file_block + bundle.infile_block;
    bundle.stats.crossfile_tokens = tdc.used_tokens;
    bundle.stats.infile_tokens = counter.count(bundle.infile_block);
    return bundle;
}

}  // namespace dualctx
