#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dualctx/rtg.hpp"

namespace dualctx {

enum class PromptOrder { HighToLow, LowToHigh, Random };

std::string_view to_string(PromptOrder order);
std::optional<PromptOrder> parse_prompt_order(std::string_view s);

struct PromptStats {
    std::size_t n_ac = 0;
    std::size_t n_rc = 0;
    std::size_t crossfile_tokens = 0;  // token_len total of the selected items
    std::size_t infile_tokens = 0;
};

struct PromptBundle {
    std::string cross_file_block;
    std::string infile_block;
    std::string full_prompt;
    PromptStats stats;
};

struct PromptOptions {
    PromptOrder order = PromptOrder::HighToLow;
    std::uint64_t seed = 0;  // Random order only
    std::size_t infile_budget = 2048;
};

// Items of tdc.selected in presentation order.
std::vector<const ScoredItem*> order_items(const TruncatedDualContext& tdc, PromptOrder order, std::uint64_t seed);

// "# <source-kind>: <origin-path>" followed by the item text as line comments.
std::string render_item(const ScoredItem& item);

// The suffix-most lines of edited_text ending at cursor_line that fit the
// budget. When the cursor line alone does not fit, its leading part is cut.
std::string infile_prefix(std::string_view edited_text, int cursor_line, std::size_t budget,
                          const TokenCounter& counter = default_token_counter());

PromptBundle assemble(const TruncatedDualContext& tdc, std::string_view edited_text, int cursor_line,
                      const PromptOptions& options = {}, const TokenCounter& counter = default_token_counter());

}  // namespace dualctx
