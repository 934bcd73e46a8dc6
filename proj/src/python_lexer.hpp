#pragma once

// Tokenizer for the Python subset understood by the built-in analyzer. Produces
// logical lines (bracket and backslash continuations joined) with their
// indentation width; comments and blank lines are dropped.

#include <string>
#include <string_view>
#include <vector>

namespace dualctx::py {

enum class TokKind { Name, Number, String, Op };

struct Token {
    TokKind kind = TokKind::Op;
    std::string text;  // empty for strings
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;  // inclusive

    bool is_op(std::string_view op) const { return kind == TokKind::Op && text == op; }
    bool is_name(std::string_view n) const { return kind == TokKind::Name && text == n; }
};

struct LogicalLine {
    int indent = 0;
    std::vector<Token> tokens;
};

struct LexError {
    int line = 0;
    int col = 0;
    std::string message;
};

struct LexResult {
    std::vector<LogicalLine> lines;
    std::vector<LexError> errors;
};

LexResult lex(std::string_view text);

bool is_keyword(std::string_view word);

}  // namespace dualctx::py
