#include "python_lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace dualctx::py {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async", "await",    "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",  "yield"};

constexpr std::array<std::string_view, 23> kMultiOps = {"**=", "//=", ">>=", "<<=", "...", "->", "**", "//",
                                                        "==",  "!=",  "<=",  ">=",  ":=",  "+=", "-=", "*=",
                                                        "/=",  "%=",  "&=",  "|=",  "^=",  "@=", "<<"};

bool is_name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_name_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view s) {
    if (s.size() > 2) {
        return false;
    }
    for (char c : s) {
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l != 'r' && l != 'b' && l != 'u' && l != 'f') {
            return false;
        }
    }
    return true;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : src_(text) {}

    LexResult run() {
        while (pos_ < src_.size()) {
            if (at_line_start_) {
                if (!begin_line()) {
                    continue;
                }
            }
            step();
        }
        flush_line();
        return std::move(out_);
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    // Measures indentation; returns false when the physical line is blank or a comment.
    bool begin_line() {
        int width = 0;
        while (pos_ < src_.size() && (peek() == ' ' || peek() == '\t' || peek() == '\f')) {
            width = peek() == '\t' ? (width / 8 + 1) * 8 : width + 1;
            advance();
        }
        if (pos_ >= src_.size()) {
            return false;
        }
        if (peek() == '\n' || peek() == '\r' || peek() == '#') {
            while (pos_ < src_.size() && peek() != '\n') {
                advance();
            }
            if (pos_ < src_.size()) {
                advance();
            }
            return false;
        }
        cur_.indent = width;
        at_line_start_ = false;
        return true;
    }

    void flush_line() {
        if (!cur_.tokens.empty()) {
            out_.lines.push_back(std::move(cur_));
        }
        cur_ = LogicalLine{};
    }

    void step() {
        const char c = peek();
        if (c == '\n') {
            advance();
            if (depth_ == 0) {
                flush_line();
                at_line_start_ = true;
            }
            return;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
            advance();
            return;
        }
        if (c == '#') {
            while (pos_ < src_.size() && peek() != '\n') {
                advance();
            }
            return;
        }
        if (c == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
            advance();
            if (peek() == '\r') {
                advance();
            }
            advance();
            return;
        }
        if (c == '"' || c == '\'') {
            lex_string(pos_, line_, col_);
            return;
        }
        if (is_name_start(static_cast<unsigned char>(c))) {
            lex_name();
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            lex_number();
            return;
        }
        lex_op();
    }

    void lex_name() {
        const int line = line_;
        const int col = col_;
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_name_char(static_cast<unsigned char>(peek()))) {
            advance();
        }
        std::string_view word = src_.substr(start, pos_ - start);
        if ((peek() == '"' || peek() == '\'') && is_string_prefix(word)) {
            lex_string(start, line, col);
            return;
        }
        push(TokKind::Name, std::string(word), line, col);
    }

    void lex_number() {
        const int line = line_;
        const int col = col_;
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (is_name_char(static_cast<unsigned char>(peek())) || peek() == '.')) {
            advance();
        }
        push(TokKind::Number, std::string(src_.substr(start, pos_ - start)), line, col);
    }

    void lex_string(std::size_t /*start*/, int line, int col) {
        const char quote = peek();
        const bool triple = peek(1) == quote && peek(2) == quote;
        advance();
        if (triple) {
            advance();
            advance();
        }
        bool closed = false;
        while (pos_ < src_.size()) {
            const char c = peek();
            if (c == '\\') {
                advance();
                if (pos_ < src_.size()) {
                    advance();
                }
                continue;
            }
            if (!triple && c == '\n') {
                break;
            }
            if (c == quote) {
                if (!triple) {
                    advance();
                    closed = true;
                    break;
                }
                if (peek(1) == quote && peek(2) == quote) {
                    advance();
                    advance();
                    advance();
                    closed = true;
                    break;
                }
            }
            advance();
        }
        if (!closed) {
            out_.errors.push_back({line, col, "unterminated string literal"});
        }
        push(TokKind::String, {}, line, col);
    }

    void lex_op() {
        const int line = line_;
        const int col = col_;
        std::string_view rest = src_.substr(pos_);
        for (auto op : kMultiOps) {
            if (rest.substr(0, op.size()) == op) {
                for (std::size_t k = 0; k < op.size(); ++k) {
                    advance();
                }
                push(TokKind::Op, std::string(op), line, col);
                return;
            }
        }
        if (rest.substr(0, 2) == ">>") {
            advance();
            advance();
            push(TokKind::Op, ">>", line, col);
            return;
        }
        const char c = peek();
        if (c == '(' || c == '[' || c == '{') {
            ++depth_;
        } else if (c == ')' || c == ']' || c == '}') {
            depth_ = std::max(0, depth_ - 1);
        }
        advance();
        push(TokKind::Op, std::string(1, c), line, col);
    }

    void push(TokKind kind, std::string text, int line, int col) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.line = line;
        t.col = col;
        // position of the last consumed character
        if (col_ > 1) {
            t.end_line = line_;
            t.end_col = col_ - 1;
        } else {
            // token ended with a newline inside a string; end at previous line is not tracked
            // precisely, so clamp to the start of the current line
            t.end_line = line_;
            t.end_col = 1;
        }
        cur_.tokens.push_back(std::move(t));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int depth_ = 0;
    bool at_line_start_ = true;
    LogicalLine cur_;
    LexResult out_;
};

}  // namespace

LexResult lex(std::string_view text) { return Lexer(text).run(); }

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

}  // namespace dualctx::py
