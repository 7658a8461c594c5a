#include <cctype>
#include <unordered_set>

#include "codegraph/error.hpp"
#include "codegraph/frontend.hpp"

namespace codegraph::frontend {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "class", "if", "else", "while", "for", "return",
    "true", "false", "null",
    "public", "private", "protected", "static", "final",
};

// Multi-character operators, longest match first.
const char* const kMultiOps[] = {
    "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=",
};

const char kSingleOps[] = "+-*/%<>=!(){};,.";

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_char(char c) {
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    int line = 1;
    int column = 1;

    bool eof() const { return pos >= text.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos + ahead < text.size() ? text[pos + ahead] : '\0';
    }
    void advance() {
        if (text[pos] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++pos;
    }
    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError(line, column, expected,
                         "lex error at " + std::to_string(line) + ":" + std::to_string(column) +
                             ": expected " + expected);
    }
};

void skip_trivia(Cursor& c) {
    for (;;) {
        while (!c.eof() && std::isspace(static_cast<unsigned char>(c.peek()))) c.advance();
        if (c.peek() == '/' && c.peek(1) == '/') {
            while (!c.eof() && c.peek() != '\n') c.advance();
            continue;
        }
        if (c.peek() == '/' && c.peek(1) == '*') {
            c.advance();
            c.advance();
            while (!c.eof() && !(c.peek() == '*' && c.peek(1) == '/')) c.advance();
            if (c.eof()) c.fail("'*/'");
            c.advance();
            c.advance();
            continue;
        }
        return;
    }
}

Token lex_number(Cursor& c) {
    Token t{TokenType::IntLiteral, {}, static_cast<std::uint32_t>(c.pos), 0, c.line, c.column};
    while (std::isdigit(static_cast<unsigned char>(c.peek()))) c.advance();
    if (c.peek() == '.' && std::isdigit(static_cast<unsigned char>(c.peek(1)))) {
        t.type = TokenType::FloatLiteral;
        c.advance();
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) c.advance();
    }
    if (c.peek() == 'e' || c.peek() == 'E') {
        std::size_t mark = c.pos;
        c.advance();
        if (c.peek() == '+' || c.peek() == '-') c.advance();
        if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
            t.type = TokenType::FloatLiteral;
            while (std::isdigit(static_cast<unsigned char>(c.peek()))) c.advance();
        } else {
            c.pos = mark; // 'e' belongs to a following identifier
        }
    }
    if (c.peek() == 'f' || c.peek() == 'F' || c.peek() == 'd' || c.peek() == 'D') {
        t.type = TokenType::FloatLiteral;
        c.advance();
    } else if (c.peek() == 'l' || c.peek() == 'L') {
        c.advance();
    }
    t.end = static_cast<std::uint32_t>(c.pos);
    t.text = std::string(c.text.substr(t.begin, t.end - t.begin));
    return t;
}

Token lex_quoted(Cursor& c, char quote, TokenType type, const char* what) {
    Token t{type, {}, static_cast<std::uint32_t>(c.pos), 0, c.line, c.column};
    c.advance();
    while (!c.eof() && c.peek() != quote && c.peek() != '\n') {
        if (c.peek() == '\\') {
            c.advance();
            if (c.eof()) break;
        }
        c.advance();
    }
    if (c.peek() != quote) c.fail(what);
    c.advance();
    t.end = static_cast<std::uint32_t>(c.pos);
    t.text = std::string(c.text.substr(t.begin, t.end - t.begin));
    return t;
}

} // namespace

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    Cursor c{text};
    for (;;) {
        skip_trivia(c);
        if (c.eof()) break;
        const char ch = c.peek();
        if (is_ident_start(ch)) {
            Token t{TokenType::Identifier, {}, static_cast<std::uint32_t>(c.pos), 0, c.line, c.column};
            while (is_ident_char(c.peek())) c.advance();
            t.end = static_cast<std::uint32_t>(c.pos);
            t.text = std::string(text.substr(t.begin, t.end - t.begin));
            if (kKeywords.count(t.text)) t.type = TokenType::Keyword;
            out.push_back(std::move(t));
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            out.push_back(lex_number(c));
            continue;
        }
        if (ch == '"') {
            out.push_back(lex_quoted(c, '"', TokenType::StringLiteral, "closing '\"'"));
            continue;
        }
        if (ch == '\'') {
            out.push_back(lex_quoted(c, '\'', TokenType::CharLiteral, "closing \"'\""));
            continue;
        }
        bool matched = false;
        for (const char* op : kMultiOps) {
            if (ch == op[0] && c.peek(1) == op[1]) {
                Token t{TokenType::Operator, op, static_cast<std::uint32_t>(c.pos), 0, c.line, c.column};
                c.advance();
                c.advance();
                t.end = static_cast<std::uint32_t>(c.pos);
                out.push_back(std::move(t));
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view(kSingleOps).find(ch) != std::string_view::npos) {
            Token t{TokenType::Operator, std::string(1, ch), static_cast<std::uint32_t>(c.pos), 0,
                    c.line, c.column};
            c.advance();
            t.end = static_cast<std::uint32_t>(c.pos);
            out.push_back(std::move(t));
            continue;
        }
        c.fail("a token of the language subset");
    }
    out.push_back(Token{TokenType::EndOfFile, "", static_cast<std::uint32_t>(c.pos),
                        static_cast<std::uint32_t>(c.pos), c.line, c.column});
    return out;
}

} // namespace codegraph::frontend
