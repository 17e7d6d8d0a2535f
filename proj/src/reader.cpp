#include "cycletab/reader.hpp"

#include "cycletab/errors.hpp"

#include <cctype>
#include <optional>
#include <unordered_map>

namespace cycletab {

namespace {

enum class TokKind { Atom, QuotedAtom, Var, Int, Punct, OpenCall, End, Eof };

struct Token {
    TokKind kind;
    std::string text;
    std::int64_t value = 0;
    int line = 0;
    int column = 0;
    bool space_before = false;
};

bool is_symbol_char(char c)
{
    switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
    case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&': case '$':
        return true;
    default:
        return false;
    }
}

bool is_alnum(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true) {
            bool space = skip_layout();
            Token t = next();
            t.space_before = space;
            out.push_back(t);
            if (t.kind == TokKind::Eof)
                break;
        }
        return out;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;

    char peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    bool skip_layout()
    {
        bool skipped = false;
        while (pos_ < text_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                skipped = true;
            } else if (c == '%') {
                while (pos_ < text_.size() && peek() != '\n')
                    advance();
                skipped = true;
            } else if (c == '/' && peek(1) == '*') {
                int l = line_, col = column_;
                advance();
                advance();
                while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/'))
                    advance();
                if (pos_ >= text_.size())
                    throw SyntaxError("unterminated block comment", l, col);
                advance();
                advance();
                skipped = true;
            } else {
                break;
            }
        }
        return skipped;
    }

    Token next()
    {
        Token t{TokKind::Eof, {}, 0, line_, column_, false};
        if (pos_ >= text_.size())
            return t;
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t v = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                v = v * 10 + (peek() - '0');
                advance();
            }
            t.kind = TokKind::Int;
            t.value = v;
            return t;
        }
        if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
            while (is_alnum(peek())) {
                t.text += peek();
                advance();
            }
            t.kind = TokKind::Var;
            return t;
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            while (is_alnum(peek())) {
                t.text += peek();
                advance();
            }
            t.kind = TokKind::Atom;
            return finish_atom(t);
        }
        if (c == '\'') {
            advance();
            while (true) {
                if (pos_ >= text_.size())
                    throw SyntaxError("unterminated quoted atom", t.line, t.column);
                if (peek() == '\'') {
                    if (peek(1) == '\'') {
                        t.text += '\'';
                        advance();
                        advance();
                        continue;
                    }
                    advance();
                    break;
                }
                if (peek() == '\\' && peek(1) == '\\') {
                    t.text += '\\';
                    advance();
                    advance();
                    continue;
                }
                t.text += peek();
                advance();
            }
            t.kind = TokKind::QuotedAtom;
            return finish_atom(t);
        }
        if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' ||
            c == '|') {
            advance();
            t.kind = TokKind::Punct;
            t.text = std::string(1, c);
            return t;
        }
        if (c == '!' || c == ';') {
            advance();
            t.kind = TokKind::Atom;
            t.text = std::string(1, c);
            return finish_atom(t);
        }
        if (is_symbol_char(c)) {
            std::size_t start = pos_;
            while (is_symbol_char(peek()))
                advance();
            t.text = std::string(text_.substr(start, pos_ - start));
            if (t.text == ".") {
                char after = peek();
                if (after == '\0' || std::isspace(static_cast<unsigned char>(after)) ||
                    after == '%') {
                    t.kind = TokKind::End;
                    return t;
                }
            }
            t.kind = TokKind::Atom;
            return finish_atom(t);
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", line_, column_);
    }

    Token finish_atom(Token t)
    {
        if (peek() == '(') {
            // Functional notation requires the parenthesis to touch the name.
            t.kind = t.kind == TokKind::QuotedAtom ? TokKind::QuotedAtom : TokKind::Atom;
            t.value = 1;
        }
        return t;
    }
};

enum class OpType { xfx, xfy, yfx, fy, fx };

struct OpDef {
    int priority;
    OpType type;
};

const std::unordered_map<std::string, OpDef> &infix_ops()
{
    static const std::unordered_map<std::string, OpDef> ops = {
        {":-", {1200, OpType::xfx}}, {";", {1100, OpType::xfy}},   {"->", {1050, OpType::xfy}},
        {"*->", {1050, OpType::xfy}}, {",", {1000, OpType::xfy}},  {"=", {700, OpType::xfx}},
        {"\\=", {700, OpType::xfx}},  {"==", {700, OpType::xfx}},  {"\\==", {700, OpType::xfx}},
        {"=..", {700, OpType::xfx}},  {"is", {700, OpType::xfx}},  {"<", {700, OpType::xfx}},
        {">", {700, OpType::xfx}},    {"=<", {700, OpType::xfx}},  {">=", {700, OpType::xfx}},
        {"=:=", {700, OpType::xfx}},  {"=\\=", {700, OpType::xfx}}, {"+", {500, OpType::yfx}},
        {"-", {500, OpType::yfx}},    {"*", {400, OpType::yfx}},   {"/", {400, OpType::yfx}},
        {"//", {400, OpType::yfx}},   {"mod", {400, OpType::yfx}},
    };
    return ops;
}

const std::unordered_map<std::string, OpDef> &prefix_ops()
{
    static const std::unordered_map<std::string, OpDef> ops = {
        {":-", {1200, OpType::fx}},
        {"?-", {1200, OpType::fx}},
        {"\\+", {900, OpType::fy}},
        {"-", {200, OpType::fy}},
    };
    return ops;
}

class Parser {
public:
    explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

    bool at_eof() const { return peek().kind == TokKind::Eof; }

    SourceTerm read_clause(bool end_optional)
    {
        anon_counter_ = 0;
        auto t = parse(1200);
        if (peek().kind == TokKind::End) {
            ++pos_;
        } else if (!(end_optional && peek().kind == TokKind::Eof)) {
            fail("operator expected");
        }
        return t;
    }

    const Token &peek(std::size_t ahead = 0) const
    {
        auto i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }

    [[noreturn]] void fail(const std::string &what) const
    {
        const auto &t = peek();
        std::string near = t.kind == TokKind::Eof ? "end of input" : "'" + t.text + "'";
        if (t.kind == TokKind::Int)
            near = std::to_string(t.value);
        if (t.kind == TokKind::End)
            near = "'.'";
        throw SyntaxError(what + " near " + near, t.line, t.column);
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int anon_counter_ = 0;

    static bool is_name(const Token &t)
    {
        return t.kind == TokKind::Atom || t.kind == TokKind::QuotedAtom;
    }

    bool is_punct(const Token &t, char c) const
    {
        return t.kind == TokKind::Punct && t.text.size() == 1 && t.text[0] == c;
    }

    void expect_punct(char c)
    {
        if (!is_punct(peek(), c))
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    SourceTerm located(SourceTerm t, const Token &at)
    {
        t.line = at.line;
        t.column = at.column;
        return t;
    }

    // Infix operator named by the next token, if any.
    std::optional<std::pair<std::string, OpDef>> peek_infix() const
    {
        const auto &t = peek();
        std::string name;
        if (t.kind == TokKind::Atom)
            name = t.text;
        else if (is_punct(t, ','))
            name = ",";
        else if (is_punct(t, '|'))
            name = ";";
        else
            return std::nullopt;
        auto it = infix_ops().find(name);
        if (it == infix_ops().end())
            return std::nullopt;
        return std::make_pair(name, it->second);
    }

    bool starts_term(const Token &t) const
    {
        switch (t.kind) {
        case TokKind::Int:
        case TokKind::Var:
        case TokKind::QuotedAtom:
            return true;
        case TokKind::Atom:
            return infix_ops().find(t.text) == infix_ops().end() ||
                   prefix_ops().find(t.text) != prefix_ops().end();
        case TokKind::Punct:
            return is_punct(t, '(') || is_punct(t, '[') || is_punct(t, '{');
        default:
            return false;
        }
    }

    SourceTerm parse(int max)
    {
        auto [left, left_prec] = parse_primary(max);
        while (auto op = peek_infix()) {
            auto [name, def] = *op;
            int left_max = def.type == OpType::yfx ? def.priority : def.priority - 1;
            int right_max = def.type == OpType::xfy ? def.priority : def.priority - 1;
            if (def.priority > max || left_prec > left_max)
                break;
            const auto &at = peek();
            ++pos_;
            auto right = parse(right_max);
            std::vector<SourceTerm> args;
            args.push_back(std::move(left));
            args.push_back(std::move(right));
            left = located(SourceTerm::compound(name, std::move(args)), at);
            left_prec = def.priority;
        }
        return left;
    }

    std::pair<SourceTerm, int> parse_primary(int max)
    {
        const Token tok = peek();
        switch (tok.kind) {
        case TokKind::Int:
            ++pos_;
            return {located(SourceTerm::integer(tok.value), tok), 0};
        case TokKind::Var: {
            ++pos_;
            std::string name = tok.text;
            if (name == "_")
                name = "_#" + std::to_string(++anon_counter_);
            return {located(SourceTerm::var(name), tok), 0};
        }
        case TokKind::Punct:
            return parse_punct(tok);
        case TokKind::Atom:
        case TokKind::QuotedAtom:
            return parse_name(tok, max);
        case TokKind::End:
            fail("unexpected end of clause");
        case TokKind::Eof:
            fail("unexpected end of input");
        case TokKind::OpenCall:
            break;
        }
        fail("unexpected token");
    }

    std::pair<SourceTerm, int> parse_punct(const Token &tok)
    {
        if (is_punct(tok, '(')) {
            ++pos_;
            auto t = parse(1200);
            expect_punct(')');
            return {std::move(t), 0};
        }
        if (is_punct(tok, '[')) {
            ++pos_;
            if (is_punct(peek(), ']')) {
                ++pos_;
                return {located(SourceTerm::atom("[]"), tok), 0};
            }
            std::vector<SourceTerm> items;
            items.push_back(parse(999));
            while (is_punct(peek(), ',')) {
                ++pos_;
                items.push_back(parse(999));
            }
            SourceTerm tail = SourceTerm::atom("[]");
            if (is_punct(peek(), '|')) {
                ++pos_;
                tail = parse(999);
            }
            expect_punct(']');
            for (auto it = items.rbegin(); it != items.rend(); ++it) {
                std::vector<SourceTerm> args;
                args.push_back(std::move(*it));
                args.push_back(std::move(tail));
                tail = located(SourceTerm::compound(".", std::move(args)), tok);
            }
            return {std::move(tail), 0};
        }
        fail("unexpected '" + tok.text + "'");
    }

    std::pair<SourceTerm, int> parse_name(const Token &tok, int max)
    {
        ++pos_;
        const auto &next = peek();
        // f(...) only when '(' immediately follows the name.
        if (is_punct(next, '(') && !next.space_before) {
            ++pos_;
            std::vector<SourceTerm> args;
            args.push_back(parse(999));
            while (is_punct(peek(), ',')) {
                ++pos_;
                args.push_back(parse(999));
            }
            expect_punct(')');
            return {located(SourceTerm::compound(tok.text, std::move(args)), tok), 0};
        }
        if (tok.kind == TokKind::Atom) {
            if (tok.text == "-" && next.kind == TokKind::Int && !next.space_before) {
                ++pos_;
                return {located(SourceTerm::integer(-next.value), tok), 0};
            }
            auto p = prefix_ops().find(tok.text);
            if (p != prefix_ops().end() && starts_term(next)) {
                int priority = p->second.priority;
                int arg_max = p->second.type == OpType::fy ? priority : priority - 1;
                if (priority > max) {
                    priority = 999;
                    arg_max = 999;
                }
                auto operand = parse(arg_max);
                std::vector<SourceTerm> args;
                args.push_back(std::move(operand));
                return {located(SourceTerm::compound(tok.text, std::move(args)), tok), priority};
            }
        }
        return {located(SourceTerm::atom(tok.text), tok), 0};
    }
};

} // namespace

SourceProgram parse_program(std::string_view text)
{
    Parser p(text);
    SourceProgram prog;
    while (!p.at_eof()) {
        int line = p.peek().line;
        prog.clauses.push_back(SourceClause{p.read_clause(false), line});
    }
    return prog;
}

SourceTerm parse_term(std::string_view text)
{
    Parser p(text);
    if (p.at_eof())
        p.fail("empty input");
    auto t = p.read_clause(true);
    if (!p.at_eof())
        p.fail("trailing input");
    return t;
}

SourceQuery parse_query(std::string_view text)
{
    auto t = parse_term(text);
    if (t.is_compound("?-", 1))
        t = t.args[0];
    SourceQuery q;
    q.goals = flatten_conjunction(t);
    collect_variables(t, q.variables);
    return q;
}

std::vector<SourceTerm> flatten_conjunction(const SourceTerm &t)
{
    std::vector<SourceTerm> out;
    const SourceTerm *cur = &t;
    while (cur->is_compound(",", 2)) {
        auto rest = flatten_conjunction(cur->args[0]);
        out.insert(out.end(), rest.begin(), rest.end());
        cur = &cur->args[1];
    }
    out.push_back(*cur);
    return out;
}

void collect_variables(const SourceTerm &t, std::vector<std::string> &out)
{
    if (t.kind == SourceTerm::Kind::Var) {
        if (t.name.rfind("_#", 0) == 0)
            return;
        for (const auto &n : out)
            if (n == t.name)
                return;
        out.push_back(t.name);
        return;
    }
    for (const auto &a : t.args)
        collect_variables(a, out);
}

CellRef build_term(CellStore &store, const SourceTerm &t, VarBindings &vars)
{
    switch (t.kind) {
    case SourceTerm::Kind::Var: {
        auto it = vars.find(t.name);
        if (it != vars.end())
            return it->second;
        auto v = store.new_var();
        vars.emplace(t.name, v);
        return v;
    }
    case SourceTerm::Kind::Atom:
        return store.new_atom(t.name);
    case SourceTerm::Kind::Int:
        return store.new_int(t.value);
    case SourceTerm::Kind::Compound: {
        std::vector<CellRef> args;
        args.reserve(t.args.size());
        for (const auto &a : t.args)
            args.push_back(build_term(store, a, vars));
        if (t.name == "." && args.size() == 2)
            return store.new_pair(args[0], args[1]);
        return store.new_compound(store.intern(t.name), args);
    }
    }
    return {};
}

BuiltLiteral build_literal(CellStore &store, std::string_view text)
{
    auto parsed = parse_term(text);
    auto parts = flatten_conjunction(parsed);
    bool equations = true;
    for (const auto &p : parts)
        if (!(p.is_compound("=", 2) && p.args[0].kind == SourceTerm::Kind::Var))
            equations = false;

    BuiltLiteral out;
    if (!equations) {
        if (parts.size() != 1)
            throw PrologError(PrologError::Kind::construction,
                              "a term literal is one term or a list of label equations");
        out.root = store.deref(build_term(store, parsed, out.variables));
        return out;
    }

    for (const auto &p : parts) {
        const auto &label = p.args[0].name;
        if (out.variables.count(label))
            throw PrologError(PrologError::Kind::construction, "duplicate label " + label);
        out.variables.emplace(label, store.new_var());
    }
    Trail scratch;
    for (const auto &p : parts) {
        const auto &label = p.args[0].name;
        if (p.args[1].kind == SourceTerm::Kind::Var)
            throw PrologError(PrologError::Kind::construction,
                              "label " + label + " is not defined by a term");
        auto body = build_term(store, p.args[1], out.variables);
        auto var = out.variables.at(label);
        store.bind(scratch, var, body);
        out.labels.emplace_back(label, var);
    }
    out.root = store.deref(out.labels.front().second);
    return out;
}

} // namespace cycletab
