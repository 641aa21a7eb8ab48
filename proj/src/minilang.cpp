#include "castsel/minilang.hpp"

#include "castsel/errors.hpp"
#include "castsel/random.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace castsel::minilang {

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t offset;
};

std::vector<Token> tokenize(std::string_view s) {
    static constexpr std::array<std::string_view, 7> two_char{"<=", ">=", "==", "!=", "&&", "||", ".."};
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
        } else if (c == '"') {
            ++i;
            while (i < s.size() && s[i] != '"' && s[i] != '\n') ++i;
            if (i >= s.size() || s[i] != '"') throw ParseError("unterminated string", start);
            ++i;
            out.push_back({Tok::String, std::string(s.substr(start, i - start)), start});
        } else {
            std::string_view rest = s.substr(i);
            bool matched = false;
            for (auto op : two_char) {
                if (rest.substr(0, 2) == op) {
                    out.push_back({Tok::Punct, std::string(op), start});
                    i += 2;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                static constexpr std::string_view singles = "+-*/%<>=!(){},;";
                if (singles.find(c) == std::string_view::npos) {
                    throw ParseError(std::string("unexpected character '") + c + "'", i);
                }
                out.push_back({Tok::Punct, std::string(1, c), start});
                ++i;
            }
        }
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

bool is_keyword(std::string_view w) {
    static constexpr std::array<std::string_view, 11> kw{"fn",  "let",    "if",    "else",  "while", "for",
                                                        "in",  "return", "print", "true",  "false"};
    for (auto k : kw)
        if (k == w) return true;
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

    Ast program() {
        Ast p{"program", "", {}};
        while (peek().kind != Tok::End) p.children.push_back(statement(true));
        return p;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + (peek().kind == Tok::End ? " (end of input)" : " near '" + peek().text + "'"),
                         peek().offset);
    }

    void expect_punct(std::string_view p) {
        if (!at_punct(p)) fail("expected '" + std::string(p) + "'");
        ++pos_;
    }
    void expect_word(std::string_view w) {
        if (!at_word(w)) fail("expected '" + std::string(w) + "'");
        ++pos_;
    }
    Ast identifier() {
        if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected identifier");
        return Ast{"identifier", toks_[pos_++].text, {}};
    }

    Ast block() {
        expect_punct("{");
        Ast b{"block", "", {}};
        while (!at_punct("}")) {
            if (peek().kind == Tok::End) fail("expected '}'");
            b.children.push_back(statement(false));
        }
        ++pos_;
        return b;
    }

    Ast statement(bool top_level) {
        if (at_word("fn")) {
            if (!top_level) fail("nested function definitions are not allowed");
            ++pos_;
            Ast f{"function_definition", "", {}};
            f.children.push_back(identifier());
            expect_punct("(");
            Ast params{"parameters", "", {}};
            if (!at_punct(")")) {
                params.children.push_back(identifier());
                while (at_punct(",")) {
                    ++pos_;
                    params.children.push_back(identifier());
                }
            }
            expect_punct(")");
            f.children.push_back(std::move(params));
            f.children.push_back(block());
            return f;
        }
        if (at_word("let")) {
            ++pos_;
            Ast s{"let_declaration", "", {}};
            s.children.push_back(identifier());
            expect_punct("=");
            s.children.push_back(expression());
            expect_punct(";");
            return s;
        }
        if (at_word("if")) {
            ++pos_;
            Ast s{"if_statement", "", {}};
            s.children.push_back(expression());
            s.children.push_back(block());
            if (at_word("else")) {
                ++pos_;
                Ast e{"else_clause", "", {}};
                e.children.push_back(block());
                s.children.push_back(std::move(e));
            }
            return s;
        }
        if (at_word("while")) {
            ++pos_;
            Ast s{"while_statement", "", {}};
            s.children.push_back(expression());
            s.children.push_back(block());
            return s;
        }
        if (at_word("for")) {
            ++pos_;
            Ast s{"for_statement", "", {}};
            s.children.push_back(identifier());
            expect_word("in");
            Ast range{"range_expression", "", {}};
            range.children.push_back(expression());
            expect_punct("..");
            range.children.push_back(expression());
            s.children.push_back(std::move(range));
            s.children.push_back(block());
            return s;
        }
        if (at_word("return")) {
            ++pos_;
            Ast s{"return_statement", "", {}};
            s.children.push_back(expression());
            expect_punct(";");
            return s;
        }
        if (at_word("print")) {
            ++pos_;
            Ast s{"print_statement", "", {}};
            s.children.push_back(arguments());
            expect_punct(";");
            return s;
        }
        if (peek().kind == Tok::Ident && peek(1).kind == Tok::Punct && peek(1).text == "=") {
            Ast s{"assignment", "", {}};
            s.children.push_back(identifier());
            ++pos_;
            s.children.push_back(expression());
            expect_punct(";");
            return s;
        }
        Ast s{"expression_statement", "", {}};
        s.children.push_back(expression());
        expect_punct(";");
        return s;
    }

    Ast arguments() {
        expect_punct("(");
        Ast args{"arguments", "", {}};
        if (!at_punct(")")) {
            args.children.push_back(expression());
            while (at_punct(",")) {
                ++pos_;
                args.children.push_back(expression());
            }
        }
        expect_punct(")");
        return args;
    }

    Ast expression() { return binary_level(0); }

    // Precedence levels, loosest first.
    static const std::vector<std::vector<std::string_view>>& levels() {
        static const std::vector<std::vector<std::string_view>> l{
            {"||"}, {"&&"}, {"<", ">", "<=", ">=", "==", "!="}, {"+", "-"}, {"*", "/", "%"}};
        return l;
    }

    Ast binary_level(std::size_t level) {
        if (level == levels().size()) return unary();
        Ast lhs = binary_level(level + 1);
        for (;;) {
            std::string op;
            if (peek().kind == Tok::Punct) {
                for (auto o : levels()[level])
                    if (peek().text == o) op = o;
            }
            if (op.empty()) return lhs;
            ++pos_;
            Ast rhs = binary_level(level + 1);
            Ast b{"binary_expression", "", {}};
            b.children.push_back(std::move(lhs));
            b.children.push_back(Ast{op, op, {}});
            b.children.push_back(std::move(rhs));
            lhs = std::move(b);
            // Comparisons do not chain.
            if (level == 2) return lhs;
        }
    }

    Ast unary() {
        if (at_punct("-") || at_punct("!")) {
            std::string op = toks_[pos_++].text;
            Ast u{"unary_expression", "", {}};
            u.children.push_back(Ast{op, op, {}});
            u.children.push_back(unary());
            return u;
        }
        return primary();
    }

    Ast primary() {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            ++pos_;
            return Ast{"number", t.text, {}};
        }
        if (t.kind == Tok::String) {
            ++pos_;
            return Ast{"string", t.text, {}};
        }
        if (at_word("true") || at_word("false")) {
            ++pos_;
            return Ast{"boolean", t.text, {}};
        }
        if (at_punct("(")) {
            ++pos_;
            Ast p{"parenthesized_expression", "", {}};
            p.children.push_back(expression());
            expect_punct(")");
            return p;
        }
        if (t.kind == Tok::Ident && !is_keyword(t.text)) {
            Ast id = identifier();
            if (at_punct("(")) {
                Ast call{"call_expression", "", {}};
                call.children.push_back(std::move(id));
                call.children.push_back(arguments());
                return call;
            }
            return id;
        }
        fail("expected expression");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printers

void print_expr(const Ast& e, std::string& out, bool python);

void print_args(const Ast& args, std::string& out, bool python) {
    out += '(';
    for (std::size_t i = 0; i < args.children.size(); ++i) {
        if (i) out += ", ";
        print_expr(args.children[i], out, python);
    }
    out += ')';
}

std::string python_op(const std::string& op) {
    if (op == "&&") return "and";
    if (op == "||") return "or";
    if (op == "/") return "//";
    return op;
}

void print_expr(const Ast& e, std::string& out, bool python) {
    if (e.type == "identifier" || e.type == "number" || e.type == "string") {
        out += e.value;
    } else if (e.type == "boolean") {
        out += python ? (e.value == "true" ? "True" : "False") : e.value;
    } else if (e.type == "parenthesized_expression") {
        out += '(';
        print_expr(e.children[0], out, python);
        out += ')';
    } else if (e.type == "binary_expression") {
        print_expr(e.children[0], out, python);
        out += ' ';
        out += python ? python_op(e.children[1].value) : e.children[1].value;
        out += ' ';
        print_expr(e.children[2], out, python);
    } else if (e.type == "unary_expression") {
        const std::string& op = e.children[0].value;
        out += (python && op == "!") ? "not " : op;
        print_expr(e.children[1], out, python);
    } else if (e.type == "call_expression") {
        out += e.children[0].value;
        print_args(e.children[1], out, python);
    } else {
        throw InvariantError("cannot print expression of type " + e.type);
    }
}

void indent(std::string& out, int depth, int width) { out.append(static_cast<std::size_t>(depth * width), ' '); }

void print_source_stmt(const Ast& s, std::string& out, int depth);

void print_source_block(const Ast& b, std::string& out, int depth) {
    out += "{\n";
    for (const Ast& s : b.children) print_source_stmt(s, out, depth + 1);
    indent(out, depth, 2);
    out += '}';
}

void print_source_stmt(const Ast& s, std::string& out, int depth) {
    indent(out, depth, 2);
    const auto& c = s.children;
    if (s.type == "function_definition") {
        out += "fn " + c[0].value;
        print_args(c[1], out, false);
        out += ' ';
        print_source_block(c[2], out, depth);
        out += '\n';
    } else if (s.type == "let_declaration" || s.type == "assignment") {
        if (s.type == "let_declaration") out += "let ";
        out += c[0].value + " = ";
        print_expr(c[1], out, false);
        out += ";\n";
    } else if (s.type == "if_statement") {
        out += "if ";
        print_expr(c[0], out, false);
        out += ' ';
        print_source_block(c[1], out, depth);
        if (c.size() > 2) {
            out += " else ";
            print_source_block(c[2].children[0], out, depth);
        }
        out += '\n';
    } else if (s.type == "while_statement") {
        out += "while ";
        print_expr(c[0], out, false);
        out += ' ';
        print_source_block(c[1], out, depth);
        out += '\n';
    } else if (s.type == "for_statement") {
        out += "for " + c[0].value + " in ";
        print_expr(c[1].children[0], out, false);
        out += "..";
        print_expr(c[1].children[1], out, false);
        out += ' ';
        print_source_block(c[2], out, depth);
        out += '\n';
    } else if (s.type == "return_statement") {
        out += "return ";
        print_expr(c[0], out, false);
        out += ";\n";
    } else if (s.type == "print_statement") {
        out += "print";
        print_args(c[0], out, false);
        out += ";\n";
    } else if (s.type == "expression_statement") {
        print_expr(c[0], out, false);
        out += ";\n";
    } else {
        throw InvariantError("cannot print statement of type " + s.type);
    }
}

void print_py_stmt(const Ast& s, std::string& out, int depth);

void print_py_block(const Ast& b, std::string& out, int depth) {
    if (b.children.empty()) {
        indent(out, depth, 4);
        out += "pass\n";
    }
    for (const Ast& s : b.children) print_py_stmt(s, out, depth);
}

void print_py_stmt(const Ast& s, std::string& out, int depth) {
    indent(out, depth, 4);
    const auto& c = s.children;
    if (s.type == "function_definition") {
        out += "def " + c[0].value;
        print_args(c[1], out, true);
        out += ":\n";
        print_py_block(c[2], out, depth + 1);
    } else if (s.type == "let_declaration" || s.type == "assignment") {
        out += c[0].value + " = ";
        print_expr(c[1], out, true);
        out += '\n';
    } else if (s.type == "if_statement") {
        out += "if ";
        print_expr(c[0], out, true);
        out += ":\n";
        print_py_block(c[1], out, depth + 1);
        if (c.size() > 2) {
            indent(out, depth, 4);
            out += "else:\n";
            print_py_block(c[2].children[0], out, depth + 1);
        }
    } else if (s.type == "while_statement") {
        out += "while ";
        print_expr(c[0], out, true);
        out += ":\n";
        print_py_block(c[1], out, depth + 1);
    } else if (s.type == "for_statement") {
        out += "for " + c[0].value + " in range(";
        print_expr(c[1].children[0], out, true);
        out += ", ";
        print_expr(c[1].children[1], out, true);
        out += "):\n";
        print_py_block(c[2], out, depth + 1);
    } else if (s.type == "return_statement") {
        out += "return ";
        print_expr(c[0], out, true);
        out += '\n';
    } else if (s.type == "print_statement") {
        out += "print";
        print_args(c[0], out, true);
        out += '\n';
    } else if (s.type == "expression_statement") {
        print_expr(c[0], out, true);
        out += '\n';
    } else {
        throw InvariantError("cannot print statement of type " + s.type);
    }
}

// ---------------------------------------------------------------------------
// Generator

class Generator {
public:
    Generator(std::mt19937_64& rng, const GeneratorOptions& opt) : rng_(rng), opt_(opt) {}

    Ast program() {
        Ast p{"program", "", {}};
        int n = 1 + pick(opt_.max_top_level);
        for (int i = 0; i < n; ++i) {
            if (chance(0.45)) {
                p.children.push_back(function());
            } else {
                p.children.push_back(statement(0));
            }
        }
        return p;
    }

private:
    int pick(int n) { return static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(n))); }
    bool chance(double p) { return uniform_unit(rng_) < p; }

    template <std::size_t N>
    std::string_view one_of(const std::array<std::string_view, N>& xs) {
        return xs[static_cast<std::size_t>(pick(static_cast<int>(N)))];
    }

    std::string name() {
        static constexpr std::array<std::string_view, 24> names{
            "x",     "y",     "n",      "i",       "acc",     "total",  "count",   "value",
            "left",  "right", "result", "limit",   "index",   "temp",   "buffer",  "offset",
            "score", "step",  "lo",     "hi",      "current", "prev",   "maximum", "accumulator"};
        return std::string(one_of(names));
    }
    std::string func_name() {
        static constexpr std::array<std::string_view, 14> names{
            "f",   "g",         "helper", "compute", "update_state", "gcd",  "fib",
            "sum", "scale_all", "check",  "clamp",   "normalize",    "step", "merge_sorted"};
        return std::string(one_of(names));
    }

    Ast ident() { return Ast{"identifier", name(), {}}; }

    Ast literal() {
        int r = pick(10);
        if (r < 7) return Ast{"number", std::to_string(pick(r < 5 ? 10 : 1000)), {}};
        if (r < 9) {
            static constexpr std::array<std::string_view, 5> s{"\"ok\"", "\"done\"", "\"error\"", "\"x\"",
                                                               "\"value is\""};
            return Ast{"string", std::string(one_of(s)), {}};
        }
        return Ast{"boolean", chance(0.5) ? "true" : "false", {}};
    }

    Ast expr(int depth) {
        if (depth >= opt_.max_expr_depth || chance(0.3)) {
            return chance(0.55) ? ident() : literal();
        }
        int r = pick(10);
        if (r < 5) {
            static constexpr std::array<std::string_view, 5> arith{"+", "-", "*", "/", "%"};
            std::string op(r < 3 ? one_of(arith) : std::string_view(r == 3 ? "+" : "*"));
            return binary(op, depth);
        }
        if (r < 7) {
            Ast call{"call_expression", "", {Ast{"identifier", func_name(), {}}}};
            Ast args{"arguments", "", {}};
            int nargs = pick(3) + (r == 5 ? 1 : 0);
            for (int i = 0; i < nargs; ++i) args.children.push_back(expr(depth + 1));
            call.children.push_back(std::move(args));
            return call;
        }
        if (r < 8) {
            Ast p{"parenthesized_expression", "", {}};
            p.children.push_back(binary(chance(0.5) ? "+" : "-", depth + 1));
            return p;
        }
        if (r < 9) {
            Ast u{"unary_expression", "", {}};
            u.children.push_back(Ast{"-", "-", {}});
            u.children.push_back(chance(0.5) ? ident() : literal());
            return u;
        }
        return chance(0.5) ? ident() : literal();
    }

    Ast binary(const std::string& op, int depth) {
        Ast b{"binary_expression", "", {}};
        b.children.push_back(operand(depth + 1));
        b.children.push_back(Ast{op, op, {}});
        b.children.push_back(operand(depth + 1));
        return b;
    }

    // Nested binary operands are always parenthesized so the printed source
    // parses back to the same tree.
    Ast operand(int depth) {
        Ast e = expr(depth);
        if (e.type == "binary_expression") {
            Ast p{"parenthesized_expression", "", {}};
            p.children.push_back(std::move(e));
            return p;
        }
        return e;
    }

    Ast condition(int depth) {
        static constexpr std::array<std::string_view, 6> cmp{"<", ">", "<=", ">=", "==", "!="};
        Ast c{"binary_expression", "", {}};
        c.children.push_back(operand(depth + 1));
        std::string op(one_of(cmp));
        c.children.push_back(Ast{op, op, {}});
        c.children.push_back(operand(depth + 1));
        if (chance(0.2)) {
            Ast both{"binary_expression", "", {}};
            both.children.push_back(std::move(c));
            std::string lop = chance(0.5) ? "&&" : "||";
            both.children.push_back(Ast{lop, lop, {}});
            Ast other{"binary_expression", "", {}};
            other.children.push_back(ident());
            std::string op2(one_of(cmp));
            other.children.push_back(Ast{op2, op2, {}});
            other.children.push_back(literal());
            both.children.push_back(std::move(other));
            return both;
        }
        return c;
    }

    Ast block(int nesting) {
        Ast b{"block", "", {}};
        int n = 1 + pick(opt_.max_block_statements);
        for (int i = 0; i < n; ++i) b.children.push_back(statement(nesting));
        return b;
    }

    Ast function() {
        Ast f{"function_definition", "", {Ast{"identifier", func_name(), {}}}};
        Ast params{"parameters", "", {}};
        int np = pick(4);
        for (int i = 0; i < np; ++i) params.children.push_back(ident());
        f.children.push_back(std::move(params));
        Ast body = block(1);
        if (chance(0.7)) {
            body.children.push_back(Ast{"return_statement", "", {expr(1)}});
        }
        f.children.push_back(std::move(body));
        return f;
    }

    Ast statement(int nesting) {
        int r = pick(nesting >= opt_.max_nesting ? 5 : 9);
        switch (r) {
        case 0:
        case 1:
            return Ast{"let_declaration", "", {ident(), expr(0)}};
        case 2:
            return Ast{"assignment", "", {ident(), expr(0)}};
        case 3: {
            Ast p{"print_statement", "", {}};
            Ast args{"arguments", "", {}};
            int n = 1 + pick(2);
            for (int i = 0; i < n; ++i) args.children.push_back(expr(1));
            p.children.push_back(std::move(args));
            return p;
        }
        case 4: {
            Ast call{"call_expression", "", {Ast{"identifier", func_name(), {}}}};
            Ast args{"arguments", "", {}};
            int n = pick(3);
            for (int i = 0; i < n; ++i) args.children.push_back(expr(1));
            call.children.push_back(std::move(args));
            return Ast{"expression_statement", "", {std::move(call)}};
        }
        case 5:
        case 6: {
            Ast s{"if_statement", "", {condition(0), block(nesting + 1)}};
            if (chance(0.4)) s.children.push_back(Ast{"else_clause", "", {block(nesting + 1)}});
            return s;
        }
        case 7:
            return Ast{"while_statement", "", {condition(0), block(nesting + 1)}};
        default: {
            Ast range{"range_expression", "", {}};
            range.children.push_back(chance(0.6) ? Ast{"number", "0", {}} : expr(2));
            range.children.push_back(chance(0.5) ? ident() : expr(1));
            return Ast{"for_statement", "", {ident(), std::move(range), block(nesting + 1)}};
        }
        }
    }

    std::mt19937_64& rng_;
    const GeneratorOptions& opt_;
};

} // namespace

Ast parse(std::string_view source) { return Parser(source).program(); }

TypedTree to_typed_tree(const Ast& ast) {
    TreeBuilder b;
    std::vector<std::pair<const Ast*, NodeId>> stack;
    stack.emplace_back(&ast, b.add_root(ast.type));
    while (!stack.empty()) {
        auto [a, id] = stack.back();
        stack.pop_back();
        std::vector<NodeId> ids;
        ids.reserve(a->children.size());
        for (const Ast& c : a->children) ids.push_back(b.add_child(id, c.type));
        for (std::size_t i = a->children.size(); i-- > 0;) stack.emplace_back(&a->children[i], ids[i]);
    }
    return std::move(b).build();
}

std::string print_source(const Ast& program) {
    std::string out;
    for (const Ast& s : program.children) print_source_stmt(s, out, 0);
    return out;
}

std::string print_pylite(const Ast& program) {
    std::string out;
    for (const Ast& s : program.children) print_py_stmt(s, out, 0);
    return out;
}

Ast generate_program(std::mt19937_64& rng, const GeneratorOptions& options) {
    return Generator(rng, options).program();
}

} // namespace castsel::minilang

namespace castsel {

TypedTree MinilangAdapter::parse(std::string_view source, std::string_view) const {
    return minilang::to_typed_tree(minilang::parse(source));
}

} // namespace castsel
