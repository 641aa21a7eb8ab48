#include <doctest.h>

#include "castsel/errors.hpp"
#include "castsel/minilang.hpp"

using namespace castsel;

TEST_CASE("minilang: values are dropped from the typed tree") {
    MinilangAdapter a;
    auto t1 = a.parse("let x = 1;", "minilang");
    auto t2 = a.parse("let total = 42;", "minilang");
    CHECK(to_sexpr(t1) == "(program (let_declaration (identifier) (number)))");
    CHECK(t1 == t2);
}

TEST_CASE("minilang: operators are node types") {
    MinilangAdapter a;
    auto plus = to_sexpr(a.parse("x = a + b;", "minilang"));
    auto minus = to_sexpr(a.parse("x = a - b;", "minilang"));
    CHECK(plus != minus);
    CHECK(plus.find("(+)") != std::string::npos);
}

TEST_CASE("minilang: precedence shapes the tree") {
    MinilangAdapter a;
    auto t = to_sexpr(a.parse("x = a + b * c;", "minilang"));
    // the multiplication nests under the addition
    CHECK(t == "(program (assignment (identifier) (binary_expression (identifier) (+) "
               "(binary_expression (identifier) (*) (identifier)))))");
}

TEST_CASE("minilang: statements") {
    auto src = R"(fn f(a, b) {
  if a < b { return a; } else { return b; }
}
let s = 0;
for i in 0..10 { s = s + f(i, 3); }
while s > 0 { s = s - 1; }
print(s);
)";
    auto ast = minilang::parse(src);
    REQUIRE(ast.children.size() == 5);
    CHECK(ast.children[0].type == "function_definition");
    CHECK(ast.children[2].type == "for_statement");
    CHECK(ast.children[4].type == "print_statement");
}

TEST_CASE("minilang: syntax errors carry offsets") {
    try {
        minilang::parse("let x = ;");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 8);
    }
    CHECK_THROWS_AS(minilang::parse("let x = 1"), ParseError);
    CHECK_THROWS_AS(minilang::parse("fn (a) {}"), ParseError);
}

TEST_CASE("minilang: printed programs reparse to the same tree") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        auto ast = minilang::generate_program(rng);
        auto text = minilang::print_source(ast);
        auto again = minilang::parse(text);
        CHECK(to_sexpr(minilang::to_typed_tree(again)) == to_sexpr(minilang::to_typed_tree(ast)));
        CHECK(minilang::print_source(again) == text);
    }
}

TEST_CASE("minilang: pylite rendering") {
    auto ast = minilang::parse("let ok = !a && b || c / 2 == 1;\nif ok { print(true); } else { }\n");
    auto py = minilang::print_pylite(ast);
    CHECK(py.find("not a and b or c // 2 == 1") != std::string::npos);
    CHECK(py.find("print(True)") != std::string::npos);
    CHECK(py.find("pass") != std::string::npos);
}
