#include "doctest.h"
#include "generators.hpp"
#include "workcell/sl.hpp"

using namespace workcell::sl;

namespace {

std::optional<std::size_t> error_position(std::string_view text) {
    try {
        parse_content(text);
    } catch (const SyntaxError& e) {
        return e.position();
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("frames keep slot order") {
    auto t = parse_content("(Casing :color red :position A3)");
    Frame expected{"Casing", {{"color", Atom{"red"}}, {"position", Atom{"A3"}}}};
    CHECK(t == Node(expected));
    CHECK(print_content(t) == "(Casing :color red :position A3)");
    CHECK(print_content(Frame{"Casing", {{"color", Atom{"red"}}}}) == "(Casing :color red)");
    CHECK(t.as<Frame>().find("position")->as<Atom>().symbol == "A3");
    CHECK(t.as<Frame>().find("size") == nullptr);
}

TEST_CASE("actions nest frames") {
    const char* text =
        "(action (agent-identifier :name pump) (Pump-Building-Operation :order (Pump-Customer-Order :color blue "
        ":power 5 :amount 3)))";
    auto t = parse_content(text);
    REQUIRE(t.is<Action>());
    const auto& a = t.as<Action>();
    CHECK(a.actor == "pump");
    CHECK(a.act.name == "Pump-Building-Operation");
    const auto& order = a.act.find("order")->as<Frame>();
    CHECK(order.name == "Pump-Customer-Order");
    CHECK(order.find("amount")->as<Int>().value == 3);
    CHECK(print_content(t) == text);
}

TEST_CASE("whitespace between tokens is insignificant") {
    auto a = parse_content("  ( Casing\n\t:color   red )  ");
    CHECK(a == parse_content("(Casing :color red)"));
    CHECK(parse_content("(sequence 1 2\n3)") == Node(Seq{{Int{1}, Int{2}, Int{3}}}));
}

TEST_CASE("scalars") {
    CHECK(parse_content("3") == Node(Int{3}));
    CHECK(parse_content("3.0") == Node(Float{3.0}));
    CHECK_FALSE(parse_content("3") == parse_content("3.0"));
    CHECK(parse_content("-12") == Node(Int{-12}));
    CHECK(print_content(Int{-12}) == "-12");
    CHECK(print_content(Int{12}) == "12");
    CHECK(print_content(Float{2.5}) == "2.5");
    CHECK(print_content(Float{-3}) == "-3.0");
    CHECK(parse_content(R"("say \"hi\" \\ bye")") == Node(Str{R"(say "hi" \ bye)"}));
    CHECK(print_content(Str{R"(a"b\c)"}) == R"("a\"b\\c")");
    CHECK(parse_content("(sequence)") == Node(Seq{}));
    CHECK(print_content(Seq{{Atom{"a"}, Str{"b"}}}) == R"((sequence a "b"))");
    CHECK(parse_content("Pump-Order") == Node(Atom{"Pump-Order"}));
    CHECK(parse_content("(Robot)") == Node(Frame{"Robot", {}}));
}

TEST_CASE("syntax errors carry a position") {
    CHECK(error_position("(Casing :color") == std::size_t{14});
    CHECK(error_position("").has_value());
    CHECK(error_position("(Casing :color red") == std::size_t{18});
    CHECK(error_position("(Casing color red)").has_value());
    CHECK(error_position("(Casing : color red)").has_value());
    CHECK(error_position("(Casing :color red :color blue)").has_value());
    CHECK(error_position("(Casing :color red))").has_value());
    CHECK(error_position("red blue").has_value());
    CHECK(error_position("\"open").has_value());
    CHECK(error_position(R"("bad \n escape")").has_value());
    CHECK(error_position("1.").has_value());
    CHECK(error_position("--1").has_value());
    CHECK(error_position("99999999999999999999").has_value());
    CHECK(error_position("(1 :a b)").has_value());
    CHECK(error_position("(action (agent-identifier :name pump))").has_value());
    CHECK(error_position("(action (agent-identifier :nam pump) (X))").has_value());
    CHECK(error_position("(action (agent-identifier :name pump) x)").has_value());
    CHECK(error_position("(sequence :a 1)").has_value());
    CHECK(error_position("(Casing :color red)x").has_value());
    CHECK(error_position("9abc").has_value());

    try {
        parse_content("(Casing :color");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK_FALSE(e.expected().empty());
    }
}

TEST_CASE("nesting depth is bounded") {
    std::string deep;
    for (std::size_t i = 0; i < max_nesting_depth + 10; ++i) deep += "(sequence ";
    for (std::size_t i = 0; i < max_nesting_depth + 10; ++i) deep += ")";
    CHECK(error_position(deep).has_value());

    std::string ok;
    for (int i = 0; i < 100; ++i) ok += "(sequence ";
    for (int i = 0; i < 100; ++i) ok += ")";
    CHECK_NOTHROW(parse_content(ok));
}

TEST_CASE("property: parse after print is identity") {
    gen::Gen g(0x51);
    for (int i = 0; i < 2000; ++i) {
        Node t = g.node(4);
        std::string text = print_content(t);
        INFO(text);
        Node back = parse_content(text);
        CHECK(back == t);
        CHECK(print_content(back) == text);
        CHECK(text.back() != ' ');
    }
}

TEST_CASE("property: fuzzed input yields a tree or a SyntaxError") {
    gen::Gen g(0xf022);
    const std::string alphabet = "()::\"\\ \t\nabcXYZ-0123456789.sequenceactionagent-identifier";
    int trees = 0;
    int errors = 0;
    for (int i = 0; i < 10000; ++i) {
        std::string s;
        if (i % 2 == 0) {
            s = print_content(g.node(3));
            auto edits = g.uniform(1, 3);
            for (std::int64_t e = 0; e < edits && !s.empty(); ++e) {
                auto pos = static_cast<std::size_t>(g.uniform(0, s.size() - 1));
                switch (g.uniform(0, 2)) {
                    case 0: s.erase(pos, 1); break;
                    case 1: s.insert(pos, 1, alphabet[g.uniform(0, alphabet.size() - 1)]); break;
                    default: s[pos] = alphabet[g.uniform(0, alphabet.size() - 1)]; break;
                }
            }
        } else {
            auto len = g.uniform(0, 40);
            for (std::int64_t k = 0; k < len; ++k) s += alphabet[g.uniform(0, alphabet.size() - 1)];
        }
        try {
            Node t = parse_content(s);
            ++trees;
            std::string printed = print_content(t);
            CHECK(print_content(parse_content(printed)) == printed);
        } catch (const SyntaxError& e) {
            ++errors;
            CHECK(e.position() <= s.size());
        }
    }
    CHECK(trees + errors == 10000);
    CHECK(trees > 100);
    CHECK(errors > 100);
}
