#include <fstream>
#include <sstream>

#include "doctest.h"
#include "onto_gen.hpp"
#include "workcell/ontology.hpp"

using namespace workcell;
using namespace workcell::onto;

namespace {

const OntologyRegistry& cs() {
    static const OntologyRegistry reg = build_case_study_ontology();
    return reg;
}

std::optional<OntologyErrc> error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const OntologyError& e) {
        return e.code();
    }
    return std::nullopt;
}

std::vector<ViolationKind> kinds(const std::vector<Violation>& vs) {
    std::vector<ViolationKind> out;
    for (const auto& v : vs) out.push_back(v.kind);
    return out;
}

Checked<TypedFrame> check(std::string_view text, std::optional<std::string_view> expected = std::nullopt) {
    return validate_frame(cs(), sl::parse_content(text), expected);
}

std::string pump_order_text(std::int64_t amount = 3) {
    return "(Pump-Order :casing (Casing :color blue :position A1) :motor (Electrical-Motor :power 5 :position A2) "
           ":shaft (Shaft :material steel :position A3) :impeller (Impeller :type closed :position A4) :aid pump-1 "
           ":amount " +
           std::to_string(amount) + ")";
}

}  // namespace

TEST_CASE("registration rules") {
    OntologyRegistry reg("test");
    reg.register_schema(ConceptSchema{"Casing", {}, {primitive_slot("color", Primitive::symbol)}});
    CHECK(error_of([&] { reg.register_schema(ConceptSchema{"Casing", {}, {}}); }) == OntologyErrc::duplicate_name);
    CHECK(error_of([&] { reg.register_schema(ActionSchema{"Casing", {}, "customer"}); }) ==
          OntologyErrc::duplicate_name);

    OntologyRegistry dangling("test");
    dangling.register_schema(ConceptSchema{"Pump-Order", "Pump", {primitive_slot("amount", Primitive::integer)}});
    CHECK(error_of([&] { dangling.finalize(); }) == OntologyErrc::dangling_reference);

    OntologyRegistry late("test");
    late.register_schema(ConceptSchema{"Pump-Order", "Pump", {primitive_slot("amount", Primitive::integer)}});
    late.register_schema(ConceptSchema{"Pump", {}, {primitive_slot("aid", Primitive::symbol)}});
    CHECK_NOTHROW(late.finalize());
    CHECK(late.is_a("Pump-Order", "Pump"));
    CHECK(error_of([&] { late.register_schema(ConceptSchema{"Robot", {}, {}}); }) == OntologyErrc::already_finalized);

    OntologyRegistry cyclic("test");
    cyclic.register_schema(ConceptSchema{"A", "B", {}});
    cyclic.register_schema(ConceptSchema{"B", "A", {}});
    CHECK(error_of([&] { cyclic.finalize(); }) == OntologyErrc::cyclic_inheritance);

    OntologyRegistry shadow("test");
    shadow.register_schema(ConceptSchema{"A", {}, {primitive_slot("x", Primitive::integer)}});
    shadow.register_schema(ConceptSchema{"B", "A", {primitive_slot("x", Primitive::integer)}});
    CHECK(error_of([&] { shadow.finalize(); }) == OntologyErrc::slot_collision);

    OntologyRegistry bad_input("test");
    bad_input.register_schema(ActionSchema{"Do", {{"what", "Nothing"}}, "customer"});
    CHECK(error_of([&] { bad_input.finalize(); }) == OntologyErrc::dangling_reference);

    OntologyRegistry not_done("test");
    not_done.register_schema(ConceptSchema{"A", {}, {}});
    CHECK(error_of([&] { validate_frame(not_done, sl::parse_content("(A)")); }) == OntologyErrc::not_finalized);
}

TEST_CASE("case-study inventory") {
    const std::vector<std::string> concepts{
        "Pump-Customer-Order", "Compressor-Customer-Order", "Casing", "Electrical-Motor", "Shaft", "Impeller",
        "Female-Rotor", "Male-Rotor", "Pump", "Compressor", "Pump-Order", "Compressor-Order", "Operations-List",
        "Pump-Manufacturing-Order", "Compressor-Manufacturing-Order", "Worker", "Robot"};
    const std::vector<std::string> predicates{"Is-a", "Has-a", "Applies-a"};
    const std::vector<std::string> actions{
        "Pump-Building-Operation",       "Compressor-Building-Operation",      "Pump-Manufacturing-Operation",
        "Compressor-Manufacturing-Operation", "Pump-Pick-And-Place-Operation", "Compressor-Pick-And-Place-Operation",
        "Pump-Assembly-Operation",       "Compressor-Assembly-Operation"};
    const auto& reg = cs();
    CHECK(reg.name() == "cooperative-workcell");
    CHECK(reg.finalized());
    for (const auto& c : concepts) CHECK_MESSAGE(reg.find_concept(c), c);
    for (const auto& p : predicates) CHECK_MESSAGE(reg.find_predicate(p), p);
    for (const auto& a : actions) CHECK_MESSAGE(reg.find_action(a), a);
    CHECK(reg.concept_count() == concepts.size());
    CHECK(reg.predicate_count() == 3);
    CHECK(reg.action_count() == 8);

    auto slot_names = [&](const std::string& c) {
        std::vector<std::string> out;
        for (const auto& s : reg.all_slots(c)) out.push_back(s.name);
        return out;
    };
    using V = std::vector<std::string>;
    CHECK(slot_names("Pump-Customer-Order") == V{"color", "power", "amount", "aid"});
    CHECK(slot_names("Compressor-Customer-Order") == V{"color", "power", "amount", "aid"});
    CHECK(slot_names("Casing") == V{"color", "position"});
    CHECK(slot_names("Pump") == V{"casing", "motor", "shaft", "impeller", "aid"});
    CHECK(slot_names("Compressor") == V{"casing", "motor", "female-rotor", "male-rotor", "aid"});
    CHECK(slot_names("Pump-Order") == V{"casing", "motor", "shaft", "impeller", "aid", "amount"});
    CHECK(slot_names("Worker") == V{"aid", "workstation"});
    CHECK(slot_names("Robot") == V{"aid"});
    CHECK(reg.all_slots("Operations-List").at(0).max_items == 3);

    const auto* pick = reg.find_action("Pump-Pick-And-Place-Operation");
    REQUIRE(pick->inputs.size() == 2);
    CHECK(pick->inputs[0].concept_name == "Pump-Order");
    CHECK(pick->inputs[1].concept_name == "Worker");

    auto dump = reg.dump();
    auto dump_lines = std::count(dump.begin(), dump.end(), '\n');
    CHECK(dump_lines == 28);
    std::ifstream golden(WORKCELL_GOLDEN_DIR "/ontology.dump");
    std::stringstream text;
    text << golden.rdbuf();
    CHECK(reg.dump() == text.str());
}

TEST_CASE("is_a and the three predicates") {
    const auto& reg = cs();
    CHECK(reg.is_a("Pump-Order", "Pump"));
    CHECK_FALSE(reg.is_a("Pump", "Compressor"));
    CHECK_FALSE(reg.is_a("Pump", "Pump-Order"));
    CHECK(reg.is_a("Casing", "Casing"));
    CHECK(error_of([&] { reg.is_a("Pump", "Valve"); }) == OntologyErrc::unknown_schema);
    CHECK(error_of([&] { reg.is_a("Valve", "Pump"); }) == OntologyErrc::unknown_schema);

    CHECK(reg.holds("Is-a", "Compressor-Order", "Compressor"));
    CHECK(reg.holds("Has-a", "Pump", "Casing"));
    CHECK(reg.holds("Has-a", "Pump-Order", "Impeller"));
    CHECK(reg.holds("Has-a", "Casing", "color"));
    CHECK_FALSE(reg.holds("Has-a", "Pump", "Male-Rotor"));
    CHECK(reg.holds("Applies-a", "customer", "Pump-Building-Operation"));
    CHECK(reg.holds("Applies-a", "product", "Compressor-Manufacturing-Operation"));
    CHECK(reg.holds("Applies-a", "order", "Pump-Pick-And-Place-Operation"));
    CHECK_FALSE(reg.holds("Applies-a", "customer", "Pump-Assembly-Operation"));
    CHECK(error_of([&] { reg.holds("Owns-a", "a", "b"); }) == OntologyErrc::unknown_schema);

    // Every pair terminates.
    for (const auto& a : reg.schema_names())
        for (const auto& b : reg.schema_names())
            if (reg.find_concept(a) && reg.find_concept(b)) (void)reg.is_a(a, b);
}

TEST_CASE("validate_frame") {
    auto ok = check("(Casing :color red :position A3)", "Casing");
    REQUIRE(ok.ok());
    CHECK(ok.value->at("color").as_symbol() == "red");
    CHECK(ok.value->at("position").as_symbol() == "A3");

    auto missing = check("(Casing :position A3)");
    CHECK_FALSE(missing.ok());
    REQUIRE(missing.violations.size() == 1);
    CHECK(missing.violations[0].kind == ViolationKind::missing_mandatory_slot);
    CHECK(missing.violations[0].path == "Casing.color");

    CHECK(check(pump_order_text(), "Pump").ok());
    auto wrong = check(pump_order_text(), "Compressor");
    CHECK(kinds(wrong.violations) == std::vector{ViolationKind::expected_mismatch});
    auto narrower = check("(Pump :casing (Casing :color blue :position A1) :motor (Electrical-Motor :power 5 "
                          ":position A2) :shaft (Shaft :material steel :position A3) :impeller (Impeller :type closed "
                          ":position A4) :aid p)",
                          "Pump-Order");
    CHECK(kinds(narrower.violations) == std::vector{ViolationKind::expected_mismatch});

    CHECK(kinds(check("(Valve :size 3)").violations) == std::vector{ViolationKind::unknown_schema});
    CHECK(kinds(check("(Casing :color red :position A3 :weight 4)").violations) ==
          std::vector{ViolationKind::unknown_slot});
    CHECK(kinds(check("(Electrical-Motor :power strong :position A2)").violations) ==
          std::vector{ViolationKind::kind_mismatch});
    CHECK(kinds(check("(Casing :color \"red\" :position A3)").violations) == std::vector{ViolationKind::kind_mismatch});
    CHECK(kinds(check("(Worker :aid (Robot :aid r) :workstation WS1)").violations) ==
          std::vector{ViolationKind::kind_mismatch});
    CHECK(kinds(check("red").violations) == std::vector{ViolationKind::kind_mismatch});

    // A shaft where a casing belongs.
    auto misplaced = check("(Pump :casing (Shaft :material steel :position A1) :motor (Electrical-Motor :power 5 "
                           ":position A2) :shaft (Shaft :material steel :position A3) :impeller (Impeller :type closed "
                           ":position A4) :aid p)");
    CHECK(kinds(misplaced.violations) == std::vector{ViolationKind::kind_mismatch});
}

TEST_CASE("operations list holds at most three entries") {
    CHECK(check("(Operations-List :operations (sequence))").ok());
    CHECK(check("(Operations-List :operations (sequence a))").ok());
    CHECK(check("(Operations-List :operations (sequence a b c))").ok());
    auto four = check("(Operations-List :operations (sequence a b c d))");
    CHECK(kinds(four.violations) == std::vector{ViolationKind::kind_mismatch});
    CHECK(kinds(check("(Operations-List :operations (sequence a 2))").violations) ==
          std::vector{ViolationKind::kind_mismatch});
    CHECK(kinds(check("(Operations-List :operations a)").violations) == std::vector{ViolationKind::kind_mismatch});
}

TEST_CASE("decode_action") {
    auto a = decode_action(cs(), sl::parse_content("(action (agent-identifier :name pump) (Pump-Building-Operation "
                                                   ":order (Pump-Customer-Order :color blue :power 5 :amount 3 "
                                                   ":aid customer-1)))"));
    REQUIRE(a.ok());
    CHECK(a.value->schema == "Pump-Building-Operation");
    CHECK(a.value->actor == "pump");
    CHECK(a.value->input("order").at("amount").as_integer() == 3);

    auto wrong = decode_action(cs(), sl::parse_content("(action (agent-identifier :name pump) (Pump-Building-Operation "
                                                       ":order (Compressor-Customer-Order :color blue :power 5 "
                                                       ":amount 3 :aid customer-1)))"));
    CHECK(kinds(wrong.violations) == std::vector{ViolationKind::kind_mismatch});

    CHECK(kinds(decode_action(cs(), sl::parse_content("(Casing :color red :position A3)")).violations) ==
          std::vector{ViolationKind::not_an_action});
    CHECK(kinds(decode_action(cs(), sl::parse_content("(action (agent-identifier :name x) (Fly))")).violations) ==
          std::vector{ViolationKind::unknown_schema});
    CHECK(kinds(decode_action(cs(), sl::parse_content("(action (agent-identifier :name x) (Pump-Assembly-Operation))"))
                    .violations) == std::vector{ViolationKind::missing_mandatory_slot});
    CHECK(kinds(decode_action(cs(), sl::parse_content("(action (agent-identifier :name x) (Pump-Assembly-Operation "
                                                      ":order " +
                                                      pump_order_text() + " :urgent (Robot :aid r)))"))
                    .violations) == std::vector{ViolationKind::unknown_slot});
    CHECK(kinds(decode_action(cs(), sl::parse_content("(action (agent-identifier :name x) (Pump-Assembly-Operation "
                                                      ":order 7))"))
                    .violations) == std::vector{ViolationKind::kind_mismatch});
}

TEST_CASE("encoding follows schema order") {
    TypedFrame casing("Casing");
    casing.set("position", Value::symbol("A3")).set("color", Value::symbol("red"));
    CHECK(sl::print_content(encode_frame(cs(), casing)) == "(Casing :color red :position A3)");

    auto pump = check(pump_order_text());
    REQUIRE(pump.ok());
    auto tree = encode_frame(cs(), *pump.value);
    std::vector<std::string> parts;
    for (const auto& s : tree.as<sl::Frame>().slots)
        if (const auto* f = s.value.get_if<sl::Frame>()) parts.push_back(f->name);
    CHECK(parts == std::vector<std::string>{"Casing", "Electrical-Motor", "Shaft", "Impeller"});
    CHECK(sl::print_content(tree) == pump_order_text());
}

TEST_CASE("property: decode inverts encode") {
    gen::Gen g(0x0e7);
    gen::OntoGen og(g, cs());
    for (int i = 0; i < 1000; ++i) {
        auto a = og.action();
        auto tree = encode_action(cs(), a);
        // Through text as well, as the holons see it.
        auto text = sl::print_content(tree);
        INFO(text);
        auto back = decode_action(cs(), sl::parse_content(text));
        REQUIRE(back.ok());
        CHECK(*back.value == a);
    }
    for (int i = 0; i < 1000; ++i) {
        auto f = og.frame(g.pick(og.concepts()));
        auto back = validate_frame(cs(), encode_frame(cs(), f), f.schema);
        REQUIRE(back.ok());
        CHECK(*back.value == f);
    }
}

TEST_CASE("property: k seeded defects give at least k violations") {
    gen::Gen g(0xdef);
    const std::vector<std::string> part_slots{"casing", "motor", "shaft", "impeller"};
    for (int round = 0; round < 300; ++round) {
        auto tree = sl::parse_content(pump_order_text());
        auto& root = std::get<sl::Frame>(tree.value);
        auto k = g.uniform(0, 4);
        std::vector<std::string> chosen = part_slots;
        std::shuffle(chosen.begin(), chosen.end(), g.engine());
        chosen.resize(static_cast<std::size_t>(k));
        for (const auto& name : chosen) {
            for (auto& s : root.slots) {
                if (s.name != name) continue;
                auto& part = std::get<sl::Frame>(s.value.value);
                switch (g.uniform(0, 2)) {
                    case 0: part.slots.pop_back(); break;  // drops position
                    case 1: part.slots.push_back({"extra", sl::integer(1)}); break;
                    default: part.slots.back().value = sl::integer(9); break;  // position must be a symbol
                }
            }
        }
        auto r = validate_frame(cs(), tree);
        CHECK(r.violations.size() >= static_cast<std::size_t>(k));
        CHECK(r.ok() == (k == 0));
        for (const auto& v : r.violations) CHECK_FALSE(v.path.empty());
    }
}
