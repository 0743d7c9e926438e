#pragma once

// Random schema-valid typed values over a finalized registry.

#include "generators.hpp"
#include "workcell/ontology.hpp"

namespace gen {

class OntoGen {
public:
    OntoGen(Gen& g, const workcell::onto::OntologyRegistry& reg) : g_(g), reg_(reg) {
        for (const auto& n : reg.schema_names()) {
            if (reg.find_concept(n)) concepts_.push_back(n);
            if (reg.find_action(n)) actions_.push_back(n);
        }
    }

    // A concept that is-a `base`, possibly `base` itself.
    std::string subtype_of(const std::string& base) {
        std::vector<std::string> subs;
        for (const auto& c : concepts_)
            if (reg_.is_a(c, base)) subs.push_back(c);
        return g_.pick(subs);
    }

    workcell::onto::TypedFrame frame(const std::string& schema, int depth = 0) {
        namespace onto = workcell::onto;
        onto::TypedFrame f(schema);
        for (const auto& s : reg_.all_slots(schema)) {
            if (!s.mandatory && g_.chance(0.5)) continue;
            if (s.list) {
                onto::Value::List items;
                auto cap = std::min<std::size_t>(s.max_items, 4);
                auto n = g_.uniform(0, static_cast<std::int64_t>(cap));
                for (std::int64_t i = 0; i < n; ++i) items.push_back(element(s.type, depth));
                f.set(s.name, onto::Value::list(std::move(items)));
            } else {
                f.set(s.name, element(s.type, depth));
            }
        }
        return f;
    }

    workcell::onto::TypedAction action() {
        namespace onto = workcell::onto;
        const auto* schema = reg_.find_action(g_.pick(actions_));
        onto::TypedAction a{schema->name, g_.symbol(), {}};
        for (const auto& in : schema->inputs) a.inputs.emplace(in.slot, frame(subtype_of(in.concept_name)));
        return a;
    }

    const std::vector<std::string>& concepts() const { return concepts_; }
    const std::vector<std::string>& actions() const { return actions_; }

private:
    workcell::onto::Value element(const workcell::onto::ElementType& t, int depth) {
        namespace onto = workcell::onto;
        if (const auto* ref = std::get_if<onto::ConceptRef>(&t))
            return onto::Value::frame(frame(subtype_of(ref->schema), depth + 1));
        switch (std::get<onto::Primitive>(t)) {
            case onto::Primitive::string: return onto::Value::string(g_.text());
            case onto::Primitive::integer: return onto::Value::integer(g_.integer());
            case onto::Primitive::symbol: return onto::Value::symbol(g_.symbol());
        }
        return onto::Value::string("");
    }

    Gen& g_;
    const workcell::onto::OntologyRegistry& reg_;
    std::vector<std::string> concepts_;
    std::vector<std::string> actions_;
};

}  // namespace gen
