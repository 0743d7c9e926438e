#include "workcell/ontology.hpp"

#include <algorithm>
#include <set>

namespace workcell::onto {

SlotSpec primitive_slot(std::string name, Primitive p, bool mandatory) {
    return SlotSpec{std::move(name), p, false, unbounded, mandatory};
}

SlotSpec concept_slot(std::string name, std::string schema, bool mandatory) {
    return SlotSpec{std::move(name), ConceptRef{std::move(schema)}, false, unbounded, mandatory};
}

SlotSpec list_slot(std::string name, ElementType element, std::size_t max_items, bool mandatory) {
    return SlotSpec{std::move(name), std::move(element), true, max_items, mandatory};
}

Value Value::frame(TypedFrame f) { return Value(Data(Box<TypedFrame>(std::move(f)))); }

bool Value::operator==(const Value& o) const { return data_ == o.data_; }

const Value& TypedFrame::at(std::string_view slot) const {
    const Value* v = get(slot);
    if (!v) throw std::out_of_range(schema + " has no slot " + std::string(slot));
    return *v;
}

const TypedFrame& TypedAction::input(std::string_view slot) const {
    auto it = inputs.find(std::string(slot));
    if (it == inputs.end()) throw std::out_of_range(schema + " has no input " + std::string(slot));
    return it->second;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::string_view primitive_name(Primitive p) {
    switch (p) {
        case Primitive::string: return "string";
        case Primitive::integer: return "integer";
        case Primitive::symbol: return "symbol";
    }
    return "";
}

std::string_view term_kind_name(TermKind k) {
    switch (k) {
        case TermKind::concept_schema: return "concept";
        case TermKind::term: return "term";
        case TermKind::agent: return "agent";
        case TermKind::action: return "action";
    }
    return "";
}

std::string element_name(const ElementType& t) {
    if (const auto* p = std::get_if<Primitive>(&t)) return std::string(primitive_name(*p));
    return std::get<ConceptRef>(t).schema;
}

std::string slot_type_name(const SlotSpec& s) {
    std::string out;
    if (s.list) {
        out = "list-of(" + element_name(s.type);
        if (s.max_items != unbounded) out += ",max=" + std::to_string(s.max_items);
        out += ")";
    } else {
        out = element_name(s.type);
    }
    if (!s.mandatory) out += "?";
    return out;
}

const std::string& schema_name(const Schema& s) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, s);
}

}  // namespace

OntologyRegistry::OntologyRegistry(std::string name) : name_(std::move(name)) {}

void OntologyRegistry::register_schema(Schema schema) {
    if (finalized_) throw OntologyError(OntologyErrc::already_finalized, "registry " + name_ + " is finalized");
    const std::string& name = schema_name(schema);
    if (!sl::is_symbol(name)) throw OntologyError(OntologyErrc::unknown_schema, "invalid schema name '" + name + "'");
    if (contains(name)) throw OntologyError(OntologyErrc::duplicate_name, "schema " + name + " already registered");
    order_.push_back(name);
    std::visit(
        [this](auto&& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConceptSchema>) concepts_.emplace(s.name, std::move(s));
            else if constexpr (std::is_same_v<T, PredicateSchema>) predicates_.emplace(s.name, std::move(s));
            else actions_.emplace(s.name, std::move(s));
        },
        std::move(schema));
}

void OntologyRegistry::finalize() {
    if (finalized_) return;
    auto dangling = [](const std::string& from, const std::string& to) {
        throw OntologyError(OntologyErrc::dangling_reference, from + " references unknown concept " + to);
    };
    for (const auto& [name, c] : concepts_) {
        if (c.parent && !concepts_.count(*c.parent)) dangling(name, *c.parent);
        std::set<std::string> seen;
        for (const auto& slot : c.slots) {
            if (!seen.insert(slot.name).second)
                throw OntologyError(OntologyErrc::slot_collision, name + " declares slot " + slot.name + " twice");
            if (const auto* ref = std::get_if<ConceptRef>(&slot.type)) {
                if (!concepts_.count(ref->schema)) dangling(name + "." + slot.name, ref->schema);
            }
        }
    }
    for (const auto& [name, a] : actions_) {
        for (const auto& in : a.inputs) {
            if (!concepts_.count(in.concept_name)) dangling(name + "." + in.slot, in.concept_name);
        }
    }
    // Parent chains must terminate within |concepts| steps.
    for (const auto& [name, c] : concepts_) {
        const ConceptSchema* cur = &c;
        std::size_t steps = 0;
        while (cur->parent) {
            if (++steps > concepts_.size())
                throw OntologyError(OntologyErrc::cyclic_inheritance, "parent chain of " + name + " is cyclic");
            cur = &concepts_.at(*cur->parent);
        }
    }
    for (const auto& [name, c] : concepts_) {
        if (!c.parent) continue;
        std::set<std::string> inherited;
        for (const auto& s : all_slots(*c.parent)) inherited.insert(s.name);
        for (const auto& s : c.slots) {
            if (inherited.count(s.name))
                throw OntologyError(OntologyErrc::slot_collision, name + "." + s.name + " shadows an inherited slot");
        }
    }
    finalized_ = true;
}

bool OntologyRegistry::contains(std::string_view name) const {
    return concepts_.find(name) != concepts_.end() || predicates_.find(name) != predicates_.end() ||
           actions_.find(name) != actions_.end();
}

const ConceptSchema* OntologyRegistry::find_concept(std::string_view name) const {
    auto it = concepts_.find(name);
    return it == concepts_.end() ? nullptr : &it->second;
}

const PredicateSchema* OntologyRegistry::find_predicate(std::string_view name) const {
    auto it = predicates_.find(name);
    return it == predicates_.end() ? nullptr : &it->second;
}

const ActionSchema* OntologyRegistry::find_action(std::string_view name) const {
    auto it = actions_.find(name);
    return it == actions_.end() ? nullptr : &it->second;
}

bool OntologyRegistry::is_a(std::string_view child, std::string_view ancestor) const {
    if (!contains(child)) throw OntologyError(OntologyErrc::unknown_schema, "unknown schema " + std::string(child));
    if (!contains(ancestor))
        throw OntologyError(OntologyErrc::unknown_schema, "unknown schema " + std::string(ancestor));
    const ConceptSchema* cur = find_concept(child);
    if (!cur) return child == ancestor;
    for (std::size_t steps = 0; steps <= concepts_.size(); ++steps) {
        if (cur->name == ancestor) return true;
        if (!cur->parent) return false;
        cur = find_concept(*cur->parent);
        if (!cur) return false;
    }
    throw OntologyError(OntologyErrc::cyclic_inheritance, "parent chain of " + std::string(child) + " is cyclic");
}

std::vector<SlotSpec> OntologyRegistry::all_slots(std::string_view concept_name) const {
    std::vector<const ConceptSchema*> chain;
    const ConceptSchema* cur = find_concept(concept_name);
    if (!cur) throw OntologyError(OntologyErrc::unknown_schema, "unknown concept " + std::string(concept_name));
    while (cur) {
        if (chain.size() > concepts_.size())
            throw OntologyError(OntologyErrc::cyclic_inheritance, "parent chain of " + std::string(concept_name) + " is cyclic");
        chain.push_back(cur);
        cur = cur->parent ? find_concept(*cur->parent) : nullptr;
    }
    std::vector<SlotSpec> out;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        out.insert(out.end(), (*it)->slots.begin(), (*it)->slots.end());
    }
    return out;
}

bool OntologyRegistry::holds(std::string_view predicate, std::string_view subject, std::string_view object) const {
    if (!find_predicate(predicate))
        throw OntologyError(OntologyErrc::unknown_schema, "unknown predicate " + std::string(predicate));
    if (predicate == names::is_a) {
        return find_concept(subject) && find_concept(object) && is_a(subject, object);
    }
    if (predicate == names::has_a) {
        if (!find_concept(subject)) return false;
        for (const auto& s : all_slots(subject)) {
            if (s.name == object) return true;
            if (const auto* ref = std::get_if<ConceptRef>(&s.type)) {
                if (ref->schema == object) return true;
            }
        }
        return false;
    }
    if (predicate == names::applies_a) {
        const ActionSchema* a = find_action(object);
        return a && a->performer == subject;
    }
    return false;
}

std::string OntologyRegistry::dump() const {
    std::string out;
    for (const auto& name : order_) {
        if (const auto* c = find_concept(name)) {
            out += "concept " + c->name;
            if (c->parent) out += " extends " + *c->parent;
            for (const auto& s : c->slots) out += " " + s.name + ":" + slot_type_name(s);
        } else if (const auto* p = find_predicate(name)) {
            out += "predicate " + p->name + " " + std::string(term_kind_name(p->subject)) + " " +
                   std::string(term_kind_name(p->object));
        } else if (const auto* a = find_action(name)) {
            out += "action " + a->name + " performer=" + a->performer;
            for (const auto& in : a->inputs) out += " " + in.slot + ":" + in.concept_name;
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation

std::string_view violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::unknown_schema: return "UnknownSchema";
        case ViolationKind::missing_mandatory_slot: return "MissingMandatorySlot";
        case ViolationKind::unknown_slot: return "UnknownSlot";
        case ViolationKind::kind_mismatch: return "KindMismatch";
        case ViolationKind::expected_mismatch: return "ExpectedMismatch";
        case ViolationKind::not_an_action: return "NotAnAction";
    }
    return "";
}

std::string Violation::to_string() const {
    std::string out(violation_kind_name(kind));
    out += "(" + path + ")";
    if (!detail.empty()) out += ": " + detail;
    return out;
}

namespace {

std::string_view node_kind(const sl::Node& n) {
    if (n.is<sl::Atom>()) return "symbol";
    if (n.is<sl::Str>()) return "string";
    if (n.is<sl::Int>()) return "integer";
    if (n.is<sl::Float>()) return "decimal";
    if (n.is<sl::Frame>()) return "frame";
    if (n.is<sl::Seq>()) return "sequence";
    return "action";
}

class Validator {
public:
    explicit Validator(const OntologyRegistry& reg) : reg_(reg) {}

    std::vector<Violation> violations;

    // `required` is the concept the enclosing slot declares; mismatch there
    // is a kind mismatch.
    std::optional<TypedFrame> frame(const sl::Frame& f, const std::string& path,
                                    std::optional<std::string_view> required) {
        const ConceptSchema* schema = reg_.find_concept(f.name);
        if (!schema) {
            add(ViolationKind::unknown_schema, path, "no concept named " + f.name);
            return std::nullopt;
        }
        std::size_t before = violations.size();
        if (required && !reg_.is_a(f.name, *required)) {
            add(ViolationKind::kind_mismatch, path, f.name + " is not a " + std::string(*required));
        }
        TypedFrame out(f.name);
        auto specs = reg_.all_slots(f.name);
        for (const auto& slot : f.slots) {
            auto spec = std::find_if(specs.begin(), specs.end(), [&](const SlotSpec& s) { return s.name == slot.name; });
            if (spec == specs.end()) {
                add(ViolationKind::unknown_slot, path + "." + slot.name, f.name + " declares no slot " + slot.name);
                continue;
            }
            if (auto v = value(*spec, slot.value, path + "." + slot.name)) out.set(slot.name, std::move(*v));
        }
        for (const auto& spec : specs) {
            if (spec.mandatory && !f.find(spec.name)) {
                add(ViolationKind::missing_mandatory_slot, path + "." + spec.name, "mandatory slot " + spec.name + " absent");
            }
        }
        if (violations.size() != before) return std::nullopt;
        return out;
    }

private:
    const OntologyRegistry& reg_;

    void add(ViolationKind k, std::string path, std::string detail) {
        violations.push_back(Violation{k, std::move(path), std::move(detail)});
    }

    std::optional<Value> element(const ElementType& type, const sl::Node& n, const std::string& path) {
        if (const auto* ref = std::get_if<ConceptRef>(&type)) {
            const auto* f = n.get_if<sl::Frame>();
            if (!f) {
                add(ViolationKind::kind_mismatch, path, "expected " + ref->schema + " frame, got " + std::string(node_kind(n)));
                return std::nullopt;
            }
            auto typed = frame(*f, path, ref->schema);
            if (!typed) return std::nullopt;
            return Value::frame(std::move(*typed));
        }
        Primitive p = std::get<Primitive>(type);
        switch (p) {
            case Primitive::string:
                if (const auto* s = n.get_if<sl::Str>()) return Value::string(s->text);
                break;
            case Primitive::integer:
                if (const auto* i = n.get_if<sl::Int>()) return Value::integer(i->value);
                break;
            case Primitive::symbol:
                if (const auto* a = n.get_if<sl::Atom>()) return Value::symbol(a->symbol);
                break;
        }
        add(ViolationKind::kind_mismatch, path,
            "expected " + std::string(primitive_name(p)) + ", got " + std::string(node_kind(n)));
        return std::nullopt;
    }

    std::optional<Value> value(const SlotSpec& spec, const sl::Node& n, const std::string& path) {
        if (!spec.list) return element(spec.type, n, path);
        const auto* seq = n.get_if<sl::Seq>();
        if (!seq) {
            add(ViolationKind::kind_mismatch, path, "expected sequence, got " + std::string(node_kind(n)));
            return std::nullopt;
        }
        bool ok = true;
        if (seq->items.size() > spec.max_items) {
            add(ViolationKind::kind_mismatch, path,
                "sequence holds " + std::to_string(seq->items.size()) + " entries, at most " +
                    std::to_string(spec.max_items) + " allowed");
            ok = false;
        }
        Value::List items;
        for (std::size_t i = 0; i < seq->items.size(); ++i) {
            auto v = element(spec.type, seq->items[i], path + "[" + std::to_string(i) + "]");
            if (v) items.push_back(std::move(*v));
            else ok = false;
        }
        if (!ok) return std::nullopt;
        return Value::list(std::move(items));
    }
};

sl::Node encode_value(const OntologyRegistry& reg, const Value& v);

sl::Frame encode_typed(const OntologyRegistry& reg, const TypedFrame& f) {
    sl::Frame out{f.schema, {}};
    for (const auto& spec : reg.all_slots(f.schema)) {
        if (const Value* v = f.get(spec.name)) out.slots.push_back({spec.name, encode_value(reg, *v)});
    }
    return out;
}

sl::Node encode_value(const OntologyRegistry& reg, const Value& v) {
    if (v.is_string()) return sl::str(v.as_string());
    if (v.is_integer()) return sl::integer(v.as_integer());
    if (v.is_symbol()) return sl::atom(v.as_symbol());
    if (v.is_frame()) return encode_typed(reg, v.as_frame());
    sl::Seq seq;
    for (const auto& item : v.as_list()) seq.items.push_back(encode_value(reg, item));
    return seq;
}

void require_finalized(const OntologyRegistry& reg) {
    if (!reg.finalized()) throw OntologyError(OntologyErrc::not_finalized, "registry " + reg.name() + " is not finalized");
}

}  // namespace

Checked<TypedFrame> validate_frame(const OntologyRegistry& reg, const sl::Node& tree,
                                   std::optional<std::string_view> expected) {
    require_finalized(reg);
    Checked<TypedFrame> out;
    const auto* f = tree.get_if<sl::Frame>();
    if (!f) {
        out.violations.push_back({ViolationKind::kind_mismatch, expected ? std::string(*expected) : "content",
                                  "expected a frame, got " + std::string(node_kind(tree))});
        return out;
    }
    if (expected && !reg.find_concept(*expected)) {
        out.violations.push_back({ViolationKind::unknown_schema, std::string(*expected), "no concept to expect"});
        return out;
    }
    Validator val(reg);
    auto typed = val.frame(*f, f->name, std::nullopt);
    if (typed && expected && !reg.is_a(f->name, *expected)) {
        val.violations.push_back({ViolationKind::expected_mismatch, f->name, f->name + " is not a " + std::string(*expected)});
        typed.reset();
    }
    out.violations = std::move(val.violations);
    out.value = std::move(typed);
    return out;
}

Checked<TypedAction> decode_action(const OntologyRegistry& reg, const sl::Node& tree) {
    require_finalized(reg);
    Checked<TypedAction> out;
    const auto* a = tree.get_if<sl::Action>();
    if (!a) {
        out.violations.push_back({ViolationKind::not_an_action, "content", "expected an action, got " + std::string(node_kind(tree))});
        return out;
    }
    const ActionSchema* schema = reg.find_action(a->act.name);
    if (!schema) {
        out.violations.push_back({ViolationKind::unknown_schema, a->act.name, "no action named " + a->act.name});
        return out;
    }
    Validator val(reg);
    TypedAction action{schema->name, a->actor, {}};
    for (const auto& slot : a->act.slots) {
        auto in = std::find_if(schema->inputs.begin(), schema->inputs.end(),
                               [&](const ActionInput& i) { return i.slot == slot.name; });
        const std::string path = schema->name + "." + slot.name;
        if (in == schema->inputs.end()) {
            val.violations.push_back({ViolationKind::unknown_slot, path, schema->name + " takes no input " + slot.name});
            continue;
        }
        const auto* f = slot.value.get_if<sl::Frame>();
        if (!f) {
            val.violations.push_back({ViolationKind::kind_mismatch, path,
                                      "expected " + in->concept_name + " frame, got " + std::string(node_kind(slot.value))});
            continue;
        }
        if (auto typed = val.frame(*f, path, in->concept_name)) action.inputs.emplace(slot.name, std::move(*typed));
    }
    for (const auto& in : schema->inputs) {
        if (!a->act.find(in.slot)) {
            val.violations.push_back({ViolationKind::missing_mandatory_slot, schema->name + "." + in.slot,
                                      "input " + in.slot + " absent"});
        }
    }
    out.violations = std::move(val.violations);
    if (out.violations.empty()) out.value = std::move(action);
    return out;
}

sl::Node encode_frame(const OntologyRegistry& reg, const TypedFrame& frame) {
    require_finalized(reg);
    return encode_typed(reg, frame);
}

sl::Node encode_action(const OntologyRegistry& reg, const TypedAction& action) {
    require_finalized(reg);
    const ActionSchema* schema = reg.find_action(action.schema);
    if (!schema) throw OntologyError(OntologyErrc::unknown_schema, "no action named " + action.schema);
    sl::Frame act{action.schema, {}};
    for (const auto& in : schema->inputs) {
        auto it = action.inputs.find(in.slot);
        if (it != action.inputs.end()) act.slots.push_back({in.slot, encode_typed(reg, it->second)});
    }
    return sl::Action{action.actor, std::move(act)};
}

}  // namespace workcell::onto
