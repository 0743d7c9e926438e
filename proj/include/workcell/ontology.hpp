#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "workcell/sl.hpp"

namespace workcell::onto {

// ---------------------------------------------------------------------------
// Schemas

enum class Primitive { string, integer, symbol };

struct ConceptRef {
    std::string schema;
    bool operator==(const ConceptRef&) const = default;
};

using ElementType = std::variant<Primitive, ConceptRef>;

inline constexpr std::size_t unbounded = std::numeric_limits<std::size_t>::max();

struct SlotSpec {
    std::string name;
    ElementType type;
    bool list = false;
    std::size_t max_items = unbounded;
    bool mandatory = true;
};

SlotSpec primitive_slot(std::string name, Primitive p, bool mandatory = true);
SlotSpec concept_slot(std::string name, std::string schema, bool mandatory = true);
SlotSpec list_slot(std::string name, ElementType element, std::size_t max_items = unbounded,
                   bool mandatory = true);

struct ConceptSchema {
    std::string name;
    std::optional<std::string> parent;
    std::vector<SlotSpec> slots;
};

// What a predicate relates. Has-a objects may be either a concept or a
// primitive attribute, hence "term".
enum class TermKind { concept_schema, term, agent, action };

struct PredicateSchema {
    std::string name;
    TermKind subject = TermKind::concept_schema;
    TermKind object = TermKind::concept_schema;
};

struct ActionInput {
    std::string slot;
    std::string concept_name;
};

struct ActionSchema {
    std::string name;
    std::vector<ActionInput> inputs;
    std::string performer;  // customer | product | order
};

using Schema = std::variant<ConceptSchema, PredicateSchema, ActionSchema>;

enum class OntologyErrc {
    duplicate_name,
    dangling_reference,
    cyclic_inheritance,
    slot_collision,
    unknown_schema,
    not_finalized,
    already_finalized,
};

class OntologyError : public std::runtime_error {
public:
    OntologyError(OntologyErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    OntologyErrc code() const { return code_; }

private:
    OntologyErrc code_;
};

class OntologyRegistry {
public:
    explicit OntologyRegistry(std::string name);

    const std::string& name() const { return name_; }

    void register_schema(Schema schema);

    /// Resolves references and checks parent chains. Registration order does
    /// not matter; a reference only has to exist by the time this runs.
    void finalize();
    bool finalized() const { return finalized_; }

    bool contains(std::string_view name) const;
    const ConceptSchema* find_concept(std::string_view name) const;
    const PredicateSchema* find_predicate(std::string_view name) const;
    const ActionSchema* find_action(std::string_view name) const;

    std::size_t concept_count() const { return concepts_.size(); }
    std::size_t predicate_count() const { return predicates_.size(); }
    std::size_t action_count() const { return actions_.size(); }
    std::vector<std::string> schema_names() const { return order_; }

    /// Reflexive walk up the parent chain.
    bool is_a(std::string_view child, std::string_view ancestor) const;

    /// Slots of a concept including inherited ones, root ancestor first.
    std::vector<SlotSpec> all_slots(std::string_view concept_name) const;

    /// Evaluates Is-a / Has-a / Applies-a over the structural links.
    bool holds(std::string_view predicate, std::string_view subject, std::string_view object) const;

    /// One line per schema, slots in declaration order.
    std::string dump() const;

private:
    std::string name_;
    bool finalized_ = false;
    std::vector<std::string> order_;
    std::map<std::string, ConceptSchema, std::less<>> concepts_;
    std::map<std::string, PredicateSchema, std::less<>> predicates_;
    std::map<std::string, ActionSchema, std::less<>> actions_;
};

// ---------------------------------------------------------------------------
// Typed values

struct Symbol {
    std::string name;
    bool operator==(const Symbol&) const = default;
};

struct TypedFrame;

// Copyable owning pointer; gives TypedFrame value semantics inside Value.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& o) : ptr_(std::make_unique<T>(*o.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& o) {
        ptr_ = std::make_unique<T>(*o.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    const T& operator*() const { return *ptr_; }
    T& operator*() { return *ptr_; }
    const T* operator->() const { return ptr_.get(); }
    T* operator->() { return ptr_.get(); }

    bool operator==(const Box& o) const { return *ptr_ == *o.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

class Value {
public:
    using List = std::vector<Value>;

    static Value string(std::string s) { return Value(Data(std::move(s))); }
    static Value integer(std::int64_t i) { return Value(Data(i)); }
    static Value symbol(std::string s) { return Value(Data(Symbol{std::move(s)})); }
    static Value frame(TypedFrame f);
    static Value list(List items) { return Value(Data(std::move(items))); }

    bool is_string() const { return std::holds_alternative<std::string>(data_); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
    bool is_symbol() const { return std::holds_alternative<Symbol>(data_); }
    bool is_frame() const { return std::holds_alternative<Box<TypedFrame>>(data_); }
    bool is_list() const { return std::holds_alternative<List>(data_); }

    const std::string& as_string() const { return std::get<std::string>(data_); }
    std::int64_t as_integer() const { return std::get<std::int64_t>(data_); }
    const std::string& as_symbol() const { return std::get<Symbol>(data_).name; }
    const TypedFrame& as_frame() const { return *std::get<Box<TypedFrame>>(data_); }
    const List& as_list() const { return std::get<List>(data_); }

    bool operator==(const Value& o) const;

private:
    using Data = std::variant<std::string, std::int64_t, Symbol, Box<TypedFrame>, List>;
    explicit Value(Data d) : data_(std::move(d)) {}
    Data data_;
};

/// A frame checked against its concept schema. Slot storage is keyed by
/// name; emission order comes from the schema, not from construction order.
struct TypedFrame {
    std::string schema;
    std::map<std::string, Value> slots;

    TypedFrame() = default;
    explicit TypedFrame(std::string s) : schema(std::move(s)) {}

    TypedFrame& set(const std::string& slot, Value v) {
        slots.insert_or_assign(slot, std::move(v));
        return *this;
    }
    const Value* get(std::string_view slot) const {
        auto it = slots.find(std::string(slot));
        return it == slots.end() ? nullptr : &it->second;
    }
    const Value& at(std::string_view slot) const;

    bool operator==(const TypedFrame&) const = default;
};

struct TypedAction {
    std::string schema;
    std::string actor;
    std::map<std::string, TypedFrame> inputs;

    const TypedFrame& input(std::string_view slot) const;
    bool operator==(const TypedAction&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
    unknown_schema,
    missing_mandatory_slot,
    unknown_slot,
    kind_mismatch,
    expected_mismatch,
    not_an_action,
};

std::string_view violation_kind_name(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string path;  // schema or schema.slot[.slot...]
    std::string detail;

    std::string to_string() const;
    bool operator==(const Violation&) const = default;
};

template <typename T>
struct Checked {
    std::optional<T> value;
    std::vector<Violation> violations;

    bool ok() const { return value.has_value(); }
};

Checked<TypedFrame> validate_frame(const OntologyRegistry& reg, const sl::Node& tree,
                                   std::optional<std::string_view> expected = std::nullopt);

Checked<TypedAction> decode_action(const OntologyRegistry& reg, const sl::Node& tree);

sl::Node encode_frame(const OntologyRegistry& reg, const TypedFrame& frame);
sl::Node encode_action(const OntologyRegistry& reg, const TypedAction& action);

// ---------------------------------------------------------------------------
// Case-study vocabulary

namespace names {
inline constexpr const char* ontology = "cooperative-workcell";

inline constexpr const char* pump_customer_order = "Pump-Customer-Order";
inline constexpr const char* compressor_customer_order = "Compressor-Customer-Order";
inline constexpr const char* casing = "Casing";
inline constexpr const char* electrical_motor = "Electrical-Motor";
inline constexpr const char* shaft = "Shaft";
inline constexpr const char* impeller = "Impeller";
inline constexpr const char* female_rotor = "Female-Rotor";
inline constexpr const char* male_rotor = "Male-Rotor";
inline constexpr const char* pump = "Pump";
inline constexpr const char* compressor = "Compressor";
inline constexpr const char* pump_order = "Pump-Order";
inline constexpr const char* compressor_order = "Compressor-Order";
inline constexpr const char* operations_list = "Operations-List";
inline constexpr const char* pump_manufacturing_order = "Pump-Manufacturing-Order";
inline constexpr const char* compressor_manufacturing_order = "Compressor-Manufacturing-Order";
inline constexpr const char* worker = "Worker";
inline constexpr const char* robot = "Robot";

inline constexpr const char* is_a = "Is-a";
inline constexpr const char* has_a = "Has-a";
inline constexpr const char* applies_a = "Applies-a";

inline constexpr const char* pump_building = "Pump-Building-Operation";
inline constexpr const char* compressor_building = "Compressor-Building-Operation";
inline constexpr const char* pump_manufacturing = "Pump-Manufacturing-Operation";
inline constexpr const char* compressor_manufacturing = "Compressor-Manufacturing-Operation";
inline constexpr const char* pump_pick_and_place = "Pump-Pick-And-Place-Operation";
inline constexpr const char* compressor_pick_and_place = "Compressor-Pick-And-Place-Operation";
inline constexpr const char* pump_assembly = "Pump-Assembly-Operation";
inline constexpr const char* compressor_assembly = "Compressor-Assembly-Operation";
}  // namespace names

inline constexpr std::size_t max_operations = 3;

OntologyRegistry build_case_study_ontology();

}  // namespace workcell::onto
