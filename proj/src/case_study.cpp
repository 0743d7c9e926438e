#include "workcell/ontology.hpp"

namespace workcell::onto {

namespace {

SlotSpec sym(const char* name) { return primitive_slot(name, Primitive::symbol); }
SlotSpec num(const char* name) { return primitive_slot(name, Primitive::integer); }

ConceptSchema part(const char* name, const char* attribute, Primitive kind) {
    return ConceptSchema{name, std::nullopt, {primitive_slot(attribute, kind), sym("position")}};
}

}  // namespace

OntologyRegistry build_case_study_ontology() {
    using namespace names;
    OntologyRegistry reg(ontology);

    // Customer orders carry the ordering customer's agent name in aid.
    for (const char* n : {pump_customer_order, compressor_customer_order}) {
        reg.register_schema(ConceptSchema{n, std::nullopt, {sym("color"), num("power"), num("amount"), sym("aid")}});
    }

    reg.register_schema(part(casing, "color", Primitive::symbol));
    reg.register_schema(part(electrical_motor, "power", Primitive::integer));
    reg.register_schema(part(shaft, "material", Primitive::symbol));
    reg.register_schema(part(impeller, "type", Primitive::symbol));
    reg.register_schema(part(female_rotor, "size", Primitive::symbol));
    reg.register_schema(part(male_rotor, "size", Primitive::symbol));

    reg.register_schema(ConceptSchema{pump,
                                      std::nullopt,
                                      {concept_slot("casing", casing), concept_slot("motor", electrical_motor),
                                       concept_slot("shaft", shaft), concept_slot("impeller", impeller), sym("aid")}});
    reg.register_schema(ConceptSchema{compressor,
                                      std::nullopt,
                                      {concept_slot("casing", casing), concept_slot("motor", electrical_motor),
                                       concept_slot("female-rotor", female_rotor),
                                       concept_slot("male-rotor", male_rotor), sym("aid")}});

    reg.register_schema(ConceptSchema{pump_order, std::string(pump), {num("amount")}});
    reg.register_schema(ConceptSchema{compressor_order, std::string(compressor), {num("amount")}});

    reg.register_schema(ConceptSchema{
        operations_list, std::nullopt, {list_slot("operations", Primitive::symbol, max_operations)}});

    reg.register_schema(ConceptSchema{
        pump_manufacturing_order,
        std::nullopt,
        {concept_slot("order", pump_order), concept_slot("operations", operations_list), sym("aid")}});
    reg.register_schema(ConceptSchema{
        compressor_manufacturing_order,
        std::nullopt,
        {concept_slot("order", compressor_order), concept_slot("operations", operations_list), sym("aid")}});

    reg.register_schema(ConceptSchema{worker, std::nullopt, {sym("aid"), sym("workstation")}});
    reg.register_schema(ConceptSchema{robot, std::nullopt, {sym("aid")}});

    reg.register_schema(PredicateSchema{is_a, TermKind::concept_schema, TermKind::concept_schema});
    reg.register_schema(PredicateSchema{has_a, TermKind::concept_schema, TermKind::term});
    reg.register_schema(PredicateSchema{applies_a, TermKind::agent, TermKind::action});

    reg.register_schema(ActionSchema{pump_building, {{"order", pump_customer_order}}, "customer"});
    reg.register_schema(ActionSchema{compressor_building, {{"order", compressor_customer_order}}, "customer"});
    reg.register_schema(
        ActionSchema{pump_manufacturing, {{"order", pump_order}, {"operations", operations_list}}, "product"});
    reg.register_schema(ActionSchema{
        compressor_manufacturing, {{"order", compressor_order}, {"operations", operations_list}}, "product"});
    reg.register_schema(ActionSchema{pump_pick_and_place, {{"order", pump_order}, {"worker", worker}}, "order"});
    reg.register_schema(
        ActionSchema{compressor_pick_and_place, {{"order", compressor_order}, {"worker", worker}}, "order"});
    reg.register_schema(ActionSchema{pump_assembly, {{"order", pump_order}}, "order"});
    reg.register_schema(ActionSchema{compressor_assembly, {{"order", compressor_order}}, "order"});

    reg.finalize();
    return reg;
}

}  // namespace workcell::onto
