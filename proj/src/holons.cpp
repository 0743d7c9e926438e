#include "workcell/holons.hpp"

#include <algorithm>

namespace workcell::holons {

namespace names = onto::names;
using acl::Act;
using acl::AclMessage;

std::string_view product_name(ProductKind kind) { return kind == ProductKind::pump ? "pump" : "compressor"; }

std::optional<ProductKind> product_from_name(std::string_view name) {
    if (name == "pump") return ProductKind::pump;
    if (name == "compressor") return ProductKind::compressor;
    return std::nullopt;
}

std::string_view status_name(WorkerStatus s) {
    switch (s) {
        case WorkerStatus::free: return "free";
        case WorkerStatus::reserve: return "reserve";
        case WorkerStatus::busy: return "busy";
    }
    return "";
}

std::string_view status_name(RobotStatus s) { return s == RobotStatus::free ? "free" : "busy"; }

rt::TimeMs pick_and_place_duration(std::int64_t amount) {
    if (amount < 1) throw HolonError(HolonErrc::invalid_amount, "amount must be at least 1");
    return pick_and_place_ms_per_unit * amount;
}

std::string order_conversation(std::string_view initiator, std::string_view order_id, std::string_view counterpart) {
    std::string cv(initiator);
    cv += "-cv-";
    cv += order_id;
    cv += '-';
    cv += counterpart;
    return cv;
}

std::string not_understood_content(std::string_view reason) {
    return sl::print_content(sl::Frame{"not-understood-reason", {{"detail", sl::str(std::string(reason))}}});
}

namespace {

struct Vocabulary {
    const char* customer_order;
    const char* product_order;
    const char* manufacturing_order;
    const char* building;
    const char* manufacturing;
    const char* pick_and_place;
    const char* assembly;
};

constexpr Vocabulary pump_vocabulary{names::pump_customer_order, names::pump_order,
                                     names::pump_manufacturing_order, names::pump_building,
                                     names::pump_manufacturing, names::pump_pick_and_place,
                                     names::pump_assembly};
constexpr Vocabulary compressor_vocabulary{names::compressor_customer_order, names::compressor_order,
                                           names::compressor_manufacturing_order, names::compressor_building,
                                           names::compressor_manufacturing, names::compressor_pick_and_place,
                                           names::compressor_assembly};

const Vocabulary& vocabulary(ProductKind k) { return k == ProductKind::pump ? pump_vocabulary : compressor_vocabulary; }

// Which product an action of the given role belongs to, if any.
std::optional<ProductKind> kind_of(std::string_view action, const char* Vocabulary::*role) {
    if (action == pump_vocabulary.*role) return ProductKind::pump;
    if (action == compressor_vocabulary.*role) return ProductKind::compressor;
    return std::nullopt;
}

struct Decoded {
    std::optional<onto::TypedAction> action;
    std::string error;
};

Decoded decode(const onto::OntologyRegistry& reg, const AclMessage& m) {
    if (m.ontology != reg.name()) return {std::nullopt, "unknown ontology '" + m.ontology + "'"};
    try {
        auto checked = onto::decode_action(reg, sl::parse_content(m.content));
        if (checked.ok()) return {std::move(checked.value), {}};
        std::string err;
        for (const auto& v : checked.violations) {
            if (!err.empty()) err += "; ";
            err += v.to_string();
        }
        return {std::nullopt, err};
    } catch (const sl::SyntaxError& e) {
        return {std::nullopt, e.what()};
    }
}

std::string encode(const onto::OntologyRegistry& reg, const onto::TypedAction& a) {
    return sl::print_content(onto::encode_action(reg, a));
}

bool is_error_act(Act a) { return a == Act::not_understood || a == Act::failure; }

void not_understood(rt::AgentContext& ctx, const AclMessage& m, std::string_view reason) {
    if (is_error_act(m.performative)) return;
    ctx.send(ctx.reply(m, Act::not_understood, not_understood_content(reason)));
}

rt::Behaviour::Body on_message(void (*fn)(rt::AgentContext&, const AclMessage&)) {
    return [fn](rt::AgentContext& ctx, const rt::Stimulus& s) { fn(ctx, std::get<AclMessage>(s)); };
}

template <typename Holon>
rt::Behaviour::Body handler(Holon* self, void (Holon::*fn)(rt::AgentContext&, const AclMessage&)) {
    return [self, fn](rt::AgentContext& ctx, const rt::Stimulus& s) { (self->*fn)(ctx, std::get<AclMessage>(s)); };
}

// Last behaviour of every holon: anything no other behaviour took.
rt::Behaviour catch_all() {
    return rt::Behaviour::every("not-understood", rt::MessageFilter::any(), on_message([](rt::AgentContext& ctx, const AclMessage& m) {
                                    not_understood(ctx, m, "unexpected " + std::string(acl::act_name(m.performative)));
                                }));
}

const std::string& order_id_of(const onto::TypedFrame& product_order) { return product_order.at("aid").as_symbol(); }

}  // namespace

onto::TypedFrame ManufacturingOrder::to_frame() const {
    onto::TypedFrame f(vocabulary(product_kind).manufacturing_order);
    f.set("order", onto::Value::frame(parts));
    f.set("operations", onto::Value::frame(operations));
    f.set("aid", onto::Value::symbol(order_id));
    return f;
}

ManufacturingOrder order_from_manufacturing_action(const onto::TypedAction& action) {
    auto kind = kind_of(action.schema, &Vocabulary::manufacturing);
    if (!kind) throw HolonError(HolonErrc::invalid_argument, action.schema + " is not a manufacturing operation");
    ManufacturingOrder o;
    o.product_kind = *kind;
    o.parts = action.input("order");
    o.operations = action.input("operations");
    o.order_id = order_id_of(o.parts);
    o.amount = o.parts.at("amount").as_integer();
    return o;
}

// ---------------------------------------------------------------------------
// Customer

CustomerHolon::CustomerHolon(const onto::OntologyRegistry& reg, std::string name) : reg_(reg), name_(std::move(name)) {}

std::vector<rt::Behaviour> CustomerHolon::behaviours() {
    return {
        rt::Behaviour::every("await-confirm", rt::MessageFilter::act(Act::confirm), handler(this, &CustomerHolon::on_reply)),
        rt::Behaviour::every("await-not-understood", rt::MessageFilter::act(Act::not_understood),
                             handler(this, &CustomerHolon::on_reply)),
        rt::Behaviour::every("await-failure", rt::MessageFilter::act(Act::failure), handler(this, &CustomerHolon::on_reply)),
        catch_all(),
    };
}

std::string CustomerHolon::submit_order(rt::AgentContext& ctx, ProductKind kind, const std::string& color,
                                        std::int64_t power, std::int64_t amount, const std::string& product_agent) {
    if (amount < 1) throw HolonError(HolonErrc::invalid_amount, "amount must be at least 1");
    if (!sl::is_symbol(color)) throw HolonError(HolonErrc::invalid_argument, "color must be a symbol");
    const auto& vocab = vocabulary(kind);
    onto::TypedFrame order(vocab.customer_order);
    order.set("color", onto::Value::symbol(color))
        .set("power", onto::Value::integer(power))
        .set("amount", onto::Value::integer(amount))
        .set("aid", onto::Value::symbol(name_));
    onto::TypedAction action{vocab.building, product_agent, {{"order", order}}};

    std::string cv = ctx.new_conversation();
    ctx.send(ctx.build(Act::agree, {acl::Aid(product_agent)}, encode(reg_, action), reg_.name(), cv));
    orders_.push_back(SubmittedOrder{cv, kind, product_agent, OrderState::pending});
    return cv;
}

void CustomerHolon::on_reply(rt::AgentContext& ctx, const AclMessage& m) {
    auto it = std::find_if(orders_.begin(), orders_.end(),
                           [&](const SubmittedOrder& o) { return o.conversation_id == m.conversation_id; });
    bool pending = it != orders_.end() && it->state == OrderState::pending;
    if (is_error_act(m.performative)) {
        if (pending) it->state = OrderState::rejected;
        return;
    }
    if (!pending) return not_understood(ctx, m, "no pending order on conversation " + m.conversation_id);
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (d.action->schema != vocabulary(it->kind).building)
        return not_understood(ctx, m, "confirmation names " + d.action->schema);
    it->state = OrderState::confirmed;
}

// ---------------------------------------------------------------------------
// Product

ProductHolon::ProductHolon(const onto::OntologyRegistry& reg, std::string name, ProductKind kind, PartCatalog catalog,
                           rt::TimeMs hold_ms)
    : reg_(reg), name_(std::move(name)), kind_(kind), catalog_(std::move(catalog)), hold_ms_(hold_ms) {
    check_catalog(reg_, kind_, catalog_);
}

std::vector<rt::Behaviour> ProductHolon::behaviours() {
    return {
        rt::Behaviour::every("build-order", rt::MessageFilter::act(Act::agree), handler(this, &ProductHolon::on_agree)),
        rt::Behaviour::every("propagation-confirm", rt::MessageFilter::act(Act::confirm), handler(this, &ProductHolon::on_reply)),
        rt::Behaviour::every("propagation-not-understood", rt::MessageFilter::act(Act::not_understood),
                             handler(this, &ProductHolon::on_reply)),
        rt::Behaviour::every("propagation-failure", rt::MessageFilter::act(Act::failure), handler(this, &ProductHolon::on_reply)),
        rt::Behaviour::on_timer("flush", rt::Behaviour::Kind::cyclic, "flush",
                                [this](rt::AgentContext& ctx, const rt::Stimulus&) {
                                    flush_pending_ = false;
                                    propagate_pending(ctx);
                                }),
        catch_all(),
    };
}

ManufacturingOrder ProductHolon::build_order(const onto::TypedFrame& customer_order, const acl::Aid& customer) {
    const auto& vocab = vocabulary(kind_);
    ManufacturingOrder o;
    o.order_id = name_ + "-" + std::to_string(++built_);
    o.product_kind = kind_;
    o.amount = customer_order.at("amount").as_integer();
    o.source_customer = customer;

    const char* product = kind_ == ProductKind::pump ? names::pump : names::compressor;
    o.parts = onto::TypedFrame(vocab.product_order);
    for (const auto& slot : reg_.all_slots(product)) {
        const auto* ref = std::get_if<onto::ConceptRef>(&slot.type);
        if (!ref) continue;
        const auto& spec = *std::find_if(catalog_.parts.begin(), catalog_.parts.end(),
                                         [&](const PartSpec& p) { return p.schema == ref->schema; });
        onto::TypedFrame part(spec.schema);
        const auto* schema = reg_.find_concept(spec.schema);
        for (const auto& [attr, value] : spec.attributes) {
            if (value == "$color") {
                part.set(attr, customer_order.at("color"));
            } else if (value == "$power") {
                part.set(attr, customer_order.at("power"));
            } else {
                auto s = std::find_if(schema->slots.begin(), schema->slots.end(),
                                      [&](const onto::SlotSpec& x) { return x.name == attr; });
                if (std::get<onto::Primitive>(s->type) == onto::Primitive::integer)
                    part.set(attr, onto::Value::integer(std::stoll(value)));
                else
                    part.set(attr, onto::Value::symbol(value));
            }
        }
        part.set("position", onto::Value::symbol(spec.position));
        o.parts.set(slot.name, onto::Value::frame(std::move(part)));
    }
    o.parts.set("aid", onto::Value::symbol(o.order_id));
    o.parts.set("amount", onto::Value::integer(o.amount));

    onto::Value::List ops;
    for (const auto& op : catalog_.operations) ops.push_back(onto::Value::symbol(op));
    o.operations = onto::TypedFrame(names::operations_list);
    o.operations.set("operations", onto::Value::list(std::move(ops)));
    return o;
}

void ProductHolon::on_agree(rt::AgentContext& ctx, const AclMessage& m) {
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (d.action->schema != vocabulary(kind_).building)
        return not_understood(ctx, m, name_ + " does not perform " + d.action->schema);
    const auto& customer_order = d.action->input("order");
    if (customer_order.at("amount").as_integer() < 1) return not_understood(ctx, m, "amount must be at least 1");

    ctx.send(ctx.reply(m, Act::confirm, m.content));
    outgoing_.push_back(build_order(customer_order, m.sender));
    if (!flush_pending_) {
        flush_pending_ = true;
        ctx.schedule_after(hold_ms_, "flush");
    }
}

void ProductHolon::propagate_pending(rt::AgentContext& ctx) {
    if (outgoing_.empty()) return;
    auto managers = ctx.df_search(order_management_service);
    if (managers.empty()) {
        errors_.push_back("no orders agent registered; " + std::to_string(outgoing_.size()) + " order(s) held");
        return;
    }
    const std::string& target = managers.front().name;
    for (const auto& o : outgoing_) {
        onto::TypedAction action{vocabulary(kind_).manufacturing, target,
                                 {{"order", o.parts}, {"operations", o.operations}}};
        std::string cv = order_conversation(name_, o.order_id, target);
        ctx.send(ctx.build(Act::propagate, {managers.front()}, encode(reg_, action), reg_.name(), cv));
        propagated_[o.order_id] = false;
        conversation_to_order_[cv] = o.order_id;
    }
    outgoing_.clear();
}

void ProductHolon::on_reply(rt::AgentContext& ctx, const AclMessage& m) {
    auto it = conversation_to_order_.find(m.conversation_id);
    if (is_error_act(m.performative)) {
        errors_.push_back(std::string(acl::act_name(m.performative)) + " on " + m.conversation_id + ": " + m.content);
        return;
    }
    if (it == conversation_to_order_.end() || propagated_[it->second])
        return not_understood(ctx, m, "no propagation awaiting confirmation on " + m.conversation_id);
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (d.action->schema != vocabulary(kind_).manufacturing)
        return not_understood(ctx, m, "confirmation names " + d.action->schema);
    propagated_[it->second] = true;
}

void ProductHolon::reorder(const std::vector<std::size_t>& permutation) {
    std::vector<std::size_t> sorted = permutation;
    std::sort(sorted.begin(), sorted.end());
    bool valid = sorted.size() == outgoing_.size();
    for (std::size_t i = 0; valid && i < sorted.size(); ++i) valid = sorted[i] == i;
    if (!valid)
        throw HolonError(HolonErrc::reorder_rejected, "not a permutation of the " + std::to_string(outgoing_.size()) +
                                                          " pending order(s) of " + name_);
    std::vector<ManufacturingOrder> next;
    next.reserve(outgoing_.size());
    for (auto i : permutation) next.push_back(outgoing_[i]);
    outgoing_ = std::move(next);
}

// ---------------------------------------------------------------------------
// Orders

OrderHolon::OrderHolon(const onto::OntologyRegistry& reg, std::string name, rt::TimeMs rediscovery_ms)
    : reg_(reg), name_(std::move(name)), rediscovery_ms_(rediscovery_ms) {}

std::vector<rt::Behaviour> OrderHolon::behaviours() {
    return {
        rt::Behaviour::once("announce", [](rt::AgentContext& ctx, const rt::Stimulus&) { ctx.df_register(order_management_service); }),
        rt::Behaviour::every("collect-orders", rt::MessageFilter::act(Act::propagate), handler(this, &OrderHolon::on_propagate)),
        rt::Behaviour::every("dispatch-confirm", rt::MessageFilter::act(Act::confirm), handler(this, &OrderHolon::on_confirm)),
        rt::Behaviour::every("robot-done", rt::MessageFilter::act(Act::inform_if), handler(this, &OrderHolon::on_robot_done)),
        rt::Behaviour::every("worker-done", rt::MessageFilter::act(Act::inform), handler(this, &OrderHolon::on_worker_done)),
        rt::Behaviour::every("refused", rt::MessageFilter::act(Act::not_understood), handler(this, &OrderHolon::on_refusal)),
        rt::Behaviour::every("failed", rt::MessageFilter::act(Act::failure), handler(this, &OrderHolon::on_refusal)),
        rt::Behaviour::on_timer("rediscover", rt::Behaviour::Kind::cyclic, "rediscover",
                                [this](rt::AgentContext& ctx, const rt::Stimulus&) {
                                    rediscovery_scheduled_ = false;
                                    if (!running_) return;
                                    discover(ctx);
                                    dispatch(ctx);
                                    arm_rediscovery(ctx);
                                }),
        catch_all(),
    };
}

void OrderHolon::start_production(rt::AgentContext& ctx) {
    running_ = true;
    discover(ctx);
    dispatch(ctx);
    arm_rediscovery(ctx);
}

// Armed while orders wait with nothing in flight.
void OrderHolon::arm_rediscovery(rt::AgentContext& ctx) {
    if (rediscovery_ms_ <= 0 || !running_ || queue_.empty() || !in_flight_.empty() || rediscovery_scheduled_) return;
    rediscovery_scheduled_ = true;
    ctx.schedule_after(rediscovery_ms_, "rediscover");
}

void OrderHolon::stop_production() { running_ = false; }

void OrderHolon::discover(rt::AgentContext& ctx) {
    workers_.clear();
    workstations_.clear();
    for (const auto& w : ctx.df_search(assembly_service)) {
        workers_.push_back(w.name);
        auto props = ctx.platform().df_properties(assembly_service, w.name);
        auto ws = props ? props->find("workstation") : decltype(props->end()){};
        workstations_[w.name] = (props && ws != props->end()) ? ws->second : "unassigned";
    }
    robots_.clear();
    for (const auto& r : ctx.df_search(pick_and_place_service)) robots_.push_back(r.name);
}

std::vector<std::string> OrderHolon::free_workers() const {
    std::vector<std::string> out;
    for (const auto& w : workers_) {
        bool assigned = std::any_of(in_flight_.begin(), in_flight_.end(),
                                    [&](const auto& kv) { return kv.second.worker == w; });
        if (!assigned) out.push_back(w);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void OrderHolon::dispatch(rt::AgentContext& ctx) {
    while (running_ && !queue_.empty() && !robots_.empty()) {
        auto free = free_workers();
        if (free.empty()) return;
        ManufacturingOrder order = std::move(queue_.front());
        queue_.pop_front();
        const auto& vocab = vocabulary(order.product_kind);
        Assignment a;
        a.worker = free.front();
        a.robot = robots_.front();
        a.robot_conversation = order_conversation(name_, order.order_id, a.robot);
        a.worker_conversation = order_conversation(name_, order.order_id, a.worker);

        onto::TypedFrame worker_frame(names::worker);
        worker_frame.set("aid", onto::Value::symbol(a.worker))
            .set("workstation", onto::Value::symbol(workstations_[a.worker]));
        onto::TypedAction pick{vocab.pick_and_place, a.robot, {{"order", order.parts}, {"worker", worker_frame}}};
        onto::TypedAction assemble{vocab.assembly, a.worker, {{"order", order.parts}}};

        ctx.send(ctx.build(Act::request, {acl::Aid(a.robot)}, encode(reg_, pick), reg_.name(), a.robot_conversation));
        ctx.send(ctx.build(Act::request, {acl::Aid(a.worker)}, encode(reg_, assemble), reg_.name(), a.worker_conversation));
        std::string id = order.order_id;
        a.order = std::move(order);
        in_flight_.emplace(id, std::move(a));
    }
}

Assignment* OrderHolon::find_by_conversation(const std::string& cv) {
    for (auto& [id, a] : in_flight_) {
        if (a.robot_conversation == cv || a.worker_conversation == cv) return &a;
    }
    return nullptr;
}

void OrderHolon::on_propagate(rt::AgentContext& ctx, const AclMessage& m) {
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (!kind_of(d.action->schema, &Vocabulary::manufacturing))
        return not_understood(ctx, m, "expected a manufacturing operation, got " + d.action->schema);
    ManufacturingOrder order = order_from_manufacturing_action(*d.action);
    if (order.amount < 1) return not_understood(ctx, m, "amount must be at least 1");
    bool known = in_flight_.count(order.order_id) ||
                 std::find(completed_.begin(), completed_.end(), order.order_id) != completed_.end() ||
                 std::any_of(queue_.begin(), queue_.end(), [&](const auto& q) { return q.order_id == order.order_id; });
    if (known) return not_understood(ctx, m, "order " + order.order_id + " already collected");

    ctx.send(ctx.reply(m, Act::confirm, m.content));
    queue_.push_back(std::move(order));
    dispatch(ctx);
    arm_rediscovery(ctx);
}

void OrderHolon::on_confirm(rt::AgentContext& ctx, const AclMessage& m) {
    Assignment* a = find_by_conversation(m.conversation_id);
    if (!a) return not_understood(ctx, m, "no dispatch on conversation " + m.conversation_id);
    bool from_robot = m.conversation_id == a->robot_conversation;
    bool& flag = from_robot ? a->robot_confirmed : a->worker_confirmed;
    if (flag) return not_understood(ctx, m, "already confirmed");
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    const auto& vocab = vocabulary(a->order.product_kind);
    if (d.action->schema != (from_robot ? vocab.pick_and_place : vocab.assembly))
        return not_understood(ctx, m, "confirmation names " + d.action->schema);
    flag = true;
}

void OrderHolon::on_robot_done(rt::AgentContext& ctx, const AclMessage& m) {
    Assignment* a = find_by_conversation(m.conversation_id);
    if (!a || m.conversation_id != a->robot_conversation || a->robot_done)
        return not_understood(ctx, m, "no pick-and-place pending on " + m.conversation_id);
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (d.action->schema != vocabulary(a->order.product_kind).pick_and_place ||
        order_id_of(d.action->input("order")) != a->order.order_id)
        return not_understood(ctx, m, "inform does not match order " + a->order.order_id);
    a->robot_done = true;
}

void OrderHolon::on_worker_done(rt::AgentContext& ctx, const AclMessage& m) {
    Assignment* a = find_by_conversation(m.conversation_id);
    if (!a || m.conversation_id != a->worker_conversation)
        return not_understood(ctx, m, "no assembly pending on " + m.conversation_id);
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (d.action->schema != vocabulary(a->order.product_kind).assembly ||
        order_id_of(d.action->input("order")) != a->order.order_id)
        return not_understood(ctx, m, "inform does not match order " + a->order.order_id);
    std::string id = a->order.order_id;
    in_flight_.erase(id);
    completed_.push_back(id);
    dispatch(ctx);
    arm_rediscovery(ctx);
}

void OrderHolon::on_refusal(rt::AgentContext&, const AclMessage& m) {
    errors_.push_back(std::string(acl::act_name(m.performative)) + " from " + m.sender.name + " on " +
                      m.conversation_id + ": " + m.content);
}

// ---------------------------------------------------------------------------
// Worker

WorkerHolon::WorkerHolon(const onto::OntologyRegistry& reg, std::string name, std::string workstation)
    : reg_(reg), name_(std::move(name)), workstation_(std::move(workstation)) {}

std::vector<rt::Behaviour> WorkerHolon::behaviours() {
    return {
        rt::Behaviour::once("announce",
                            [this](rt::AgentContext& ctx, const rt::Stimulus&) {
                                ctx.df_register(assembly_service, {{"workstation", workstation_}});
                            }),
        rt::Behaviour::every("assignment", rt::MessageFilter::act(Act::request), handler(this, &WorkerHolon::on_request)),
        rt::Behaviour::every("unit-placed", rt::MessageFilter::act(Act::inform_ref), handler(this, &WorkerHolon::on_unit_placed)),
        rt::Behaviour::every("all-placed", rt::MessageFilter::act(Act::inform_if), handler(this, &WorkerHolon::on_all_placed)),
        catch_all(),
    };
}

void WorkerHolon::transition(rt::AgentContext& ctx, WorkerStatus to) {
    ctx.record_status(std::string(status_name(status_)), std::string(status_name(to)));
    status_ = to;
}

bool WorkerHolon::is_current_order(const onto::TypedAction& a) const {
    if (!task_) return false;
    if (!kind_of(a.schema, &Vocabulary::pick_and_place)) return false;
    return order_id_of(a.input("order")) == task_->order_id && a.input("worker").at("aid").as_symbol() == name_;
}

void WorkerHolon::on_request(rt::AgentContext& ctx, const AclMessage& m) {
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (!kind_of(d.action->schema, &Vocabulary::assembly))
        return not_understood(ctx, m, name_ + " does not perform " + d.action->schema);
    if (status_ != WorkerStatus::free)
        return not_understood(ctx, m, name_ + " is " + std::string(status_name(status_)));
    ctx.send(ctx.reply(m, Act::confirm, m.content));
    task_ = Task{order_id_of(d.action->input("order")), *d.action, m};
    delivered_ = false;
    transition(ctx, WorkerStatus::reserve);
}

void WorkerHolon::on_unit_placed(rt::AgentContext& ctx, const AclMessage& m) {
    if (status_ != WorkerStatus::reserve) return not_understood(ctx, m, name_ + " is not waiting for parts");
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (!is_current_order(*d.action)) return not_understood(ctx, m, "placement is not for the current task");
    transition(ctx, WorkerStatus::busy);
}

void WorkerHolon::on_all_placed(rt::AgentContext& ctx, const AclMessage& m) {
    if (status_ != WorkerStatus::busy || delivered_)
        return not_understood(ctx, m, name_ + " is not receiving parts");
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (!is_current_order(*d.action)) return not_understood(ctx, m, "placement is not for the current task");
    delivered_ = true;
}

void WorkerHolon::task_done(rt::AgentContext& ctx) {
    if (status_ != WorkerStatus::busy)
        throw HolonError(HolonErrc::task_done_rejected, name_ + " is " + std::string(status_name(status_)));
    if (!delivered_) throw HolonError(HolonErrc::task_done_rejected, name_ + " still receiving units");
    ctx.send(ctx.reply(task_->request, Act::inform, encode(reg_, task_->assembly)));
    task_.reset();
    delivered_ = false;
    transition(ctx, WorkerStatus::free);
}

// ---------------------------------------------------------------------------
// Robot

RobotHolon::RobotHolon(const onto::OntologyRegistry& reg, std::string name) : reg_(reg), name_(std::move(name)) {}

std::vector<rt::Behaviour> RobotHolon::behaviours() {
    return {
        rt::Behaviour::once("announce",
                            [](rt::AgentContext& ctx, const rt::Stimulus&) { ctx.df_register(pick_and_place_service); }),
        rt::Behaviour::every("job", rt::MessageFilter::act(Act::request), handler(this, &RobotHolon::on_request)),
        rt::Behaviour::on_timer("unit-placed", rt::Behaviour::Kind::cyclic, "unit-placed",
                                [this](rt::AgentContext& ctx, const rt::Stimulus&) { on_unit_placed(ctx); }),
        rt::Behaviour::on_timer("job-done", rt::Behaviour::Kind::cyclic, "job-done",
                                [this](rt::AgentContext& ctx, const rt::Stimulus&) { on_job_done(ctx); }),
        catch_all(),
    };
}

std::optional<rt::TimeMs> RobotHolon::remaining_ms(rt::TimeMs now) const {
    if (!current_) return std::nullopt;
    return started_at_ + pick_and_place_duration(current_->amount) - now;
}

void RobotHolon::on_request(rt::AgentContext& ctx, const AclMessage& m) {
    auto d = decode(reg_, m);
    if (!d.action) return not_understood(ctx, m, d.error);
    if (!kind_of(d.action->schema, &Vocabulary::pick_and_place))
        return not_understood(ctx, m, name_ + " does not perform " + d.action->schema);
    const auto& order = d.action->input("order");
    std::int64_t amount = order.at("amount").as_integer();
    if (amount < 1) return not_understood(ctx, m, "amount must be at least 1");
    std::string worker = d.action->input("worker").at("aid").as_symbol();
    if (!ctx.platform().is_registered(worker)) {
        ctx.send(ctx.reply(m, Act::failure,
                           sl::print_content(sl::Frame{"unknown-worker", {{"name", sl::str(worker)}}})));
        return;
    }
    ctx.send(ctx.reply(m, Act::confirm, m.content));
    queue_.push_back(Job{order_id_of(order), amount, worker, m.content, m});
    if (!current_) start_next(ctx);
}

void RobotHolon::start_next(rt::AgentContext& ctx) {
    if (queue_.empty()) {
        if (status_ == RobotStatus::busy) {
            ctx.record_status("busy", "free");
            status_ = RobotStatus::free;
        }
        return;
    }
    current_ = std::move(queue_.front());
    queue_.pop_front();
    started_at_ = ctx.now();
    unit_inform_.reset();
    if (status_ == RobotStatus::free) {
        ctx.record_status("free", "busy");
        status_ = RobotStatus::busy;
    }
    ctx.schedule_after(pick_and_place_ms_per_unit, "unit-placed");
    ctx.schedule_after(pick_and_place_duration(current_->amount), "job-done");
}

void RobotHolon::on_unit_placed(rt::AgentContext& ctx) {
    if (!current_) return;
    AclMessage inform = ctx.build(Act::inform_ref, {acl::Aid(current_->worker)}, current_->content, reg_.name(),
                                  order_conversation(name_, current_->order_id, current_->worker));
    ctx.send(inform);
    unit_inform_ = std::move(inform);
}

void RobotHolon::on_job_done(rt::AgentContext& ctx) {
    if (!current_) return;
    ctx.send(ctx.reply(current_->request, Act::inform_if, current_->content));
    AclMessage to_worker = ctx.build(Act::inform_if, {acl::Aid(current_->worker)}, current_->content, reg_.name(),
                                     order_conversation(name_, current_->order_id, current_->worker));
    if (unit_inform_) to_worker.in_reply_to = unit_inform_->reply_with;
    ctx.send(to_worker);
    current_.reset();
    start_next(ctx);
}

}  // namespace workcell::holons
