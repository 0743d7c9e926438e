#pragma once

// The five holon kinds of the cooperative workcell and the protocol they run:
//
//   customer --AGREE(Building)--> product --PROPAGATE(Manufacturing)--> orders
//   orders --REQUEST(Pick-And-Place)--> robot, --REQUEST(Assembly)--> worker
//   robot --INFORM-REF--> worker (first unit placed)
//   robot --INFORM-IF--> orders, worker (all units placed)
//   worker --INFORM--> orders (task done)
//
// Every AGREE, PROPAGATE and REQUEST gets exactly one CONFIRM or
// NOT-UNDERSTOOD on the same conversation.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "workcell/ontology.hpp"
#include "workcell/platform.hpp"

namespace workcell::holons {

enum class ProductKind { pump, compressor };

std::string_view product_name(ProductKind kind);
std::optional<ProductKind> product_from_name(std::string_view name);

enum class WorkerStatus { free, reserve, busy };
enum class RobotStatus { free, busy };

std::string_view status_name(WorkerStatus s);
std::string_view status_name(RobotStatus s);

inline constexpr rt::TimeMs pick_and_place_ms_per_unit = 2000;

/// Overall pick-and-place time for an order: two seconds per unit.
rt::TimeMs pick_and_place_duration(std::int64_t amount);

// DF service types.
inline constexpr const char* assembly_service = "assembly";
inline constexpr const char* pick_and_place_service = "pick-and-place";
inline constexpr const char* order_management_service = "order-management";

enum class HolonErrc {
    invalid_amount,
    invalid_argument,
    task_done_rejected,
    reorder_rejected,
    unknown_agent,
};

class HolonError : public std::runtime_error {
public:
    HolonError(HolonErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    HolonErrc code() const { return code_; }

private:
    HolonErrc code_;
};

// ---------------------------------------------------------------------------
// Part catalog
//
// One part per line: "<Schema> <attr>=<value>... @<cell>". A value of
// $color or $power is taken from the customer order. A single
// "Operations-List operations=a,b,c" line gives the assembly operations.
// '#' starts a comment.

struct PartSpec {
    std::string schema;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::string position;
};

struct PartCatalog {
    std::vector<PartSpec> parts;
    std::vector<std::string> operations;
};

class CatalogError : public std::runtime_error {
public:
    CatalogError(int line, const std::string& what)
        : std::runtime_error("catalog line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

PartCatalog parse_catalog(std::string_view text);
std::string_view default_catalog_text(ProductKind kind);
PartCatalog default_catalog(ProductKind kind);

/// Checks that the catalog fills every part slot of the product schema
/// with well-typed values.
void check_catalog(const onto::OntologyRegistry& reg, ProductKind kind, const PartCatalog& catalog);

// ---------------------------------------------------------------------------

struct ManufacturingOrder {
    std::string order_id;
    ProductKind product_kind = ProductKind::pump;
    onto::TypedFrame parts;       // Pump-Order / Compressor-Order
    std::int64_t amount = 1;
    onto::TypedFrame operations;  // Operations-List
    std::optional<acl::Aid> source_customer;

    /// Pump-Manufacturing-Order / Compressor-Manufacturing-Order frame.
    onto::TypedFrame to_frame() const;

    bool operator==(const ManufacturingOrder&) const = default;
};

/// Rebuilds an order from a decoded Manufacturing-Operation action.
ManufacturingOrder order_from_manufacturing_action(const onto::TypedAction& action);

std::string order_conversation(std::string_view initiator, std::string_view order_id, std::string_view counterpart);

/// Content of NOT-UNDERSTOOD replies.
std::string not_understood_content(std::string_view reason);

// ---------------------------------------------------------------------------

class CustomerHolon {
public:
    enum class OrderState { pending, confirmed, rejected };
    struct SubmittedOrder {
        std::string conversation_id;
        ProductKind kind;
        std::string product_agent;
        OrderState state = OrderState::pending;
        bool operator==(const SubmittedOrder&) const = default;
    };

    CustomerHolon(const onto::OntologyRegistry& reg, std::string name);

    const std::string& name() const { return name_; }
    std::vector<rt::Behaviour> behaviours();

    /// Sends AGREE(<Product>-Building-Operation) to `product_agent` and
    /// returns the new conversation id.
    std::string submit_order(rt::AgentContext& ctx, ProductKind kind, const std::string& color,
                             std::int64_t power, std::int64_t amount, const std::string& product_agent);

    const std::vector<SubmittedOrder>& orders() const { return orders_; }

private:
    void on_reply(rt::AgentContext& ctx, const acl::AclMessage& m);

    const onto::OntologyRegistry& reg_;
    std::string name_;
    std::vector<SubmittedOrder> orders_;
};

class ProductHolon {
public:
    ProductHolon(const onto::OntologyRegistry& reg, std::string name, ProductKind kind, PartCatalog catalog,
                 rt::TimeMs hold_ms = 0);

    const std::string& name() const { return name_; }
    ProductKind kind() const { return kind_; }
    std::vector<rt::Behaviour> behaviours();

    /// Orders built but not yet propagated, in sending order.
    const std::vector<ManufacturingOrder>& outgoing() const { return outgoing_; }
    /// Order ids propagated, by OH acceptance state.
    const std::map<std::string, bool>& propagated() const { return propagated_; }
    const std::vector<std::string>& errors() const { return errors_; }

    /// New order of the outgoing list: entry i of the result is old entry
    /// permutation[i].
    void reorder(const std::vector<std::size_t>& permutation);

    /// Builds a manufacturing order from a validated customer order.
    ManufacturingOrder build_order(const onto::TypedFrame& customer_order, const acl::Aid& customer);

    void propagate_pending(rt::AgentContext& ctx);

private:
    void on_agree(rt::AgentContext& ctx, const acl::AclMessage& m);
    void on_reply(rt::AgentContext& ctx, const acl::AclMessage& m);

    const onto::OntologyRegistry& reg_;
    std::string name_;
    ProductKind kind_;
    PartCatalog catalog_;
    rt::TimeMs hold_ms_;
    std::uint64_t built_ = 0;
    bool flush_pending_ = false;
    std::vector<ManufacturingOrder> outgoing_;
    std::map<std::string, bool> propagated_;
    std::map<std::string, std::string> conversation_to_order_;
    std::vector<std::string> errors_;
};

struct Assignment {
    ManufacturingOrder order;
    std::string worker;
    std::string robot;
    std::string robot_conversation;
    std::string worker_conversation;
    bool robot_confirmed = false;
    bool worker_confirmed = false;
    bool robot_done = false;
    bool worker_done = false;
    bool operator==(const Assignment&) const = default;
};

class OrderHolon {
public:
    OrderHolon(const onto::OntologyRegistry& reg, std::string name, rt::TimeMs rediscovery_ms = 0);

    const std::string& name() const { return name_; }
    std::vector<rt::Behaviour> behaviours();

    /// One-shot resource discovery, then dispatch.
    void start_production(rt::AgentContext& ctx);
    /// Stops dispatching; in-flight orders finish.
    void stop_production();
    void discover(rt::AgentContext& ctx);
    void dispatch(rt::AgentContext& ctx);

    bool production_running() const { return running_; }
    const std::deque<ManufacturingOrder>& queue() const { return queue_; }
    const std::map<std::string, Assignment>& in_flight() const { return in_flight_; }
    const std::vector<std::string>& completed() const { return completed_; }
    const std::vector<std::string>& workers() const { return workers_; }
    const std::vector<std::string>& errors() const { return errors_; }
    std::vector<std::string> free_workers() const;

private:
    void on_propagate(rt::AgentContext& ctx, const acl::AclMessage& m);
    void on_confirm(rt::AgentContext& ctx, const acl::AclMessage& m);
    void on_robot_done(rt::AgentContext& ctx, const acl::AclMessage& m);
    void on_worker_done(rt::AgentContext& ctx, const acl::AclMessage& m);
    void on_refusal(rt::AgentContext& ctx, const acl::AclMessage& m);
    Assignment* find_by_conversation(const std::string& cv);
    void arm_rediscovery(rt::AgentContext& ctx);

    const onto::OntologyRegistry& reg_;
    std::string name_;
    rt::TimeMs rediscovery_ms_;
    bool running_ = false;
    bool rediscovery_scheduled_ = false;
    std::deque<ManufacturingOrder> queue_;
    std::map<std::string, Assignment> in_flight_;
    std::vector<std::string> completed_;
    std::vector<std::string> workers_;
    std::map<std::string, std::string> workstations_;
    std::vector<std::string> robots_;
    std::vector<std::string> errors_;
};

class WorkerHolon {
public:
    struct Task {
        std::string order_id;
        onto::TypedAction assembly;
        acl::AclMessage request;
        bool operator==(const Task&) const = default;
    };

    WorkerHolon(const onto::OntologyRegistry& reg, std::string name, std::string workstation);

    const std::string& name() const { return name_; }
    const std::string& workstation() const { return workstation_; }
    std::vector<rt::Behaviour> behaviours();

    WorkerStatus status() const { return status_; }
    bool all_units_delivered() const { return delivered_; }
    const std::optional<Task>& task() const { return task_; }

    /// The worker pressed task-done. Throws HolonError(task_done_rejected)
    /// unless busy with every unit delivered.
    void task_done(rt::AgentContext& ctx);

private:
    void on_request(rt::AgentContext& ctx, const acl::AclMessage& m);
    void on_unit_placed(rt::AgentContext& ctx, const acl::AclMessage& m);
    void on_all_placed(rt::AgentContext& ctx, const acl::AclMessage& m);
    bool is_current_order(const onto::TypedAction& a) const;
    void transition(rt::AgentContext& ctx, WorkerStatus to);

    const onto::OntologyRegistry& reg_;
    std::string name_;
    std::string workstation_;
    WorkerStatus status_ = WorkerStatus::free;
    bool delivered_ = false;
    std::optional<Task> task_;
};

class RobotHolon {
public:
    struct Job {
        std::string order_id;
        std::int64_t amount = 1;
        std::string worker;
        std::string content;  // the Pick-And-Place action, echoed in informs
        acl::AclMessage request;
        bool operator==(const Job&) const = default;
    };

    RobotHolon(const onto::OntologyRegistry& reg, std::string name);

    const std::string& name() const { return name_; }
    std::vector<rt::Behaviour> behaviours();

    RobotStatus status() const { return status_; }
    const std::optional<Job>& current_job() const { return current_; }
    rt::TimeMs job_started_at() const { return started_at_; }
    const std::deque<Job>& queued_jobs() const { return queue_; }
    /// Milliseconds until the current job's last unit is placed.
    std::optional<rt::TimeMs> remaining_ms(rt::TimeMs now) const;

private:
    void on_request(rt::AgentContext& ctx, const acl::AclMessage& m);
    void start_next(rt::AgentContext& ctx);
    void on_unit_placed(rt::AgentContext& ctx);
    void on_job_done(rt::AgentContext& ctx);

    const onto::OntologyRegistry& reg_;
    std::string name_;
    RobotStatus status_ = RobotStatus::free;
    std::optional<Job> current_;
    rt::TimeMs started_at_ = 0;
    std::optional<acl::AclMessage> unit_inform_;
    std::deque<Job> queue_;
};

}  // namespace workcell::holons
