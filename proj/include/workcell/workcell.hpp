#pragma once

// The bootstrapped cooperative workcell: the case-study ontology, the
// platform, and the eight-agent roster, plus read-only snapshots of it.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "workcell/holons.hpp"
#include "workcell/ontology.hpp"
#include "workcell/platform.hpp"

namespace workcell {

namespace roster {
inline constexpr const char* customer_1 = "customer-1";
inline constexpr const char* customer_2 = "customer-2";
inline constexpr const char* pump = "pump";
inline constexpr const char* compressor = "compressor";
inline constexpr const char* orders = "orders";
inline constexpr const char* worker_1 = "worker-1";
inline constexpr const char* worker_2 = "worker-2";
inline constexpr const char* robot = "robot";
}  // namespace roster

enum class AgentRole { customer, product, order, worker, robot };

std::string_view role_name(AgentRole role);

/// Registration order of the roster.
const std::vector<std::pair<std::string, AgentRole>>& roster_roles();

struct WorkcellConfig {
    rt::VirtualClock clock;
    rt::TimeMs product_hold_ms = 0;
    rt::TimeMs rediscovery_ms = 0;
    /// Directory holding pump.catalog and compressor.catalog; built-in
    /// catalogs when unset.
    std::optional<std::string> catalog_dir;
};

struct OrderView {
    std::string order_id;
    std::string product;
    std::int64_t amount = 0;
    bool operator==(const OrderView&) const = default;
};

struct AssignmentView {
    OrderView order;
    std::string worker;
    std::string robot;
    bool robot_confirmed = false;
    bool worker_confirmed = false;
    bool robot_done = false;
    bool operator==(const AssignmentView&) const = default;
};

struct RobotJobView {
    std::string order_id;
    std::string worker;
    std::int64_t amount = 0;
    rt::TimeMs started_at = 0;
    rt::TimeMs remaining_ms = 0;
    bool operator==(const RobotJobView&) const = default;
};

struct CustomerOrderView {
    std::string customer;
    std::string conversation_id;
    std::string product;
    std::string state;  // pending | confirmed | rejected
    bool operator==(const CustomerOrderView&) const = default;
};

struct WorkcellSnapshot {
    rt::TimeMs now = 0;
    bool production_running = false;
    std::map<std::string, std::string> statuses;  // every roster agent
    std::map<std::string, std::vector<OrderView>> product_queues;  // built, not yet propagated
    std::vector<OrderView> order_queue;
    std::vector<AssignmentView> in_flight;
    std::optional<RobotJobView> robot_job;
    std::vector<std::string> robot_queue;
    std::vector<std::string> completed;
    std::vector<CustomerOrderView> customer_orders;
    std::vector<std::string> errors;
    bool operator==(const WorkcellSnapshot&) const = default;
};

/// Consistency problems in a snapshot; empty when it is sound.
std::vector<std::string> check_snapshot(const WorkcellSnapshot& s);

class Workcell {
public:
    explicit Workcell(WorkcellConfig config = {});

    Workcell(const Workcell&) = delete;
    Workcell& operator=(const Workcell&) = delete;

    rt::Platform& platform() { return *platform_; }
    const rt::Platform& platform() const { return *platform_; }
    const onto::OntologyRegistry& ontology() const { return registry_; }
    const rt::EventTrace& trace() const { return platform_->trace(); }
    rt::TimeMs now() const { return platform_->now(); }

    // Directives. Each acts at the current instant; none advances time.
    std::string submit_order(const std::string& customer, holons::ProductKind kind, const std::string& color,
                             std::int64_t power, std::int64_t amount);
    void start_production();
    void stop_production();
    void task_done(const std::string& worker);
    void reorder_product_queue(const std::string& product, const std::vector<std::size_t>& permutation);

    void run_until(rt::TimeMs t) { platform_->run_until(t); }
    void run_until_idle() { platform_->run_until_idle(); }

    WorkcellSnapshot snapshot() const;

    holons::CustomerHolon& customer(const std::string& name);
    holons::ProductHolon& product(const std::string& name);
    holons::WorkerHolon& worker(const std::string& name);
    holons::OrderHolon& orders() { return *orders_; }
    holons::RobotHolon& robot() { return *robot_; }

private:
    onto::OntologyRegistry registry_;
    std::unique_ptr<rt::Platform> platform_;
    std::map<std::string, std::unique_ptr<holons::CustomerHolon>> customers_;
    std::map<std::string, std::unique_ptr<holons::ProductHolon>> products_;
    std::map<std::string, std::unique_ptr<holons::WorkerHolon>> workers_;
    std::unique_ptr<holons::OrderHolon> orders_;
    std::unique_ptr<holons::RobotHolon> robot_;
};

}  // namespace workcell
