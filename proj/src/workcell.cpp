#include "workcell/workcell.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace workcell {

using holons::HolonErrc;
using holons::HolonError;
using holons::ProductKind;

std::string_view role_name(AgentRole role) {
    switch (role) {
        case AgentRole::customer: return "customer";
        case AgentRole::product: return "product";
        case AgentRole::order: return "order";
        case AgentRole::worker: return "worker";
        case AgentRole::robot: return "robot";
    }
    return "";
}

const std::vector<std::pair<std::string, AgentRole>>& roster_roles() {
    static const std::vector<std::pair<std::string, AgentRole>> roles{
        {roster::customer_1, AgentRole::customer}, {roster::customer_2, AgentRole::customer},
        {roster::pump, AgentRole::product},        {roster::compressor, AgentRole::product},
        {roster::orders, AgentRole::order},        {roster::worker_1, AgentRole::worker},
        {roster::worker_2, AgentRole::worker},     {roster::robot, AgentRole::robot},
    };
    return roles;
}

namespace {

holons::PartCatalog load_catalog(const WorkcellConfig& config, ProductKind kind) {
    if (!config.catalog_dir) return holons::default_catalog(kind);
    std::string path = *config.catalog_dir + "/" + std::string(holons::product_name(kind)) + ".catalog";
    std::ifstream in(path);
    if (!in) throw holons::CatalogError(0, "cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return holons::parse_catalog(text.str());
}

OrderView view(const holons::ManufacturingOrder& o) {
    return OrderView{o.order_id, std::string(holons::product_name(o.product_kind)), o.amount};
}

std::string_view state_name(holons::CustomerHolon::OrderState s) {
    switch (s) {
        case holons::CustomerHolon::OrderState::pending: return "pending";
        case holons::CustomerHolon::OrderState::confirmed: return "confirmed";
        case holons::CustomerHolon::OrderState::rejected: return "rejected";
    }
    return "";
}

template <typename Map>
auto& find_holon(Map& holons, const std::string& name, const char* role) {
    auto it = holons.find(name);
    if (it == holons.end()) throw HolonError(HolonErrc::unknown_agent, "no " + std::string(role) + " named " + name);
    return *it->second;
}

}  // namespace

Workcell::Workcell(WorkcellConfig config)
    : registry_(onto::build_case_study_ontology()),
      platform_(std::make_unique<rt::Platform>("workcell", config.clock)) {
    for (const char* name : {roster::customer_1, roster::customer_2})
        customers_[name] = std::make_unique<holons::CustomerHolon>(registry_, name);
    products_[roster::pump] = std::make_unique<holons::ProductHolon>(
        registry_, roster::pump, ProductKind::pump, load_catalog(config, ProductKind::pump), config.product_hold_ms);
    products_[roster::compressor] = std::make_unique<holons::ProductHolon>(
        registry_, roster::compressor, ProductKind::compressor, load_catalog(config, ProductKind::compressor),
        config.product_hold_ms);
    orders_ = std::make_unique<holons::OrderHolon>(registry_, roster::orders, config.rediscovery_ms);
    workers_[roster::worker_1] = std::make_unique<holons::WorkerHolon>(registry_, roster::worker_1, "WS1");
    workers_[roster::worker_2] = std::make_unique<holons::WorkerHolon>(registry_, roster::worker_2, "WS2");
    robot_ = std::make_unique<holons::RobotHolon>(registry_, roster::robot);

    for (const auto& [name, role] : roster_roles()) {
        std::vector<rt::Behaviour> behaviours;
        switch (role) {
            case AgentRole::customer: behaviours = customers_.at(name)->behaviours(); break;
            case AgentRole::product: behaviours = products_.at(name)->behaviours(); break;
            case AgentRole::order: behaviours = orders_->behaviours(); break;
            case AgentRole::worker: behaviours = workers_.at(name)->behaviours(); break;
            case AgentRole::robot: behaviours = robot_->behaviours(); break;
        }
        platform_->register_agent(name, std::move(behaviours));
    }
    // Run start-up behaviours (DF registrations).
    platform_->run_until(platform_->now());
}

holons::CustomerHolon& Workcell::customer(const std::string& name) { return find_holon(customers_, name, "customer"); }
holons::ProductHolon& Workcell::product(const std::string& name) { return find_holon(products_, name, "product"); }
holons::WorkerHolon& Workcell::worker(const std::string& name) { return find_holon(workers_, name, "worker"); }

std::string Workcell::submit_order(const std::string& customer_name, ProductKind kind, const std::string& color,
                                   std::int64_t power, std::int64_t amount) {
    auto& c = customer(customer_name);
    std::string cv;
    platform_->with_agent(customer_name, [&](rt::AgentContext& ctx) {
        cv = c.submit_order(ctx, kind, color, power, amount, std::string(holons::product_name(kind)));
    });
    return cv;
}

void Workcell::start_production() {
    platform_->with_agent(roster::orders, [&](rt::AgentContext& ctx) { orders_->start_production(ctx); });
}

void Workcell::stop_production() { orders_->stop_production(); }

void Workcell::task_done(const std::string& worker_name) {
    auto& w = worker(worker_name);
    platform_->with_agent(worker_name, [&](rt::AgentContext& ctx) { w.task_done(ctx); });
}

void Workcell::reorder_product_queue(const std::string& product_name, const std::vector<std::size_t>& permutation) {
    product(product_name).reorder(permutation);
}

WorkcellSnapshot Workcell::snapshot() const {
    WorkcellSnapshot s;
    s.now = platform_->now();
    s.production_running = orders_->production_running();
    for (const auto& [name, role] : roster_roles()) {
        switch (role) {
            case AgentRole::worker: s.statuses[name] = holons::status_name(workers_.at(name)->status()); break;
            case AgentRole::robot: s.statuses[name] = holons::status_name(robot_->status()); break;
            default: s.statuses[name] = "active"; break;
        }
    }
    for (const auto& [name, p] : products_) {
        auto& q = s.product_queues[name];
        for (const auto& o : p->outgoing()) q.push_back(view(o));
        for (const auto& e : p->errors()) s.errors.push_back(name + ": " + e);
    }
    for (const auto& o : orders_->queue()) s.order_queue.push_back(view(o));
    for (const auto& [id, a] : orders_->in_flight()) {
        s.in_flight.push_back(
            AssignmentView{view(a.order), a.worker, a.robot, a.robot_confirmed, a.worker_confirmed, a.robot_done});
    }
    if (const auto& job = robot_->current_job()) {
        s.robot_job = RobotJobView{job->order_id, job->worker, job->amount, robot_->job_started_at(),
                                   *robot_->remaining_ms(platform_->now())};
    }
    for (const auto& j : robot_->queued_jobs()) s.robot_queue.push_back(j.order_id);
    s.completed = orders_->completed();
    for (const auto& [name, c] : customers_) {
        for (const auto& o : c->orders()) {
            s.customer_orders.push_back(CustomerOrderView{name, o.conversation_id,
                                                          std::string(holons::product_name(o.kind)),
                                                          std::string(state_name(o.state))});
        }
    }
    for (const auto& e : orders_->errors()) s.errors.push_back(std::string(roster::orders) + ": " + e);
    return s;
}

std::vector<std::string> check_snapshot(const WorkcellSnapshot& s) {
    std::vector<std::string> problems;
    std::map<std::string, int> seen;
    for (const auto& [product, q] : s.product_queues)
        for (const auto& o : q) ++seen[o.order_id];
    for (const auto& o : s.order_queue) ++seen[o.order_id];
    for (const auto& a : s.in_flight) ++seen[a.order.order_id];
    for (const auto& id : s.completed) ++seen[id];
    for (const auto& [id, n] : seen)
        if (n > 1) problems.push_back("order " + id + " held in " + std::to_string(n) + " places");

    std::set<std::string> busy_workers;
    for (const auto& a : s.in_flight) {
        if (!busy_workers.insert(a.worker).second) problems.push_back("worker " + a.worker + " has two orders in flight");
        if (a.order.amount < 1) problems.push_back("order " + a.order.order_id + " has amount below 1");
    }
    for (const auto& o : s.order_queue)
        if (o.amount < 1) problems.push_back("order " + o.order_id + " has amount below 1");

    auto robot_status = s.statuses.find(roster::robot);
    if (s.robot_job) {
        const auto& j = *s.robot_job;
        if (j.remaining_ms < 0) problems.push_back("robot remaining time is negative");
        if (j.remaining_ms > holons::pick_and_place_ms_per_unit * j.amount)
            problems.push_back("robot remaining time exceeds the job duration");
        if (robot_status != s.statuses.end() && robot_status->second != "busy")
            problems.push_back("robot has a job but is not busy");
    } else if (robot_status != s.statuses.end() && robot_status->second != "free") {
        problems.push_back("robot is busy without a job");
    }
    for (const auto& [name, status] : s.statuses) {
        static const std::set<std::string> known{"active", "free", "reserve", "busy"};
        if (!known.count(status)) problems.push_back(name + " has unknown status " + status);
    }
    return problems;
}

}  // namespace workcell
