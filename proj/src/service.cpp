#include "workcell/service.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <mutex>
#include <thread>

#include "httplib.h"

namespace workcell {

using nlohmann::json;

namespace {

json order_json(const OrderView& o) { return {{"order_id", o.order_id}, {"product", o.product}, {"amount", o.amount}}; }

json orders_json(const WorkcellSnapshot& s) {
    json j;
    j["customer_orders"] = json::array();
    for (const auto& c : s.customer_orders) {
        j["customer_orders"].push_back(
            {{"customer", c.customer}, {"conversation_id", c.conversation_id}, {"product", c.product}, {"state", c.state}});
    }
    j["product_queues"] = json::object();
    for (const auto& [name, q] : s.product_queues) {
        auto& arr = j["product_queues"][name] = json::array();
        for (const auto& o : q) arr.push_back(order_json(o));
    }
    j["order_queue"] = json::array();
    for (const auto& o : s.order_queue) j["order_queue"].push_back(order_json(o));
    j["in_flight"] = json::array();
    for (const auto& a : s.in_flight) {
        j["in_flight"].push_back({{"order", order_json(a.order)},
                                  {"worker", a.worker},
                                  {"robot", a.robot},
                                  {"robot_confirmed", a.robot_confirmed},
                                  {"worker_confirmed", a.worker_confirmed},
                                  {"robot_done", a.robot_done}});
    }
    j["completed"] = s.completed;
    return j;
}

struct Reply {
    int status = 200;
    json body;
};

Reply holon_error_reply(const holons::HolonError& e) {
    int status = 409;
    switch (e.code()) {
        case holons::HolonErrc::unknown_agent: status = 404; break;
        case holons::HolonErrc::invalid_amount:
        case holons::HolonErrc::invalid_argument: status = 400; break;
        default: break;
    }
    return {status, {{"error", holon_error_name(e.code())}, {"message", e.what()}}};
}

Reply bad_request(const std::string& message) { return {400, {{"error", "BadRequest"}, {"message", message}}}; }

void send(httplib::Response& res, const Reply& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

std::optional<json> parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

}  // namespace

std::string_view holon_error_name(holons::HolonErrc code) {
    switch (code) {
        case holons::HolonErrc::invalid_amount: return "InvalidAmount";
        case holons::HolonErrc::invalid_argument: return "InvalidArgument";
        case holons::HolonErrc::task_done_rejected: return "TaskDoneRejected";
        case holons::HolonErrc::reorder_rejected: return "ReorderRejected";
        case holons::HolonErrc::unknown_agent: return "UnknownAgent";
    }
    return "";
}

json to_json(const WorkcellSnapshot& s) {
    json j = orders_json(s);
    j["now"] = s.now;
    j["production_running"] = s.production_running;
    j["statuses"] = s.statuses;
    if (s.robot_job) {
        const auto& r = *s.robot_job;
        j["robot_job"] = {{"order_id", r.order_id},
                          {"worker", r.worker},
                          {"amount", r.amount},
                          {"started_at", r.started_at},
                          {"remaining_ms", r.remaining_ms}};
    } else {
        j["robot_job"] = nullptr;
    }
    j["robot_queue"] = s.robot_queue;
    j["errors"] = s.errors;
    return j;
}

json to_json(const rt::TraceRecord& r) {
    json j;
    if (const auto* s = std::get_if<rt::StatusRecord>(&r)) {
        j = {{"type", "status"}, {"at", s->at}, {"agent", s->agent}, {"from", s->from}, {"to", s->to}};
    } else {
        const auto& rec = std::get<rt::MessageRecord>(r);
        const auto& m = rec.message;
        json receivers = json::array();
        for (const auto& a : m.receivers) receivers.push_back(a.name);
        j = {{"type", "message"},
             {"at", rec.at},
             {"performative", acl::act_name(m.performative)},
             {"sender", m.sender.name},
             {"receivers", receivers},
             {"conversation_id", m.conversation_id},
             {"reply_with", m.reply_with ? json(*m.reply_with) : json(nullptr)},
             {"in_reply_to", m.in_reply_to ? json(*m.in_reply_to) : json(nullptr)},
             {"ontology", m.ontology},
             {"content", m.content}};
    }
    j["line"] = rt::render_record(r);
    return j;
}

struct WorkcellService::Impl {
    explicit Impl(ServiceConfig c) : config(std::move(c)), cell(config.workcell) {}

    ServiceConfig config;
    Workcell cell;  // driver thread only
    httplib::Server server;
    std::thread driver;
    std::thread http;
    int port = 0;
    bool scaled() const { return config.workcell.clock.mode == rt::ClockMode::scaled_wall_clock; }

    std::mutex mu;
    std::condition_variable wake_cv;
    std::condition_variable events_cv;
    std::condition_variable stopped_cv;
    bool running = false;
    bool stopping = false;
    bool wake = false;
    std::deque<std::function<void()>> control;

    // Published state, guarded by mu.
    WorkcellSnapshot snapshot;
    std::vector<std::string> events;
    std::string trace_text;
    std::string fatal;

    std::chrono::steady_clock::time_point wall_start;
    std::size_t published = 0;  // driver thread only

    void publish() {
        WorkcellSnapshot snap = cell.snapshot();
        const auto& records = cell.trace().records;
        std::vector<std::string> fresh;
        std::string lines;
        for (; published < records.size(); ++published) {
            fresh.push_back(to_json(records[published]).dump());
            lines += rt::render_record(records[published]) + "\n";
        }
        {
            std::lock_guard lk(mu);
            snapshot = std::move(snap);
            if (!fatal.empty()) snapshot.errors.push_back(fatal);
            for (auto& e : fresh) events.push_back(std::move(e));
            trace_text += lines;
        }
        events_cv.notify_all();
    }

    void poke() {
        {
            std::lock_guard lk(mu);
            wake = true;
        }
        wake_cv.notify_all();
    }

    void drive() {
        publish();
        std::unique_lock lk(mu);
        while (!stopping) {
            auto tasks = std::move(control);
            control.clear();
            wake = false;
            lk.unlock();
            try {
                for (auto& t : tasks) t();
                if (scaled()) {
                    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start);
                    cell.run_until(static_cast<rt::TimeMs>(elapsed.count() * config.workcell.clock.scale));
                } else {
                    cell.run_until(cell.now());
                }
            } catch (const std::exception& e) {
                std::lock_guard g(mu);
                fatal = std::string("event loop halted: ") + e.what();
                stopping = true;
            }
            publish();
            lk.lock();
            wake_cv.wait_for(lk, std::chrono::milliseconds(config.tick_ms),
                             [&] { return stopping || wake || !control.empty(); });
        }
    }

    /// Runs `fn` inside the event loop via the inbound queue and waits for it.
    Reply directive(std::function<Reply(Workcell&)> fn) {
        auto promise = std::make_shared<std::promise<Reply>>();
        auto future = promise->get_future();
        cell.platform().inbound().push([this, promise, fn = std::move(fn)](rt::Platform&) {
            Reply r;
            try {
                r = fn(cell);
            } catch (const holons::HolonError& e) {
                r = holon_error_reply(e);
            }
            publish();
            promise->set_value(std::move(r));
        });
        poke();
        if (future.wait_for(std::chrono::seconds(10)) != std::future_status::ready)
            return {503, {{"error", "Unavailable"}, {"message", "event loop did not pick up the directive"}}};
        return future.get();
    }

    Reply advance(std::optional<rt::TimeMs> to) {
        auto promise = std::make_shared<std::promise<Reply>>();
        auto future = promise->get_future();
        {
            std::lock_guard lk(mu);
            control.push_back([this, promise, to] {
                if (to)
                    cell.run_until(*to);
                else
                    cell.run_until_idle();
                publish();
                promise->set_value(Reply{200, {{"now", cell.now()}}});
            });
        }
        wake_cv.notify_all();
        if (future.wait_for(std::chrono::seconds(30)) != std::future_status::ready)
            return {503, {{"error", "Unavailable"}, {"message", "clock advance timed out"}}};
        return future.get();
    }

    WorkcellSnapshot current() {
        std::lock_guard lk(mu);
        return snapshot;
    }

    void routes();
};

void WorkcellService::Impl::routes() {
    server.Post("/orders", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        if (!body) return send(res, bad_request("body must be a JSON object"));
        const json& b = *body;
        for (const char* f : {"customer", "product", "color"})
            if (!b.contains(f) || !b[f].is_string()) return send(res, bad_request(std::string(f) + " must be a string"));
        for (const char* f : {"power", "amount"})
            if (!b.contains(f) || !b[f].is_number_integer())
                return send(res, bad_request(std::string(f) + " must be an integer"));
        auto kind = holons::product_from_name(b["product"].get<std::string>());
        if (!kind) return send(res, bad_request("product must be pump or compressor"));
        auto customer = b["customer"].get<std::string>();
        auto color = b["color"].get<std::string>();
        auto power = b["power"].get<std::int64_t>();
        auto amount = b["amount"].get<std::int64_t>();
        send(res, directive([=](Workcell& w) {
                 auto cv = w.submit_order(customer, *kind, color, power, amount);
                 return Reply{202, {{"conversation_id", cv}}};
             }));
    });
    server.Get("/orders", [this](const httplib::Request&, httplib::Response& res) {
        send(res, {200, orders_json(current())});
    });
    server.Post("/production/start", [this](const httplib::Request&, httplib::Response& res) {
        send(res, directive([](Workcell& w) {
                 w.start_production();
                 return Reply{200, {{"production_running", true}}};
             }));
    });
    server.Post("/production/stop", [this](const httplib::Request&, httplib::Response& res) {
        send(res, directive([](Workcell& w) {
                 w.stop_production();
                 return Reply{200, {{"production_running", false}}};
             }));
    });
    server.Post(R"(/workers/([^/]+)/task-done)", [this](const httplib::Request& req, httplib::Response& res) {
        std::string worker = req.matches[1];
        send(res, directive([worker](Workcell& w) {
                 w.task_done(worker);
                 return Reply{200, {{"worker", worker}, {"status", "free"}}};
             }));
    });
    server.Post(R"(/products/([^/]+)/reorder)", [this](const httplib::Request& req, httplib::Response& res) {
        std::string product = req.matches[1];
        auto body = parse_body(req);
        if (!body || !body->contains("permutation") || !(*body)["permutation"].is_array())
            return send(res, bad_request("permutation must be an array"));
        std::vector<std::size_t> perm;
        for (const auto& v : (*body)["permutation"]) {
            if (!v.is_number_unsigned()) return send(res, bad_request("permutation entries must be non-negative"));
            perm.push_back(v.get<std::size_t>());
        }
        send(res, directive([product, perm](Workcell& w) {
                 w.reorder_product_queue(product, perm);
                 return Reply{200, {{"product", product}}};
             }));
    });
    server.Get("/snapshot", [this](const httplib::Request&, httplib::Response& res) {
        send(res, {200, to_json(current())});
    });
    server.Get("/trace", [this](const httplib::Request&, httplib::Response& res) {
        std::string text;
        {
            std::lock_guard lk(mu);
            text = trace_text;
        }
        res.set_content(text, "text/plain");
    });
    server.Post("/clock/advance", [this](const httplib::Request& req, httplib::Response& res) {
        if (scaled())
            return send(res, {409, {{"error", "ScaledClock"}, {"message", "the clock follows wall time"}}});
        auto body = parse_body(req);
        if (!body) return send(res, bad_request("body must be a JSON object"));
        if (body->value("idle", false)) return send(res, advance(std::nullopt));
        if (!body->contains("to") || !(*body)["to"].is_number_integer())
            return send(res, bad_request("expected {\"to\": ms} or {\"idle\": true}"));
        send(res, advance((*body)["to"].get<rt::TimeMs>()));
    });
    server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
        auto next = std::make_shared<std::optional<std::size_t>>();
        if (req.has_param("from")) *next = static_cast<std::size_t>(std::stoull(req.get_param_value("from")));
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("text/event-stream", [this, next](std::size_t, httplib::DataSink& sink) {
            std::unique_lock lk(mu);
            std::string out;
            if (!*next) {
                json j = to_json(snapshot);
                j["event_count"] = events.size();
                *next = events.size();
                out = "event: snapshot\ndata: " + j.dump() + "\n\n";
            } else {
                events_cv.wait_for(lk, std::chrono::seconds(1), [&] { return stopping || events.size() > **next; });
                if (stopping) {
                    lk.unlock();
                    sink.done();
                    return true;
                }
                while (**next < events.size()) out += "event: record\ndata: " + events[(**next)++] + "\n\n";
            }
            lk.unlock();
            if (out.empty()) out = ": idle\n\n";
            return sink.write(out.data(), out.size());
        });
    });
}

WorkcellService::WorkcellService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
    // SO_REUSEADDR only.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    impl_->routes();
}

WorkcellService::~WorkcellService() { stop(); }

int WorkcellService::start() {
    auto& im = *impl_;
    if (im.config.port == 0) {
        im.port = im.server.bind_to_any_port(im.config.bind);
        if (im.port < 0) throw BindFailure("cannot bind " + im.config.bind);
    } else {
        if (!im.server.bind_to_port(im.config.bind, im.config.port))
            throw BindFailure("cannot bind " + im.config.bind + ":" + std::to_string(im.config.port));
        im.port = im.config.port;
    }
    im.wall_start = std::chrono::steady_clock::now();
    {
        std::lock_guard lk(im.mu);
        im.running = true;
    }
    im.driver = std::thread([&im] { im.drive(); });
    im.http = std::thread([&im] { im.server.listen_after_bind(); });
    im.server.wait_until_ready();
    return im.port;
}

void WorkcellService::stop() {
    auto& im = *impl_;
    {
        std::lock_guard lk(im.mu);
        if (!im.running) return;
        im.stopping = true;
    }
    im.wake_cv.notify_all();
    im.events_cv.notify_all();
    im.server.stop();
    if (im.http.joinable()) im.http.join();
    if (im.driver.joinable()) im.driver.join();
    {
        std::lock_guard lk(im.mu);
        im.running = false;
    }
    im.stopped_cv.notify_all();
}

void WorkcellService::wait() {
    auto& im = *impl_;
    std::unique_lock lk(im.mu);
    im.stopped_cv.wait(lk, [&] { return !im.running; });
}

int WorkcellService::port() const { return impl_->port; }

}  // namespace workcell
