#pragma once

// HTTP service over a live workcell.
//
//   POST /orders                       {"customer","product","color","power","amount"} -> 202
//   GET  /orders
//   POST /production/start | /production/stop
//   POST /workers/{name}/task-done
//   POST /products/{name}/reorder      {"permutation":[...]}
//   GET  /snapshot
//   GET  /trace                        text, one trace line per record
//   GET  /events                       server-sent events: a snapshot, then one record per event
//   POST /clock/advance                {"to":ms} or {"idle":true}; deterministic mode only
//
// One driver thread owns the workcell. Directives travel through the
// platform's inbound queue; handlers only read published snapshots.

#include <memory>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "workcell/workcell.hpp"

namespace workcell {

struct ServiceConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    WorkcellConfig workcell;
    int tick_ms = 20;  // driver wake-up period
};

class BindFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const WorkcellSnapshot& s);
nlohmann::json to_json(const rt::TraceRecord& r);
std::string_view holon_error_name(holons::HolonErrc code);

class WorkcellService {
public:
    explicit WorkcellService(ServiceConfig config);
    ~WorkcellService();

    WorkcellService(const WorkcellService&) = delete;
    WorkcellService& operator=(const WorkcellService&) = delete;

    /// Binds, starts the driver and HTTP threads, returns the bound port.
    int start();
    void stop();
    /// Blocks until stop() is called from another thread.
    void wait();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace workcell
