#pragma once

// Scenario scripts, the scenario runner, trace export, and the invariant
// monitor applied to every run.
//
// Script format, one directive per line, '#' starts a comment:
//
//   SET product-hold-ms <ms>          (settings come before any AT line)
//   SET rediscovery-ms <ms>
//   AT <ms> submit_order <customer> <pump|compressor> <color> <power> <amount>
//   AT <ms> start_production
//   AT <ms> stop_production
//   AT <ms> task_done <worker>
//   AT <ms> reorder_product_queue <product> <index>...

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "workcell/workcell.hpp"

namespace workcell {

struct SubmitOrder {
    std::string customer;
    holons::ProductKind kind = holons::ProductKind::pump;
    std::string color;
    std::int64_t power = 0;
    std::int64_t amount = 0;
    bool operator==(const SubmitOrder&) const = default;
};
struct StartProduction {
    bool operator==(const StartProduction&) const = default;
};
struct StopProduction {
    bool operator==(const StopProduction&) const = default;
};
struct TaskDone {
    std::string worker;
    bool operator==(const TaskDone&) const = default;
};
struct ReorderProductQueue {
    std::string product;
    std::vector<std::size_t> permutation;
    bool operator==(const ReorderProductQueue&) const = default;
};

using DirectiveAction = std::variant<SubmitOrder, StartProduction, StopProduction, TaskDone, ReorderProductQueue>;

struct Directive {
    rt::TimeMs at = 0;
    DirectiveAction action;
    int line = 0;
    bool operator==(const Directive&) const = default;
};

struct ScenarioScript {
    std::optional<rt::TimeMs> product_hold_ms;
    std::optional<rt::TimeMs> rediscovery_ms;
    std::vector<Directive> directives;
};

class ScriptError : public std::runtime_error {
public:
    ScriptError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

ScenarioScript parse_scenario(std::string_view text);
ScenarioScript load_scenario(const std::string& path);

/// The "AT ..." line for a directive, parseable by parse_scenario.
std::string render_directive(const Directive& d);
std::string render_scenario(const ScenarioScript& script);

/// Applies one directive to the workcell at its current instant. Throws
/// HolonError when the workcell rejects it.
void apply_directive(Workcell& cell, const DirectiveAction& action);

struct Rejection {
    rt::TimeMs at = 0;
    int line = 0;
    std::string reason;
    bool operator==(const Rejection&) const = default;
};

struct ScenarioOutcome {
    rt::EventTrace trace;
    std::vector<Rejection> rejections;
    std::vector<std::string> invariant_violations;
    WorkcellSnapshot final_snapshot;
};

/// Bootstraps the roster, injects each directive at its time, runs to idle.
/// `config` supplies the clock and catalogs; the script's SET lines
/// override its timing settings.
ScenarioOutcome run_scenario(const ScenarioScript& script, WorkcellConfig config = {});

class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void export_trace(const rt::EventTrace& trace, const std::string& path);

// ---------------------------------------------------------------------------
// Trace invariants

/// Checks a trace against the status transition tables (per agent, starting
/// from free), non-decreasing timestamps and, when `settled` is set, that
/// every AGREE, PROPAGATE and REQUEST got exactly one reply.
std::vector<std::string> check_trace(const rt::EventTrace& trace, bool settled);

}  // namespace workcell
