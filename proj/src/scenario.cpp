#include "workcell/scenario.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace workcell {

namespace {

std::int64_t parse_int(const std::string& token, int line, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || p != token.data() + token.size())
        throw ScriptError(line, std::string("expected integer ") + what + ", got '" + token + "'");
    return v;
}

bool in_roster(const std::string& name, AgentRole role) {
    for (const auto& [n, r] : roster_roles())
        if (n == name && r == role) return true;
    return false;
}

void expect_args(const std::vector<std::string>& args, std::size_t n, int line, const std::string& directive) {
    if (args.size() != n)
        throw ScriptError(line, directive + " takes " + std::to_string(n) + " argument(s), got " +
                                    std::to_string(args.size()));
}

DirectiveAction parse_action(const std::string& name, const std::vector<std::string>& args, int line) {
    if (name == "submit_order") {
        expect_args(args, 5, line, name);
        SubmitOrder s;
        s.customer = args[0];
        if (!in_roster(s.customer, AgentRole::customer)) throw ScriptError(line, "unknown customer " + s.customer);
        auto kind = holons::product_from_name(args[1]);
        if (!kind) throw ScriptError(line, "unknown product kind " + args[1]);
        s.kind = *kind;
        s.color = args[2];
        if (!sl::is_symbol(s.color)) throw ScriptError(line, "color must be a symbol, got '" + s.color + "'");
        s.power = parse_int(args[3], line, "power");
        s.amount = parse_int(args[4], line, "amount");
        return s;
    }
    if (name == "start_production") {
        expect_args(args, 0, line, name);
        return StartProduction{};
    }
    if (name == "stop_production") {
        expect_args(args, 0, line, name);
        return StopProduction{};
    }
    if (name == "task_done") {
        expect_args(args, 1, line, name);
        if (!in_roster(args[0], AgentRole::worker)) throw ScriptError(line, "unknown worker " + args[0]);
        return TaskDone{args[0]};
    }
    if (name == "reorder_product_queue") {
        if (args.empty()) throw ScriptError(line, name + " needs a product");
        if (!in_roster(args[0], AgentRole::product)) throw ScriptError(line, "unknown product " + args[0]);
        ReorderProductQueue r{args[0], {}};
        for (std::size_t i = 1; i < args.size(); ++i) {
            auto v = parse_int(args[i], line, "index");
            if (v < 0) throw ScriptError(line, "negative index " + args[i]);
            r.permutation.push_back(static_cast<std::size_t>(v));
        }
        return r;
    }
    throw ScriptError(line, "unknown directive '" + name + "'");
}

struct RenderAction {
    std::string operator()(const SubmitOrder& s) const {
        return "submit_order " + s.customer + " " + std::string(holons::product_name(s.kind)) + " " + s.color + " " +
               std::to_string(s.power) + " " + std::to_string(s.amount);
    }
    std::string operator()(const StartProduction&) const { return "start_production"; }
    std::string operator()(const StopProduction&) const { return "stop_production"; }
    std::string operator()(const TaskDone& t) const { return "task_done " + t.worker; }
    std::string operator()(const ReorderProductQueue& r) const {
        std::string out = "reorder_product_queue " + r.product;
        for (auto i : r.permutation) out += " " + std::to_string(i);
        return out;
    }
};

}  // namespace

ScenarioScript parse_scenario(std::string_view text) {
    ScenarioScript script;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    rt::TimeMs last = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream words(raw);
        std::vector<std::string> tokens;
        for (std::string w; words >> w;) tokens.push_back(w);
        if (tokens.empty()) continue;

        if (tokens[0] == "SET") {
            if (!script.directives.empty()) throw ScriptError(line, "SET after the first AT line");
            if (tokens.size() != 3) throw ScriptError(line, "expected SET <setting> <ms>");
            auto v = parse_int(tokens[2], line, "milliseconds");
            if (v < 0) throw ScriptError(line, "negative setting");
            if (tokens[1] == "product-hold-ms")
                script.product_hold_ms = v;
            else if (tokens[1] == "rediscovery-ms")
                script.rediscovery_ms = v;
            else
                throw ScriptError(line, "unknown setting " + tokens[1]);
            continue;
        }
        if (tokens[0] != "AT" || tokens.size() < 3) throw ScriptError(line, "expected AT <ms> <directive> <args...>");
        auto at = parse_int(tokens[1], line, "time");
        if (at < 0) throw ScriptError(line, "negative time");
        if (at < last) throw ScriptError(line, "time goes backwards");
        last = at;
        std::vector<std::string> args(tokens.begin() + 3, tokens.end());
        script.directives.push_back(Directive{at, parse_action(tokens[2], args, line), line});
    }
    return script;
}

ScenarioScript load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

std::string render_directive(const Directive& d) {
    return "AT " + std::to_string(d.at) + " " + std::visit(RenderAction{}, d.action);
}

std::string render_scenario(const ScenarioScript& script) {
    std::string out;
    if (script.product_hold_ms) out += "SET product-hold-ms " + std::to_string(*script.product_hold_ms) + "\n";
    if (script.rediscovery_ms) out += "SET rediscovery-ms " + std::to_string(*script.rediscovery_ms) + "\n";
    for (const auto& d : script.directives) out += render_directive(d) + "\n";
    return out;
}

void apply_directive(Workcell& cell, const DirectiveAction& action) {
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SubmitOrder>)
                cell.submit_order(a.customer, a.kind, a.color, a.power, a.amount);
            else if constexpr (std::is_same_v<T, StartProduction>)
                cell.start_production();
            else if constexpr (std::is_same_v<T, StopProduction>)
                cell.stop_production();
            else if constexpr (std::is_same_v<T, TaskDone>)
                cell.task_done(a.worker);
            else
                cell.reorder_product_queue(a.product, a.permutation);
        },
        action);
}

ScenarioOutcome run_scenario(const ScenarioScript& script, WorkcellConfig config) {
    if (script.product_hold_ms) config.product_hold_ms = *script.product_hold_ms;
    if (script.rediscovery_ms) config.rediscovery_ms = *script.rediscovery_ms;
    Workcell cell(config);
    ScenarioOutcome out;
    std::set<std::string> reported;
    auto check = [&] {
        for (auto& p : check_snapshot(cell.snapshot())) {
            std::string msg = "t=" + std::to_string(cell.now()) + ": " + p;
            if (reported.insert(msg).second) out.invariant_violations.push_back(msg);
        }
    };

    // In scaled mode every event waits for its wall-clock moment; the
    // resulting trace is the same as in deterministic mode.
    const auto wall_start = std::chrono::steady_clock::now();
    auto pace = [&](rt::TimeMs t) {
        if (config.clock.mode != rt::ClockMode::scaled_wall_clock || config.clock.scale <= 0) return;
        std::this_thread::sleep_until(wall_start + std::chrono::duration<double, std::milli>(t / config.clock.scale));
    };
    auto advance = [&](std::optional<rt::TimeMs> limit) {
        cell.run_until(cell.now());
        while (auto next = cell.platform().next_deadline()) {
            if (limit && *next > *limit) break;
            pace(*next);
            cell.run_until(*next);
        }
        if (limit) {
            pace(*limit);
            cell.run_until(*limit);
        }
    };

    for (const auto& d : script.directives) {
        advance(d.at);
        check();
        try {
            apply_directive(cell, d.action);
        } catch (const holons::HolonError& e) {
            out.rejections.push_back(Rejection{d.at, d.line, e.what()});
        }
        cell.run_until(d.at);
        check();
    }
    advance(std::nullopt);
    cell.run_until_idle();
    check();
    for (auto& v : check_trace(cell.trace(), true)) out.invariant_violations.push_back(std::move(v));
    out.trace = cell.trace();
    out.final_snapshot = cell.snapshot();
    return out;
}

void export_trace(const rt::EventTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << trace.render();
    out.flush();
    if (!out) throw IoFailure("write to " + path + " failed");
}

}  // namespace workcell
