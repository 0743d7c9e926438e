#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "scenario_gen.hpp"
#include "workcell/scenario.hpp"

using namespace workcell;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::optional<int> error_line(std::string_view text) {
    try {
        parse_scenario(text);
    } catch (const ScriptError& e) {
        return e.line();
    }
    return std::nullopt;
}

const char* reference_script = R"(# reference run
AT 0 submit_order customer-1 pump blue 5 3
AT 0 submit_order customer-2 compressor red 7 2
AT 0 start_production
AT 7000 task_done worker-1
AT 11000 task_done worker-2
)";

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / ("workcell-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

rt::MessageRecord msg(rt::TimeMs at, acl::Act act, std::string from, std::string to, std::string cv,
                      std::optional<std::string> reply_with, std::optional<std::string> in_reply_to = std::nullopt) {
    acl::AclMessage m;
    m.performative = act;
    m.sender = acl::Aid(std::move(from));
    m.receivers = {acl::Aid(std::move(to))};
    m.conversation_id = std::move(cv);
    m.reply_with = std::move(reply_with);
    m.in_reply_to = std::move(in_reply_to);
    return rt::MessageRecord{at, m};
}

}  // namespace

TEST_CASE("parse_scenario") {
    auto s = parse_scenario(reference_script);
    REQUIRE(s.directives.size() == 5);
    CHECK(s.directives[0] ==
          Directive{0, SubmitOrder{"customer-1", holons::ProductKind::pump, "blue", 5, 3}, 2});
    CHECK(s.directives[2].action == DirectiveAction{StartProduction{}});
    CHECK(s.directives[4] == Directive{11000, TaskDone{"worker-2"}, 6});
    CHECK_FALSE(s.product_hold_ms.has_value());

    auto set = parse_scenario("SET product-hold-ms 250\nSET rediscovery-ms 900\nAT 5 stop_production\n"
                              "AT 5 reorder_product_queue pump 1 0\n");
    CHECK(set.product_hold_ms == 250);
    CHECK(set.rediscovery_ms == 900);
    CHECK(set.directives[1].action == DirectiveAction{ReorderProductQueue{"pump", {1, 0}}});
    CHECK(parse_scenario("").directives.empty());
    CHECK(parse_scenario("# nothing\n\n   \n").directives.empty());
}

TEST_CASE("script errors name their line") {
    CHECK(error_line("AT 0 start_production\nAT x start_production\n") == 2);
    CHECK(error_line("AT 10 start_production\nAT 5 start_production\n") == 2);
    CHECK(error_line("AT -1 start_production\n") == 1);
    CHECK(error_line("AT 0\n") == 1);
    CHECK(error_line("at 0 start_production\n") == 1);
    CHECK(error_line("AT 0 dance\n") == 1);
    CHECK(error_line("AT 0 start_production now\n") == 1);
    CHECK(error_line("AT 0 submit_order customer-3 pump blue 5 3\n") == 1);
    CHECK(error_line("AT 0 submit_order customer-1 valve blue 5 3\n") == 1);
    CHECK(error_line("AT 0 submit_order customer-1 pump \"blue\" 5 3\n") == 1);
    CHECK(error_line("AT 0 submit_order customer-1 pump blue five 3\n") == 1);
    CHECK(error_line("AT 0 submit_order customer-1 pump blue 5\n") == 1);
    CHECK(error_line("AT 0 task_done robot\n") == 1);
    CHECK(error_line("AT 0 reorder_product_queue\n") == 1);
    CHECK(error_line("AT 0 reorder_product_queue orders 0\n") == 1);
    CHECK(error_line("AT 0 reorder_product_queue pump -1\n") == 1);
    CHECK(error_line("# a\nAT 0 start_production\nSET product-hold-ms 5\n") == 3);
    CHECK(error_line("SET hold 5\n") == 1);
    CHECK(error_line("SET product-hold-ms -5\n") == 1);
    CHECK(error_line("SET product-hold-ms\n") == 1);
    // Amount 0 parses; the workcell rejects it when applied.
    CHECK_FALSE(error_line("AT 0 submit_order customer-1 pump blue 5 0\n").has_value());

    CHECK_THROWS_AS(load_scenario("/nonexistent/dir/x.scn"), IoFailure);
    CHECK_THROWS_AS(load_scenario(WORKCELL_GOLDEN_DIR "/bad.scn"), ScriptError);
}

TEST_CASE("property: render then parse keeps the script") {
    gen::Gen g(0x5c7);
    for (int i = 0; i < 300; ++i) {
        auto s = gen::random_scenario(g);
        auto back = parse_scenario(render_scenario(s));
        CHECK(back.product_hold_ms == s.product_hold_ms);
        CHECK(back.rediscovery_ms == s.rediscovery_ms);
        REQUIRE(back.directives.size() == s.directives.size());
        for (std::size_t k = 0; k < s.directives.size(); ++k) {
            CHECK(back.directives[k].at == s.directives[k].at);
            CHECK(back.directives[k].action == s.directives[k].action);
        }
    }
}

TEST_CASE("reference scenario reproduces the golden trace") {
    auto out = run_scenario(parse_scenario(reference_script));
    CHECK(out.rejections.empty());
    CHECK(out.invariant_violations.empty());
    CHECK(out.trace.render() == read_file(WORKCELL_GOLDEN_DIR "/reference.trace"));
    CHECK(out.final_snapshot.completed == std::vector<std::string>{"pump-1", "compressor-1"});
    CHECK(out.final_snapshot.now == 11000);

    auto file = run_scenario(load_scenario(WORKCELL_SOURCE_DIR "/data/scenarios/reference.scn"));
    CHECK(file.trace.render() == out.trace.render());
}

TEST_CASE("catalogs load from a directory") {
    WorkcellConfig config;
    config.catalog_dir = WORKCELL_SOURCE_DIR "/data/catalog";
    auto out = run_scenario(parse_scenario(reference_script), config);
    CHECK(out.trace.render() == read_file(WORKCELL_GOLDEN_DIR "/reference.trace"));

    config.catalog_dir = WORKCELL_GOLDEN_DIR;
    CHECK_THROWS_AS(run_scenario(parse_scenario(reference_script), config), holons::CatalogError);
}

TEST_CASE("empty script gives an empty trace") {
    auto out = run_scenario(ScenarioScript{});
    CHECK(out.trace.empty());
    CHECK(out.rejections.empty());
    CHECK(out.invariant_violations.empty());
    CHECK(out.final_snapshot.statuses.size() == 8);
}

TEST_CASE("rejected directives are reported and the run goes on") {
    auto out = run_scenario(parse_scenario("AT 0 task_done worker-1\n"
                                           "AT 0 submit_order customer-1 pump blue 5 0\n"
                                           "AT 0 submit_order customer-1 pump blue 5 1\n"
                                           "AT 0 reorder_product_queue pump 0\n"
                                           "AT 0 start_production\n"
                                           "AT 1000 task_done worker-1\n"
                                           "AT 3000 task_done worker-1\n"));
    REQUIRE(out.rejections.size() == 4);
    CHECK(out.rejections[0].line == 1);
    CHECK(out.rejections[0].reason == "worker-1 is free");
    CHECK(out.rejections[1].line == 2);
    CHECK(out.rejections[2].line == 4);
    CHECK(out.rejections[3] == Rejection{1000, 6, "worker-1 is reserve"});
    CHECK(out.final_snapshot.completed == std::vector<std::string>{"pump-1"});
    CHECK(out.invariant_violations.empty());
}

TEST_CASE("scaled clock yields the deterministic trace") {
    auto script = parse_scenario(reference_script);
    WorkcellConfig cfg;
    cfg.clock.mode = rt::ClockMode::scaled_wall_clock;
    cfg.clock.scale = 200.0;
    auto scaled = run_scenario(script, cfg);
    CHECK(scaled.trace.render() == run_scenario(script).trace.render());
}

TEST_CASE("property: random scenarios are deterministic and sound") {
    gen::Gen g(0x9a7e);
    for (int i = 0; i < 200; ++i) {
        auto script = gen::random_scenario(g);
        INFO(render_scenario(script));
        auto a = run_scenario(script);
        auto b = run_scenario(script);
        CHECK(a.trace.render() == b.trace.render());
        CHECK(a.rejections == b.rejections);
        CHECK(a.invariant_violations.empty());
        rt::TimeMs last = 0;
        for (const auto& r : a.trace.records) {
            CHECK(rt::record_time(r) >= last);
            last = rt::record_time(r);
        }
    }
}

TEST_CASE("export_trace") {
    auto dir = scratch_dir();
    auto out = run_scenario(parse_scenario(reference_script));
    auto path = (dir / "ref.trace").string();
    export_trace(out.trace, path);
    CHECK(read_file(path) == out.trace.render());
    export_trace(out.trace, path);
    CHECK(read_file(path) == out.trace.render());

    auto empty = (dir / "empty.trace").string();
    export_trace(rt::EventTrace{}, empty);
    CHECK(std::filesystem::exists(empty));
    CHECK(std::filesystem::file_size(empty) == 0);

    CHECK_THROWS_AS(export_trace(out.trace, (dir / "missing" / "x.trace").string()), IoFailure);
    CHECK_THROWS_AS(export_trace(out.trace, dir.string()), IoFailure);
    std::filesystem::remove_all(dir);
}

TEST_CASE("check_snapshot flags inconsistent views") {
    Workcell w;
    auto good = w.snapshot();
    CHECK(check_snapshot(good).empty());

    OrderView o{"pump-1", "pump", 3};
    auto dup = good;
    dup.order_queue = {o};
    dup.completed = {"pump-1"};
    CHECK(check_snapshot(dup).size() == 1);

    auto two = good;
    two.in_flight = {AssignmentView{o, "worker-1", "robot"}, AssignmentView{{"pump-2", "pump", 1}, "worker-1", "robot"}};
    CHECK(check_snapshot(two).size() == 1);

    auto zero = good;
    zero.order_queue = {OrderView{"pump-3", "pump", 0}};
    CHECK(check_snapshot(zero).size() == 1);

    auto job = good;
    job.statuses["robot"] = "busy";
    job.robot_job = RobotJobView{"pump-1", "worker-1", 3, 0, 6001};
    CHECK(check_snapshot(job).size() == 1);
    job.robot_job->remaining_ms = -1;
    CHECK(check_snapshot(job).size() == 1);
    job.robot_job->remaining_ms = 6000;
    CHECK(check_snapshot(job).empty());
    job.statuses["robot"] = "free";
    CHECK(check_snapshot(job).size() == 1);

    auto idle_busy = good;
    idle_busy.statuses["robot"] = "busy";
    CHECK(check_snapshot(idle_busy).size() == 1);

    auto odd = good;
    odd.statuses["worker-2"] = "asleep";
    CHECK(check_snapshot(odd).size() == 1);
}

TEST_CASE("check_trace flags broken traces") {
    using acl::Act;
    rt::EventTrace ok;
    ok.records = {msg(0, Act::request, "orders", "robot", "cv", "orders-1"),
                  msg(0, Act::confirm, "robot", "orders", "cv", "robot-1", "orders-1"),
                  rt::StatusRecord{0, "robot", "free", "busy"}, rt::StatusRecord{5, "robot", "busy", "free"}};
    CHECK(check_trace(ok, true).empty());

    auto back = ok;
    back.records.push_back(rt::StatusRecord{4, "worker-1", "free", "reserve"});
    CHECK(check_trace(back, true).size() == 1);

    auto skip = ok;
    skip.records.push_back(rt::StatusRecord{6, "worker-1", "free", "busy"});
    CHECK(check_trace(skip, true).size() == 1);

    auto stale = ok;
    stale.records.push_back(rt::StatusRecord{6, "worker-1", "reserve", "busy"});
    CHECK_FALSE(check_trace(stale, true).empty());

    auto customer = ok;
    customer.records.push_back(rt::StatusRecord{6, "customer-1", "free", "busy"});
    CHECK(check_trace(customer, true).size() == 1);

    auto twice = ok;
    twice.records.push_back(msg(6, Act::not_understood, "robot", "orders", "cv", "robot-2", "orders-1"));
    CHECK(check_trace(twice, true).size() == 1);

    auto moved = ok;
    std::get<rt::MessageRecord>(moved.records[1]).message.conversation_id = "other";
    CHECK(check_trace(moved, true).size() == 1);

    auto astray = ok;
    std::get<rt::MessageRecord>(astray.records[1]).message.receivers = {acl::Aid("pump")};
    CHECK(check_trace(astray, true).size() == 1);

    rt::EventTrace open;
    open.records = {msg(0, Act::agree, "customer-1", "pump", "cv", "customer-1-1")};
    CHECK(check_trace(open, false).empty());
    CHECK(check_trace(open, true).size() == 1);
}
