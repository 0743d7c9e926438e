#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "workcell/scenario.hpp"
#include "workcell/service.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_script_error = 2;
constexpr int exit_invariant_violation = 3;

workcell::WorkcellService* active_service = nullptr;

extern "C" void on_signal(int) {
    if (active_service) active_service->stop();
}

int run(const std::string& script_path, const std::string& trace_out, double scale, const std::string& catalog_dir) {
    workcell::ScenarioScript script;
    try {
        script = workcell::load_scenario(script_path);
    } catch (const workcell::ScriptError& e) {
        std::cerr << script_path << ": " << e.what() << "\n";
        return exit_script_error;
    } catch (const workcell::IoFailure& e) {
        std::cerr << e.what() << "\n";
        return exit_script_error;
    }

    workcell::WorkcellConfig config;
    if (scale > 0) {
        config.clock.mode = workcell::rt::ClockMode::scaled_wall_clock;
        config.clock.scale = scale;
    }
    if (!catalog_dir.empty()) config.catalog_dir = catalog_dir;
    workcell::ScenarioOutcome outcome;
    try {
        outcome = workcell::run_scenario(script, config);
    } catch (const workcell::holons::CatalogError& e) {
        std::cerr << e.what() << "\n";
        return exit_script_error;
    }

    if (trace_out.empty()) {
        std::cout << outcome.trace.render();
    } else {
        try {
            workcell::export_trace(outcome.trace, trace_out);
        } catch (const workcell::IoFailure& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
    }
    for (const auto& r : outcome.rejections)
        std::cerr << script_path << ":" << r.line << ": rejected at t=" << r.at << ": " << r.reason << "\n";
    for (const auto& v : outcome.invariant_violations) std::cerr << "invariant violation: " << v << "\n";
    return outcome.invariant_violations.empty() ? exit_ok : exit_invariant_violation;
}

int serve_until_signal(workcell::WorkcellService& service, const std::string& host);

int serve(const std::string& bind, double scale, const std::string& catalog_dir) {
    workcell::ServiceConfig config;
    auto colon = bind.rfind(':');
    if (colon == std::string::npos) {
        config.bind = bind;
    } else {
        config.bind = bind.substr(0, colon);
        config.port = std::stoi(bind.substr(colon + 1));
    }
    if (scale > 0) {
        config.workcell.clock.mode = workcell::rt::ClockMode::scaled_wall_clock;
        config.workcell.clock.scale = scale;
    }
    if (!catalog_dir.empty()) config.workcell.catalog_dir = catalog_dir;
    try {
        workcell::WorkcellService service(config);
        return serve_until_signal(service, config.bind);
    } catch (const workcell::holons::CatalogError& e) {
        std::cerr << e.what() << "\n";
        return exit_script_error;
    }
}

int serve_until_signal(workcell::WorkcellService& service, const std::string& host) {
    try {
        int port = service.start();
        std::cout << "listening on " << host << ":" << port << std::endl;
    } catch (const workcell::BindFailure& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    active_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    service.wait();
    active_service = nullptr;
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative workcell control"};
    app.require_subcommand(1);

    std::string script_path;
    std::string trace_out;
    bool deterministic = false;
    double run_scale = 0;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario script and print or export its trace");
    run_cmd->add_option("scenario-file", script_path, "Scenario script")->required();
    run_cmd->add_option("--trace-out", trace_out, "Write the trace here instead of stdout");
    auto* det = run_cmd->add_flag("--deterministic", deterministic, "Step the virtual clock (default)");
    run_cmd->add_option("--scale", run_scale, "Pace the run: simulated ms per wall-clock ms")
        ->check(CLI::PositiveNumber)
        ->excludes(det);

    std::string run_catalogs;
    run_cmd->add_option("--catalog-dir", run_catalogs, "Directory with pump.catalog and compressor.catalog")
        ->check(CLI::ExistingDirectory);

    std::string bind = "127.0.0.1:8080";
    double serve_scale = 1.0;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the workcell over HTTP");
    serve_cmd->add_option("--bind", bind, "Address as host:port")->capture_default_str();
    serve_cmd->add_option("--scale", serve_scale, "Simulated ms per wall-clock ms")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    std::string serve_catalogs;
    serve_cmd->add_option("--catalog-dir", serve_catalogs, "Directory with pump.catalog and compressor.catalog")
        ->check(CLI::ExistingDirectory);

    app.add_subcommand("dump-ontology", "Print the case-study ontology");

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) return run(script_path, trace_out, run_scale, run_catalogs);
    if (*serve_cmd) return serve(bind, serve_scale, serve_catalogs);
    std::cout << workcell::onto::build_case_study_ontology().dump();
    return exit_ok;
}
