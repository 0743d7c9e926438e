#pragma once

// Random scenario scripts: order counts, amounts and task-done timings,
// legal or not.

#include "generators.hpp"
#include "workcell/scenario.hpp"

namespace gen {

inline workcell::ScenarioScript random_scenario(Gen& g) {
    using namespace workcell;
    struct Timed {
        rt::TimeMs at;
        DirectiveAction action;
    };
    std::vector<Timed> items;
    const std::vector<std::string> customers{"customer-1", "customer-2"};
    const std::vector<std::string> workers{"worker-1", "worker-2"};
    const std::vector<std::string> colors{"red", "blue", "green", "grey"};

    auto horizon = g.uniform(1000, 60000);
    auto orders = g.uniform(0, 8);
    for (std::int64_t i = 0; i < orders; ++i) {
        SubmitOrder s;
        s.customer = g.pick(customers);
        s.kind = g.chance(0.5) ? holons::ProductKind::pump : holons::ProductKind::compressor;
        s.color = g.pick(colors);
        s.power = g.uniform(1, 15);
        s.amount = g.chance(0.05) ? 0 : g.uniform(1, 8);
        items.push_back({g.uniform(0, horizon), s});
    }
    items.push_back({g.uniform(0, horizon / 2), StartProduction{}});
    if (g.chance(0.2)) {
        auto stop = g.uniform(0, horizon);
        items.push_back({stop, StopProduction{}});
        if (g.chance(0.7)) items.push_back({stop + g.uniform(0, 10000), StartProduction{}});
    }
    auto presses = g.uniform(0, 3 * orders + 2);
    for (std::int64_t i = 0; i < presses; ++i)
        items.push_back({g.uniform(0, horizon + 40000), TaskDone{g.pick(workers)}});
    if (g.chance(0.15)) {
        ReorderProductQueue r{g.chance(0.5) ? "pump" : "compressor", {}};
        auto n = g.uniform(0, 3);
        for (std::int64_t i = 0; i < n; ++i) r.permutation.push_back(static_cast<std::size_t>(i));
        std::shuffle(r.permutation.begin(), r.permutation.end(), g.engine());
        items.push_back({g.uniform(0, horizon), r});
    }
    std::stable_sort(items.begin(), items.end(), [](const Timed& a, const Timed& b) { return a.at < b.at; });

    ScenarioScript script;
    if (g.chance(0.3)) script.product_hold_ms = g.uniform(0, 3000);
    if (g.chance(0.2)) script.rediscovery_ms = g.uniform(500, 5000);
    int line = 0;
    for (auto& it : items) script.directives.push_back(Directive{it.at, std::move(it.action), ++line});
    return script;
}

}  // namespace gen
