#pragma once

// Seeded random generators for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "workcell/acl.hpp"
#include "workcell/sl.hpp"

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))];
    }
    std::mt19937_64& engine() { return rng_; }

    std::string symbol(std::size_t max_len = 12) {
        static const std::string first = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
        static const std::string rest = first + "0123456789-";
        while (true) {
            std::string s(1, first[uniform(0, first.size() - 1)]);
            auto len = uniform(0, max_len - 1);
            for (std::int64_t i = 0; i < len; ++i) s += rest[uniform(0, rest.size() - 1)];
            if (!workcell::sl::is_reserved_word(s) && s != "agent-identifier") return s;
        }
    }

    // Printable ASCII including the quote and backslash characters.
    std::string text(std::size_t max_len = 16) {
        std::string s;
        auto len = uniform(0, max_len);
        for (std::int64_t i = 0; i < len; ++i) s += static_cast<char>(uniform(32, 126));
        return s;
    }

    std::int64_t integer() {
        switch (uniform(0, 3)) {
            case 0: return std::numeric_limits<std::int64_t>::min();
            case 1: return std::numeric_limits<std::int64_t>::max();
            case 2: return uniform(-10, 10);
            default: return uniform(std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::max());
        }
    }

    double decimal() {
        double mantissa = static_cast<double>(uniform(-1'000'000, 1'000'000));
        return mantissa / std::pow(10.0, static_cast<double>(uniform(0, 6)));
    }

    workcell::sl::Frame frame(int depth) {
        workcell::sl::Frame f{symbol(), {}};
        auto n = uniform(0, 4);
        std::vector<std::string> used;
        for (std::int64_t i = 0; i < n; ++i) {
            std::string name = symbol(8);
            if (std::find(used.begin(), used.end(), name) != used.end()) continue;
            used.push_back(name);
            f.slots.push_back({name, node(depth - 1)});
        }
        return f;
    }

    workcell::sl::Node node(int depth) {
        namespace sl = workcell::sl;
        int kinds = depth > 0 ? 7 : 4;
        switch (uniform(0, kinds - 1)) {
            case 0: return sl::Atom{symbol()};
            case 1: return sl::Str{text()};
            case 2: return sl::Int{integer()};
            case 3: return sl::Float{decimal()};
            case 4: return frame(depth);
            case 5: {
                sl::Seq s;
                auto n = uniform(0, 4);
                for (std::int64_t i = 0; i < n; ++i) s.items.push_back(node(depth - 1));
                return s;
            }
            default: return sl::Action{symbol(), frame(depth - 1)};
        }
    }

    std::string agent_name() { return pick(agent_names_); }

    workcell::acl::AclMessage message() {
        namespace acl = workcell::acl;
        acl::AclMessage m;
        m.performative = acl::all_acts()[uniform(0, acl::act_count - 1)];
        m.sender = acl::Aid(agent_name());
        auto n = uniform(1, 3);
        for (std::int64_t i = 0; i < n; ++i) {
            acl::Aid r(agent_name());
            if (r == m.sender || std::find(m.receivers.begin(), m.receivers.end(), r) != m.receivers.end()) continue;
            m.receivers.push_back(r);
        }
        if (m.receivers.empty()) m.receivers.emplace_back(m.sender.name + "-peer");
        if (chance(0.2)) m.reply_to = std::vector<acl::Aid>{acl::Aid(agent_name())};
        m.content = workcell::sl::print_content(node(2));
        m.ontology = "cooperative-workcell";
        if (chance(0.3)) m.protocol = symbol();
        m.conversation_id = symbol() + "-cv-" + std::to_string(uniform(1, 99));
        if (chance(0.8)) m.reply_with = m.sender.name + "-" + std::to_string(uniform(1, 99));
        if (chance(0.5)) m.in_reply_to = agent_name() + "-" + std::to_string(uniform(1, 99));
        return m;
    }

private:
    std::mt19937_64 rng_;
    std::vector<std::string> agent_names_{"customer-1", "customer-2", "pump",     "compressor",
                                          "orders",     "worker-1",   "worker-2", "robot"};
};

}  // namespace gen
