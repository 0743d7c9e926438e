#include <algorithm>
#include <map>
#include <set>

#include "workcell/scenario.hpp"

namespace workcell {

namespace {

using Transition = std::pair<std::string, std::string>;

const std::set<Transition> worker_table{{"free", "reserve"}, {"reserve", "busy"}, {"busy", "free"}};
const std::set<Transition> robot_table{{"free", "busy"}, {"busy", "free"}};

const std::set<Transition>* table_for(const std::string& agent) {
    for (const auto& [name, role] : roster_roles()) {
        if (name != agent) continue;
        if (role == AgentRole::worker) return &worker_table;
        if (role == AgentRole::robot) return &robot_table;
    }
    return nullptr;
}

bool opens_exchange(acl::Act a) { return a == acl::Act::agree || a == acl::Act::propagate || a == acl::Act::request; }

bool answers_exchange(acl::Act a) {
    return a == acl::Act::confirm || a == acl::Act::not_understood || a == acl::Act::failure;
}

}  // namespace

std::vector<std::string> check_trace(const rt::EventTrace& trace, bool settled) {
    std::vector<std::string> problems;
    rt::TimeMs last = 0;
    std::map<std::string, std::string> status;
    struct Exchange {
        std::string sender;
        std::string conversation_id;
        int replies = 0;
    };
    std::map<std::string, Exchange> exchanges;  // keyed by reply-with

    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& r = trace.records[i];
        std::string where = "record " + std::to_string(i + 1) + ": ";
        rt::TimeMs t = rt::record_time(r);
        if (t < last) problems.push_back(where + "timestamp goes backwards");
        last = std::max(last, t);

        if (const auto* s = std::get_if<rt::StatusRecord>(&r)) {
            const auto* table = table_for(s->agent);
            if (!table) {
                problems.push_back(where + "status change for " + s->agent + ", which has no state machine");
                continue;
            }
            auto [it, fresh] = status.try_emplace(s->agent, "free");
            if (s->from != it->second)
                problems.push_back(where + s->agent + " leaves " + s->from + " but is " + it->second);
            if (!table->count({s->from, s->to}))
                problems.push_back(where + s->agent + " moves " + s->from + "->" + s->to);
            it->second = s->to;
            continue;
        }

        const auto& m = std::get<rt::MessageRecord>(r).message;
        if (opens_exchange(m.performative) && m.reply_with)
            exchanges[*m.reply_with] = Exchange{m.sender.name, m.conversation_id, 0};
        if (answers_exchange(m.performative) && m.in_reply_to) {
            const std::string& token = *m.in_reply_to;
            auto it = exchanges.find(token);
            if (it == exchanges.end()) continue;
            ++it->second.replies;
            if (it->second.replies > 1)
                problems.push_back(where + "second answer to " + token);
            if (m.conversation_id != it->second.conversation_id)
                problems.push_back(where + "answer to " + token + " changes conversation");
            bool to_sender = std::any_of(m.receivers.begin(), m.receivers.end(),
                                         [&](const acl::Aid& a) { return a.name == it->second.sender; });
            if (!to_sender) problems.push_back(where + "answer to " + token + " misses its sender");
        }
    }
    if (settled) {
        for (const auto& [token, ex] : exchanges)
            if (ex.replies == 0) problems.push_back("no answer to " + token + " on " + ex.conversation_id);
    }
    return problems;
}

}  // namespace workcell
