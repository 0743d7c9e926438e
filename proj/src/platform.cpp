#include "workcell/platform.hpp"

#include <algorithm>

#include "workcell/sl.hpp"

namespace workcell::rt {

void VirtualClock::advance_to(TimeMs t) {
    if (t > now) now = t;
}

bool MessageFilter::matches(const acl::AclMessage& m) const {
    if (performative && m.performative != *performative) return false;
    if (conversation_id && m.conversation_id != *conversation_id) return false;
    if (ontology && m.ontology != *ontology) return false;
    if (action_name) {
        try {
            auto tree = sl::parse_content(m.content);
            const auto* a = tree.get_if<sl::Action>();
            if (!a || a->act.name != *action_name) return false;
        } catch (const sl::SyntaxError&) {
            return false;
        }
    }
    return true;
}

Behaviour Behaviour::once(std::string name, Body body) {
    return Behaviour{std::move(name), Kind::one_shot, OnStart{}, std::move(body)};
}

Behaviour Behaviour::once_on(std::string name, MessageFilter filter, Body body) {
    return Behaviour{std::move(name), Kind::one_shot, std::move(filter), std::move(body)};
}

Behaviour Behaviour::every(std::string name, MessageFilter filter, Body body) {
    return Behaviour{std::move(name), Kind::cyclic, std::move(filter), std::move(body)};
}

Behaviour Behaviour::on_timer(std::string name, Kind kind, std::string tag, Body body) {
    return Behaviour{std::move(name), kind, OnTimer{std::move(tag)}, std::move(body)};
}

// ---------------------------------------------------------------------------
// Trace

TimeMs record_time(const TraceRecord& r) {
    return std::visit([](const auto& x) { return x.at; }, r);
}

std::string render_record(const TraceRecord& r) {
    if (const auto* m = std::get_if<MessageRecord>(&r)) return acl::render_trace_line(m->at, m->message);
    const auto& s = std::get<StatusRecord>(r);
    return std::to_string(s.at) + '\t' + s.agent + '\t' + s.from + '\t' + s.to;
}

std::string EventTrace::render() const {
    std::string out;
    for (const auto& r : records) {
        out += render_record(r);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

void InboundQueue::push(Task task) {
    std::lock_guard lock(mutex_);
    tasks_.push_back(std::move(task));
}

std::vector<InboundQueue::Task> InboundQueue::take_all() {
    std::lock_guard lock(mutex_);
    std::vector<Task> out;
    out.swap(tasks_);
    return out;
}

bool InboundQueue::empty() const {
    std::lock_guard lock(mutex_);
    return tasks_.empty();
}

// ---------------------------------------------------------------------------
// Platform

Platform::Platform(std::string name, VirtualClock clock) : name_(std::move(name)), clock_(clock) {
    register_agent(ams_name);
}

acl::Aid Platform::register_agent(const std::string& name, std::vector<Behaviour> behaviours) {
    if (!acl::is_valid_agent_name(name))
        throw PlatformError(PlatformErrc::invalid_agent_name, "invalid agent name '" + name + "'");
    if (agents_.count(name)) throw PlatformError(PlatformErrc::duplicate_agent_name, "agent " + name + " already registered");
    AgentRecord rec{acl::Aid(name), {}, {}};
    for (auto& b : behaviours) rec.behaviours.push_back(Installed{std::move(b), false});
    agents_.emplace(name, std::move(rec));
    order_.push_back(name);
    return acl::Aid(name);
}

void Platform::add_behaviour(const std::string& agent, Behaviour behaviour) {
    agent_record(agent).behaviours.push_back(Installed{std::move(behaviour), false});
}

void Platform::deregister_agent(const std::string& name) {
    if (!agents_.erase(name)) throw PlatformError(PlatformErrc::unknown_agent, "unknown agent " + name);
    order_.erase(std::remove(order_.begin(), order_.end(), name), order_.end());
    for (auto& [service, members] : df_) members.erase(name);
    for (auto it = timers_.begin(); it != timers_.end();) {
        if (it->second.owner == name) it = timers_.erase(it);
        else ++it;
    }
}

std::optional<acl::Aid> Platform::lookup(const std::string& name) const {
    const AgentRecord* rec = find_agent(name);
    if (!rec) return std::nullopt;
    return rec->aid;
}

std::vector<acl::Aid> Platform::agents() const {
    std::vector<acl::Aid> out;
    for (const auto& n : order_) out.push_back(agents_.at(n).aid);
    return out;
}

Platform::AgentRecord& Platform::agent_record(const std::string& name) {
    auto it = agents_.find(name);
    if (it == agents_.end()) throw PlatformError(PlatformErrc::unknown_agent, "unknown agent " + name);
    return it->second;
}

const Platform::AgentRecord* Platform::find_agent(const std::string& name) const {
    auto it = agents_.find(name);
    return it == agents_.end() ? nullptr : &it->second;
}

void Platform::df_register(const acl::Aid& aid, const std::string& service_type, Properties properties) {
    if (!find_agent(aid.name)) throw PlatformError(PlatformErrc::unknown_agent, "unknown agent " + aid.name);
    df_[service_type].insert_or_assign(aid.name, std::move(properties));
}

void Platform::df_deregister(const acl::Aid& aid, const std::string& service_type) {
    auto it = df_.find(service_type);
    if (it != df_.end()) it->second.erase(aid.name);
}

std::vector<acl::Aid> Platform::df_search(const std::string& service_type) const {
    std::vector<acl::Aid> out;
    auto it = df_.find(service_type);
    if (it == df_.end()) return out;
    for (const auto& [name, props] : it->second) out.push_back(agents_.at(name).aid);
    return out;
}

std::optional<Platform::Properties> Platform::df_properties(const std::string& service_type,
                                                            const std::string& agent) const {
    auto it = df_.find(service_type);
    if (it == df_.end()) return std::nullopt;
    auto entry = it->second.find(agent);
    if (entry == it->second.end()) return std::nullopt;
    return entry->second;
}

void Platform::send(const acl::AclMessage& m) {
    auto report = acl::validate_message(m);
    if (!report.ok()) throw PlatformError(PlatformErrc::invalid_message, "invalid message: " + report.violations.front());
    if (!find_agent(m.sender.name))
        throw PlatformError(PlatformErrc::unknown_agent, "sender " + m.sender.name + " is not registered");
    trace_.records.push_back(MessageRecord{clock_.now, m});
    deliver(m);
}

void Platform::deliver(const acl::AclMessage& m) {
    for (const auto& r : m.receivers) {
        auto it = agents_.find(r.name);
        if (it != agents_.end()) {
            it->second.mailbox.push_back(Envelope{next_seq_++, m});
            continue;
        }
        // Undeliverable copy: dropped, and the sender hears about it from the AMS.
        if (m.sender.name == ams_name) continue;
        acl::AclMessage failure = factory_.build(acl::Act::failure, acl::Aid(ams_name), {m.sender},
                                                 sl::print_content(sl::Frame{
                                                     "unknown-receiver", {{"name", sl::str(r.name)}}}),
                                                 m.ontology, m.conversation_id);
        failure.in_reply_to = m.reply_with;
        trace_.records.push_back(MessageRecord{clock_.now, failure});
        deliver(failure);
    }
}

std::optional<acl::AclMessage> Platform::next_matching(const std::string& agent, const MessageFilter& filter) {
    auto& box = agent_record(agent).mailbox;
    for (auto it = box.begin(); it != box.end(); ++it) {
        if (filter.matches(it->message)) {
            acl::AclMessage m = std::move(it->message);
            box.erase(it);
            return m;
        }
    }
    return std::nullopt;
}

std::size_t Platform::mailbox_size(const std::string& agent) const {
    const AgentRecord* rec = find_agent(agent);
    if (!rec) throw PlatformError(PlatformErrc::unknown_agent, "unknown agent " + agent);
    return rec->mailbox.size();
}

std::uint64_t Platform::schedule_after(TimeMs delay_ms, const acl::Aid& owner, std::string tag) {
    if (delay_ms < 0) throw PlatformError(PlatformErrc::negative_delay, "negative timer delay");
    if (!find_agent(owner.name)) throw PlatformError(PlatformErrc::unknown_agent, "unknown agent " + owner.name);
    std::uint64_t id = ++next_timer_id_;
    TimeMs deadline = clock_.now + delay_ms;
    timers_.emplace(TimerKey{deadline, next_seq_++}, Timer{owner.name, TimerEvent{id, deadline, std::move(tag)}});
    return id;
}

bool Platform::cancel_timer(std::uint64_t id) {
    for (auto it = timers_.begin(); it != timers_.end(); ++it) {
        if (it->second.event.id == id) {
            timers_.erase(it);
            return true;
        }
    }
    return false;
}

std::optional<TimeMs> Platform::next_deadline() const {
    if (timers_.empty()) return std::nullopt;
    return timers_.begin()->first.deadline;
}

void Platform::record_status(const std::string& agent, const std::string& from, const std::string& to) {
    trace_.records.push_back(StatusRecord{clock_.now, agent, from, to});
}

void Platform::with_agent(const std::string& agent, const std::function<void(AgentContext&)>& fn) {
    AgentContext ctx(*this, agent_record(agent).aid);
    fn(ctx);
}

void Platform::run_body(AgentRecord& agent, Installed& b, const Stimulus& s) {
    if (b.behaviour.kind == Behaviour::Kind::one_shot) b.done = true;
    // The body may add behaviours or agents, so nothing in `agent` is used
    // after this point.
    auto body = b.behaviour.body;
    AgentContext ctx(*this, agent.aid);
    body(ctx, s);
}

void Platform::count_iteration() {
    if (++iterations_ > iteration_bound_)
        throw PlatformError(PlatformErrc::livelock_guard,
                            "event loop exceeded " + std::to_string(iteration_bound_) + " iterations");
}

// Runs one pending start-up behaviour, or delivers the globally oldest
// message that some behaviour of its owner accepts.
bool Platform::step_once() {
    for (const auto& name : order_) {
        auto& rec = agents_.at(name);
        for (auto& b : rec.behaviours) {
            if (!b.done && std::holds_alternative<Behaviour::OnStart>(b.behaviour.trigger)) {
                run_body(rec, b, std::monostate{});
                return true;
            }
        }
    }

    AgentRecord* best_agent = nullptr;
    std::deque<Envelope>::iterator best_msg;
    std::size_t best_behaviour = 0;
    for (const auto& name : order_) {
        auto& rec = agents_.at(name);
        for (auto it = rec.mailbox.begin(); it != rec.mailbox.end(); ++it) {
            if (best_agent && it->seq > best_msg->seq) break;
            bool taken = false;
            for (std::size_t i = 0; i < rec.behaviours.size(); ++i) {
                const auto& b = rec.behaviours[i];
                const auto* filter = std::get_if<MessageFilter>(&b.behaviour.trigger);
                if (!b.done && filter && filter->matches(it->message)) {
                    best_agent = &rec;
                    best_msg = it;
                    best_behaviour = i;
                    taken = true;
                    break;
                }
            }
            if (taken) break;
        }
    }
    if (!best_agent) return false;
    acl::AclMessage m = std::move(best_msg->message);
    best_agent->mailbox.erase(best_msg);
    run_body(*best_agent, best_agent->behaviours[best_behaviour], m);
    return true;
}

bool Platform::fire_next_timer(std::optional<TimeMs> limit) {
    if (timers_.empty()) return false;
    auto it = timers_.begin();
    if (limit && it->first.deadline > *limit) return false;
    Timer t = std::move(it->second);
    timers_.erase(it);
    clock_.advance_to(t.event.deadline);
    auto rec = agents_.find(t.owner);
    if (rec == agents_.end()) return true;
    for (auto& b : rec->second.behaviours) {
        const auto* on = std::get_if<Behaviour::OnTimer>(&b.behaviour.trigger);
        if (!b.done && on && (on->tag.empty() || on->tag == t.event.tag)) {
            run_body(rec->second, b, t.event);
            break;
        }
    }
    return true;
}

void Platform::drain_inbound() {
    for (auto& task : inbound_.take_all()) task(*this);
}

const EventTrace& Platform::run_until_idle() {
    iterations_ = 0;
    while (true) {
        count_iteration();
        drain_inbound();
        if (step_once()) continue;
        if (fire_next_timer(std::nullopt)) continue;
        if (!inbound_.empty()) continue;
        break;
    }
    return trace_;
}

void Platform::run_until(TimeMs t) {
    iterations_ = 0;
    while (true) {
        count_iteration();
        drain_inbound();
        if (step_once()) continue;
        if (fire_next_timer(t)) continue;
        if (!inbound_.empty()) continue;
        break;
    }
    clock_.advance_to(t);
}

bool Platform::idle() const {
    if (!timers_.empty() || !inbound_.empty()) return false;
    for (const auto& name : order_) {
        const auto& rec = agents_.at(name);
        for (const auto& b : rec.behaviours) {
            if (!b.done && std::holds_alternative<Behaviour::OnStart>(b.behaviour.trigger)) return false;
        }
        for (const auto& env : rec.mailbox) {
            for (const auto& b : rec.behaviours) {
                const auto* filter = std::get_if<MessageFilter>(&b.behaviour.trigger);
                if (!b.done && filter && filter->matches(env.message)) return false;
            }
        }
    }
    return true;
}

acl::AclMessage AgentContext::build(acl::Act act, std::vector<acl::Aid> to, std::string content,
                                    std::string ontology, std::string conversation_id) {
    return platform_.messages().build(act, self_, std::move(to), std::move(content), std::move(ontology),
                                      std::move(conversation_id));
}

acl::AclMessage AgentContext::reply(const acl::AclMessage& original, acl::Act act, std::string content) {
    acl::AclMessage m = platform_.messages().reply(original, act, std::move(content));
    // Replies always come from whoever handles them, which for multi-receiver
    // messages need not be the first listed receiver.
    if (m.sender != self_) {
        m.sender = self_;
        m.reply_with = platform_.messages().next_reply_token(self_);
    }
    return m;
}

}  // namespace workcell::rt
