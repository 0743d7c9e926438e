#pragma once

// Single-container agent platform: AMS naming, DF service directory,
// FIFO mailboxes, behaviours, and a deterministic discrete-event clock.
//
// The event loop is single-threaded. Other threads talk to it only through
// the InboundQueue, which is drained at step boundaries.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "workcell/acl.hpp"

namespace workcell::rt {

using TimeMs = std::int64_t;

enum class ClockMode { deterministic_step, scaled_wall_clock };

struct VirtualClock {
    TimeMs now = 0;
    ClockMode mode = ClockMode::deterministic_step;
    double scale = 1.0;  // simulated ms per real ms in scaled mode

    void advance_to(TimeMs t);
};

/// Every field that is set must match.
struct MessageFilter {
    std::optional<acl::Act> performative;
    std::optional<std::string> conversation_id;
    std::optional<std::string> action_name;
    std::optional<std::string> ontology;

    static MessageFilter any() { return {}; }
    static MessageFilter act(acl::Act a) { return MessageFilter{a, {}, {}, {}}; }
    static MessageFilter conversation(std::string cv) { return MessageFilter{{}, std::move(cv), {}, {}}; }

    bool matches(const acl::AclMessage& m) const;
};

struct TimerEvent {
    std::uint64_t id = 0;
    TimeMs deadline = 0;
    std::string tag;
};

/// What woke a behaviour: nothing (start-up), a message, or a timer.
using Stimulus = std::variant<std::monostate, acl::AclMessage, TimerEvent>;

class AgentContext;

struct Behaviour {
    enum class Kind { one_shot, cyclic };
    struct OnStart {};
    struct OnTimer {
        std::string tag;  // empty matches any tag
    };
    using Trigger = std::variant<OnStart, MessageFilter, OnTimer>;
    using Body = std::function<void(AgentContext&, const Stimulus&)>;

    std::string name;
    Kind kind = Kind::cyclic;
    Trigger trigger;
    Body body;

    static Behaviour once(std::string name, Body body);
    static Behaviour once_on(std::string name, MessageFilter filter, Body body);
    static Behaviour every(std::string name, MessageFilter filter, Body body);
    static Behaviour on_timer(std::string name, Kind kind, std::string tag, Body body);
};

// ---------------------------------------------------------------------------
// Trace

struct MessageRecord {
    TimeMs at = 0;
    acl::AclMessage message;
    bool operator==(const MessageRecord&) const = default;
};

struct StatusRecord {
    TimeMs at = 0;
    std::string agent;
    std::string from;
    std::string to;
    bool operator==(const StatusRecord&) const = default;
};

using TraceRecord = std::variant<MessageRecord, StatusRecord>;

TimeMs record_time(const TraceRecord& r);

/// Message lines use the ACL trace format; status lines are
/// "timestamp\tagent\told\tnew".
std::string render_record(const TraceRecord& r);

struct EventTrace {
    std::vector<TraceRecord> records;

    std::string render() const;  // one line per record, '\n' terminated
    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }
};

// ---------------------------------------------------------------------------

enum class PlatformErrc {
    duplicate_agent_name,
    invalid_agent_name,
    unknown_agent,
    invalid_message,
    negative_delay,
    livelock_guard,
};

class PlatformError : public std::runtime_error {
public:
    PlatformError(PlatformErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    PlatformErrc code() const { return code_; }

private:
    PlatformErrc code_;
};

class Platform;

/// Thread-safe queue of work to run inside the event loop.
class InboundQueue {
public:
    using Task = std::function<void(Platform&)>;

    void push(Task task);
    std::vector<Task> take_all();
    bool empty() const;

private:
    mutable std::mutex mutex_;
    std::vector<Task> tasks_;
};

class Platform {
public:
    static constexpr const char* ams_name = "ams";

    explicit Platform(std::string name = "workcell", VirtualClock clock = {});

    Platform(const Platform&) = delete;
    Platform& operator=(const Platform&) = delete;

    const std::string& name() const { return name_; }

    // AMS
    acl::Aid register_agent(const std::string& name, std::vector<Behaviour> behaviours = {});
    void add_behaviour(const std::string& agent, Behaviour behaviour);
    void deregister_agent(const std::string& name);
    std::optional<acl::Aid> lookup(const std::string& name) const;
    bool is_registered(const std::string& name) const { return lookup(name).has_value(); }
    std::vector<acl::Aid> agents() const;  // registration order

    // DF
    using Properties = std::map<std::string, std::string>;
    void df_register(const acl::Aid& aid, const std::string& service_type, Properties properties = {});
    void df_deregister(const acl::Aid& aid, const std::string& service_type);
    std::vector<acl::Aid> df_search(const std::string& service_type) const;  // sorted by name
    std::optional<Properties> df_properties(const std::string& service_type, const std::string& agent) const;

    // Messaging
    void send(const acl::AclMessage& m);
    std::optional<acl::AclMessage> next_matching(const std::string& agent, const MessageFilter& filter);
    std::size_t mailbox_size(const std::string& agent) const;
    acl::MessageFactory& messages() { return factory_; }

    // Timers
    std::uint64_t schedule_after(TimeMs delay_ms, const acl::Aid& owner, std::string tag);
    bool cancel_timer(std::uint64_t id);
    std::optional<TimeMs> next_deadline() const;
    std::size_t pending_timers() const { return timers_.size(); }

    // Execution
    const EventTrace& run_until_idle();
    /// Runs every event due at or before `t`, then moves the clock to `t`.
    void run_until(TimeMs t);
    bool idle() const;
    /// Runs `fn` as `agent` at the current instant.
    void with_agent(const std::string& agent, const std::function<void(AgentContext&)>& fn);

    TimeMs now() const { return clock_.now; }
    const VirtualClock& clock() const { return clock_; }
    const EventTrace& trace() const { return trace_; }
    void record_status(const std::string& agent, const std::string& from, const std::string& to);

    InboundQueue& inbound() { return inbound_; }
    void set_iteration_bound(std::size_t bound) { iteration_bound_ = bound; }

private:
    struct Envelope {
        std::uint64_t seq;
        acl::AclMessage message;
    };
    struct Installed {
        Behaviour behaviour;
        bool done = false;
    };
    struct AgentRecord {
        acl::Aid aid;
        std::deque<Envelope> mailbox;
        std::vector<Installed> behaviours;
    };
    struct TimerKey {
        TimeMs deadline;
        std::uint64_t seq;
        auto operator<=>(const TimerKey&) const = default;
    };
    struct Timer {
        std::string owner;
        TimerEvent event;
    };

    AgentRecord& agent_record(const std::string& name);
    const AgentRecord* find_agent(const std::string& name) const;
    void deliver(const acl::AclMessage& m);
    bool step_once();
    bool fire_next_timer(std::optional<TimeMs> limit);
    void drain_inbound();
    void count_iteration();
    void run_body(AgentRecord& agent, Installed& b, const Stimulus& s);

    std::string name_;
    VirtualClock clock_;
    acl::MessageFactory factory_;
    std::map<std::string, AgentRecord> agents_;
    std::vector<std::string> order_;
    std::map<std::string, std::map<std::string, Properties>> df_;
    std::map<TimerKey, Timer> timers_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_timer_id_ = 0;
    EventTrace trace_;
    InboundQueue inbound_;
    std::size_t iteration_bound_ = 1'000'000;
    std::size_t iterations_ = 0;
};

class AgentContext {
public:
    AgentContext(Platform& platform, acl::Aid self) : platform_(platform), self_(std::move(self)) {}

    const acl::Aid& self() const { return self_; }
    TimeMs now() const { return platform_.now(); }
    Platform& platform() { return platform_; }

    void send(const acl::AclMessage& m) { platform_.send(m); }
    acl::AclMessage build(acl::Act act, std::vector<acl::Aid> to, std::string content, std::string ontology,
                          std::string conversation_id);
    acl::AclMessage reply(const acl::AclMessage& original, acl::Act act, std::string content);
    std::string new_conversation() { return platform_.messages().new_conversation(self_); }

    std::uint64_t schedule_after(TimeMs delay_ms, std::string tag) {
        return platform_.schedule_after(delay_ms, self_, std::move(tag));
    }
    void df_register(const std::string& service, Platform::Properties props = {}) {
        platform_.df_register(self_, service, std::move(props));
    }
    std::vector<acl::Aid> df_search(const std::string& service) const { return platform_.df_search(service); }
    std::optional<acl::AclMessage> next_matching(const MessageFilter& f) {
        return platform_.next_matching(self_.name, f);
    }
    void record_status(const std::string& from, const std::string& to) {
        platform_.record_status(self_.name, from, to);
    }

private:
    Platform& platform_;
    acl::Aid self_;
};

}  // namespace workcell::rt
