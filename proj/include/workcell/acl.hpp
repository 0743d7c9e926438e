#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace workcell::acl {

/// Platform-unique agent identifier. Equality is by name only.
struct Aid {
    std::string name;
    std::vector<std::string> addresses;

    Aid() = default;
    explicit Aid(std::string n, std::vector<std::string> addrs = {})
        : name(std::move(n)), addresses(std::move(addrs)) {}

    bool operator==(const Aid& o) const { return name == o.name; }
    auto operator<=>(const Aid& o) const { return name <=> o.name; }
};

bool is_valid_agent_name(std::string_view name);

enum class Act {
    propose,
    accept_proposal,
    reject_proposal,
    cfp,
    request,
    request_when,
    query_if,
    query_ref,
    confirm,
    disconfirm,
    inform,
    inform_if,
    inform_ref,
    agree,
    refuse,
    cancel,
    subscribe,
    not_understood,
    failure,
    propagate,
    proxy,
};

inline constexpr std::size_t act_count = 21;

enum class Purpose {
    negotiation,
    requesting_information,
    passing_information,
    performing_actions,
    error_handling,
    message_referencing,
};

const std::array<Act, act_count>& all_acts();
std::string_view act_name(Act act);
std::optional<Act> act_from_name(std::string_view name);
Purpose purpose_of(Act act);
std::string_view purpose_name(Purpose purpose);

inline constexpr std::string_view default_language = "sl-like";

struct AclMessage {
    Act performative = Act::inform;
    Aid sender;
    std::vector<Aid> receivers;
    std::optional<std::vector<Aid>> reply_to;
    std::string content;
    std::string language{default_language};
    std::string ontology;
    std::optional<std::string> protocol;
    std::string conversation_id;
    std::optional<std::string> reply_with;
    std::optional<std::string> in_reply_to;

    bool operator==(const AclMessage&) const = default;
};

enum class AclErrc { empty_receivers, empty_conversation_id, sender_in_receivers, invalid_agent_name };

class AclError : public std::runtime_error {
public:
    AclError(AclErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    AclErrc code() const { return code_; }

private:
    AclErrc code_;
};

/// Issues reply-with tokens ("<sender>-<n>") and conversation ids
/// ("<initiator>-cv-<n>") from per-agent monotonic counters.
class MessageFactory {
public:
    AclMessage build(Act performative, const Aid& sender, std::vector<Aid> receivers,
                     std::string content, std::string ontology, std::string conversation_id);

    /// Reply goes from the original's first receiver back to its sender
    /// (or to reply_to when present), on the same conversation.
    AclMessage reply(const AclMessage& original, Act performative, std::string content);

    std::string new_conversation(const Aid& initiator);

    std::string next_reply_token(const Aid& sender);

private:
    std::map<std::string, std::uint64_t> reply_counters_;
    std::map<std::string, std::uint64_t> conversation_counters_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_message(const AclMessage& m);

/// One tab-separated trace line: timestamp, performative, sender,
/// receivers (comma-joined), conversation_id, in_reply_to or "-", content.
std::string render_trace_line(std::int64_t timestamp_ms, const AclMessage& m);

/// Full envelope in the SL-like syntax, e.g.
/// (agree :sender customer-1 :receiver (sequence pump) :content "..." ...)
std::string render_envelope(const AclMessage& m);

struct DecodedEnvelope {
    std::optional<AclMessage> message;
    ValidationReport report;
};

/// Parses an envelope. Unknown act names, missing mandatory fields, and
/// invariant breaches come back as violations rather than exceptions.
DecodedEnvelope decode_envelope(std::string_view text);

}  // namespace workcell::acl
