#include "workcell/acl.hpp"

#include <algorithm>
#include <cctype>

#include "workcell/sl.hpp"

namespace workcell::acl {

namespace {

struct ActInfo {
    Act act;
    std::string_view name;
    Purpose purpose;
};

// Table order follows the communicative-act table row by row.
constexpr std::array<ActInfo, act_count> act_table{{
    {Act::propose, "propose", Purpose::negotiation},
    {Act::accept_proposal, "accept-proposal", Purpose::negotiation},
    {Act::reject_proposal, "reject-proposal", Purpose::negotiation},
    {Act::cfp, "cfp", Purpose::negotiation},
    {Act::request, "request", Purpose::requesting_information},
    {Act::request_when, "request-when", Purpose::requesting_information},
    {Act::query_if, "query-if", Purpose::requesting_information},
    {Act::query_ref, "query-ref", Purpose::requesting_information},
    {Act::confirm, "confirm", Purpose::passing_information},
    {Act::disconfirm, "disconfirm", Purpose::passing_information},
    {Act::inform, "inform", Purpose::passing_information},
    {Act::inform_if, "inform-if", Purpose::passing_information},
    {Act::inform_ref, "inform-ref", Purpose::passing_information},
    {Act::agree, "agree", Purpose::performing_actions},
    {Act::refuse, "refuse", Purpose::performing_actions},
    {Act::cancel, "cancel", Purpose::performing_actions},
    {Act::subscribe, "subscribe", Purpose::performing_actions},
    {Act::not_understood, "not-understood", Purpose::error_handling},
    {Act::failure, "failure", Purpose::error_handling},
    {Act::propagate, "propagate", Purpose::message_referencing},
    {Act::proxy, "proxy", Purpose::message_referencing},
}};

const ActInfo& info(Act act) { return act_table[static_cast<std::size_t>(act)]; }

std::string join_names(const std::vector<Aid>& aids, char sep) {
    std::string out;
    for (std::size_t i = 0; i < aids.size(); ++i) {
        if (i) out += sep;
        out += aids[i].name;
    }
    return out;
}

}  // namespace

bool is_valid_agent_name(std::string_view name) {
    if (name.empty()) return false;
    return std::none_of(name.begin(), name.end(),
                        [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

const std::array<Act, act_count>& all_acts() {
    static const std::array<Act, act_count> acts = [] {
        std::array<Act, act_count> a{};
        for (std::size_t i = 0; i < act_count; ++i) a[i] = act_table[i].act;
        return a;
    }();
    return acts;
}

std::string_view act_name(Act act) { return info(act).name; }

std::optional<Act> act_from_name(std::string_view name) {
    for (const auto& row : act_table) {
        if (row.name == name) return row.act;
    }
    return std::nullopt;
}

Purpose purpose_of(Act act) { return info(act).purpose; }

std::string_view purpose_name(Purpose purpose) {
    switch (purpose) {
        case Purpose::negotiation: return "negotiation";
        case Purpose::requesting_information: return "requesting information";
        case Purpose::passing_information: return "passing information";
        case Purpose::performing_actions: return "performing actions";
        case Purpose::error_handling: return "error handling";
        case Purpose::message_referencing: return "message referencing";
    }
    return "";
}

AclMessage MessageFactory::build(Act performative, const Aid& sender, std::vector<Aid> receivers,
                                 std::string content, std::string ontology,
                                 std::string conversation_id) {
    if (!is_valid_agent_name(sender.name))
        throw AclError(AclErrc::invalid_agent_name, "invalid sender name '" + sender.name + "'");
    if (receivers.empty()) throw AclError(AclErrc::empty_receivers, "message has no receivers");
    if (conversation_id.empty())
        throw AclError(AclErrc::empty_conversation_id, "mandatory conversation-id missing");
    for (const auto& r : receivers) {
        if (!is_valid_agent_name(r.name))
            throw AclError(AclErrc::invalid_agent_name, "invalid receiver name '" + r.name + "'");
        if (r == sender)
            throw AclError(AclErrc::sender_in_receivers, "sender " + sender.name + " listed as receiver");
    }

    AclMessage m;
    m.performative = performative;
    m.sender = sender;
    m.receivers = std::move(receivers);
    m.content = std::move(content);
    m.ontology = std::move(ontology);
    m.conversation_id = std::move(conversation_id);
    m.reply_with = next_reply_token(sender);
    return m;
}

AclMessage MessageFactory::reply(const AclMessage& original, Act performative, std::string content) {
    if (original.receivers.empty())
        throw AclError(AclErrc::empty_receivers, "cannot reply to a message without receivers");
    Aid from = original.receivers.front();
    std::vector<Aid> to = original.reply_to.value_or(std::vector<Aid>{original.sender});
    AclMessage m = build(performative, from, std::move(to), std::move(content), original.ontology,
                         original.conversation_id);
    m.language = original.language;
    m.protocol = original.protocol;
    m.in_reply_to = original.reply_with;
    return m;
}

std::string MessageFactory::new_conversation(const Aid& initiator) {
    return initiator.name + "-cv-" + std::to_string(++conversation_counters_[initiator.name]);
}

std::string MessageFactory::next_reply_token(const Aid& sender) {
    return sender.name + "-" + std::to_string(++reply_counters_[sender.name]);
}

ValidationReport validate_message(const AclMessage& m) {
    ValidationReport report;
    auto& v = report.violations;
    if (!is_valid_agent_name(m.sender.name)) v.push_back("invalid sender name '" + m.sender.name + "'");
    if (m.receivers.empty()) v.push_back("receivers list is empty");
    for (const auto& r : m.receivers) {
        if (!is_valid_agent_name(r.name)) v.push_back("invalid receiver name '" + r.name + "'");
    }
    if (std::find(m.receivers.begin(), m.receivers.end(), m.sender) != m.receivers.end())
        v.push_back("sender " + m.sender.name + " is among the receivers");
    if (m.reply_to) {
        for (const auto& r : *m.reply_to) {
            if (!is_valid_agent_name(r.name)) v.push_back("invalid reply-to name '" + r.name + "'");
        }
    }
    if (m.conversation_id.empty()) v.push_back("mandatory conversation-id missing");
    return report;
}

std::string render_trace_line(std::int64_t timestamp_ms, const AclMessage& m) {
    std::string line = std::to_string(timestamp_ms);
    line += '\t';
    line += act_name(m.performative);
    line += '\t';
    line += m.sender.name;
    line += '\t';
    line += join_names(m.receivers, ',');
    line += '\t';
    line += m.conversation_id;
    line += '\t';
    line += m.in_reply_to.value_or("-");
    line += '\t';
    line += m.content;
    return line;
}

namespace {

sl::Node aid_sequence(const std::vector<Aid>& aids) {
    sl::Seq seq;
    for (const auto& a : aids) seq.items.push_back(sl::str(a.name));
    return seq;
}

}  // namespace

std::string render_envelope(const AclMessage& m) {
    sl::Frame f{std::string(act_name(m.performative)), {}};
    auto add = [&f](std::string name, sl::Node value) { f.slots.push_back({std::move(name), std::move(value)}); };
    add("sender", sl::str(m.sender.name));
    add("receiver", aid_sequence(m.receivers));
    if (m.reply_to) add("reply-to", aid_sequence(*m.reply_to));
    add("content", sl::str(m.content));
    add("language", sl::str(m.language));
    add("ontology", sl::str(m.ontology));
    if (m.protocol) add("protocol", sl::str(*m.protocol));
    add("conversation-id", sl::str(m.conversation_id));
    if (m.reply_with) add("reply-with", sl::str(*m.reply_with));
    if (m.in_reply_to) add("in-reply-to", sl::str(*m.in_reply_to));
    return sl::print_content(f);
}

DecodedEnvelope decode_envelope(std::string_view text) {
    DecodedEnvelope out;
    auto& v = out.report.violations;
    sl::Node tree;
    try {
        tree = sl::parse_content(text);
    } catch (const sl::SyntaxError& e) {
        v.push_back(e.what());
        return out;
    }
    const auto* frame = tree.get_if<sl::Frame>();
    if (!frame) {
        v.push_back("envelope is not a frame");
        return out;
    }
    auto act = act_from_name(frame->name);
    if (!act) v.push_back("unknown communicative act '" + frame->name + "'");

    AclMessage m;
    auto text_slot = [&](std::string_view name, bool mandatory) -> std::optional<std::string> {
        const sl::Node* n = frame->find(name);
        if (!n) {
            if (mandatory) v.push_back("mandatory " + std::string(name) + " missing");
            return std::nullopt;
        }
        if (const auto* s = n->get_if<sl::Str>()) return s->text;
        if (const auto* a = n->get_if<sl::Atom>()) return a->symbol;
        v.push_back(std::string(name) + " must be a string");
        return std::nullopt;
    };
    auto aid_list = [&](std::string_view name, bool mandatory) -> std::optional<std::vector<Aid>> {
        const sl::Node* n = frame->find(name);
        if (!n) {
            if (mandatory) v.push_back("mandatory " + std::string(name) + " missing");
            return std::nullopt;
        }
        const auto* seq = n->get_if<sl::Seq>();
        if (!seq) {
            v.push_back(std::string(name) + " must be a sequence");
            return std::nullopt;
        }
        std::vector<Aid> aids;
        for (const auto& item : seq->items) {
            if (const auto* s = item.get_if<sl::Str>()) aids.emplace_back(s->text);
            else if (const auto* a = item.get_if<sl::Atom>()) aids.emplace_back(a->symbol);
            else v.push_back(std::string(name) + " entries must be agent names");
        }
        return aids;
    };

    if (auto s = text_slot("sender", true)) m.sender = Aid(*s);
    if (auto r = aid_list("receiver", true)) m.receivers = std::move(*r);
    m.reply_to = aid_list("reply-to", false);
    if (auto c = text_slot("content", true)) m.content = std::move(*c);
    if (auto l = text_slot("language", false)) m.language = std::move(*l);
    if (auto o = text_slot("ontology", false)) m.ontology = std::move(*o);
    m.protocol = text_slot("protocol", false);
    if (auto cv = text_slot("conversation-id", false)) m.conversation_id = std::move(*cv);
    m.reply_with = text_slot("reply-with", false);
    m.in_reply_to = text_slot("in-reply-to", false);

    static const std::array<std::string_view, 10> known{"sender",   "receiver",        "reply-to",
                                                        "content",  "language",        "ontology",
                                                        "protocol", "conversation-id", "reply-with",
                                                        "in-reply-to"};
    for (const auto& s : frame->slots) {
        if (std::find(known.begin(), known.end(), s.name) == known.end())
            v.push_back("unknown envelope field '" + s.name + "'");
    }

    auto structural = validate_message(m);
    for (auto& msg : structural.violations) {
        if (std::find(v.begin(), v.end(), msg) == v.end()) v.push_back(std::move(msg));
    }
    if (act) {
        m.performative = *act;
        if (out.report.ok()) out.message = std::move(m);
    }
    return out;
}

}  // namespace workcell::acl
