#pragma once

// SL-like content language: the s-expression form carried in the content
// field of every ACL message.
//
//   content  := node
//   node     := atom | string | number | seq | action | frame
//   frame    := "(" SYMBOL slot* ")"
//   slot     := ":" SYMBOL node
//   seq      := "(" "sequence" node* ")"
//   action   := "(" "action" agentid frame ")"
//   agentid  := "(" "agent-identifier" ":name" SYMBOL ")"
//   SYMBOL   := [A-Za-z][A-Za-z0-9-]*

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace workcell::sl {

struct Node;
struct Slot;

struct Atom {
    std::string symbol;
    bool operator==(const Atom&) const = default;
};

struct Str {
    std::string text;
    bool operator==(const Str&) const = default;
};

struct Int {
    std::int64_t value = 0;
    bool operator==(const Int&) const = default;
};

struct Float {
    double value = 0.0;
    bool operator==(const Float&) const = default;
};

struct Frame {
    std::string name;
    std::vector<Slot> slots;

    const Node* find(std::string_view slot) const;
    bool operator==(const Frame&) const;
};

struct Seq {
    std::vector<Node> items;
    bool operator==(const Seq&) const;
};

// (action (agent-identifier :name <actor>) <act>)
struct Action {
    std::string actor;
    Frame act;
    bool operator==(const Action&) const = default;
};

struct Node {
    std::variant<Atom, Str, Int, Float, Frame, Seq, Action> value;

    Node() = default;
    template <typename T>
        requires std::is_constructible_v<decltype(value), T&&> &&
                 (!std::is_same_v<std::remove_cvref_t<T>, Node>)
    Node(T&& v) : value(std::forward<T>(v)) {}

    template <typename T> bool is() const { return std::holds_alternative<T>(value); }
    template <typename T> const T& as() const { return std::get<T>(value); }
    template <typename T> const T* get_if() const { return std::get_if<T>(&value); }

    bool operator==(const Node&) const = default;
};

struct Slot {
    std::string name;
    Node value;
    bool operator==(const Slot&) const = default;
};

inline bool Frame::operator==(const Frame& o) const { return name == o.name && slots == o.slots; }
inline bool Seq::operator==(const Seq& o) const { return items == o.items; }

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::size_t position, std::string expected);

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

// Frame names that the grammar reserves for sequences and actions.
bool is_reserved_word(std::string_view name);
bool is_symbol(std::string_view text);

// Nesting deeper than this is rejected rather than recursed into.
inline constexpr std::size_t max_nesting_depth = 256;

Node parse_content(std::string_view text);
std::string print_content(const Node& tree);

// Convenience builders used by the ontology encoder and tests.
Node atom(std::string symbol);
Node str(std::string text);
Node integer(std::int64_t value);

}  // namespace workcell::sl
