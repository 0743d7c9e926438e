#include "workcell/sl.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <limits>
#include <system_error>

namespace workcell::sl {

const Node* Frame::find(std::string_view slot) const {
    for (const auto& s : slots) {
        if (s.name == slot) return &s.value;
    }
    return nullptr;
}

SyntaxError::SyntaxError(std::size_t position, std::string expected)
    : std::runtime_error("syntax error at offset " + std::to_string(position) + ": expected " +
                         expected),
      position_(position),
      expected_(std::move(expected)) {}

namespace {

bool is_symbol_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool is_symbol_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_delimiter(char c) { return is_space(c) || c == '(' || c == ')'; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Node parse_document() {
        Node n = parse_node(0);
        skip_space();
        if (!at_end()) fail("end of input");
        return n;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    [[noreturn]] void fail(std::string expected) const { throw SyntaxError(pos_, std::move(expected)); }

    void skip_space() {
        while (!at_end() && is_space(text_[pos_])) ++pos_;
    }

    void expect_delimited() {
        if (!at_end() && !is_delimiter(text_[pos_])) fail("delimiter after token");
    }

    std::string read_symbol() {
        if (at_end() || !is_symbol_start(peek())) fail("symbol");
        std::size_t start = pos_;
        while (!at_end() && is_symbol_char(text_[pos_])) ++pos_;
        expect_delimited();
        return std::string(text_.substr(start, pos_ - start));
    }

    void expect_char(char c, const char* what) {
        skip_space();
        if (peek() != c) fail(what);
        ++pos_;
    }

    Node parse_node(std::size_t depth) {
        if (depth > max_nesting_depth) fail("shallower nesting");
        skip_space();
        if (at_end()) fail("node");
        char c = peek();
        if (c == '(') return parse_compound(depth);
        if (c == '"') return parse_string();
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (is_symbol_start(c)) return Atom{read_symbol()};
        fail("node");
    }

    Node parse_string() {
        ++pos_;  // opening quote
        std::string out;
        while (true) {
            if (at_end()) fail("closing '\"'");
            char c = text_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (at_end()) fail("escaped character");
                char e = text_[pos_];
                if (e != '"' && e != '\\') fail("'\\\"' or '\\\\' escape");
                out.push_back(e);
                ++pos_;
                continue;
            }
            out.push_back(c);
        }
        expect_delimited();
        return Str{std::move(out)};
    }

    Node parse_number() {
        std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        std::size_t digits = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits) fail("digit");
        bool is_float = false;
        if (peek() == '.') {
            is_float = true;
            ++pos_;
            std::size_t frac = pos_;
            while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == frac) fail("digit after '.'");
        }
        expect_delimited();
        std::string_view lexeme = text_.substr(start, pos_ - start);
        const char* first = lexeme.data();
        const char* last = lexeme.data() + lexeme.size();
        if (is_float) {
            double v = 0;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last) throw SyntaxError(start, "representable decimal");
            return Float{v};
        }
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) throw SyntaxError(start, "64-bit integer");
        return Int{v};
    }

    Node parse_compound(std::size_t depth) {
        ++pos_;  // '('
        skip_space();
        std::string head = read_symbol();
        if (head == "sequence") {
            Seq seq;
            while (true) {
                skip_space();
                if (peek() == ')') {
                    ++pos_;
                    return seq;
                }
                if (at_end()) fail("')'");
                seq.items.push_back(parse_node(depth + 1));
            }
        }
        if (head == "action") {
            expect_char('(', "'(' opening agent-identifier");
            skip_space();
            if (read_symbol() != "agent-identifier") fail("agent-identifier");
            skip_space();
            if (read_slot_marker() != "name") fail("':name'");
            skip_space();
            std::string actor = read_symbol();
            expect_char(')', "')' closing agent-identifier");
            skip_space();
            if (peek() != '(') fail("'(' opening action frame");
            ++pos_;
            skip_space();
            std::string name = read_symbol();
            if (is_reserved_word(name)) fail("frame name");
            Frame act = parse_frame_body(std::move(name), depth + 1);
            expect_char(')', "')' closing action");
            return Action{std::move(actor), std::move(act)};
        }
        return parse_frame_body(std::move(head), depth);
    }

    std::string read_slot_marker() {
        if (peek() != ':') fail("':' slot marker");
        ++pos_;
        if (at_end() || !is_symbol_start(peek())) fail("slot name after ':'");
        return read_symbol();
    }

    // Parses slots up to and including the closing paren.
    Frame parse_frame_body(std::string name, std::size_t depth) {
        Frame frame{std::move(name), {}};
        while (true) {
            skip_space();
            if (at_end()) fail("')'");
            if (peek() == ')') {
                ++pos_;
                return frame;
            }
            std::size_t slot_pos = pos_;
            std::string slot = read_slot_marker();
            if (frame.find(slot) != nullptr) throw SyntaxError(slot_pos, "unique slot name (duplicate :" + slot + ")");
            Node value = parse_node(depth + 1);
            frame.slots.push_back(Slot{std::move(slot), std::move(value)});
        }
    }
};

void print_float(std::string& out, double v) {
    std::array<char, 400> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
    std::string_view text(buf.data(), ptr - buf.data());
    out += text;
    if (text.find('.') == std::string_view::npos) out += ".0";
}

void print_node(std::string& out, const Node& n);

void print_frame(std::string& out, const Frame& f) {
    out += '(';
    out += f.name;
    for (const auto& s : f.slots) {
        out += " :";
        out += s.name;
        out += ' ';
        print_node(out, s.value);
    }
    out += ')';
}

void print_node(std::string& out, const Node& n) {
    struct Visitor {
        std::string& out;
        void operator()(const Atom& a) const { out += a.symbol; }
        void operator()(const Str& s) const {
            out += '"';
            for (char c : s.text) {
                if (c == '"' || c == '\\') out += '\\';
                out += c;
            }
            out += '"';
        }
        void operator()(const Int& i) const { out += std::to_string(i.value); }
        void operator()(const Float& f) const { print_float(out, f.value); }
        void operator()(const Frame& f) const { print_frame(out, f); }
        void operator()(const Seq& s) const {
            out += "(sequence";
            for (const auto& item : s.items) {
                out += ' ';
                print_node(out, item);
            }
            out += ')';
        }
        void operator()(const Action& a) const {
            out += "(action (agent-identifier :name ";
            out += a.actor;
            out += ") ";
            print_frame(out, a.act);
            out += ')';
        }
    };
    std::visit(Visitor{out}, n.value);
}

}  // namespace

bool is_reserved_word(std::string_view name) { return name == "sequence" || name == "action"; }

bool is_symbol(std::string_view text) {
    if (text.empty() || !is_symbol_start(text.front())) return false;
    for (char c : text) {
        if (!is_symbol_char(c)) return false;
    }
    return true;
}

Node parse_content(std::string_view text) { return Parser(text).parse_document(); }

std::string print_content(const Node& tree) {
    std::string out;
    print_node(out, tree);
    return out;
}

Node atom(std::string symbol) { return Atom{std::move(symbol)}; }
Node str(std::string text) { return Str{std::move(text)}; }
Node integer(std::int64_t value) { return Int{value}; }

}  // namespace workcell::sl
