#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace reoh {

// Action types observed on ports. `flow` is the plain dataflow observation
// (a CA is an ACA whose labels use only `flow`). The six message kinds carry
// the handshake: send/recv of write, read and may_write. `silent` only
// arises from renaming; it never appears in a declared alphabet.
enum class ActionKind : std::uint8_t {
    flow,
    block,
    unblock,
    send_write,
    recv_write,
    send_read,
    recv_read,
    send_may_write,
    recv_may_write,
    silent,
};

bool is_message(ActionKind k);
bool is_blocking(ActionKind k); // block or unblock

const char* kind_name(ActionKind k);   // stable identifier for JSON
const char* kind_prefix(ActionKind k); // display prefix: "?w", "!r", "b", ...
ActionKind kind_from_name(const std::string& name);

struct Action {
    std::string port;
    ActionKind kind = ActionKind::flow;

    auto operator<=>(const Action&) const = default;
};

std::string to_string(const Action& a);

inline Action flow(std::string port) { return {std::move(port), ActionKind::flow}; }
inline Action block(std::string port) { return {std::move(port), ActionKind::block}; }
inline Action unblock(std::string port) { return {std::move(port), ActionKind::unblock}; }
inline Action send_w(std::string port) { return {std::move(port), ActionKind::send_write}; }
inline Action recv_w(std::string port) { return {std::move(port), ActionKind::recv_write}; }
inline Action send_r(std::string port) { return {std::move(port), ActionKind::send_read}; }
inline Action recv_r(std::string port) { return {std::move(port), ActionKind::recv_read}; }
inline Action send_mw(std::string port) { return {std::move(port), ActionKind::send_may_write}; }
inline Action recv_mw(std::string port) { return {std::move(port), ActionKind::recv_may_write}; }

// A transition label: a finite set of actions, kept sorted and duplicate-free.
using Label = std::vector<Action>;

Label make_label(std::initializer_list<Action> actions);
void canonicalize(Label& l);
bool label_contains(const Label& l, const Action& a);
bool label_subset(const Label& sub, const Label& super);
Label label_union(const Label& a, const Label& b);
Label label_minus(const Label& l, const std::vector<Action>& remove);
Label label_intersect(const Label& a, const Label& b);
std::string to_string(const Label& l); // "{a,b}", "{}" for the empty label

// Fused port names (joint ports of a product) are written "p~q"; splitting
// recovers the constituent ports.
std::vector<std::string> split_ports(const std::string& port);

// Node id of a port name like "A.out1" (everything before the first '.').
std::string node_of_port(const std::string& port);

} // namespace reoh
