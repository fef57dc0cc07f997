#pragma once

#include "reoh/automaton.hpp"
#include "reoh/circuit.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reoh {

// Per-site handshake machines and their composition over joint ports.
//
// Message direction convention: send_* actions push a message out of the
// owning site, recv_* actions consume one. Each template owns one clock and
// one named timeout constant; states that wait under an `x < T` invariance
// always carry an `x > T` escape edge.

enum class TemplateKind : std::uint8_t {
    source,
    sink,
    mixed,
    replicate,  // 1 input, 2 outputs
    merge,      // 2 inputs, 1 output
    route,      // 1 input, 2 outputs
    join,       // 2 inputs, 1 output
    sync_link,  // channel as a forwarding shuttle
    lossy_ctx,  // lossy channel, loses on timeout of the sink side
    lossy_nd,   // lossy channel, may also lose without notifying the sink
};

const char* kind_name(TemplateKind k);

// Simulation gates: which boundary condition enables an edge.
enum class EdgeGate : std::uint8_t { none, write_request, read_request, no_read_request };

struct HandshakeTemplate {
    std::string site;                // owning node or channel id
    TemplateKind kind;
    TimedAutomaton taca;
    std::string clock;               // "x.<site>"
    std::string timeout_const;       // "T.<site>"
    std::map<TimedTransition, EdgeGate> gates;
    bool hidden_site = false;        // desugaring auxiliary or channel site
};

struct TemplateOptions {
    bool sink_always_accepting = false;
};

// The machine for one primitive, ports bound to the given names. in/out
// arity must match the kind (UnsupportedKind otherwise).
HandshakeTemplate handshake_template(TemplateKind kind, const std::string& site,
                                     const std::vector<std::string>& in_ports,
                                     const std::vector<std::string>& out_ports,
                                     const TemplateOptions& opts = {});

TemplateKind template_kind_for(NodeKind k);

enum class BlockMode : std::uint8_t { sync_block, free_block };

struct Composition {
    TimedAutomaton taca;
    // Block/unblock actions of hidden sites (dropped from observable views).
    std::set<Action> hidden_blocking;
    std::set<Action> message_actions;
};

// Left fold of the timed product over all templates of a synchronous region:
// per joint (node port, channel end), send-write<->recv-write,
// send-may-write<->recv-may-write and send-read<->recv-read fuse; in
// sync_block mode the block and unblock actions of the two node ports joined
// by each channel fuse as well.
Composition compose_handshake(const Circuit& region, BlockMode mode,
                              const TemplateOptions& opts = {});

// The matching abstraction: product of the per-site port-blocking references
// with the same block/unblock fusion, for region-level refinement checks.
Automaton compose_blocking_reference(const Circuit& region);

// Template (or reference) for one site of a region.
HandshakeTemplate site_template(const Circuit& region, const std::string& site_id,
                                const TemplateOptions& opts = {});

// T := ceil(c_factor * delay-weighted longest path * 2); the default
// c_factor is 2 * (1 + max merge-side in-degree of the region).
int estimate_timeout(const Circuit& region, std::optional<double> c_factor = std::nullopt);
double default_c_factor(const Circuit& region);

// Fused block action for the two node ports joined by a channel.
Action fused_block(const PortRef& a, const PortRef& b);
Action fused_unblock(const PortRef& a, const PortRef& b);

} // namespace reoh
