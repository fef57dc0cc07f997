#pragma once

#include "reoh/json_io.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace reoh {

enum class NodeKind : std::uint8_t { source, sink, mixed, merge, replicate, route, join };
enum class ChannelKind : std::uint8_t {
    sync, lossy_sync_ctx, lossy_sync_nd, fifo, sync_drain, async_drain, filter, transform
};

const char* kind_name(NodeKind k);
const char* kind_name(ChannelKind k);
NodeKind node_kind_from_name(const std::string& s);
ChannelKind channel_kind_from_name(const std::string& s);

struct PortRef {
    std::string node;
    std::string port; // "in1", "out2", ...

    auto operator<=>(const PortRef&) const = default;
    std::string qualified() const { return node + "." + port; }
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::mixed;
    std::vector<std::string> in_ports;  // sorted
    std::vector<std::string> out_ports; // sorted
    bool hidden = false;                // desugaring auxiliary

    bool operator==(const Node&) const = default;
};

struct Channel {
    std::string id;
    ChannelKind kind = ChannelKind::sync;
    PortRef end_a; // source end (for drains: first source end)
    PortRef end_b; // sink end (for drains: second source end)
    int delay = 1; // handshaking link delay, abstract time units
    bool hidden = false;

    bool operator==(const Channel&) const = default;
};

struct Circuit {
    std::vector<Node> nodes;       // declaration order
    std::vector<Channel> channels; // declaration order

    const Node* find_node(const std::string& id) const;
    const Channel* find_channel(const std::string& id) const;

    // Channel end attached to a port, if any.
    std::optional<std::pair<std::string, char>> attachment(const PortRef& p) const;

    // Boundary partition. A node is source-boundary when writers can attach
    // (source kind, or an unattached in-port), sink-boundary when readers can
    // (sink kind, or an unattached out-port). Hidden nodes are internal.
    std::set<std::string> source_boundary() const;
    std::set<std::string> sink_boundary() const;
    std::set<std::string> internal_nodes() const;

    bool operator==(const Circuit&) const = default;
};

// Structural invariants: ends attached to declared ports, each port used by
// at most one end, node degrees consistent with kinds. Throws on violation.
void validate(const Circuit& c);

// --- DSL --------------------------------------------------------------------
//
//   circuit   := { stmt }
//   stmt      := "node" ID node-kind ";"
//              | chan-kind ID "." PORT "->" ID "." PORT [ "delay" INT ] ";"
//   comments start with '#' and run to end of line.
//
// Errors carry line/column positions.

Circuit parse_circuit(const std::string& text);
std::string print_circuit(const Circuit& c); // parse(print(c)) == c

// --- transformations ---------------------------------------------------------

// Rewrites primitives that have no handshake machine of their own:
//   sync_drain     -> hidden join node fed by two syncs, output absorbed
//   async_drain    -> hidden merge node, likewise
//   lossy_sync_nd  -> hidden route node with one branch to a hidden
//                     always-accepting sink
//   filter         -> like lossy_sync_nd (pass-or-lose once data is dropped)
//   replicate with more than two outputs -> cascade of binary replicates
// lossy_sync_ctx and transform are left intact. Idempotent.
Circuit desugar(const Circuit& c);

// Connected components after cutting every fifo channel.
struct Region {
    Circuit circuit;
    // Ports of region nodes that were fifo-attached, by role in this region.
    std::vector<PortRef> fifo_writer_ports; // fed by a fifo sink end
    std::vector<PortRef> fifo_reader_ports; // feeding a fifo source end
};

std::vector<Region> synchronous_regions(const Circuit& c);

struct PathLength {
    int hops = 0;
    int delay = 0;
};

// Longest simple path in the undirected region graph, exact by DFS.
// Throws RegionTooLarge above `node_bound`.
PathLength longest_path(const Circuit& region, int node_bound = 24);

Json to_json(const Circuit& c);

} // namespace reoh
