#include "reoh/semantics.hpp"

#include "reoh/error.hpp"

#include <algorithm>
#include <deque>

namespace reoh {

namespace {

Label flows(const std::vector<std::string>& ports) {
    Label l;
    for (const auto& p : ports) l.push_back(flow(p));
    canonicalize(l);
    return l;
}

} // namespace

Automaton node_ca(NodeKind kind, const std::vector<std::string>& in_ports,
                  const std::vector<std::string>& out_ports) {
    auto arity = [&](bool ok) {
        if (!ok)
            fail("ArityError", std::string("node_ca: bad arity for ") + kind_name(kind));
    };
    Automaton a;
    a.initial = "s0";
    a.add_state("s0");
    switch (kind) {
    case NodeKind::source:
        arity(in_ports.empty() && !out_ports.empty());
        a.add_transition("s0", flows(out_ports), "s0");
        break;
    case NodeKind::sink:
        arity(out_ports.empty() && !in_ports.empty());
        for (const auto& p : in_ports) a.add_transition("s0", {flow(p)}, "s0");
        break;
    case NodeKind::mixed:
        arity(in_ports.size() == 1 && out_ports.size() == 1);
        a.add_transition("s0", flows({in_ports[0], out_ports[0]}), "s0");
        break;
    case NodeKind::merge:
        arity(in_ports.size() >= 2 && out_ports.size() == 1);
        for (const auto& p : in_ports)
            a.add_transition("s0", flows({p, out_ports[0]}), "s0");
        break;
    case NodeKind::replicate: {
        arity(in_ports.size() == 1 && out_ports.size() >= 2);
        std::vector<std::string> all = out_ports;
        all.push_back(in_ports[0]);
        a.add_transition("s0", flows(all), "s0");
        break;
    }
    case NodeKind::route:
        arity(in_ports.size() == 1 && out_ports.size() >= 2);
        for (const auto& p : out_ports)
            a.add_transition("s0", flows({in_ports[0], p}), "s0");
        break;
    case NodeKind::join: {
        arity(in_ports.size() >= 2 && out_ports.size() == 1);
        std::vector<std::string> all = in_ports;
        all.push_back(out_ports[0]);
        a.add_transition("s0", flows(all), "s0");
        break;
    }
    }
    return a;
}

Automaton channel_ca(ChannelKind kind, const std::string& end_a, const std::string& end_b) {
    Automaton a;
    a.initial = "s0";
    a.add_state("s0");
    switch (kind) {
    case ChannelKind::sync:
    case ChannelKind::transform:
    case ChannelKind::sync_drain:
        a.add_transition("s0", flows({end_a, end_b}), "s0");
        break;
    case ChannelKind::lossy_sync_ctx:
    case ChannelKind::lossy_sync_nd:
    case ChannelKind::filter:
        a.add_transition("s0", flows({end_a, end_b}), "s0");
        a.add_transition("s0", {flow(end_a)}, "s0");
        break;
    case ChannelKind::async_drain:
        a.add_transition("s0", {flow(end_a)}, "s0");
        a.add_transition("s0", {flow(end_b)}, "s0");
        break;
    case ChannelKind::fifo:
        a.add_transition("s0", {flow(end_a)}, "s1");
        a.add_transition("s1", {flow(end_b)}, "s0");
        break;
    }
    return a;
}

Automaton lift_port_blocking(const Automaton& ca) {
    for (const auto& x : ca.alphabet)
        if (x.kind != ActionKind::flow)
            fail("InvalidAutomaton", "lift_port_blocking expects a flow-only automaton");
    Automaton out;
    out.initial = ca.initial;
    out.states = ca.states;
    for (const auto& x : ca.alphabet) {
        out.alphabet.insert(block(x.port));
        out.alphabet.insert(unblock(x.port));
    }
    int w = 0;
    for (const auto& t : ca.transitions) {
        if (t.label.empty()) {
            out.transitions.insert({t.src, {}, t.dst});
            continue;
        }
        Label bs, us;
        for (const auto& x : t.label) {
            bs.push_back(block(x.port));
            us.push_back(unblock(x.port));
        }
        canonicalize(bs);
        canonicalize(us);
        const std::string wait = "w" + std::to_string(w++);
        out.states.insert(wait);
        out.transitions.insert({t.src, std::move(bs), wait});
        out.transitions.insert({wait, std::move(us), t.dst});
    }
    return out;
}

Automaton unlift_port_blocking(const Automaton& pb) {
    Automaton out;
    out.initial = pb.initial;
    std::map<std::string, std::vector<const Transition*>> by_src;
    for (const auto& t : pb.transitions) by_src[t.dst]; // ensure key
    for (const auto& t : pb.transitions) by_src[t.src].push_back(&t);

    for (const auto& t : pb.transitions) {
        if (t.label.empty()) {
            out.add_transition(t.src, {}, t.dst);
            continue;
        }
        bool all_block = std::all_of(t.label.begin(), t.label.end(), [](const Action& a) {
            return a.kind == ActionKind::block;
        });
        if (!all_block) continue; // unblock halves handled with their block
        for (const Transition* u : by_src[t.dst]) {
            Label fl;
            for (const auto& x : t.label) fl.push_back(flow(x.port));
            canonicalize(fl);
            out.add_transition(t.src, std::move(fl), u->dst);
        }
    }
    out.states.insert(out.initial);
    return out;
}

// --- whole-circuit product -----------------------------------------------------

namespace {

// During the fold, node actions are namespaced "n|A.out1" and channel end
// actions "c|c0.a"; each attachment fuses one of each into the plain port
// name "A.out1".
Action node_port_action(const PortRef& p) { return flow("n|" + p.qualified()); }
Action chan_end_action(const std::string& chan, char end) {
    return flow(std::string("c|") + chan + "." + end);
}

struct Primitive {
    std::string id;
    Automaton aut;
};

} // namespace

PrimitiveSemantics circuit_reference_semantics(const Circuit& c, bool hide_internal,
                                               std::size_t state_bound) {
    validate(c);

    std::map<std::string, Primitive> prims;
    for (const auto& n : c.nodes) {
        std::vector<std::string> ins, outs;
        for (const auto& p : n.in_ports) ins.push_back(node_port_action({n.id, p}).port);
        for (const auto& p : n.out_ports) outs.push_back(node_port_action({n.id, p}).port);
        prims["n:" + n.id] = {"n:" + n.id, node_ca(n.kind, ins, outs)};
    }
    for (const auto& ch : c.channels)
        prims["c:" + ch.id] = {"c:" + ch.id,
                               channel_ca(ch.kind, chan_end_action(ch.id, 'a').port,
                                          chan_end_action(ch.id, 'b').port)};

    // Fuse (node port, channel end) pairs: key by node primitive and channel
    // primitive so the fold can emit sync pairs when the partner is present.
    struct Fusion {
        Action fused, node_side, chan_side;
        std::string node_prim, chan_prim;
    };
    std::vector<Fusion> fusions;
    for (const auto& ch : c.channels) {
        fusions.push_back({flow(ch.end_a.qualified()), node_port_action(ch.end_a),
                           chan_end_action(ch.id, 'a'), "n:" + ch.end_a.node, "c:" + ch.id});
        fusions.push_back({flow(ch.end_b.qualified()), node_port_action(ch.end_b),
                           chan_end_action(ch.id, 'b'), "n:" + ch.end_b.node, "c:" + ch.id});
    }

    // Fold in breadth-first order over the connection graph so constraints
    // bind early and intermediate products stay small.
    std::vector<std::string> order;
    {
        std::set<std::string> left;
        for (const auto& [id, p] : prims) left.insert(id);
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& f : fusions) {
            adj[f.node_prim].push_back(f.chan_prim);
            adj[f.chan_prim].push_back(f.node_prim);
        }
        while (!left.empty()) {
            std::deque<std::string> work{*left.begin()};
            left.erase(left.begin());
            while (!work.empty()) {
                std::string u = work.front();
                work.pop_front();
                order.push_back(u);
                for (const auto& v : adj[u])
                    if (left.erase(v)) work.push_back(v);
            }
        }
    }

    Automaton acc = prims.at(order[0]).aut;
    std::set<std::string> folded{order[0]};
    for (size_t i = 1; i < order.size(); ++i) {
        const auto& next = prims.at(order[i]);
        SyncMap sync;
        for (const auto& f : fusions) {
            bool node_in_acc = folded.count(f.node_prim) && order[i] == f.chan_prim;
            bool chan_in_acc = folded.count(f.chan_prim) && order[i] == f.node_prim;
            if (node_in_acc)
                sync.push_back({f.fused, f.node_side, f.chan_side});
            else if (chan_in_acc)
                sync.push_back({f.fused, f.chan_side, f.node_side});
        }
        acc = product(acc, next.aut, sync);
        folded.insert(order[i]);
        if (acc.states.size() > state_bound)
            fail("StateExplosion", "reference product exceeded " + std::to_string(state_bound) +
                                       " states");
    }

    // Relabel every port-level action to its node's flow action.
    std::map<Action, Action> to_node;
    for (const auto& x : acc.alphabet) {
        std::string port = x.port;
        if (port.rfind("n|", 0) == 0) port = port.substr(2);
        if (port.rfind("c|", 0) == 0)
            fail("DanglingPort", "channel end left unattached: " + port.substr(2));
        to_node[x] = flow(node_of_port(port));
    }
    Automaton node_level = rename(acc, to_node);

    // Hide auxiliary nodes, and internal ones when requested.
    std::set<Action> to_hide;
    std::set<std::string> internal = c.internal_nodes();
    for (const auto& n : c.nodes) {
        if (!node_level.alphabet.count(flow(n.id))) continue;
        if (n.hidden || (hide_internal && internal.count(n.id)))
            to_hide.insert(flow(n.id));
    }
    node_level = hide(node_level, to_hide);

    PrimitiveSemantics out;
    out.ca = std::move(node_level);
    out.pb = lift_port_blocking(out.ca);
    return out;
}

std::set<Label> initial_labels(const Automaton& a) {
    std::set<Label> out;
    for (const auto& t : a.transitions)
        if (t.src == a.initial && !t.label.empty()) out.insert(t.label);
    return out;
}

std::set<std::set<std::string>> transition_node_sets(const Automaton& ca) {
    std::set<std::set<std::string>> out;
    for (const auto& t : ca.transitions) {
        if (t.label.empty()) continue;
        std::set<std::string> nodes;
        for (const auto& x : t.label) nodes.insert(x.port);
        out.insert(std::move(nodes));
    }
    return out;
}

} // namespace reoh
