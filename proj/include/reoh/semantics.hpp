#pragma once

#include "reoh/automaton.hpp"
#include "reoh/circuit.hpp"

namespace reoh {

// Reference (specification-side) semantics: per-primitive constraint
// automata over flow actions, their port-blocking lift, and whole-circuit
// semantics by synchronization product and hiding.

// The standard one-state (two for fifo) automata. Action names are the port
// names handed in; arity must match the kind.
Automaton node_ca(NodeKind kind, const std::vector<std::string>& in_ports,
                  const std::vector<std::string>& out_ports);
Automaton channel_ca(ChannelKind kind, const std::string& end_a, const std::string& end_b);

// Each flow transition q -N-> q' becomes q -{bX}-> w -{uX}-> q' with a fresh
// waiting state per transition.
Automaton lift_port_blocking(const Automaton& ca);

// Test-side inverse of the lift: merges b/u pairs back into flow transitions.
Automaton unlift_port_blocking(const Automaton& pb);

struct PrimitiveSemantics {
    Automaton ca; // flow actions, one per visible node
    Automaton pb; // block/unblock actions
};

// Product of all primitive automata over shared ports, relabeled to
// node-level flow actions. Hidden auxiliary nodes are always hidden; internal
// nodes additionally when `hide_internal`. Expects a desugared circuit.
PrimitiveSemantics circuit_reference_semantics(const Circuit& c, bool hide_internal,
                                               std::size_t state_bound = 1'000'000);

// Distinct non-empty labels on transitions leaving the initial state.
std::set<Label> initial_labels(const Automaton& a);

// Node sets of all non-empty labels (labels are node-level flow actions).
std::set<std::set<std::string>> transition_node_sets(const Automaton& ca);

} // namespace reoh
