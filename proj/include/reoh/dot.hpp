#pragma once

#include "reoh/automaton.hpp"

#include <string>

namespace reoh {

struct Circuit; // circuit.hpp

// Graphviz exports. Node ordering is sorted, so output is reproducible.
// Edge labels render as "{a,b}" and, for timed automata, "{a,b}/x>T/x:=0".
std::string to_dot(const Automaton& a, const std::string& name = "aca");
std::string to_dot(const TimedAutomaton& a, const std::string& name = "taca");
std::string to_dot(const Circuit& c, const std::string& name = "circuit");

} // namespace reoh
