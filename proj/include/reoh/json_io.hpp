#pragma once

#include "reoh/automaton.hpp"

#include <json.hpp>

#include <string>

namespace reoh {

using Json = nlohmann::ordered_json;

// Canonical JSON documents: keys in fixed order, collections sorted, so a
// re-run on identical input is byte-identical.
Json to_json(const Action& a);
Json to_json(const Label& l);
Json to_json(const Automaton& a);
Json to_json(const TimedAutomaton& a);

Action action_from_json(const Json& j);
Automaton automaton_from_json(const Json& j);
TimedAutomaton timed_automaton_from_json(const Json& j);

std::string dump_canonical(const Json& j); // 2-space indent, trailing newline

} // namespace reoh
