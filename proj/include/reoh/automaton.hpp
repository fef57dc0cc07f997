#pragma once

#include "reoh/action.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace reoh {

// ---------------------------------------------------------------------------
// Action constraint automata (ACA). Labels are sets of actions; the empty
// label plays the role of the unobservable step. Values are immutable once
// built and safe to share across threads.
// ---------------------------------------------------------------------------

struct Transition {
    std::string src;
    Label label;
    std::string dst;

    auto operator<=>(const Transition&) const = default;
};

struct Automaton {
    std::set<std::string> states;
    std::set<Action> alphabet;
    std::set<Transition> transitions;
    std::string initial;

    void add_state(const std::string& s) { states.insert(s); }
    void add_transition(std::string src, Label label, std::string dst);

    bool operator==(const Automaton&) const = default;
};

// Checks the structural invariants (initial and endpoints in `states`, labels
// inside the alphabet, no silent action declared). Throws on violation.
void validate(const Automaton& a);

// ---------------------------------------------------------------------------
// Timed ACA: clocks, guards, resets and per-state invariance conditions.
// Bounds are symbolic sums of named timeout constants so the product's
// bound-update is exact.
// ---------------------------------------------------------------------------

enum class Rel : std::uint8_t { lt, le, gt, ge, eq };

const char* rel_name(Rel r);
Rel rel_from_name(const std::string& name);

struct ClockAtom {
    std::string clock;
    Rel rel = Rel::lt;
    std::vector<std::string> bound; // sorted set of constant names; their sum

    auto operator<=>(const ClockAtom&) const = default;
};

std::string to_string(const ClockAtom& c);

// Conjunction of atoms, sorted; empty means `true`.
using ClockConstraint = std::vector<ClockAtom>;

std::string to_string(const ClockConstraint& cc);

struct TimedTransition {
    std::string src;
    Label label;
    std::string dst;
    ClockConstraint guard;       // empty = true
    std::set<std::string> resets;

    auto operator<=>(const TimedTransition&) const = default;
};

struct TimedAutomaton {
    std::set<std::string> states;
    std::set<Action> alphabet;
    std::set<std::string> clocks;
    std::set<TimedTransition> transitions;
    std::map<std::string, ClockConstraint> invariance; // per state; empty = true
    std::string initial;

    bool operator==(const TimedAutomaton&) const = default;
};

void validate(const TimedAutomaton& a);

// Drops clocks, guards, resets and invariances.
Automaton time_abstract(const TimedAutomaton& a);

// ---------------------------------------------------------------------------
// gamma-synchronization product. `fused` is a fresh name standing for the
// pair (left, right); independent transitions fire alone only when their
// label has no synchronized action, and two transitions fire jointly when
// their synchronized parts agree.
// ---------------------------------------------------------------------------

struct SyncPair {
    Action fused;
    Action left;
    Action right;

    auto operator<=>(const SyncPair&) const = default;
};

using SyncMap = std::vector<SyncPair>;

Automaton product(const Automaton& a, const Automaton& b, const SyncMap& sync);
TimedAutomaton product(const TimedAutomaton& a, const TimedAutomaton& b, const SyncMap& sync);

// Removes `k` from every label and from the alphabet; labels may become
// empty (they are absorbed by empty-abstracted traces and weak bisimulation).
Automaton hide(const Automaton& a, const std::set<Action>& k);
TimedAutomaton hide(const TimedAutomaton& a, const std::set<Action>& k);

// Each label N becomes N \ H  u  r[N n H]. The map need not be injective.
Automaton rename(const Automaton& a, const std::map<Action, Action>& r);
TimedAutomaton rename(const TimedAutomaton& a, const std::map<Action, Action>& r);

// Removes the silent action from labels and alphabet (hiding expressed as
// renaming-to-silent plus this step).
Automaton drop_silent(const Automaton& a);

// Timeout constants appearing in bounds of guards or invariances.
std::set<std::string> timeout_constants(const TimedAutomaton& a);

// ---------------------------------------------------------------------------
// Traces.
// ---------------------------------------------------------------------------

struct SymbolicTrace {
    std::vector<Label> steps;
    std::string start;
    std::string end;

    auto operator<=>(const SymbolicTrace&) const = default;
};

// All transition sequences from the initial state of length <= max_steps
// (the empty trace included). `cap` bounds the number of enumerated traces.
std::set<SymbolicTrace> untimed_traces(const Automaton& a, int max_steps,
                                       std::size_t cap = 1u << 20);

// Empty-abstracted form: empty labels dropped from each trace.
std::set<SymbolicTrace> abstract_empty(const std::set<SymbolicTrace>& traces);

// ---------------------------------------------------------------------------
// Comparison helpers.
// ---------------------------------------------------------------------------

// Exact isomorphism for desk-scale automata (backtracking with signature
// pruning); used by the algebra property tests.
bool isomorphic(const Automaton& a, const Automaton& b);

} // namespace reoh
