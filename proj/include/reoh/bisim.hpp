#pragma once

#include "reoh/automaton.hpp"

#include <map>
#include <string>
#include <vector>

namespace reoh {

// Result of a weak-bisimilarity check. When `related`, `classes_*` carry the
// equivalence classes as a witness (same class id = weakly bisimilar). When
// not, `counterexample` holds a distinguishing label sequence if one exists
// at the trace level; `note` explains otherwise.
struct BisimResult {
    bool related = false;
    std::map<std::string, int> classes_a;
    std::map<std::string, int> classes_b;
    std::vector<Label> counterexample;
    std::string note;
};

// Weak bisimilarity of the initial states over the empty-label closure:
// s =N=> p means empty-label steps, one N-labeled step, then empty-label
// steps. Decided by closure saturation followed by partition refinement.
// Throws AlphabetMismatch when the alphabets differ.
BisimResult weak_bisimilar(const Automaton& a, const Automaton& b);

struct RefinementResult {
    bool holds = false;
    BisimResult bisim;
    std::string note;
};

// B <= A: `concrete` after hiding `k` and renaming `r` is weakly bisimilar
// to `abstract`. An alphabet mismatch after hide+rename yields holds=false
// (with the mismatch reported) rather than an error.
RefinementResult is_action_refinement(const Automaton& concrete, const Automaton& abstract,
                                      const std::set<Action>& k,
                                      const std::map<Action, Action>& r);

} // namespace reoh
