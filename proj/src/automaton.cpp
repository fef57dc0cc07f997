#include "reoh/automaton.hpp"

#include "reoh/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace reoh {

void Automaton::add_transition(std::string src, Label label, std::string dst) {
    canonicalize(label);
    states.insert(src);
    states.insert(dst);
    for (const auto& a : label) alphabet.insert(a);
    transitions.insert({std::move(src), std::move(label), std::move(dst)});
}

void validate(const Automaton& a) {
    if (!a.states.count(a.initial))
        fail("InvalidAutomaton", "initial state '" + a.initial + "' not in state set");
    for (const auto& x : a.alphabet)
        if (x.kind == ActionKind::silent)
            fail("InvalidAutomaton", "silent action declared in alphabet");
    for (const auto& t : a.transitions) {
        if (!a.states.count(t.src) || !a.states.count(t.dst))
            fail("InvalidAutomaton", "transition endpoint outside state set");
        for (const auto& x : t.label)
            if (!a.alphabet.count(x))
                fail("InvalidAutomaton", "label action " + to_string(x) + " outside alphabet");
    }
}

const char* rel_name(Rel r) {
    switch (r) {
    case Rel::lt: return "<";
    case Rel::le: return "<=";
    case Rel::gt: return ">";
    case Rel::ge: return ">=";
    case Rel::eq: return "=";
    }
    return "?";
}

Rel rel_from_name(const std::string& name) {
    if (name == "<") return Rel::lt;
    if (name == "<=") return Rel::le;
    if (name == ">") return Rel::gt;
    if (name == ">=") return Rel::ge;
    if (name == "=") return Rel::eq;
    fail("BadRelation", "unknown relation '" + name + "'");
}

std::string to_string(const ClockAtom& c) {
    std::string b;
    for (size_t i = 0; i < c.bound.size(); ++i) {
        if (i) b += "+";
        b += c.bound[i];
    }
    if (b.empty()) b = "0";
    return c.clock + rel_name(c.rel) + b;
}

std::string to_string(const ClockConstraint& cc) {
    if (cc.empty()) return "true";
    std::string s;
    for (size_t i = 0; i < cc.size(); ++i) {
        if (i) s += " & ";
        s += to_string(cc[i]);
    }
    return s;
}

void validate(const TimedAutomaton& a) {
    if (!a.states.count(a.initial))
        fail("InvalidAutomaton", "initial state '" + a.initial + "' not in state set");
    auto check_cc = [&](const ClockConstraint& cc) {
        for (const auto& atom : cc)
            if (!a.clocks.count(atom.clock))
                fail("InvalidAutomaton", "unknown clock '" + atom.clock + "'");
    };
    for (const auto& t : a.transitions) {
        if (!a.states.count(t.src) || !a.states.count(t.dst))
            fail("InvalidAutomaton", "transition endpoint outside state set");
        for (const auto& x : t.label)
            if (!a.alphabet.count(x))
                fail("InvalidAutomaton", "label action " + to_string(x) + " outside alphabet");
        check_cc(t.guard);
        for (const auto& c : t.resets)
            if (!a.clocks.count(c))
                fail("InvalidAutomaton", "unknown reset clock '" + c + "'");
    }
    for (const auto& s : a.states)
        if (!a.invariance.count(s))
            fail("InvalidAutomaton", "state '" + s + "' has no invariance entry");
    for (const auto& [s, cc] : a.invariance) check_cc(cc);
}

Automaton time_abstract(const TimedAutomaton& a) {
    Automaton out;
    out.states = a.states;
    out.alphabet = a.alphabet;
    out.initial = a.initial;
    for (const auto& t : a.transitions)
        out.transitions.insert({t.src, t.label, t.dst});
    return out;
}

// --- product ---------------------------------------------------------------

namespace {

struct SyncIndex {
    std::map<Action, Action> left_to_fused;  // gamma_1 inverted
    std::map<Action, Action> right_to_fused; // gamma_2 inverted
};

SyncIndex check_sync(const std::set<Action>& alpha_a, const std::set<Action>& alpha_b,
                     const SyncMap& sync) {
    for (const auto& x : alpha_a)
        if (alpha_b.count(x))
            fail("AlphabetOverlap", "action " + to_string(x) + " in both operands");
    SyncIndex idx;
    std::set<Action> fused_seen;
    for (const auto& p : sync) {
        if (!fused_seen.insert(p.fused).second)
            fail("BadSyncMap", "fused name " + to_string(p.fused) + " used twice");
        if (alpha_a.count(p.fused) || alpha_b.count(p.fused))
            fail("BadSyncMap", "fused name " + to_string(p.fused) + " collides with an operand alphabet");
        if (!alpha_a.count(p.left))
            fail("BadSyncMap", "left action " + to_string(p.left) + " not in first operand");
        if (!alpha_b.count(p.right))
            fail("BadSyncMap", "right action " + to_string(p.right) + " not in second operand");
        if (!idx.left_to_fused.emplace(p.left, p.fused).second)
            fail("BadSyncMap", "left action " + to_string(p.left) + " synchronized twice");
        if (!idx.right_to_fused.emplace(p.right, p.fused).second)
            fail("BadSyncMap", "right action " + to_string(p.right) + " synchronized twice");
    }
    return idx;
}

std::string pair_state(const std::string& s, const std::string& t) {
    return "(" + s + "," + t + ")";
}

// gamma^-1 of the synchronized part of a label, and the unsynchronized rest.
struct SplitLabel {
    Label fused;
    Label rest;
};

SplitLabel split_label(const Label& l, const std::map<Action, Action>& to_fused) {
    SplitLabel out;
    for (const auto& x : l) {
        auto it = to_fused.find(x);
        if (it != to_fused.end())
            out.fused.push_back(it->second);
        else
            out.rest.push_back(x);
    }
    canonicalize(out.fused);
    return out;
}

std::set<std::string> collect_constants(const ClockConstraint& cc) {
    std::set<std::string> out;
    for (const auto& atom : cc) out.insert(atom.bound.begin(), atom.bound.end());
    return out;
}

// The bound-update: every bound that names a timeout constant becomes the sum
// of all timeout constants of both operands.
ClockConstraint apply_chi(const ClockConstraint& cc, const std::set<std::string>& all_consts) {
    ClockConstraint out = cc;
    for (auto& atom : out) {
        if (atom.bound.empty()) continue;
        std::set<std::string> b(atom.bound.begin(), atom.bound.end());
        b.insert(all_consts.begin(), all_consts.end());
        atom.bound.assign(b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ClockConstraint conjoin(ClockConstraint a, const ClockConstraint& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

} // namespace

Automaton product(const Automaton& a, const Automaton& b, const SyncMap& sync) {
    SyncIndex idx = check_sync(a.alphabet, b.alphabet, sync);

    Automaton out;
    for (const auto& x : a.alphabet)
        if (!idx.left_to_fused.count(x)) out.alphabet.insert(x);
    for (const auto& x : b.alphabet)
        if (!idx.right_to_fused.count(x)) out.alphabet.insert(x);
    for (const auto& p : sync) out.alphabet.insert(p.fused);

    std::map<std::string, std::vector<const Transition*>> by_src_a, by_src_b;
    for (const auto& t : a.transitions) by_src_a[t.src].push_back(&t);
    for (const auto& t : b.transitions) by_src_b[t.src].push_back(&t);

    out.initial = pair_state(a.initial, b.initial);
    out.states.insert(out.initial);

    std::deque<std::pair<std::string, std::string>> work{{a.initial, b.initial}};
    std::set<std::pair<std::string, std::string>> seen{{a.initial, b.initial}};

    while (!work.empty()) {
        auto [sa, sb] = work.front();
        work.pop_front();
        const std::string src = pair_state(sa, sb);

        auto push = [&](const std::string& ta, const std::string& tb, Label label) {
            canonicalize(label);
            const std::string dst = pair_state(ta, tb);
            out.states.insert(dst);
            out.transitions.insert({src, std::move(label), dst});
            if (seen.insert({ta, tb}).second) work.push_back({ta, tb});
        };

        auto it_a = by_src_a.find(sa);
        auto it_b = by_src_b.find(sb);

        if (it_a != by_src_a.end())
            for (const Transition* t : it_a->second) {
                auto sl = split_label(t->label, idx.left_to_fused);
                if (sl.fused.empty()) push(t->dst, sb, t->label);
            }
        if (it_b != by_src_b.end())
            for (const Transition* t : it_b->second) {
                auto sl = split_label(t->label, idx.right_to_fused);
                if (sl.fused.empty()) push(sa, t->dst, t->label);
            }
        if (it_a != by_src_a.end() && it_b != by_src_b.end())
            for (const Transition* ta : it_a->second)
                for (const Transition* tb : it_b->second) {
                    auto la = split_label(ta->label, idx.left_to_fused);
                    auto lb = split_label(tb->label, idx.right_to_fused);
                    if (la.fused != lb.fused) continue;
                    push(ta->dst, tb->dst,
                         label_union(label_union(la.rest, la.fused), lb.rest));
                }
    }
    return out;
}

TimedAutomaton product(const TimedAutomaton& a0, const TimedAutomaton& b, const SyncMap& sync) {
    SyncIndex idx = check_sync(a0.alphabet, b.alphabet, sync);

    // Rename colliding clocks of the first operand.
    TimedAutomaton a = a0;
    {
        std::map<std::string, std::string> ren;
        for (const auto& c : a.clocks)
            if (b.clocks.count(c)) ren[c] = c + "'";
        if (!ren.empty()) {
            auto fix = [&](const std::string& c) {
                auto it = ren.find(c);
                return it == ren.end() ? c : it->second;
            };
            TimedAutomaton r = a;
            r.clocks.clear();
            for (const auto& c : a.clocks) r.clocks.insert(fix(c));
            r.transitions.clear();
            for (auto t : a.transitions) {
                for (auto& atom : t.guard) atom.clock = fix(atom.clock);
                std::set<std::string> rs;
                for (const auto& c : t.resets) rs.insert(fix(c));
                t.resets = std::move(rs);
                r.transitions.insert(std::move(t));
            }
            for (auto& [s, cc] : r.invariance)
                for (auto& atom : cc) atom.clock = fix(atom.clock);
            a = std::move(r);
        }
    }

    std::set<std::string> consts;
    {
        auto ca = timeout_constants(a);
        auto cb = timeout_constants(b);
        consts.insert(ca.begin(), ca.end());
        consts.insert(cb.begin(), cb.end());
    }

    TimedAutomaton out;
    out.clocks = a.clocks;
    out.clocks.insert(b.clocks.begin(), b.clocks.end());
    for (const auto& x : a.alphabet)
        if (!idx.left_to_fused.count(x)) out.alphabet.insert(x);
    for (const auto& x : b.alphabet)
        if (!idx.right_to_fused.count(x)) out.alphabet.insert(x);
    for (const auto& p : sync) out.alphabet.insert(p.fused);

    std::map<std::string, std::vector<const TimedTransition*>> by_src_a, by_src_b;
    for (const auto& t : a.transitions) by_src_a[t.src].push_back(&t);
    for (const auto& t : b.transitions) by_src_b[t.src].push_back(&t);

    auto inv_of = [](const TimedAutomaton& x, const std::string& s) -> ClockConstraint {
        auto it = x.invariance.find(s);
        return it == x.invariance.end() ? ClockConstraint{} : it->second;
    };

    out.initial = pair_state(a.initial, b.initial);

    std::deque<std::pair<std::string, std::string>> work{{a.initial, b.initial}};
    std::set<std::pair<std::string, std::string>> seen{{a.initial, b.initial}};

    while (!work.empty()) {
        auto [sa, sb] = work.front();
        work.pop_front();
        const std::string src = pair_state(sa, sb);
        out.states.insert(src);
        out.invariance[src] = conjoin(apply_chi(inv_of(a, sa), consts),
                                      apply_chi(inv_of(b, sb), consts));

        auto push = [&](const std::string& ta, const std::string& tb, Label label,
                        ClockConstraint guard, std::set<std::string> resets) {
            canonicalize(label);
            const std::string dst = pair_state(ta, tb);
            out.transitions.insert({src, std::move(label), dst, std::move(guard), std::move(resets)});
            if (seen.insert({ta, tb}).second) work.push_back({ta, tb});
        };

        auto it_a = by_src_a.find(sa);
        auto it_b = by_src_b.find(sb);

        if (it_a != by_src_a.end())
            for (const TimedTransition* t : it_a->second) {
                auto sl = split_label(t->label, idx.left_to_fused);
                if (sl.fused.empty())
                    push(t->dst, sb, t->label, apply_chi(t->guard, consts), t->resets);
            }
        if (it_b != by_src_b.end())
            for (const TimedTransition* t : it_b->second) {
                auto sl = split_label(t->label, idx.right_to_fused);
                if (sl.fused.empty())
                    push(sa, t->dst, t->label, apply_chi(t->guard, consts), t->resets);
            }
        if (it_a != by_src_a.end() && it_b != by_src_b.end())
            for (const TimedTransition* ta : it_a->second)
                for (const TimedTransition* tb : it_b->second) {
                    auto la = split_label(ta->label, idx.left_to_fused);
                    auto lb = split_label(tb->label, idx.right_to_fused);
                    if (la.fused != lb.fused) continue;
                    std::set<std::string> resets = ta->resets;
                    resets.insert(tb->resets.begin(), tb->resets.end());
                    push(ta->dst, tb->dst,
                         label_union(label_union(la.rest, la.fused), lb.rest),
                         conjoin(apply_chi(ta->guard, consts), apply_chi(tb->guard, consts)),
                         std::move(resets));
                }
    }

    // Keep only invariances of reachable states.
    std::map<std::string, ClockConstraint> inv;
    for (const auto& s : out.states) inv[s] = out.invariance[s];
    out.invariance = std::move(inv);
    return out;
}

// --- hide / rename ----------------------------------------------------------

namespace {

void check_hide_set(const std::set<Action>& alphabet, const std::set<Action>& k) {
    for (const auto& x : k)
        if (!alphabet.count(x))
            fail("UnknownAction", "cannot hide " + to_string(x) + ": not in alphabet");
}

void check_rename_domain(const std::set<Action>& alphabet, const std::map<Action, Action>& r) {
    for (const auto& [from, to] : r) {
        (void)to;
        if (!alphabet.count(from))
            fail("UnknownAction", "cannot rename " + to_string(from) + ": not in alphabet");
    }
}

Label hide_label(const Label& l, const std::set<Action>& k) {
    Label out;
    for (const auto& x : l)
        if (!k.count(x)) out.push_back(x);
    return out;
}

Label rename_label(const Label& l, const std::map<Action, Action>& r) {
    Label out;
    for (const auto& x : l) {
        auto it = r.find(x);
        out.push_back(it == r.end() ? x : it->second);
    }
    canonicalize(out);
    return out;
}

} // namespace

Automaton hide(const Automaton& a, const std::set<Action>& k) {
    check_hide_set(a.alphabet, k);
    Automaton out;
    out.states = a.states;
    out.initial = a.initial;
    for (const auto& x : a.alphabet)
        if (!k.count(x)) out.alphabet.insert(x);
    for (const auto& t : a.transitions)
        out.transitions.insert({t.src, hide_label(t.label, k), t.dst});
    return out;
}

TimedAutomaton hide(const TimedAutomaton& a, const std::set<Action>& k) {
    check_hide_set(a.alphabet, k);
    TimedAutomaton out = a;
    out.alphabet.clear();
    for (const auto& x : a.alphabet)
        if (!k.count(x)) out.alphabet.insert(x);
    out.transitions.clear();
    for (auto t : a.transitions) {
        t.label = hide_label(t.label, k);
        out.transitions.insert(std::move(t));
    }
    return out;
}

Automaton rename(const Automaton& a, const std::map<Action, Action>& r) {
    check_rename_domain(a.alphabet, r);
    Automaton out;
    out.states = a.states;
    out.initial = a.initial;
    for (const auto& x : a.alphabet) {
        auto it = r.find(x);
        out.alphabet.insert(it == r.end() ? x : it->second);
    }
    for (const auto& t : a.transitions)
        out.transitions.insert({t.src, rename_label(t.label, r), t.dst});
    return out;
}

TimedAutomaton rename(const TimedAutomaton& a, const std::map<Action, Action>& r) {
    check_rename_domain(a.alphabet, r);
    TimedAutomaton out = a;
    out.alphabet.clear();
    for (const auto& x : a.alphabet) {
        auto it = r.find(x);
        out.alphabet.insert(it == r.end() ? x : it->second);
    }
    out.transitions.clear();
    for (auto t : a.transitions) {
        t.label = rename_label(t.label, r);
        out.transitions.insert(std::move(t));
    }
    return out;
}

Automaton drop_silent(const Automaton& a) {
    Automaton out;
    out.states = a.states;
    out.initial = a.initial;
    for (const auto& x : a.alphabet)
        if (x.kind != ActionKind::silent) out.alphabet.insert(x);
    for (const auto& t : a.transitions) {
        Label l;
        for (const auto& x : t.label)
            if (x.kind != ActionKind::silent) l.push_back(x);
        out.transitions.insert({t.src, std::move(l), t.dst});
    }
    return out;
}

std::set<std::string> timeout_constants(const TimedAutomaton& a) {
    std::set<std::string> out;
    for (const auto& t : a.transitions) {
        auto c = collect_constants(t.guard);
        out.insert(c.begin(), c.end());
    }
    for (const auto& [s, cc] : a.invariance) {
        auto c = collect_constants(cc);
        out.insert(c.begin(), c.end());
    }
    return out;
}

// --- traces -----------------------------------------------------------------

std::set<SymbolicTrace> untimed_traces(const Automaton& a, int max_steps, std::size_t cap) {
    if (max_steps < 0) fail("BadBound", "max_steps must be >= 0");
    std::map<std::string, std::vector<const Transition*>> by_src;
    for (const auto& t : a.transitions) by_src[t.src].push_back(&t);

    std::set<SymbolicTrace> out;
    std::vector<Label> steps;

    std::function<void(const std::string&, int)> go = [&](const std::string& s, int depth) {
        if (out.size() >= cap) return;
        out.insert({steps, a.initial, s});
        if (depth == max_steps) return;
        auto it = by_src.find(s);
        if (it == by_src.end()) return;
        for (const Transition* t : it->second) {
            steps.push_back(t->label);
            go(t->dst, depth + 1);
            steps.pop_back();
        }
    };
    go(a.initial, 0);
    return out;
}

std::set<SymbolicTrace> abstract_empty(const std::set<SymbolicTrace>& traces) {
    std::set<SymbolicTrace> out;
    for (const auto& tr : traces) {
        SymbolicTrace t;
        t.start = tr.start;
        t.end = tr.end;
        for (const auto& l : tr.steps)
            if (!l.empty()) t.steps.push_back(l);
        out.insert(std::move(t));
    }
    return out;
}

// --- isomorphism ------------------------------------------------------------

namespace {

// Signature of a state: multiset of (label, direction) degrees.
std::map<std::pair<Label, int>, int> state_signature(const Automaton& a, const std::string& s) {
    std::map<std::pair<Label, int>, int> sig;
    for (const auto& t : a.transitions) {
        if (t.src == s) sig[{t.label, 0}]++;
        if (t.dst == s) sig[{t.label, 1}]++;
    }
    return sig;
}

} // namespace

bool isomorphic(const Automaton& a, const Automaton& b) {
    if (a.alphabet != b.alphabet) return false;
    if (a.states.size() != b.states.size()) return false;
    if (a.transitions.size() != b.transitions.size()) return false;

    std::vector<std::string> sa(a.states.begin(), a.states.end());
    std::vector<std::string> sb(b.states.begin(), b.states.end());

    std::map<std::string, std::map<std::pair<Label, int>, int>> sig_a, sig_b;
    for (const auto& s : sa) sig_a[s] = state_signature(a, s);
    for (const auto& s : sb) sig_b[s] = state_signature(b, s);

    std::map<std::string, std::string> fwd;
    std::set<std::string> used;

    std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
        if (i == sa.size()) {
            for (const auto& t : a.transitions)
                if (!b.transitions.count({fwd.at(t.src), t.label, fwd.at(t.dst)}))
                    return false;
            return true;
        }
        const std::string& s = sa[i];
        for (const auto& c : sb) {
            if (used.count(c)) continue;
            if (sig_a.at(s) != sig_b.at(c)) continue;
            if ((s == a.initial) != (c == b.initial)) continue;
            fwd[s] = c;
            used.insert(c);
            if (assign(i + 1)) return true;
            fwd.erase(s);
            used.erase(c);
        }
        return false;
    };
    return assign(0);
}

} // namespace reoh
