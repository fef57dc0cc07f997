#include "reoh/bisim.hpp"

#include "reoh/error.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace reoh {

namespace {

// Interned copy of the disjoint union of two automata.
struct Lts {
    std::vector<std::vector<int>> eps;                  // empty-label closure, sorted
    std::map<Label, std::vector<std::pair<int, int>>> visible; // label -> saturated steps
    int init_a = 0, init_b = 0;
    std::vector<std::string> names; // prefixed "A:"/"B:"
    int n = 0;
};

Lts build_lts(const Automaton& a, const Automaton& b) {
    Lts lts;
    std::map<std::string, int> id;
    auto intern = [&](const std::string& prefix, const std::string& s) {
        auto [it, fresh] = id.emplace(prefix + s, lts.n);
        if (fresh) {
            lts.names.push_back(prefix + s);
            ++lts.n;
        }
        return it->second;
    };
    for (const auto& s : a.states) intern("A:", s);
    for (const auto& s : b.states) intern("B:", s);
    lts.init_a = id.at("A:" + a.initial);
    lts.init_b = id.at("B:" + b.initial);

    std::vector<std::vector<int>> eps_succ(lts.n);
    std::map<Label, std::vector<std::pair<int, int>>> raw;
    auto add = [&](const std::string& prefix, const std::set<Transition>& ts) {
        for (const auto& t : ts) {
            int u = id.at(prefix + t.src);
            int v = id.at(prefix + t.dst);
            if (t.label.empty())
                eps_succ[u].push_back(v);
            else
                raw[t.label].push_back({u, v});
        }
    };
    add("A:", a.transitions);
    add("B:", b.transitions);

    // Reflexive-transitive closure of empty-label steps.
    lts.eps.assign(lts.n, {});
    for (int s = 0; s < lts.n; ++s) {
        std::set<int> seen{s};
        std::deque<int> work{s};
        while (!work.empty()) {
            int u = work.front();
            work.pop_front();
            for (int v : eps_succ[u])
                if (seen.insert(v).second) work.push_back(v);
        }
        lts.eps[s].assign(seen.begin(), seen.end());
    }

    // Saturate: s =N=> w  iff  s -eps*-> u -N-> v -eps*-> w.
    std::vector<std::vector<int>> eps_pred(lts.n);
    for (int s = 0; s < lts.n; ++s)
        for (int t : lts.eps[s]) eps_pred[t].push_back(s);

    for (const auto& [label, steps] : raw) {
        std::set<std::pair<int, int>> sat;
        for (auto [u, v] : steps)
            for (int s : eps_pred[u])
                for (int w : lts.eps[v]) sat.insert({s, w});
        lts.visible[label].assign(sat.begin(), sat.end());
    }
    return lts;
}

std::vector<int> refine_partition(const Lts& lts) {
    std::vector<int> cls(lts.n, 0);
    for (;;) {
        // Signature: old class, plus the set of (label, target class) weak
        // steps, plus the set of classes reachable by empty steps alone.
        std::map<std::vector<long long>, std::vector<int>> groups;
        std::vector<std::vector<long long>> sigs(lts.n);
        for (int s = 0; s < lts.n; ++s) sigs[s].push_back(cls[s]);

        {
            // Empty-step component, encoded with label index -1.
            for (int s = 0; s < lts.n; ++s) {
                std::set<long long> part;
                for (int w : lts.eps[s]) part.insert(cls[w]);
                sigs[s].push_back(-1);
                for (long long c : part) sigs[s].push_back(c);
            }
        }
        long long label_idx = 0;
        for (const auto& [label, steps] : lts.visible) {
            std::map<int, std::set<long long>> part;
            for (auto [s, w] : steps) part[s].insert(cls[w]);
            for (int s = 0; s < lts.n; ++s) {
                auto it = part.find(s);
                if (it == part.end()) continue;
                sigs[s].push_back(label_idx);
                for (long long c : it->second) sigs[s].push_back(c);
            }
            ++label_idx;
        }
        for (int s = 0; s < lts.n; ++s) groups[sigs[s]].push_back(s);

        std::vector<int> next(lts.n, 0);
        int k = 0;
        for (const auto& [sig, members] : groups) {
            for (int s : members) next[s] = k;
            ++k;
        }
        if (next == cls) return cls;
        cls = std::move(next);
    }
}

// Shortest label sequence after which one side has successors and the other
// does not (a trace-level distinction). Works on the saturated weak steps.
std::vector<Label> trace_counterexample(const Lts& lts, std::size_t cap = 40000) {
    using Config = std::pair<std::vector<int>, std::vector<int>>;
    auto close = [&](std::vector<int> v) {
        std::set<int> s;
        for (int x : v) s.insert(lts.eps[x].begin(), lts.eps[x].end());
        return std::vector<int>(s.begin(), s.end());
    };
    Config start{close({lts.init_a}), close({lts.init_b})};
    std::set<Config> seen{start};
    std::deque<std::pair<Config, std::vector<Label>>> work{{start, {}}};
    while (!work.empty() && seen.size() < cap) {
        auto [cfg, path] = work.front();
        work.pop_front();
        for (const auto& [label, steps] : lts.visible) {
            std::set<int> next_a, next_b;
            for (auto [s, w] : steps) {
                if (std::binary_search(cfg.first.begin(), cfg.first.end(), s)) next_a.insert(w);
                if (std::binary_search(cfg.second.begin(), cfg.second.end(), s)) next_b.insert(w);
            }
            auto path2 = path;
            path2.push_back(label);
            if (next_a.empty() != next_b.empty()) return path2;
            if (next_a.empty()) continue;
            Config nxt{std::vector<int>(next_a.begin(), next_a.end()),
                       std::vector<int>(next_b.begin(), next_b.end())};
            if (seen.insert(nxt).second) work.push_back({nxt, std::move(path2)});
        }
    }
    return {};
}

} // namespace

BisimResult weak_bisimilar(const Automaton& a, const Automaton& b) {
    if (a.alphabet != b.alphabet)
        fail("AlphabetMismatch", "weak bisimilarity requires equal alphabets");

    Lts lts = build_lts(a, b);
    std::vector<int> cls = refine_partition(lts);

    BisimResult res;
    res.related = cls[lts.init_a] == cls[lts.init_b];
    std::map<std::string, int> index;
    for (int i = 0; i < lts.n; ++i) index[lts.names[i]] = i;
    for (const auto& s : a.states) res.classes_a[s] = cls[index.at("A:" + s)];
    for (const auto& s : b.states) res.classes_b[s] = cls[index.at("B:" + s)];
    if (!res.related) {
        res.counterexample = trace_counterexample(lts);
        if (res.counterexample.empty())
            res.note = "initial states split by branching structure (no trace-level witness)";
    }
    return res;
}

RefinementResult is_action_refinement(const Automaton& concrete, const Automaton& abstract,
                                      const std::set<Action>& k,
                                      const std::map<Action, Action>& r) {
    Automaton reduced = rename(hide(concrete, k), r);
    RefinementResult out;
    if (reduced.alphabet != abstract.alphabet) {
        out.holds = false;
        std::set<Action> only_concrete, only_abstract;
        for (const auto& x : reduced.alphabet)
            if (!abstract.alphabet.count(x)) only_concrete.insert(x);
        for (const auto& x : abstract.alphabet)
            if (!reduced.alphabet.count(x)) only_abstract.insert(x);
        out.note = "alphabet mismatch after hide/rename";
        for (const auto& x : only_concrete) out.note += " +" + to_string(x);
        for (const auto& x : only_abstract) out.note += " -" + to_string(x);
        return out;
    }
    out.bisim = weak_bisimilar(reduced, abstract);
    out.holds = out.bisim.related;
    return out;
}

} // namespace reoh
