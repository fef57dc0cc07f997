#include "reoh/json_io.hpp"

#include "reoh/error.hpp"

namespace reoh {

Json to_json(const Action& a) {
    return Json{{"port", a.port}, {"kind", kind_name(a.kind)}};
}

Json to_json(const Label& l) {
    Json arr = Json::array();
    for (const auto& a : l) arr.push_back(to_json(a));
    return arr;
}

Action action_from_json(const Json& j) {
    return {j.at("port").get<std::string>(), kind_from_name(j.at("kind").get<std::string>())};
}

namespace {

Label label_from_json(const Json& j) {
    Label l;
    for (const auto& e : j) l.push_back(action_from_json(e));
    canonicalize(l);
    return l;
}

Json to_json(const ClockAtom& c) {
    return Json{{"clock", c.clock}, {"rel", rel_name(c.rel)}, {"bound", c.bound}};
}

ClockAtom atom_from_json(const Json& j) {
    ClockAtom c;
    c.clock = j.at("clock").get<std::string>();
    c.rel = rel_from_name(j.at("rel").get<std::string>());
    c.bound = j.at("bound").get<std::vector<std::string>>();
    return c;
}

Json to_json(const ClockConstraint& cc) {
    Json arr = Json::array();
    for (const auto& a : cc) arr.push_back(to_json(a));
    return arr;
}

ClockConstraint constraint_from_json(const Json& j) {
    ClockConstraint cc;
    for (const auto& e : j) cc.push_back(atom_from_json(e));
    return cc;
}

} // namespace

Json to_json(const Automaton& a) {
    Json j;
    j["initial"] = a.initial;
    j["states"] = Json(a.states);
    Json alpha = Json::array();
    for (const auto& x : a.alphabet) alpha.push_back(to_json(x));
    j["alphabet"] = std::move(alpha);
    Json trans = Json::array();
    for (const auto& t : a.transitions)
        trans.push_back(Json{{"src", t.src}, {"label", to_json(t.label)}, {"dst", t.dst}});
    j["transitions"] = std::move(trans);
    return j;
}

Json to_json(const TimedAutomaton& a) {
    Json j;
    j["initial"] = a.initial;
    j["states"] = Json(a.states);
    Json alpha = Json::array();
    for (const auto& x : a.alphabet) alpha.push_back(to_json(x));
    j["alphabet"] = std::move(alpha);
    j["clocks"] = Json(a.clocks);
    Json trans = Json::array();
    for (const auto& t : a.transitions)
        trans.push_back(Json{{"src", t.src},
                             {"label", to_json(t.label)},
                             {"dst", t.dst},
                             {"guard", to_json(t.guard)},
                             {"resets", Json(t.resets)}});
    j["transitions"] = std::move(trans);
    Json inv;
    for (const auto& [s, cc] : a.invariance) inv[s] = to_json(cc);
    j["invariance"] = std::move(inv);
    return j;
}

Automaton automaton_from_json(const Json& j) {
    Automaton a;
    a.initial = j.at("initial").get<std::string>();
    for (const auto& s : j.at("states")) a.states.insert(s.get<std::string>());
    for (const auto& e : j.at("alphabet")) a.alphabet.insert(action_from_json(e));
    for (const auto& t : j.at("transitions"))
        a.transitions.insert({t.at("src").get<std::string>(), label_from_json(t.at("label")),
                              t.at("dst").get<std::string>()});
    validate(a);
    return a;
}

TimedAutomaton timed_automaton_from_json(const Json& j) {
    TimedAutomaton a;
    a.initial = j.at("initial").get<std::string>();
    for (const auto& s : j.at("states")) a.states.insert(s.get<std::string>());
    for (const auto& e : j.at("alphabet")) a.alphabet.insert(action_from_json(e));
    for (const auto& c : j.at("clocks")) a.clocks.insert(c.get<std::string>());
    for (const auto& t : j.at("transitions")) {
        TimedTransition tt;
        tt.src = t.at("src").get<std::string>();
        tt.label = label_from_json(t.at("label"));
        tt.dst = t.at("dst").get<std::string>();
        tt.guard = constraint_from_json(t.at("guard"));
        for (const auto& r : t.at("resets")) tt.resets.insert(r.get<std::string>());
        a.transitions.insert(std::move(tt));
    }
    for (const auto& [s, cc] : j.at("invariance").items()) a.invariance[s] = constraint_from_json(cc);
    validate(a);
    return a;
}

std::string dump_canonical(const Json& j) {
    return j.dump(2) + "\n";
}

} // namespace reoh
