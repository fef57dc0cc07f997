#include "reoh/dot.hpp"

#include "reoh/circuit.hpp"

#include <map>
#include <sstream>

namespace reoh {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string resets_text(const std::set<std::string>& resets) {
    std::string s;
    for (const auto& c : resets) {
        if (!s.empty()) s += ",";
        s += c + ":=0";
    }
    return s;
}

} // namespace

std::string to_dot(const Automaton& a, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
    out << "  __start [shape=point];\n";
    std::map<std::string, int> ids;
    for (const auto& s : a.states) {
        int id = static_cast<int>(ids.size());
        ids[s] = id;
        out << "  s" << id << " [label=\"" << escape(s) << "\"];\n";
    }
    out << "  __start -> s" << ids.at(a.initial) << ";\n";
    for (const auto& t : a.transitions)
        out << "  s" << ids.at(t.src) << " -> s" << ids.at(t.dst) << " [label=\""
            << escape(to_string(t.label)) << "\"];\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const TimedAutomaton& a, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
    out << "  __start [shape=point];\n";
    std::map<std::string, int> ids;
    for (const auto& s : a.states) {
        int id = static_cast<int>(ids.size());
        ids[s] = id;
        std::string label = s;
        auto it = a.invariance.find(s);
        if (it != a.invariance.end() && !it->second.empty())
            label += "\\n" + to_string(it->second);
        out << "  s" << id << " [label=\"" << escape(label) << "\"];\n";
    }
    out << "  __start -> s" << ids.at(a.initial) << ";\n";
    for (const auto& t : a.transitions) {
        std::string label = to_string(t.label);
        label += "/" + (t.guard.empty() ? std::string() : to_string(t.guard));
        label += "/" + resets_text(t.resets);
        out << "  s" << ids.at(t.src) << " -> s" << ids.at(t.dst) << " [label=\""
            << escape(label) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_dot(const Circuit& c, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=LR;\n";
    for (const auto& n : c.nodes) {
        std::string shape = "circle";
        switch (n.kind) {
        case NodeKind::source: shape = "invtriangle"; break;
        case NodeKind::sink: shape = "triangle"; break;
        case NodeKind::route: shape = "diamond"; break;
        case NodeKind::join: shape = "box"; break;
        default: break;
        }
        out << "  \"" << escape(n.id) << "\" [shape=" << shape << ", label=\""
            << escape(n.id) << "\"" << (n.hidden ? ", style=dashed" : "") << "];\n";
    }
    for (const auto& ch : c.channels) {
        std::string style;
        switch (ch.kind) {
        case ChannelKind::sync: style = "solid"; break;
        case ChannelKind::lossy_sync_ctx:
        case ChannelKind::lossy_sync_nd: style = "dashed"; break;
        case ChannelKind::fifo: style = "bold"; break;
        case ChannelKind::sync_drain:
        case ChannelKind::async_drain: style = "dotted"; break;
        case ChannelKind::filter:
        case ChannelKind::transform: style = "tapered"; break;
        }
        out << "  \"" << escape(ch.end_a.node) << "\" -> \"" << escape(ch.end_b.node)
            << "\" [style=" << style << ", label=\"" << kind_name(ch.kind) << " d="
            << ch.delay << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace reoh
