#include "reoh/circuit.hpp"

#include "reoh/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace reoh {

const char* kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::source: return "source";
    case NodeKind::sink: return "sink";
    case NodeKind::mixed: return "mixed";
    case NodeKind::merge: return "merge";
    case NodeKind::replicate: return "replicate";
    case NodeKind::route: return "route";
    case NodeKind::join: return "join";
    }
    return "?";
}

const char* kind_name(ChannelKind k) {
    switch (k) {
    case ChannelKind::sync: return "sync";
    case ChannelKind::lossy_sync_ctx: return "lossy_sync_ctx";
    case ChannelKind::lossy_sync_nd: return "lossy_sync_nd";
    case ChannelKind::fifo: return "fifo";
    case ChannelKind::sync_drain: return "sync_drain";
    case ChannelKind::async_drain: return "async_drain";
    case ChannelKind::filter: return "filter";
    case ChannelKind::transform: return "transform";
    }
    return "?";
}

NodeKind node_kind_from_name(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(NodeKind::join); ++i)
        if (s == kind_name(static_cast<NodeKind>(i))) return static_cast<NodeKind>(i);
    fail("BadNodeKind", "unknown node kind '" + s + "'");
}

ChannelKind channel_kind_from_name(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ChannelKind::transform); ++i)
        if (s == kind_name(static_cast<ChannelKind>(i))) return static_cast<ChannelKind>(i);
    fail("BadChannelKind", "unknown channel kind '" + s + "'");
}

const Node* Circuit::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const Channel* Circuit::find_channel(const std::string& id) const {
    for (const auto& c : channels)
        if (c.id == id) return &c;
    return nullptr;
}

std::optional<std::pair<std::string, char>> Circuit::attachment(const PortRef& p) const {
    for (const auto& c : channels) {
        if (c.end_a == p) return std::make_pair(c.id, 'a');
        if (c.end_b == p) return std::make_pair(c.id, 'b');
    }
    return std::nullopt;
}

std::set<std::string> Circuit::source_boundary() const {
    std::set<std::string> out;
    for (const auto& n : nodes) {
        if (n.hidden) continue;
        if (n.kind == NodeKind::source) {
            out.insert(n.id);
            continue;
        }
        for (const auto& p : n.in_ports)
            if (!attachment({n.id, p})) out.insert(n.id);
    }
    return out;
}

std::set<std::string> Circuit::sink_boundary() const {
    std::set<std::string> out;
    for (const auto& n : nodes) {
        if (n.hidden) continue;
        if (n.kind == NodeKind::sink) {
            out.insert(n.id);
            continue;
        }
        for (const auto& p : n.out_ports)
            if (!attachment({n.id, p})) out.insert(n.id);
    }
    return out;
}

std::set<std::string> Circuit::internal_nodes() const {
    auto src = source_boundary();
    auto snk = sink_boundary();
    std::set<std::string> out;
    for (const auto& n : nodes)
        if (!src.count(n.id) && !snk.count(n.id)) out.insert(n.id);
    return out;
}

// --- validation ---------------------------------------------------------------

namespace {

bool is_in_port(const std::string& p) { return p.rfind("in", 0) == 0; }
bool is_out_port(const std::string& p) { return p.rfind("out", 0) == 0; }

void check_degree(const Node& n) {
    const auto ins = n.in_ports.size();
    const auto outs = n.out_ports.size();
    auto bad = [&](const std::string& why) {
        fail("ArityError", "node '" + n.id + "' (" + kind_name(n.kind) + "): " + why);
    };
    switch (n.kind) {
    case NodeKind::source:
        if (ins != 0 || outs < 1) bad("source needs 0 inputs and at least 1 output");
        break;
    case NodeKind::sink:
        if (outs != 0 || ins < 1) bad("sink needs at least 1 input and 0 outputs");
        break;
    case NodeKind::mixed:
        if (ins != 1 || outs != 1) bad("mixed needs exactly 1 input and 1 output");
        break;
    case NodeKind::merge:
        if (ins < 2 || outs != 1) bad("merge needs >=2 inputs and 1 output");
        break;
    case NodeKind::replicate:
        if (ins != 1 || outs < 2) bad("replicate needs 1 input and >=2 outputs");
        break;
    case NodeKind::route:
        if (ins != 1 || outs < 2) bad("route needs 1 input and >=2 outputs");
        break;
    case NodeKind::join:
        if (ins < 2 || outs != 1) bad("join needs >=2 inputs and 1 output");
        break;
    }
}

} // namespace

void validate(const Circuit& c) {
    std::set<std::string> node_ids;
    for (const auto& n : c.nodes) {
        if (!node_ids.insert(n.id).second)
            fail("ArityError", "node '" + n.id + "' declared twice");
        for (const auto& p : n.in_ports)
            if (!is_in_port(p)) fail("ArityError", "bad input port name '" + p + "'");
        for (const auto& p : n.out_ports)
            if (!is_out_port(p)) fail("ArityError", "bad output port name '" + p + "'");
        check_degree(n);
    }
    std::set<std::string> used_ports;
    std::set<std::string> chan_ids;
    for (const auto& ch : c.channels) {
        if (!chan_ids.insert(ch.id).second)
            fail("ArityError", "channel '" + ch.id + "' declared twice");
        if (ch.delay < 0) fail("ArityError", "channel '" + ch.id + "' has negative delay");
        for (const PortRef* e : {&ch.end_a, &ch.end_b}) {
            const Node* n = c.find_node(e->node);
            if (!n) fail("DanglingPort", "channel '" + ch.id + "' references undeclared node '" + e->node + "'");
            const auto& ports = is_in_port(e->port) ? n->in_ports : n->out_ports;
            if (std::find(ports.begin(), ports.end(), e->port) == ports.end())
                fail("DanglingPort", "channel '" + ch.id + "' references missing port " + e->qualified());
            if (!used_ports.insert(e->qualified()).second)
                fail("ArityError", "port " + e->qualified() + " attached to two channel ends");
        }
        const bool drain = ch.kind == ChannelKind::sync_drain || ch.kind == ChannelKind::async_drain;
        if (drain) {
            if (!is_out_port(ch.end_a.port) || !is_out_port(ch.end_b.port))
                fail("ArityError", "drain '" + ch.id + "' must connect two output ports");
        } else {
            if (!is_out_port(ch.end_a.port))
                fail("ArityError", "channel '" + ch.id + "' source end must be an output port");
            if (!is_in_port(ch.end_b.port))
                fail("ArityError", "channel '" + ch.id + "' sink end must be an input port");
        }
    }
}

// --- parser -------------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    int line = 1, col = 1;
};

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    void advance() {
        if (pos < src.size() && src[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_ws() {
        while (pos < src.size()) {
            char ch = src[pos];
            if (ch == '#') {
                while (pos < src.size() && src[pos] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::optional<Token> next() {
        skip_ws();
        if (pos >= src.size()) return std::nullopt;
        Token t{"", line, col};
        char ch = src[pos];
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
                t.text += src[pos];
                advance();
            }
            return t;
        }
        if (ch == '-' && pos + 1 < src.size() && src[pos + 1] == '>') {
            t.text = "->";
            advance();
            advance();
            return t;
        }
        if (ch == ';' || ch == '.') {
            t.text = std::string(1, ch);
            advance();
            return t;
        }
        fail("SyntaxError",
             "line " + std::to_string(line) + ", col " + std::to_string(col) +
                 ": unexpected character '" + std::string(1, ch) + "'");
    }
};

[[noreturn]] void syntax_error(const Token& t, const std::string& expected) {
    fail("SyntaxError", "line " + std::to_string(t.line) + ", col " + std::to_string(t.col) +
                            ": expected " + expected + ", got '" + t.text + "'");
}

struct Parser {
    Lexer lex;
    std::optional<Token> look;

    explicit Parser(const std::string& s) : lex(s) { look = lex.next(); }

    bool done() const { return !look.has_value(); }

    Token take(const std::string& expected) {
        if (!look) {
            Token eof{"<eof>", lex.line, lex.col};
            syntax_error(eof, expected);
        }
        Token t = *look;
        look = lex.next();
        return t;
    }

    Token expect(const std::string& text) {
        Token t = take("'" + text + "'");
        if (t.text != text) syntax_error(t, "'" + text + "'");
        return t;
    }

    PortRef port_ref() {
        Token n = take("node identifier");
        expect(".");
        Token p = take("port name");
        if (!is_in_port(p.text) && !is_out_port(p.text))
            syntax_error(p, "port name like in1 or out1");
        return {n.text, p.text};
    }
};

bool is_node_kind(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(NodeKind::join); ++i)
        if (s == kind_name(static_cast<NodeKind>(i))) return true;
    return false;
}

bool is_channel_kind(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ChannelKind::transform); ++i)
        if (s == kind_name(static_cast<ChannelKind>(i))) return true;
    return false;
}

// Minimum ports implied by a node kind; channel references may add more
// within the kind's limits.
void seed_ports(Node& n) {
    switch (n.kind) {
    case NodeKind::source: n.out_ports = {"out1"}; break;
    case NodeKind::sink: n.in_ports = {"in1"}; break;
    case NodeKind::mixed: n.in_ports = {"in1"}; n.out_ports = {"out1"}; break;
    case NodeKind::merge: n.in_ports = {"in1", "in2"}; n.out_ports = {"out1"}; break;
    case NodeKind::replicate: n.in_ports = {"in1"}; n.out_ports = {"out1", "out2"}; break;
    case NodeKind::route: n.in_ports = {"in1"}; n.out_ports = {"out1", "out2"}; break;
    case NodeKind::join: n.in_ports = {"in1", "in2"}; n.out_ports = {"out1"}; break;
    }
}

} // namespace

Circuit parse_circuit(const std::string& text) {
    Parser p(text);
    Circuit c;
    std::map<std::string, size_t> node_index;
    int chan_counter = 0;

    auto touch_port = [&](const PortRef& ref, const Token& at) {
        auto it = node_index.find(ref.node);
        if (it == node_index.end())
            fail("DanglingPort", "line " + std::to_string(at.line) + ", col " +
                                     std::to_string(at.col) + ": undeclared node '" + ref.node + "'");
        Node& n = c.nodes[it->second];
        auto& ports = is_in_port(ref.port) ? n.in_ports : n.out_ports;
        if (std::find(ports.begin(), ports.end(), ref.port) == ports.end()) {
            ports.push_back(ref.port);
            std::sort(ports.begin(), ports.end());
        }
    };

    while (!p.done()) {
        Token head = p.take("'node' or a channel kind");
        if (head.text == "node") {
            Token id = p.take("node identifier");
            Token kind = p.take("node kind");
            if (!is_node_kind(kind.text)) syntax_error(kind, "node kind");
            p.expect(";");
            Node n;
            n.id = id.text;
            n.kind = node_kind_from_name(kind.text);
            seed_ports(n);
            if (node_index.count(n.id))
                fail("SyntaxError", "line " + std::to_string(id.line) + ": node '" + n.id +
                                        "' declared twice");
            node_index[n.id] = c.nodes.size();
            c.nodes.push_back(std::move(n));
        } else if (is_channel_kind(head.text)) {
            Channel ch;
            ch.kind = channel_kind_from_name(head.text);
            ch.id = "c" + std::to_string(chan_counter++);
            PortRef a = p.port_ref();
            p.expect("->");
            PortRef b = p.port_ref();
            Token tail = p.take("'delay' or ';'");
            if (tail.text == "delay") {
                Token d = p.take("delay value");
                try {
                    size_t used = 0;
                    ch.delay = std::stoi(d.text, &used);
                    if (used != d.text.size() || ch.delay < 0) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    syntax_error(d, "nonnegative integer delay");
                }
                p.expect(";");
            } else if (tail.text != ";") {
                syntax_error(tail, "'delay' or ';'");
            }
            touch_port(a, head);
            touch_port(b, head);
            ch.end_a = a;
            ch.end_b = b;
            c.channels.push_back(std::move(ch));
        } else {
            syntax_error(head, "'node' or a channel kind");
        }
    }
    validate(c);
    return c;
}

std::string print_circuit(const Circuit& c) {
    std::ostringstream out;
    for (const auto& n : c.nodes)
        out << "node " << n.id << " " << kind_name(n.kind) << ";\n";
    for (const auto& ch : c.channels) {
        out << kind_name(ch.kind) << " " << ch.end_a.qualified() << " -> "
            << ch.end_b.qualified();
        if (ch.delay != 1) out << " delay " << ch.delay;
        out << ";\n";
    }
    return out.str();
}

// --- desugaring -----------------------------------------------------------------

namespace {

struct Builder {
    Circuit c;
    int aux_chan = 0;

    Node& node(const std::string& id) {
        for (auto& n : c.nodes)
            if (n.id == id) return n;
        fail("DanglingPort", "internal: node '" + id + "' missing");
    }

    std::string add_aux_node(const std::string& id, NodeKind kind,
                             std::vector<std::string> ins, std::vector<std::string> outs) {
        Node n;
        n.id = id;
        n.kind = kind;
        n.in_ports = std::move(ins);
        n.out_ports = std::move(outs);
        n.hidden = true;
        std::sort(n.in_ports.begin(), n.in_ports.end());
        std::sort(n.out_ports.begin(), n.out_ports.end());
        c.nodes.push_back(std::move(n));
        return id;
    }

    void add_sync(const std::string& base, PortRef a, PortRef b, int delay, bool hidden) {
        Channel ch;
        ch.id = base + "_x" + std::to_string(aux_chan++);
        ch.kind = ChannelKind::sync;
        ch.end_a = std::move(a);
        ch.end_b = std::move(b);
        ch.delay = delay;
        ch.hidden = hidden;
        c.channels.push_back(std::move(ch));
    }
};

} // namespace

Circuit desugar(const Circuit& input) {
    validate(input);
    Builder b;
    b.c.nodes = input.nodes;

    for (const auto& ch : input.channels) {
        switch (ch.kind) {
        case ChannelKind::sync_drain: {
            const std::string j = ch.id + "_join";
            const std::string t = ch.id + "_tau";
            b.add_aux_node(j, NodeKind::join, {"in1", "in2"}, {"out1"});
            b.add_aux_node(t, NodeKind::sink, {"in1"}, {});
            b.add_sync(ch.id, ch.end_a, {j, "in1"}, ch.delay, ch.hidden);
            b.add_sync(ch.id, ch.end_b, {j, "in2"}, ch.delay, ch.hidden);
            b.add_sync(ch.id, {j, "out1"}, {t, "in1"}, 0, true);
            break;
        }
        case ChannelKind::async_drain: {
            const std::string m = ch.id + "_merge";
            const std::string t = ch.id + "_tau";
            b.add_aux_node(m, NodeKind::merge, {"in1", "in2"}, {"out1"});
            b.add_aux_node(t, NodeKind::sink, {"in1"}, {});
            b.add_sync(ch.id, ch.end_a, {m, "in1"}, ch.delay, ch.hidden);
            b.add_sync(ch.id, ch.end_b, {m, "in2"}, ch.delay, ch.hidden);
            b.add_sync(ch.id, {m, "out1"}, {t, "in1"}, 0, true);
            break;
        }
        case ChannelKind::lossy_sync_nd:
        case ChannelKind::filter: {
            const std::string r = ch.id + "_route";
            const std::string t = ch.id + "_tau";
            b.add_aux_node(r, NodeKind::route, {"in1"}, {"out1", "out2"});
            b.add_aux_node(t, NodeKind::sink, {"in1"}, {});
            b.add_sync(ch.id, ch.end_a, {r, "in1"}, ch.delay, ch.hidden);
            b.add_sync(ch.id, {r, "out1"}, ch.end_b, 0, ch.hidden);
            b.add_sync(ch.id, {r, "out2"}, {t, "in1"}, 0, true);
            break;
        }
        default:
            b.c.channels.push_back(ch);
            break;
        }
    }

    // Cascade replicate nodes with more than two outputs into binary ones.
    for (size_t i = 0; i < b.c.nodes.size(); ++i) {
        if (b.c.nodes[i].kind != NodeKind::replicate) continue;
        while (b.c.nodes[i].out_ports.size() > 2) {
            Node& n = b.c.nodes[i];
            // Move the last two outputs to a fresh binary stage.
            std::string p_last = n.out_ports.back();
            n.out_ports.pop_back();
            std::string p_prev = n.out_ports.back();
            n.out_ports.pop_back();
            std::string fresh_out = p_prev; // reuse name: stays a valid out port
            n.out_ports.push_back(fresh_out);
            std::sort(n.out_ports.begin(), n.out_ports.end());

            const std::string stage = n.id + "_rep" + std::to_string(n.out_ports.size());
            b.add_aux_node(stage, NodeKind::replicate, {"in1"}, {"out1", "out2"});
            // Reattach the two displaced channels to the stage.
            int moved = 0;
            for (auto& ch : b.c.channels) {
                for (PortRef* e : {&ch.end_a, &ch.end_b}) {
                    if (e->node == n.id && e->port == p_last) {
                        *e = {stage, "out2"};
                        ++moved;
                    } else if (e->node == n.id && e->port == p_prev) {
                        *e = {stage, "out1"};
                        ++moved;
                    }
                }
            }
            if (moved != 2)
                fail("ArityError", "replicate cascade: outputs of '" + n.id + "' not fully attached");
            b.add_sync(n.id, {n.id, fresh_out}, {stage, "in1"}, 0, true);
        }
    }

    validate(b.c);
    return b.c;
}

// --- regions -------------------------------------------------------------------

std::vector<Region> synchronous_regions(const Circuit& c) {
    validate(c);
    std::map<std::string, std::string> parent;
    for (const auto& n : c.nodes) parent[n.id] = n.id;
    std::function<std::string(const std::string&)> find = [&](const std::string& x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const auto& ch : c.channels) {
        if (ch.kind == ChannelKind::fifo) continue;
        parent[find(ch.end_a.node)] = find(ch.end_b.node);
    }

    std::map<std::string, Region> by_root;
    std::vector<std::string> root_order;
    for (const auto& n : c.nodes) {
        std::string r = find(n.id);
        if (!by_root.count(r)) root_order.push_back(r);
        by_root[r].circuit.nodes.push_back(n);
    }
    for (const auto& ch : c.channels) {
        if (ch.kind == ChannelKind::fifo) {
            by_root[find(ch.end_a.node)].fifo_reader_ports.push_back(ch.end_a);
            by_root[find(ch.end_b.node)].fifo_writer_ports.push_back(ch.end_b);
            continue;
        }
        by_root[find(ch.end_a.node)].circuit.channels.push_back(ch);
    }

    std::vector<Region> out;
    for (const auto& r : root_order) out.push_back(by_root[r]);
    return out;
}

PathLength longest_path(const Circuit& region, int node_bound) {
    if (static_cast<int>(region.nodes.size()) > node_bound)
        fail("RegionTooLarge", "region has " + std::to_string(region.nodes.size()) +
                                   " nodes, bound is " + std::to_string(node_bound));

    std::vector<std::string> ids;
    for (const auto& n : region.nodes) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    std::map<std::string, int> index;
    for (size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);

    struct Edge {
        int to;
        int delay;
    };
    std::vector<std::vector<Edge>> adj(ids.size());
    for (const auto& ch : region.channels) {
        int u = index.at(ch.end_a.node);
        int v = index.at(ch.end_b.node);
        adj[u].push_back({v, ch.delay});
        adj[v].push_back({u, ch.delay});
    }

    PathLength best;
    std::vector<bool> seen(ids.size(), false);
    std::function<void(int, int, int)> dfs = [&](int u, int hops, int delay) {
        best.hops = std::max(best.hops, hops);
        best.delay = std::max(best.delay, delay);
        for (const auto& e : adj[u]) {
            if (seen[e.to]) continue;
            seen[e.to] = true;
            dfs(e.to, hops + 1, delay + e.delay);
            seen[e.to] = false;
        }
    };
    for (size_t s = 0; s < ids.size(); ++s) {
        seen[s] = true;
        dfs(static_cast<int>(s), 0, 0);
        seen[s] = false;
    }
    return best;
}

Json to_json(const Circuit& c) {
    Json j;
    Json nodes = Json::array();
    for (const auto& n : c.nodes) {
        Json e;
        e["id"] = n.id;
        e["kind"] = kind_name(n.kind);
        e["in_ports"] = n.in_ports;
        e["out_ports"] = n.out_ports;
        e["hidden"] = n.hidden;
        nodes.push_back(std::move(e));
    }
    j["nodes"] = std::move(nodes);
    Json chans = Json::array();
    for (const auto& ch : c.channels) {
        Json e;
        e["id"] = ch.id;
        e["kind"] = kind_name(ch.kind);
        e["from"] = ch.end_a.qualified();
        e["to"] = ch.end_b.qualified();
        e["delay"] = ch.delay;
        e["hidden"] = ch.hidden;
        chans.push_back(std::move(e));
    }
    j["channels"] = std::move(chans);
    j["source_boundary"] = Json(c.source_boundary());
    j["sink_boundary"] = Json(c.sink_boundary());
    return j;
}

} // namespace reoh
