#include "reoh/handshake.hpp"

#include "reoh/error.hpp"
#include "reoh/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace reoh {

const char* kind_name(TemplateKind k) {
    switch (k) {
    case TemplateKind::source: return "source";
    case TemplateKind::sink: return "sink";
    case TemplateKind::mixed: return "mixed";
    case TemplateKind::replicate: return "replicate";
    case TemplateKind::merge: return "merge";
    case TemplateKind::route: return "route";
    case TemplateKind::join: return "join";
    case TemplateKind::sync_link: return "sync_link";
    case TemplateKind::lossy_ctx: return "lossy_ctx";
    case TemplateKind::lossy_nd: return "lossy_nd";
    }
    return "?";
}

namespace {

// Small builder for the figure-shaped machines. States with `inv` carry the
// invariance x < T; `gt` on an edge is the guard x > T.
struct Builder {
    HandshakeTemplate t;

    Builder(const std::string& site, TemplateKind kind) {
        t.site = site;
        t.kind = kind;
        t.clock = "x." + site;
        t.timeout_const = "T." + site;
        t.taca.clocks.insert(t.clock);
    }

    void state(const std::string& name, bool inv = false) {
        t.taca.states.insert(name);
        if (inv)
            t.taca.invariance[name] = {{t.clock, Rel::lt, {t.timeout_const}}};
        else
            t.taca.invariance[name] = {};
    }

    void init(const std::string& name) { t.taca.initial = name; }

    void edge(const std::string& src, const std::string& dst, Label label, bool gt = false,
              bool reset = false, EdgeGate gate = EdgeGate::none) {
        canonicalize(label);
        for (const auto& a : label) t.taca.alphabet.insert(a);
        TimedTransition tt;
        tt.src = src;
        tt.dst = dst;
        tt.label = std::move(label);
        if (gt) tt.guard = {{t.clock, Rel::gt, {t.timeout_const}}};
        if (reset) tt.resets = {t.clock};
        t.taca.transitions.insert(tt);
        if (gate != EdgeGate::none) t.gates[tt] = gate;
    }

    HandshakeTemplate done() {
        validate(t.taca);
        return std::move(t);
    }
};

Label blocks(const std::vector<std::string>& ports) {
    Label l;
    for (const auto& p : ports) l.push_back(block(p));
    canonicalize(l);
    return l;
}

Label unblocks(const std::vector<std::string>& ports) {
    Label l;
    for (const auto& p : ports) l.push_back(unblock(p));
    canonicalize(l);
    return l;
}

HandshakeTemplate make_source(const std::string& site, const std::string& p) {
    Builder b(site, TemplateKind::source);
    b.state("idle");
    b.state("wait", true);
    b.state("ready");
    b.state("commit", true);
    b.init("idle");
    b.edge("idle", "wait", {send_w(p)}, false, true, EdgeGate::write_request);
    b.edge("wait", "idle", {}, true);
    b.edge("wait", "ready", {recv_r(p)});
    b.edge("ready", "commit", {block(p)}, false, true);
    b.edge("commit", "idle", {unblock(p)}, true);
    return b.done();
}

HandshakeTemplate make_sink(const std::string& site, const std::string& p, bool always_accepting) {
    Builder b(site, TemplateKind::sink);
    b.state("idle");
    b.state("w1");
    b.state("w2");
    b.state("commit", true);
    b.state("m1");
    b.state("m2", true);
    b.init("idle");
    b.edge("idle", "w1", {recv_w(p)}, false, true);
    b.edge("w1", "w2", {send_r(p)}, false, false, EdgeGate::read_request);
    b.edge("w2", "commit", {block(p)}, false, true);
    b.edge("commit", "idle", {unblock(p)}, true);
    b.edge("idle", "m1", {recv_mw(p)}, false, true);
    b.edge("m1", "m2", {send_r(p)}, false, false, EdgeGate::read_request);
    b.edge("m2", "idle", {}, true);
    b.edge("m2", "w1", {recv_w(p)});
    if (!always_accepting) {
        b.edge("w1", "idle", {}, false, false, EdgeGate::no_read_request);
        b.edge("m1", "idle", {}, false, false, EdgeGate::no_read_request);
    }
    return b.done();
}

HandshakeTemplate make_mixed(const std::string& site, const std::string& pi,
                             const std::string& po) {
    Builder b(site, TemplateKind::mixed);
    b.state("idle");
    b.state("w1");
    b.state("w2", true);
    b.state("w3");
    b.state("w4");
    b.state("commit", true);
    b.state("m1");
    b.state("m2", true);
    b.state("m3");
    b.state("m4", true);
    b.init("idle");
    b.edge("idle", "w1", {recv_w(pi)});
    b.edge("w1", "w2", {send_w(po)}, false, true);
    b.edge("w2", "idle", {}, true);
    b.edge("w2", "w3", {recv_r(po)});
    b.edge("w3", "w4", {send_r(pi)});
    b.edge("w4", "commit", blocks({pi, po}), false, true);
    b.edge("commit", "idle", unblocks({pi, po}), true);
    b.edge("idle", "m1", {recv_mw(pi)});
    b.edge("m1", "m2", {send_mw(po)}, false, true);
    b.edge("m2", "idle", {}, true);
    b.edge("m2", "m3", {recv_r(po)});
    b.edge("m3", "m4", {send_r(pi)}, false, true);
    b.edge("m4", "idle", {}, true);
    b.edge("m4", "w1", {recv_w(pi)});
    return b.done();
}

HandshakeTemplate make_sync_link(const std::string& site, const std::string& a,
                                 const std::string& pb) {
    Builder b(site, TemplateKind::sync_link);
    b.state("idle");
    b.state("fw", true);
    b.state("fm", true);
    b.state("fr", true);
    b.init("idle");
    b.edge("idle", "fw", {recv_w(a)}, false, true);
    b.edge("fw", "idle", {send_w(pb)});
    b.edge("fw", "idle", {}, true);
    b.edge("idle", "fm", {recv_mw(a)}, false, true);
    b.edge("fm", "idle", {send_mw(pb)});
    b.edge("fm", "idle", {}, true);
    b.edge("idle", "fr", {recv_r(pb)}, false, true);
    b.edge("fr", "idle", {send_r(a)});
    b.edge("fr", "idle", {}, true);
    return b.done();
}

HandshakeTemplate make_replicate(const std::string& site, const std::string& pi,
                                 const std::string& po1, const std::string& po2) {
    Builder b(site, TemplateKind::replicate);
    b.init("idle");
    b.state("idle");
    for (const char* s : {"w_start", "m_start", "w_ready", "w_go", "w_done", "w_fin", "m_ready"})
        b.state(s);
    for (const char* s : {"w_probe", "w_p1", "w_p2", "w_sent", "w_c1", "w_c2", "m_probe",
                          "m_p1", "m_p2", "m_conf", "commit"})
        b.state(s, true);

    b.edge("idle", "w_start", {recv_w(pi)});
    b.edge("idle", "m_start", {recv_mw(pi)});
    // Probe both outputs with may_write, then (write-initiated) send the
    // definite writes, confirm upstream and commit.
    b.edge("w_start", "w_probe", {send_mw(po1), send_mw(po2)}, false, true);
    b.edge("w_probe", "idle", {}, true);
    b.edge("w_probe", "w_p1", {recv_r(po1)});
    b.edge("w_probe", "w_p2", {recv_r(po2)});
    b.edge("w_probe", "w_ready", {recv_r(po1), recv_r(po2)});
    b.edge("w_p1", "w_ready", {recv_r(po2)});
    b.edge("w_p2", "w_ready", {recv_r(po1)});
    b.edge("w_p1", "idle", {}, true);
    b.edge("w_p2", "idle", {}, true);
    b.edge("w_ready", "w_sent", {send_w(po1), send_w(po2)}, false, true);
    b.edge("w_sent", "idle", {}, true);
    b.edge("w_sent", "w_c1", {recv_r(po1)});
    b.edge("w_sent", "w_c2", {recv_r(po2)});
    b.edge("w_sent", "w_done", {recv_r(po1), recv_r(po2)});
    b.edge("w_c1", "w_done", {recv_r(po2)});
    b.edge("w_c2", "w_done", {recv_r(po1)});
    b.edge("w_c1", "idle", {}, true);
    b.edge("w_c2", "idle", {}, true);
    b.edge("w_done", "w_fin", {send_r(pi)});
    b.edge("w_fin", "commit", blocks({pi, po1, po2}), false, true);
    b.edge("commit", "idle", unblocks({pi, po1, po2}), true);
    // may_write-initiated: same probe, then ask upstream to confirm before
    // issuing the definite writes.
    b.edge("m_start", "m_probe", {send_mw(po1), send_mw(po2)}, false, true);
    b.edge("m_probe", "idle", {}, true);
    b.edge("m_probe", "m_p1", {recv_r(po1)});
    b.edge("m_probe", "m_p2", {recv_r(po2)});
    b.edge("m_probe", "m_ready", {recv_r(po1), recv_r(po2)});
    b.edge("m_p1", "m_ready", {recv_r(po2)});
    b.edge("m_p2", "m_ready", {recv_r(po1)});
    b.edge("m_p1", "idle", {}, true);
    b.edge("m_p2", "idle", {}, true);
    b.edge("m_ready", "m_conf", {send_r(pi)}, false, true);
    b.edge("m_conf", "idle", {}, true);
    b.edge("m_conf", "w_go", {recv_w(pi)});
    b.edge("w_go", "w_sent", {send_w(po1), send_w(po2)}, false, true);
    return b.done();
}

HandshakeTemplate make_merge(const std::string& site, const std::string& p1,
                             const std::string& p2, const std::string& po) {
    Builder b(site, TemplateKind::merge);
    b.init("idle");
    b.state("idle");
    for (const char* s : {"WB", "MB", "X12", "X21", "W1r", "W2r", "WBr", "MBr", "M1r", "M2r",
                          "C1", "C2", "X12r", "X21r", "X12f", "X21f", "X12w", "X21w"})
        b.state(s);
    for (const char* s : {"W1", "W2", "M1", "M2", "W1go", "W2go", "WBgo", "M1go", "M2go",
                          "MBgo", "MB1", "MB2", "M1c", "M2c", "X12go", "X21go", "X12b",
                          "X21b", "commit1", "commit2"})
        b.state(s, true);

    // Entry: remember which message kind arrived on which input.
    b.edge("idle", "W1", {recv_w(p1)}, false, true);
    b.edge("idle", "W2", {recv_w(p2)}, false, true);
    b.edge("idle", "WB", {recv_w(p1), recv_w(p2)});
    b.edge("idle", "M1", {recv_mw(p1)}, false, true);
    b.edge("idle", "M2", {recv_mw(p2)}, false, true);
    b.edge("idle", "MB", {recv_mw(p1), recv_mw(p2)});
    b.edge("idle", "X12", {recv_w(p1), recv_mw(p2)});
    b.edge("idle", "X21", {recv_mw(p1), recv_w(p2)});
    b.edge("W1", "WB", {recv_w(p2)});
    b.edge("W2", "WB", {recv_w(p1)});
    b.edge("W1", "X12", {recv_mw(p2)});
    b.edge("W2", "X21", {recv_mw(p1)});
    b.edge("M1", "MB", {recv_mw(p2)});
    b.edge("M2", "MB", {recv_mw(p1)});
    b.edge("M1", "X21", {recv_w(p2)});
    b.edge("M2", "X12", {recv_w(p1)});
    // Both definite writes (or one after the single-side timeout): forward,
    // await the read reply, choose a branch, confirm it, commit.
    b.edge("W1", "W1go", {send_w(po)}, true, true);
    b.edge("W2", "W2go", {send_w(po)}, true, true);
    b.edge("WB", "WBgo", {send_w(po)}, false, true);
    b.edge("W1go", "idle", {}, true);
    b.edge("W2go", "idle", {}, true);
    b.edge("WBgo", "idle", {}, true);
    b.edge("W1go", "W1r", {recv_r(po)});
    b.edge("W2go", "W2r", {recv_r(po)});
    b.edge("WBgo", "WBr", {recv_r(po)});
    b.edge("WBr", "C1", {send_r(p1)});
    b.edge("WBr", "C2", {send_r(p2)});
    b.edge("W1r", "C1", {send_r(p1)});
    b.edge("W2r", "C2", {send_r(p2)});
    b.edge("C1", "commit1", blocks({p1, po}), false, true);
    b.edge("C2", "commit2", blocks({p2, po}), false, true);
    b.edge("commit1", "idle", unblocks({p1, po}), true);
    b.edge("commit2", "idle", unblocks({p2, po}), true);
    // Both may_write: probe downstream, then ask an input for the definite
    // write; on its timeout fall back to the other input.
    b.edge("M1", "M1go", {send_mw(po)}, true, true);
    b.edge("M2", "M2go", {send_mw(po)}, true, true);
    b.edge("MB", "MBgo", {send_mw(po)}, false, true);
    b.edge("M1go", "idle", {}, true);
    b.edge("M2go", "idle", {}, true);
    b.edge("MBgo", "idle", {}, true);
    b.edge("M1go", "M1r", {recv_r(po)});
    b.edge("M2go", "M2r", {recv_r(po)});
    b.edge("MBgo", "MBr", {recv_r(po)});
    b.edge("MBr", "MB1", {send_r(p1)}, false, true);
    b.edge("MBr", "MB2", {send_r(p2)}, false, true);
    b.edge("MB1", "G1", {recv_w(p1)});
    b.edge("MB2", "G2", {recv_w(p2)});
    b.edge("MB1", "M2r", {}, true);
    b.edge("MB2", "M1r", {}, true);
    b.edge("M1r", "M1c", {send_r(p1)}, false, true);
    b.edge("M2r", "M2c", {send_r(p2)}, false, true);
    b.edge("M1c", "G1", {recv_w(p1)});
    b.edge("M2c", "G2", {recv_w(p2)});
    b.edge("M1c", "idle", {}, true);
    b.edge("M2c", "idle", {}, true);
    b.state("G1");
    b.state("G2");
    b.edge("G1", "W1go", {send_w(po)}, false, true);
    b.edge("G2", "W2go", {send_w(po)}, false, true);
    // Mixed arrivals: the definite side is forwarded at once; the probe side
    // may still win if its definite write arrives in time.
    b.edge("X12", "X12go", {send_w(po)}, false, true);
    b.edge("X21", "X21go", {send_w(po)}, false, true);
    b.edge("X12go", "idle", {}, true);
    b.edge("X21go", "idle", {}, true);
    b.edge("X12go", "X12r", {recv_r(po)});
    b.edge("X21go", "X21r", {recv_r(po)});
    b.edge("X12r", "C1", {send_r(p1)});
    b.edge("X21r", "C2", {send_r(p2)});
    b.edge("X12r", "X12b", {send_r(p2)}, false, true);
    b.edge("X21r", "X21b", {send_r(p1)}, false, true);
    b.edge("X12b", "X12w", {recv_w(p2)});
    b.edge("X21b", "X21w", {recv_w(p1)});
    b.edge("X12b", "X12f", {}, true);
    b.edge("X21b", "X21f", {}, true);
    b.edge("X12w", "C2", {send_r(p2)});
    b.edge("X21w", "C1", {send_r(p1)});
    b.edge("X12f", "C1", {send_r(p1)});
    b.edge("X21f", "C2", {send_r(p2)});
    return b.done();
}

HandshakeTemplate make_route(const std::string& site, const std::string& pi,
                             const std::string& po1, const std::string& po2) {
    Builder b(site, TemplateKind::route);
    b.init("idle");
    b.state("idle");
    for (const char* s : {"w0", "m0", "prB", "mpB", "go1", "go2", "fin1", "fin2", "c1", "c2",
                          "me1", "me2"})
        b.state(s);
    for (const char* s : {"probe", "pr1", "pr2", "sent1", "sent2", "sent1B", "sent2B",
                          "mprobe", "mp1", "mp2", "mconfB", "mconf1", "mconf2", "commit1",
                          "commit2"})
        b.state(s, true);

    b.edge("idle", "w0", {recv_w(pi)});
    b.edge("w0", "probe", {send_mw(po1), send_mw(po2)}, false, true);
    b.edge("probe", "idle", {}, true);
    b.edge("probe", "pr1", {recv_r(po1)});
    b.edge("probe", "pr2", {recv_r(po2)});
    b.edge("probe", "prB", {recv_r(po1), recv_r(po2)});
    b.edge("pr1", "prB", {recv_r(po2)});
    b.edge("pr2", "prB", {recv_r(po1)});
    b.edge("pr1", "go1", {}, true);
    b.edge("pr2", "go2", {}, true);
    b.edge("go1", "sent1", {send_w(po1)}, false, true);
    b.edge("go2", "sent2", {send_w(po2)}, false, true);
    b.edge("prB", "sent1B", {send_w(po1)}, false, true);
    b.edge("prB", "sent2B", {send_w(po2)}, false, true);
    b.edge("sent1B", "go2", {}, true);
    b.edge("sent2B", "go1", {}, true);
    b.edge("sent1B", "fin1", {recv_r(po1)});
    b.edge("sent2B", "fin2", {recv_r(po2)});
    b.edge("sent1", "fin1", {recv_r(po1)});
    b.edge("sent2", "fin2", {recv_r(po2)});
    b.edge("sent1", "idle", {}, true);
    b.edge("sent2", "idle", {}, true);
    b.edge("fin1", "c1", {send_r(pi)});
    b.edge("fin2", "c2", {send_r(pi)});
    b.edge("c1", "commit1", blocks({pi, po1}), false, true);
    b.edge("c2", "commit2", blocks({pi, po2}), false, true);
    b.edge("commit1", "idle", unblocks({pi, po1}), true);
    b.edge("commit2", "idle", unblocks({pi, po2}), true);
    // may_write-initiated: probe the outputs, then escalate upstream for the
    // definite write before choosing.
    b.edge("idle", "m0", {recv_mw(pi)});
    b.edge("m0", "mprobe", {send_mw(po1), send_mw(po2)}, false, true);
    b.edge("mprobe", "idle", {}, true);
    b.edge("mprobe", "mp1", {recv_r(po1)});
    b.edge("mprobe", "mp2", {recv_r(po2)});
    b.edge("mprobe", "mpB", {recv_r(po1), recv_r(po2)});
    b.edge("mp1", "mpB", {recv_r(po2)});
    b.edge("mp2", "mpB", {recv_r(po1)});
    b.edge("mp1", "me1", {}, true);
    b.edge("mp2", "me2", {}, true);
    b.edge("mpB", "mconfB", {send_r(pi)}, false, true);
    b.edge("me1", "mconf1", {send_r(pi)}, false, true);
    b.edge("me2", "mconf2", {send_r(pi)}, false, true);
    b.edge("mconfB", "prB", {recv_w(pi)});
    b.edge("mconf1", "go1", {recv_w(pi)});
    b.edge("mconf2", "go2", {recv_w(pi)});
    b.edge("mconfB", "idle", {}, true);
    b.edge("mconf1", "idle", {}, true);
    b.edge("mconf2", "idle", {}, true);
    return b.done();
}

HandshakeTemplate make_join(const std::string& site, const std::string& p1,
                            const std::string& p2, const std::string& po) {
    Builder b(site, TemplateKind::join);
    b.init("idle");
    b.state("idle");
    for (const char* s : {"JWW", "JMW", "JWM", "JMM", "ww2", "ww3", "x2", "x4", "y2", "y4",
                          "z2", "z4", "z5", "x6", "y6"})
        b.state(s);
    for (const char* s : {"jw1", "jw2", "jm1", "jm2", "ww1", "x1", "x3", "x5", "y1", "y3",
                          "y5", "z1", "z3", "z3a", "z3b", "ZW", "commit"})
        b.state(s, true);

    b.edge("idle", "jw1", {recv_w(p1)}, false, true);
    b.edge("idle", "jw2", {recv_w(p2)}, false, true);
    b.edge("idle", "jm1", {recv_mw(p1)}, false, true);
    b.edge("idle", "jm2", {recv_mw(p2)}, false, true);
    b.edge("idle", "JWW", {recv_w(p1), recv_w(p2)});
    b.edge("idle", "JMW", {recv_mw(p1), recv_w(p2)});
    b.edge("idle", "JWM", {recv_w(p1), recv_mw(p2)});
    b.edge("idle", "JMM", {recv_mw(p1), recv_mw(p2)});
    b.edge("jw1", "JWW", {recv_w(p2)});
    b.edge("jw2", "JWW", {recv_w(p1)});
    b.edge("jw1", "JWM", {recv_mw(p2)});
    b.edge("jw2", "JMW", {recv_mw(p1)});
    b.edge("jm1", "JMW", {recv_w(p2)});
    b.edge("jm2", "JWM", {recv_w(p1)});
    b.edge("jm1", "JMM", {recv_mw(p2)});
    b.edge("jm2", "JMM", {recv_mw(p1)});
    b.edge("jw1", "idle", {}, true);
    b.edge("jw2", "idle", {}, true);
    b.edge("jm1", "idle", {}, true);
    b.edge("jm2", "idle", {}, true);
    // Two definite writes: check the sink can read, confirm both, commit.
    b.edge("JWW", "ww1", {send_w(po)}, false, true);
    b.edge("ww1", "idle", {}, true);
    b.edge("ww1", "ww2", {recv_r(po)});
    b.edge("ww2", "ww3", {send_r(p1), send_r(p2)});
    b.edge("ww3", "commit", blocks({p1, p2, po}), false, true);
    b.edge("commit", "idle", unblocks({p1, p2, po}), true);
    // may_write on p1, write on p2: sense the sink with may_write, firm up
    // the uncertain input, then proceed as with two writes.
    b.edge("JMW", "x1", {send_mw(po)}, false, true);
    b.edge("x1", "idle", {}, true);
    b.edge("x1", "x2", {recv_r(po)});
    b.edge("x2", "x3", {send_r(p1)}, false, true);
    b.edge("x3", "idle", {}, true);
    b.edge("x3", "x4", {recv_w(p1)});
    b.edge("x4", "x5", {send_w(po)}, false, true);
    b.edge("x5", "idle", {}, true);
    b.edge("x5", "x6", {recv_r(po)});
    b.edge("x6", "ww3", {send_r(p1), send_r(p2)});
    // Mirror case: write on p1, may_write on p2.
    b.edge("JWM", "y1", {send_mw(po)}, false, true);
    b.edge("y1", "idle", {}, true);
    b.edge("y1", "y2", {recv_r(po)});
    b.edge("y2", "y3", {send_r(p2)}, false, true);
    b.edge("y3", "idle", {}, true);
    b.edge("y3", "y4", {recv_w(p2)});
    b.edge("y4", "y5", {send_w(po)}, false, true);
    b.edge("y5", "idle", {}, true);
    b.edge("y5", "y6", {recv_r(po)});
    b.edge("y6", "ww3", {send_r(p1), send_r(p2)});
    // Two may_writes: firm up both inputs.
    b.edge("JMM", "z1", {send_mw(po)}, false, true);
    b.edge("z1", "idle", {}, true);
    b.edge("z1", "z2", {recv_r(po)});
    b.edge("z2", "z3", {send_r(p1), send_r(p2)}, false, true);
    b.edge("z3", "z3a", {recv_w(p1)});
    b.edge("z3", "z3b", {recv_w(p2)});
    b.edge("z3", "z4", {recv_w(p1), recv_w(p2)});
    b.edge("z3a", "z4", {recv_w(p2)});
    b.edge("z3b", "z4", {recv_w(p1)});
    b.edge("z3", "idle", {}, true);
    b.edge("z3a", "idle", {}, true);
    b.edge("z3b", "idle", {}, true);
    b.edge("z4", "ZW", {send_w(po)}, false, true);
    b.edge("ZW", "idle", {}, true);
    b.edge("ZW", "z5", {recv_r(po)});
    b.edge("z5", "ww3", {send_r(p1), send_r(p2)});
    return b.done();
}

HandshakeTemplate make_lossy(const std::string& site, const std::string& pi,
                             const std::string& po, bool nd) {
    Builder b(site, nd ? TemplateKind::lossy_nd : TemplateKind::lossy_ctx);
    b.init("idle");
    b.state("idle");
    for (const char* s : {"r1", "r3", "r4", "m3", "m5", "lw", "lw2"})
        b.state(s);
    for (const char* s : {"r2", "m1", "m2", "m4", "lm", "commitP", "commitL"})
        b.state(s, true);

    // Definite write: forward, and either complete the pass or commit to
    // accept-and-lose when the sink side never answers.
    b.edge("idle", "r1", {recv_w(pi)});
    b.edge("r1", "r2", {send_w(po)}, false, true);
    b.edge("r2", "r3", {recv_r(po)});
    b.edge("r3", "r4", {send_r(pi)});
    b.edge("r4", "commitP", blocks({pi, po}), false, true);
    b.edge("commitP", "idle", unblocks({pi, po}), true);
    b.edge("r2", "lw", {send_r(pi)}, true, true);
    b.edge("lw", "commitL", {block(pi)}, false, true);
    b.edge("commitL", "idle", {unblock(pi)}, true);
    // may_write: forward the probe; a lost cycle still needs the definite
    // write before the input-only commit.
    b.edge("idle", "m1", {recv_mw(pi)}, false, true);
    b.edge("m1", "m2", {send_mw(po)}, false, true);
    b.edge("m2", "m3", {recv_r(po)});
    b.edge("m3", "m4", {send_r(pi)}, false, true);
    b.edge("m4", "idle", {}, true);
    b.edge("m4", "m5", {recv_w(pi)});
    b.edge("m5", "commitP", blocks({pi, po}), false, true);
    b.edge("m2", "lm", {send_r(pi)}, true, true);
    b.edge("lm", "lw2", {recv_w(pi)});
    b.edge("lm", "idle", {}, true);
    b.edge("lw2", "commitL", {block(pi)}, false, true);
    if (nd) {
        b.edge("r1", "lw", {send_r(pi)});
        b.edge("m1", "lm", {send_r(pi)}, false, true);
    }
    return b.done();
}

} // namespace

TemplateKind template_kind_for(NodeKind k) {
    switch (k) {
    case NodeKind::source: return TemplateKind::source;
    case NodeKind::sink: return TemplateKind::sink;
    case NodeKind::mixed: return TemplateKind::mixed;
    case NodeKind::merge: return TemplateKind::merge;
    case NodeKind::replicate: return TemplateKind::replicate;
    case NodeKind::route: return TemplateKind::route;
    case NodeKind::join: return TemplateKind::join;
    }
    fail("UnsupportedKind", "no template for node kind");
}

HandshakeTemplate handshake_template(TemplateKind kind, const std::string& site,
                                     const std::vector<std::string>& in_ports,
                                     const std::vector<std::string>& out_ports,
                                     const TemplateOptions& opts) {
    auto need = [&](size_t ins, size_t outs) {
        if (in_ports.size() != ins || out_ports.size() != outs)
            fail("UnsupportedKind", std::string(kind_name(kind)) + " template requires " +
                                        std::to_string(ins) + " inputs and " +
                                        std::to_string(outs) + " outputs");
    };
    switch (kind) {
    case TemplateKind::source:
        need(0, 1);
        return make_source(site, out_ports[0]);
    case TemplateKind::sink:
        need(1, 0);
        return make_sink(site, in_ports[0], opts.sink_always_accepting);
    case TemplateKind::mixed:
        need(1, 1);
        return make_mixed(site, in_ports[0], out_ports[0]);
    case TemplateKind::replicate:
        need(1, 2);
        return make_replicate(site, in_ports[0], out_ports[0], out_ports[1]);
    case TemplateKind::merge:
        need(2, 1);
        return make_merge(site, in_ports[0], in_ports[1], out_ports[0]);
    case TemplateKind::route:
        need(1, 2);
        return make_route(site, in_ports[0], out_ports[0], out_ports[1]);
    case TemplateKind::join:
        need(2, 1);
        return make_join(site, in_ports[0], in_ports[1], out_ports[0]);
    case TemplateKind::sync_link:
        need(1, 1);
        return make_sync_link(site, in_ports[0], out_ports[0]);
    case TemplateKind::lossy_ctx:
        need(1, 1);
        return make_lossy(site, in_ports[0], out_ports[0], false);
    case TemplateKind::lossy_nd:
        need(1, 1);
        return make_lossy(site, in_ports[0], out_ports[0], true);
    }
    fail("UnsupportedKind", "unknown template kind");
}

// --- site templates and composition ------------------------------------------

HandshakeTemplate site_template(const Circuit& region, const std::string& site_id,
                                const TemplateOptions& opts) {
    if (const Node* n = region.find_node(site_id)) {
        std::vector<std::string> ins, outs;
        for (const auto& p : n->in_ports) ins.push_back(n->id + "." + p);
        for (const auto& p : n->out_ports) outs.push_back(n->id + "." + p);
        HandshakeTemplate t = handshake_template(template_kind_for(n->kind), n->id, ins, outs, opts);
        t.hidden_site = n->hidden;
        return t;
    }
    if (const Channel* ch = region.find_channel(site_id)) {
        const std::string a = ch->id + ".a";
        const std::string pb = ch->id + ".b";
        HandshakeTemplate t = [&] {
            switch (ch->kind) {
            case ChannelKind::sync:
            case ChannelKind::transform:
                return handshake_template(TemplateKind::sync_link, ch->id, {a}, {pb}, opts);
            case ChannelKind::lossy_sync_ctx:
                return handshake_template(TemplateKind::lossy_ctx, ch->id, {a}, {pb}, opts);
            case ChannelKind::lossy_sync_nd:
                return handshake_template(TemplateKind::lossy_nd, ch->id, {a}, {pb}, opts);
            default:
                fail("MissingTemplate", std::string("channel kind ") + kind_name(ch->kind) +
                                            " has no handshake machine; desugar the circuit");
            }
        }();
        t.hidden_site = true;
        return t;
    }
    fail("MissingTemplate", "no site '" + site_id + "' in region");
}

namespace {

std::vector<std::string> site_order(const Circuit& region) {
    std::set<std::string> left;
    for (const auto& n : region.nodes) left.insert("n:" + n.id);
    for (const auto& c : region.channels) left.insert("c:" + c.id);
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& c : region.channels) {
        adj["c:" + c.id].push_back("n:" + c.end_a.node);
        adj["c:" + c.id].push_back("n:" + c.end_b.node);
        adj["n:" + c.end_a.node].push_back("c:" + c.id);
        adj["n:" + c.end_b.node].push_back("c:" + c.id);
    }
    std::vector<std::string> order;
    while (!left.empty()) {
        std::deque<std::string> work{*left.begin()};
        left.erase(left.begin());
        while (!work.empty()) {
            std::string u = work.front();
            work.pop_front();
            order.push_back(u);
            for (const auto& v : adj[u])
                if (left.erase(v)) work.push_back(v);
        }
    }
    for (auto& s : order) s = s.substr(2);
    return order;
}

bool channel_blocks(ChannelKind k) {
    return k == ChannelKind::lossy_sync_ctx || k == ChannelKind::lossy_sync_nd;
}

} // namespace

Action fused_block(const PortRef& a, const PortRef& b) {
    return {a.qualified() + "~" + b.qualified(), ActionKind::block};
}

Action fused_unblock(const PortRef& a, const PortRef& b) {
    return {a.qualified() + "~" + b.qualified(), ActionKind::unblock};
}

Composition compose_handshake(const Circuit& region, BlockMode mode,
                              const TemplateOptions& opts) {
    validate(region);
    std::vector<std::string> order = site_order(region);
    if (order.empty()) fail("MissingTemplate", "empty region");

    std::map<std::string, HandshakeTemplate> templates;
    for (const auto& id : order) templates.emplace(id, site_template(region, id, opts));

    Composition out;
    for (const auto& [id, t] : templates) {
        if (!t.hidden_site) continue;
        for (const auto& x : t.taca.alphabet)
            if (is_blocking(x.kind)) out.hidden_blocking.insert(x);
    }

    TimedAutomaton acc = templates.at(order[0]).taca;
    std::set<std::string> folded{order[0]};

    for (size_t i = 1; i < order.size(); ++i) {
        const std::string& id = order[i];
        const TimedAutomaton& next = templates.at(id).taca;
        SyncMap sync;

        auto add_pair = [&](Action fused, const Action& of_acc, const Action& of_next) {
            sync.push_back({std::move(fused), of_acc, of_next});
        };

        for (const auto& ch : region.channels) {
            const std::string pa = ch.end_a.qualified();
            const std::string pb_ = ch.end_b.qualified();
            const std::string ca = ch.id + ".a";
            const std::string cb = ch.id + ".b";
            // Source-end joint: node sends w/mw, receives r.
            if (id == ch.id && folded.count(ch.end_a.node)) {
                add_pair(send_w(pa), send_w(pa), recv_w(ca));
                add_pair(send_mw(pa), send_mw(pa), recv_mw(ca));
                add_pair(recv_r(pa), recv_r(pa), send_r(ca));
            } else if (id == ch.end_a.node && folded.count(ch.id)) {
                add_pair(send_w(pa), recv_w(ca), send_w(pa));
                add_pair(send_mw(pa), recv_mw(ca), send_mw(pa));
                add_pair(recv_r(pa), send_r(ca), recv_r(pa));
            }
            // Sink-end joint: channel sends w/mw, node answers r.
            if (id == ch.id && folded.count(ch.end_b.node)) {
                add_pair(recv_w(pb_), recv_w(pb_), send_w(cb));
                add_pair(recv_mw(pb_), recv_mw(pb_), send_mw(cb));
                add_pair(send_r(pb_), send_r(pb_), recv_r(cb));
            } else if (id == ch.end_b.node && folded.count(ch.id)) {
                add_pair(recv_w(pb_), send_w(cb), recv_w(pb_));
                add_pair(recv_mw(pb_), send_mw(cb), recv_mw(pb_));
                add_pair(send_r(pb_), recv_r(cb), send_r(pb_));
            }
            // Block/unblock synchronization across non-blocking channels
            // between two visible nodes.
            if (mode == BlockMode::sync_block && !channel_blocks(ch.kind)) {
                const Node* na = region.find_node(ch.end_a.node);
                const Node* nb = region.find_node(ch.end_b.node);
                if (na->hidden || nb->hidden) continue;
                bool second_now =
                    (id == ch.end_a.node && folded.count(ch.end_b.node)) ||
                    (id == ch.end_b.node && folded.count(ch.end_a.node));
                if (!second_now) continue;
                if (id == ch.end_a.node) {
                    add_pair(fused_block(ch.end_a, ch.end_b), block(pb_), block(pa));
                    add_pair(fused_unblock(ch.end_a, ch.end_b), unblock(pb_), unblock(pa));
                } else {
                    add_pair(fused_block(ch.end_a, ch.end_b), block(pa), block(pb_));
                    add_pair(fused_unblock(ch.end_a, ch.end_b), unblock(pa), unblock(pb_));
                }
            }
        }
        acc = product(acc, next, sync);
        folded.insert(id);
    }

    for (const auto& x : acc.alphabet)
        if (is_message(x.kind)) out.message_actions.insert(x);
    out.taca = std::move(acc);
    return out;
}

Automaton compose_blocking_reference(const Circuit& region) {
    validate(region);
    std::vector<std::string> order = site_order(region);

    auto site_pb = [&](const std::string& id) -> Automaton {
        if (const Node* n = region.find_node(id)) {
            std::vector<std::string> ins, outs;
            for (const auto& p : n->in_ports) ins.push_back(n->id + "." + p);
            for (const auto& p : n->out_ports) outs.push_back(n->id + "." + p);
            return lift_port_blocking(node_ca(n->kind, ins, outs));
        }
        const Channel* ch = region.find_channel(id);
        if (channel_blocks(ch->kind))
            return lift_port_blocking(channel_ca(ch->kind, ch->id + ".a", ch->id + ".b"));
        Automaton trivial;
        trivial.initial = "s0";
        trivial.add_state("s0");
        return trivial;
    };

    Automaton acc = site_pb(order[0]);
    std::set<std::string> folded{order[0]};
    for (size_t i = 1; i < order.size(); ++i) {
        const std::string& id = order[i];
        Automaton next = site_pb(id);
        SyncMap sync;
        for (const auto& ch : region.channels) {
            if (channel_blocks(ch.kind)) continue;
            const Node* na = region.find_node(ch.end_a.node);
            const Node* nb = region.find_node(ch.end_b.node);
            if (na->hidden || nb->hidden) continue;
            bool second_now = (id == ch.end_a.node && folded.count(ch.end_b.node)) ||
                              (id == ch.end_b.node && folded.count(ch.end_a.node));
            if (!second_now) continue;
            const std::string pa = ch.end_a.qualified();
            const std::string pb_ = ch.end_b.qualified();
            if (id == ch.end_a.node) {
                sync.push_back({fused_block(ch.end_a, ch.end_b), block(pb_), block(pa)});
                sync.push_back({fused_unblock(ch.end_a, ch.end_b), unblock(pb_), unblock(pa)});
            } else {
                sync.push_back({fused_block(ch.end_a, ch.end_b), block(pa), block(pb_)});
                sync.push_back({fused_unblock(ch.end_a, ch.end_b), unblock(pa), unblock(pb_)});
            }
        }
        acc = product(acc, next, sync);
        folded.insert(id);
    }

    // Blocks of hidden sites are not part of the observable contract.
    std::set<Action> hide_set;
    for (const auto& id : order) {
        const Node* n = region.find_node(id);
        bool hidden = n ? n->hidden : true;
        if (!hidden) continue;
        if (n) {
            for (const auto& p : n->in_ports) {
                if (acc.alphabet.count(block(id + "." + p))) hide_set.insert(block(id + "." + p));
                if (acc.alphabet.count(unblock(id + "." + p))) hide_set.insert(unblock(id + "." + p));
            }
            for (const auto& p : n->out_ports) {
                if (acc.alphabet.count(block(id + "." + p))) hide_set.insert(block(id + "." + p));
                if (acc.alphabet.count(unblock(id + "." + p))) hide_set.insert(unblock(id + "." + p));
            }
        } else {
            for (const char* e : {".a", ".b"}) {
                if (acc.alphabet.count(block(id + e))) hide_set.insert(block(id + e));
                if (acc.alphabet.count(unblock(id + e))) hide_set.insert(unblock(id + e));
            }
        }
    }
    return hide(acc, hide_set);
}

double default_c_factor(const Circuit& region) {
    int max_merge_in = 0;
    for (const auto& n : region.nodes)
        if (n.kind == NodeKind::merge)
            max_merge_in = std::max(max_merge_in, static_cast<int>(n.in_ports.size()));
    return 2.0 * (1 + max_merge_in);
}

int estimate_timeout(const Circuit& region, std::optional<double> c_factor) {
    if (c_factor && *c_factor <= 0) fail("BadBound", "c_factor must be positive");
    PathLength l = longest_path(region);
    double c = c_factor ? *c_factor : default_c_factor(region);
    return static_cast<int>(std::ceil(c * l.delay * 2));
}

} // namespace reoh
