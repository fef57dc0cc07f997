#include "reoh/action.hpp"

#include "reoh/error.hpp"

#include <algorithm>

namespace reoh {

bool is_message(ActionKind k) {
    switch (k) {
    case ActionKind::send_write:
    case ActionKind::recv_write:
    case ActionKind::send_read:
    case ActionKind::recv_read:
    case ActionKind::send_may_write:
    case ActionKind::recv_may_write:
        return true;
    default:
        return false;
    }
}

bool is_blocking(ActionKind k) {
    return k == ActionKind::block || k == ActionKind::unblock;
}

const char* kind_name(ActionKind k) {
    switch (k) {
    case ActionKind::flow: return "flow";
    case ActionKind::block: return "block";
    case ActionKind::unblock: return "unblock";
    case ActionKind::send_write: return "send_write";
    case ActionKind::recv_write: return "recv_write";
    case ActionKind::send_read: return "send_read";
    case ActionKind::recv_read: return "recv_read";
    case ActionKind::send_may_write: return "send_may_write";
    case ActionKind::recv_may_write: return "recv_may_write";
    case ActionKind::silent: return "silent";
    }
    return "?";
}

const char* kind_prefix(ActionKind k) {
    switch (k) {
    case ActionKind::flow: return "";
    case ActionKind::block: return "b";
    case ActionKind::unblock: return "u";
    case ActionKind::send_write: return "?w";
    case ActionKind::recv_write: return "!w";
    case ActionKind::send_read: return "?r";
    case ActionKind::recv_read: return "!r";
    case ActionKind::send_may_write: return "?mw";
    case ActionKind::recv_may_write: return "!mw";
    case ActionKind::silent: return "tau";
    }
    return "?";
}

ActionKind kind_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(ActionKind::silent); ++i) {
        auto k = static_cast<ActionKind>(i);
        if (name == kind_name(k)) return k;
    }
    fail("BadActionKind", "unknown action kind '" + name + "'");
}

std::string to_string(const Action& a) {
    if (a.kind == ActionKind::silent) return "tau";
    return std::string(kind_prefix(a.kind)) + a.port;
}

Label make_label(std::initializer_list<Action> actions) {
    Label l(actions);
    canonicalize(l);
    return l;
}

void canonicalize(Label& l) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
}

bool label_contains(const Label& l, const Action& a) {
    return std::binary_search(l.begin(), l.end(), a);
}

bool label_subset(const Label& sub, const Label& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

Label label_union(const Label& a, const Label& b) {
    Label out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Label label_minus(const Label& l, const std::vector<Action>& remove) {
    Label r = l;
    std::erase_if(r, [&](const Action& a) {
        return std::find(remove.begin(), remove.end(), a) != remove.end();
    });
    return r;
}

Label label_intersect(const Label& a, const Label& b) {
    Label out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::string to_string(const Label& l) {
    std::string s = "{";
    for (size_t i = 0; i < l.size(); ++i) {
        if (i) s += ",";
        s += to_string(l[i]);
    }
    s += "}";
    return s;
}

std::vector<std::string> split_ports(const std::string& port) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= port.size()) {
        size_t tilde = port.find('~', pos);
        if (tilde == std::string::npos) {
            out.push_back(port.substr(pos));
            break;
        }
        out.push_back(port.substr(pos, tilde - pos));
        pos = tilde + 1;
    }
    return out;
}

std::string node_of_port(const std::string& port) {
    return port.substr(0, port.find('.'));
}

} // namespace reoh
