#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ndnfwd/errors.hpp"
#include "ndnfwd/rng.hpp"

namespace ndnfwd {

enum class NodeRole { Router, Consumer, Producer };

inline std::string to_string(NodeRole role) {
    switch (role) {
    case NodeRole::Router: return "router";
    case NodeRole::Consumer: return "consumer";
    case NodeRole::Producer: return "producer";
    }
    throw UsageError("to_string: bad NodeRole");
}

struct TopoNode {
    std::string id;
    NodeRole role = NodeRole::Router;
};

struct TopoLink {
    std::size_t a = 0;  // node indices
    std::size_t b = 0;
    double bandwidth_bps = 0.0;
    double delay_s = 0.0;
};

// Parsed network graph. Links are bidirectional; the simulator materializes
// two directed faces per link. Connectivity is the scenario author's
// responsibility: unreachable prefixes show up as unroutable drops at run
// time, not as parse errors.
struct Topology {
    std::vector<TopoNode> nodes;
    std::vector<TopoLink> links;

    std::size_t index_of(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id)
                return i;
        throw UsageError("topology: no node named '" + id + "'");
    }

    std::size_t directed_face_count() const { return 2 * links.size(); }
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok)
        fields.push_back(tok);
    return fields;
}

inline double parse_positive(const std::string& tok, int line_no, const char* what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError(line_no, std::string("bad ") + what + " '" + tok + "'");
    }
    if (used != tok.size() || !(value > 0.0))
        throw ParseError(line_no, std::string(what) + " must be a positive number, got '" +
                                      tok + "'");
    return value;
}

} // namespace detail

// Reads the line-oriented topology format:
//   node <id> [consumer|producer|router]
//   link <a> <b> <bandwidth_bps> <delay_ms>
// with `#` comments. Any malformed statement aborts the parse.
inline Topology parse_topology(std::istream& in) {
    Topology topo;
    std::unordered_map<std::string, std::size_t> index;
    std::unordered_set<std::string> seen_links;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::vector<std::string> f = detail::split_fields(line);
        if (f.empty())
            continue;
        if (f[0] == "node") {
            if (f.size() < 2 || f.size() > 3)
                throw ParseError(line_no, "expected 'node <id> [role]'");
            if (index.count(f[1]))
                throw ParseError(line_no, "duplicate node '" + f[1] + "'");
            NodeRole role = NodeRole::Router;
            if (f.size() == 3) {
                if (f[2] == "consumer")
                    role = NodeRole::Consumer;
                else if (f[2] == "producer")
                    role = NodeRole::Producer;
                else if (f[2] == "router")
                    role = NodeRole::Router;
                else
                    throw ParseError(line_no, "unknown role '" + f[2] + "'");
            }
            index.emplace(f[1], topo.nodes.size());
            topo.nodes.push_back(TopoNode{f[1], role});
        } else if (f[0] == "link") {
            if (f.size() != 5)
                throw ParseError(line_no, "expected 'link <a> <b> <bandwidth_bps> <delay_ms>'");
            auto a = index.find(f[1]);
            auto b = index.find(f[2]);
            if (a == index.end())
                throw ParseError(line_no, "link references undeclared node '" + f[1] + "'");
            if (b == index.end())
                throw ParseError(line_no, "link references undeclared node '" + f[2] + "'");
            if (a->second == b->second)
                throw ParseError(line_no, "self-loop on node '" + f[1] + "'");
            const std::string key = a->second < b->second
                                        ? f[1] + "\x1f" + f[2]
                                        : f[2] + "\x1f" + f[1];
            if (!seen_links.insert(key).second)
                throw ParseError(line_no, "duplicate link between '" + f[1] + "' and '" +
                                              f[2] + "'");
            const double bw = detail::parse_positive(f[3], line_no, "bandwidth");
            const double delay_ms = detail::parse_positive(f[4], line_no, "delay");
            topo.links.push_back(TopoLink{a->second, b->second, bw, delay_ms / 1000.0});
        } else {
            throw ParseError(line_no, "unknown statement '" + f[0] + "'");
        }
    }
    return topo;
}

inline Topology parse_topology(const std::string& text) {
    std::istringstream in(text);
    return parse_topology(in);
}

inline void write_topology(std::ostream& out, const Topology& topo) {
    for (const TopoNode& n : topo.nodes)
        out << "node " << n.id << ' ' << to_string(n.role) << '\n';
    for (const TopoLink& l : topo.links) {
        std::ostringstream row;
        row.precision(15);
        row << "link " << topo.nodes[l.a].id << ' ' << topo.nodes[l.b].id << ' '
            << l.bandwidth_bps << ' ' << l.delay_s * 1000.0;
        out << row.str() << '\n';
    }
}

// ---- Fixed shapes for oracle tests and example scenarios ----------------

// n0 (consumer) - n1 - ... - n_{k-1} (producer).
inline Topology make_line(std::size_t n, double bandwidth_bps, double delay_s) {
    if (n < 2)
        throw UsageError("make_line: need at least 2 nodes");
    Topology topo;
    for (std::size_t i = 0; i < n; ++i) {
        NodeRole role = NodeRole::Router;
        if (i == 0)
            role = NodeRole::Consumer;
        else if (i + 1 == n)
            role = NodeRole::Producer;
        topo.nodes.push_back(TopoNode{"n" + std::to_string(i), role});
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        topo.links.push_back(TopoLink{i, i + 1, bandwidth_bps, delay_s});
    return topo;
}

// rows x cols lattice, row-major ids g0..g{rc-1}; corner g0 is a consumer,
// the opposite corner a producer.
inline Topology make_grid(std::size_t rows, std::size_t cols, double bandwidth_bps,
                          double delay_s) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw UsageError("make_grid: need at least 2 nodes");
    Topology topo;
    const std::size_t n = rows * cols;
    for (std::size_t i = 0; i < n; ++i) {
        NodeRole role = NodeRole::Router;
        if (i == 0)
            role = NodeRole::Consumer;
        else if (i + 1 == n)
            role = NodeRole::Producer;
        topo.nodes.push_back(TopoNode{"g" + std::to_string(i), role});
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t i = r * cols + c;
            if (c + 1 < cols)
                topo.links.push_back(TopoLink{i, i + 1, bandwidth_bps, delay_s});
            if (r + 1 < rows)
                topo.links.push_back(TopoLink{i, i + cols, bandwidth_bps, delay_s});
        }
    }
    return topo;
}

// Complete binary tree with `levels` levels; the root is the producer and
// the leaves are consumers.
inline Topology make_tree(std::size_t levels, double bandwidth_bps, double delay_s) {
    if (levels < 2)
        throw UsageError("make_tree: need at least 2 levels");
    Topology topo;
    const std::size_t n = (std::size_t(1) << levels) - 1;
    const std::size_t first_leaf = (std::size_t(1) << (levels - 1)) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        NodeRole role = NodeRole::Router;
        if (i == 0)
            role = NodeRole::Producer;
        else if (i >= first_leaf)
            role = NodeRole::Consumer;
        topo.nodes.push_back(TopoNode{"t" + std::to_string(i), role});
    }
    for (std::size_t i = 1; i < n; ++i)
        topo.links.push_back(TopoLink{(i - 1) / 2, i, bandwidth_bps, delay_s});
    return topo;
}

// Random connected graph: a uniformly random attachment tree plus extra
// edges until the link budget is spent. Same seed, same graph.
inline Topology make_random(std::size_t nodes, std::size_t links, std::uint64_t seed,
                            double bandwidth_bps, double delay_s) {
    if (nodes < 2)
        throw UsageError("make_random: need at least 2 nodes");
    if (links < nodes - 1)
        throw UsageError("make_random: too few links for a connected graph");
    if (links > nodes * (nodes - 1) / 2)
        throw UsageError("make_random: more links than node pairs");
    Topology topo;
    for (std::size_t i = 0; i < nodes; ++i) {
        NodeRole role = NodeRole::Router;
        if (i == 0)
            role = NodeRole::Consumer;
        else if (i + 1 == nodes)
            role = NodeRole::Producer;
        topo.nodes.push_back(TopoNode{"r" + std::to_string(i), role});
    }
    Rng rng(seed);
    std::unordered_set<std::uint64_t> used;
    auto add_link = [&](std::size_t a, std::size_t b) {
        if (a > b)
            std::swap(a, b);
        if (a == b)
            return false;
        const std::uint64_t key = std::uint64_t(a) * nodes + b;
        if (!used.insert(key).second)
            return false;
        topo.links.push_back(TopoLink{a, b, bandwidth_bps, delay_s});
        return true;
    };
    for (std::size_t i = 1; i < nodes; ++i)
        add_link(std::size_t(rng.below(i)), i);
    while (topo.links.size() < links)
        add_link(std::size_t(rng.below(nodes)), std::size_t(rng.below(nodes)));
    return topo;
}

} // namespace ndnfwd
