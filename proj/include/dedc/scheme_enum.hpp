#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dedc/formal_core.hpp"

namespace dedc {

// ---------------------------------------------------------------------------
// Base graphs
// ---------------------------------------------------------------------------

// Four-node DAGs over nodes 0..3 with node 3 the unique sink (final node).
// Edges are (producer, consumer) pairs.
struct BaseGraph {
    int id = -1;
    std::vector<std::pair<int, int>> edges;
    std::array<std::vector<int>, 4> preds;  // ascending
    std::array<std::vector<int>, 4> succs;  // ascending
    // Node pairs (i < j) with identical predecessor and successor sets; used
    // for the canonical-order exclusion on interchangeable positions.
    std::vector<std::pair<int, int>> symmetric_pairs;
};

inline const std::vector<BaseGraph>& base_graphs() {
    static const std::vector<BaseGraph> graphs = [] {
        const std::vector<std::vector<std::pair<int, int>>> edge_sets = {
            {{0, 1}, {1, 2}, {2, 3}},          // 0: chain
            {{0, 2}, {1, 2}, {2, 3}},          // 1: join at 2
            {{0, 1}, {1, 3}, {2, 3}},          // 2: side branch into the final node
            {{0, 1}, {0, 2}, {1, 3}, {2, 3}},  // 3: diamond
            {{0, 1}, {1, 2}, {1, 3}, {2, 3}},  // 4: fan-out from 1
            {{0, 1}, {0, 2}, {1, 2}, {2, 3}},  // 5: triangle into 2
        };
        std::vector<BaseGraph> gs;
        for (std::size_t gi = 0; gi < edge_sets.size(); ++gi) {
            BaseGraph g;
            g.id = static_cast<int>(gi);
            g.edges = edge_sets[gi];
            for (auto [u, v] : g.edges) {
                g.preds[static_cast<std::size_t>(v)].push_back(u);
                g.succs[static_cast<std::size_t>(u)].push_back(v);
            }
            for (auto& p : g.preds) std::sort(p.begin(), p.end());
            for (auto& s : g.succs) std::sort(s.begin(), s.end());
            for (int i = 0; i < 4; ++i) {
                for (int j = i + 1; j < 4; ++j) {
                    if (g.preds[static_cast<std::size_t>(i)] == g.preds[static_cast<std::size_t>(j)] &&
                        g.succs[static_cast<std::size_t>(i)] == g.succs[static_cast<std::size_t>(j)]) {
                        g.symmetric_pairs.emplace_back(i, j);
                    }
                }
            }
            gs.push_back(std::move(g));
        }
        return gs;
    }();
    return graphs;
}

// ---------------------------------------------------------------------------
// Validity: typed slot matching
// ---------------------------------------------------------------------------

// One resolved composition edge: node `from`'s output occupies parameter
// position `param` of node `to`.
struct SlotMatch {
    int from = -1;
    int to = -1;
    int param = -1;

    bool operator==(const SlotMatch&) const = default;
};

using Assignment = std::array<int, 4>;

// Canonical matching: predecessors in ascending node order each claim the
// lowest-index free consumable slot of matching type. Greedy assignment is
// exact here because no primitive has two distinct-type slots competing for
// the same producer type, and the only primitive with two same-type slots
// (add) is symmetric in them.
//
// A scheme is valid when every predecessor edge finds a slot and every node
// without predecessors can stand with all-literal arguments. Non-final nodes
// additionally need their output consumed, which the per-edge matching on
// their successors enforces. Whether the final node has an interrogative
// form is an exclusion-rule concern, not a validity concern, so near-miss
// assignments stay attributable to a single rule.
inline std::optional<std::vector<SlotMatch>> is_valid_scheme(const BaseGraph& g,
                                                             const Assignment& a) {
    std::vector<SlotMatch> matching;
    for (int node = 0; node < 4; ++node) {
        const auto& spec = primitive(a[static_cast<std::size_t>(node)]);
        const auto& preds = g.preds[static_cast<std::size_t>(node)];
        if (preds.empty() && !spec.leaf_capable) return std::nullopt;
        std::set<int> used;
        for (int p : preds) {
            const OutputType produced = primitive(a[static_cast<std::size_t>(p)]).output;
            bool placed = false;
            for (const auto& slot : spec.consumable) {
                if (slot.type != produced || used.count(slot.param)) continue;
                used.insert(slot.param);
                matching.push_back({p, node, slot.param});
                placed = true;
                break;
            }
            if (!placed) return std::nullopt;
        }
    }
    return matching;
}

// ---------------------------------------------------------------------------
// Exclusion rules
// ---------------------------------------------------------------------------

// Over valid schemes, drop compositions that are degenerate or duplicated:
//  1. an edge between two interchangeable primitives -- two threshold
//     filters (f0/f2) compose commutatively, and add feeding add collapses
//     to a single three-way sum;
//  2. count applied to nothing but a top_k (the result is the constant k);
//  3. a column-producing final node (add_c has no interrogative form, so no
//     question can ask for its output);
//  4. on structurally symmetric node pairs, keep only the canonically
//     ordered assignment (non-strict, so equal primitives survive).
inline std::set<int> violated_rules(const BaseGraph& g, const Assignment& a) {
    std::set<int> violated;
    auto is_threshold_filter = [](int p) { return p == 0 || p == 2; };
    for (auto [u, v] : g.edges) {
        const int pu = a[static_cast<std::size_t>(u)];
        const int pv = a[static_cast<std::size_t>(v)];
        if (is_threshold_filter(pu) && is_threshold_filter(pv)) violated.insert(1);
        if (pu == 8 && pv == 8) violated.insert(1);
    }
    for (int node = 0; node < 4; ++node) {
        if (a[static_cast<std::size_t>(node)] != 5) continue;
        const auto& preds = g.preds[static_cast<std::size_t>(node)];
        if (preds.size() == 1 && a[static_cast<std::size_t>(preds[0])] == 1) {
            violated.insert(2);
        }
    }
    if (a[3] == 9) violated.insert(3);
    for (auto [i, j] : g.symmetric_pairs) {
        if (a[static_cast<std::size_t>(i)] > a[static_cast<std::size_t>(j)]) {
            violated.insert(4);
        }
    }
    return violated;
}

inline bool passes_exclusions(const BaseGraph& g, const Assignment& a) {
    return violated_rules(g, a).empty();
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

struct Scheme {
    int scheme_id = -1;  // dense index in enumeration order
    int graph_id = -1;
    Assignment assignment{};
    std::vector<SlotMatch> slot_matching;
    std::string typed_label;  // e.g. "0-AAB"
};

// "<graph id>-<letters>": one letter per non-final node in node order,
// A when the node produces a View, B otherwise.
inline std::string typed_label(int graph_id, const Assignment& a) {
    std::string label = std::to_string(graph_id);
    label += '-';
    for (int node = 0; node < 3; ++node) {
        const auto out = primitive(a[static_cast<std::size_t>(node)]).output;
        label += (out == OutputType::View) ? 'A' : 'B';
    }
    return label;
}

// Deterministic order: graph id outer, lexicographic assignment inner.
inline std::vector<Scheme> enumerate_schemes() {
    std::vector<Scheme> schemes;
    int next_id = 0;
    for (const auto& g : base_graphs()) {
        Assignment a{};
        for (a[0] = 0; a[0] < 10; ++a[0]) {
            for (a[1] = 0; a[1] < 10; ++a[1]) {
                for (a[2] = 0; a[2] < 10; ++a[2]) {
                    for (a[3] = 0; a[3] < 10; ++a[3]) {
                        auto matching = is_valid_scheme(g, a);
                        if (!matching) continue;
                        if (!passes_exclusions(g, a)) continue;
                        Scheme s;
                        s.scheme_id = next_id++;
                        s.graph_id = g.id;
                        s.assignment = a;
                        s.slot_matching = std::move(*matching);
                        s.typed_label = typed_label(g.id, a);
                        schemes.push_back(std::move(s));
                    }
                }
            }
        }
    }
    return schemes;
}

inline std::map<std::string, int> label_histogram(const std::vector<Scheme>& schemes) {
    std::map<std::string, int> h;
    for (const auto& s : schemes) ++h[s.typed_label];
    return h;
}

}  // namespace dedc
