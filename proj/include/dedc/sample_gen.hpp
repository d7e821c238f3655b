#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dedc/formal_core.hpp"
#include "dedc/rng.hpp"
#include "dedc/scheme_enum.hpp"

namespace dedc {

// ---------------------------------------------------------------------------
// Literal parameters
// ---------------------------------------------------------------------------

struct GenRanges {
    int attr_lo = 1, attr_hi = 999;  // attribute ids: attr_<n>
    int num_lo = 1, num_hi = 999;    // numeric thresholds / addends
    int k_lo = 2, k_hi = 9;          // rank parameters
};

// Literals drawn for one node. Only the fields its primitive needs are set,
// and threshold/addend fields stay empty when a composition edge feeds the
// corresponding slot instead.
struct NodeParams {
    std::optional<std::string> h;    // primary attribute literal
    std::optional<std::string> col;  // comparison column (filter_gt_c)
    std::optional<long long> val;    // threshold / addend (filter_gt, add_c)
    std::optional<long long> val2;   // second addend (add)
    std::optional<int> k;            // rank
};

inline std::string ordinal(int k) {
    const int mod100 = k % 100;
    const int mod10 = k % 10;
    std::string suffix = "th";
    if (mod100 < 11 || mod100 > 13) {
        if (mod10 == 1) suffix = "st";
        else if (mod10 == 2) suffix = "nd";
        else if (mod10 == 3) suffix = "rd";
    }
    return std::to_string(k) + suffix;
}

namespace detail {

// Which parameter positions of each node are occupied by composition edges.
inline std::array<std::set<int>, 4> edge_filled_params(const Scheme& s) {
    std::array<std::set<int>, 4> filled;
    for (const auto& m : s.slot_matching) {
        filled[static_cast<std::size_t>(m.to)].insert(m.param);
    }
    return filled;
}

}  // namespace detail

// Draws literals for every node in a fixed order (node 0..3; per node: h,
// col, val, val2, k) so the stream is stable. Attribute literals are pairwise
// distinct within the sample.
inline std::array<NodeParams, 4> draw_params(const Scheme& s, Rng& rng,
                                             const GenRanges& r = {}) {
    const auto filled = detail::edge_filled_params(s);
    std::set<long long> used_attrs;
    auto fresh_attr = [&]() {
        for (;;) {
            const long long n = rng.range(r.attr_lo, r.attr_hi);
            if (used_attrs.insert(n).second) return "attr_" + std::to_string(n);
        }
    };

    std::array<NodeParams, 4> params;
    for (int node = 0; node < 4; ++node) {
        const int prim = s.assignment[static_cast<std::size_t>(node)];
        auto& p = params[static_cast<std::size_t>(node)];
        const auto& occupied = filled[static_cast<std::size_t>(node)];
        switch (prim) {
            case 0:  // filter_gt(view, h, val)
                p.h = fresh_attr();
                if (!occupied.count(2)) p.val = rng.range(r.num_lo, r.num_hi);
                break;
            case 1:  // top_k(view, h, k)
            case 3:  // kth_max(view, h, k)
            case 6:  // kth_argmax(view, h, k)
                p.h = fresh_attr();
                p.k = static_cast<int>(rng.range(r.k_lo, r.k_hi));
                break;
            case 2:  // filter_gt_c(view, h, col)
                p.h = fresh_attr();
                if (!occupied.count(2)) p.col = fresh_attr();
                break;
            case 4:  // sum(view, h)
                p.h = fresh_attr();
                break;
            case 5:  // count(view)
                break;
            case 8:  // add(val, val2)
                if (!occupied.count(1)) p.val2 = rng.range(r.num_lo, r.num_hi);
                break;
            case 9:  // add_c(h, val)
                p.h = fresh_attr();
                if (!occupied.count(1)) p.val = rng.range(r.num_lo, r.num_hi);
                break;
            default:
                throw std::logic_error("draw_params: primitive f" + std::to_string(prim) +
                                       " cannot appear in a scheme");
        }
    }
    return params;
}

// ---------------------------------------------------------------------------
// Program emission
// ---------------------------------------------------------------------------

// Emits the gold program in ascending node order. Intermediate names are
// <type>_<n> numbered by first definition per type; node 3 defines "result".
// Unfilled View slots become "all"; other unfilled slots take the node's
// literals.
inline Program emit_program(const Scheme& s, const std::array<NodeParams, 4>& params) {
    std::array<std::string, 4> lhs_of;
    std::map<OutputType, int> counters;
    auto type_prefix = [](OutputType t) {
        switch (t) {
            case OutputType::View: return "view";
            case OutputType::Value: return "value";
            case OutputType::Row: return "row";
            case OutputType::Column: return "col";
        }
        return "?";
    };

    Program prog;
    for (int node = 0; node < 4; ++node) {
        const int prim = s.assignment[static_cast<std::size_t>(node)];
        const auto& spec = primitive(prim);
        const auto& p = params[static_cast<std::size_t>(node)];

        Expression e;
        e.callee = spec.opaque_name();
        e.args.assign(static_cast<std::size_t>(spec.arity()), "");
        for (const auto& m : s.slot_matching) {
            if (m.to != node) continue;
            e.args[static_cast<std::size_t>(m.param)] = lhs_of[static_cast<std::size_t>(m.from)];
        }
        for (int pos = 0; pos < spec.arity(); ++pos) {
            auto& arg = e.args[static_cast<std::size_t>(pos)];
            if (!arg.empty()) continue;
            switch (spec.params[static_cast<std::size_t>(pos)]) {
                case ParamKind::ViewSlot:
                    arg = std::string(kAllViews);
                    break;
                case ParamKind::AttrLiteral:
                    arg = p.h.value();
                    break;
                case ParamKind::ColumnSlot:
                    // filter_gt_c's second column; every other Column-slot at
                    // an unfilled position is the node's primary attribute.
                    arg = (prim == 2 && pos == 2) ? p.col.value() : p.h.value();
                    break;
                case ParamKind::NumberSlot:
                    arg = std::to_string(prim == 8 ? p.val2.value() : p.val.value());
                    break;
                case ParamKind::KSlot:
                    arg = std::to_string(p.k.value());
                    break;
                case ParamKind::RowSlot:
                    throw std::logic_error("emit_program: unconnected Row slot");
            }
        }
        if (node == 3) {
            e.lhs = std::string(kResultName);
        } else {
            const int n = ++counters[spec.output];
            e.lhs = std::string(type_prefix(spec.output)) + "_" + std::to_string(n);
        }
        lhs_of[static_cast<std::size_t>(node)] = e.lhs;
        prog.push_back(std::move(e));
    }
    return prog;
}

// ---------------------------------------------------------------------------
// Question surface forms
// ---------------------------------------------------------------------------

namespace qgen {

// Surface-form fragments for one instantiated node. Which methods exist for
// which primitive mirrors the composition typing: View producers have scope
// forms, the rest have value forms; interrogative forms exist for every
// primitive that may sit at the final node.
class QNode {
public:
    QNode(int prim, const NodeParams& p) : prim_(prim), p_(&p) {}

    // Connective used between this node's scope/value and the fragment that
    // describes its View input.
    std::string link() const {
        switch (prim_) {
            case 0: case 1: case 2: case 6: return "among";
            case 3: case 4: case 5: case 7: return "of";
            default: throw std::logic_error(no_form("link"));
        }
    }

    // Scope form with the View input spelled out as "all items" (source nodes).
    std::string leaf_scope() const {
        switch (prim_) {
            case 0:
                return "the items that satisfy its " + h() + " is greater than " + val() +
                       " among all items";
            case 1:
                return "the largest " + k() + " items for " + h() + " among all items";
            case 2:
                return "the items that satisfy its " + h() + " is greater than its " + col() +
                       " among all items";
            default: throw std::logic_error(no_form("leaf_scope"));
        }
    }

    // Scope form whose non-View inputs may be overridden by an upstream
    // fragment; the View input is left to the surrounding template.
    std::string scope(const std::optional<std::string>& val_override = std::nullopt) const {
        switch (prim_) {
            case 0:
                return "the items that satisfy its " + h() + " is greater than " +
                       (val_override ? *val_override : val());
            case 1:
                return "the largest " + k() + " items for " + h();
            case 2:
                return "the items that satisfy its " + h() + " is greater than " +
                       (val_override ? *val_override : col());
            default: throw std::logic_error(no_form("scope"));
        }
    }

    // Value form with the View input spelled out (source nodes).
    std::string leaf_value() const {
        switch (prim_) {
            case 3: return "the " + ord() + " largest " + h() + " of all items";
            case 4: return "the sum of " + h() + " of all items";
            case 5: return "the number of all items";
            case 6: return "the item that has the " + ord() + " largest " + h() + " among all items";
            case 9: return "its " + h() + " plus " + val();
            default: throw std::logic_error(no_form("leaf_value"));
        }
    }

    // Value form; non-View inputs may be overridden by upstream fragments.
    std::string value(const std::optional<std::string>& val_override = std::nullopt,
                      const std::optional<std::string>& val2_override = std::nullopt) const {
        switch (prim_) {
            case 3: return "the " + ord() + " largest " + h();
            case 4: return "the sum of " + h();
            case 5: return "the number";
            case 6: return "the item that has " + ord() + " largest " + h();
            case 7: return "the " + h();
            case 8:
                return val_override.value() + " plus " +
                       (val2_override ? *val2_override : val2());
            case 9: return "its " + h() + " plus " + (val_override ? *val_override : val());
            default: throw std::logic_error(no_form("value"));
        }
    }

    // Interrogative form for the final node.
    std::string question(const std::optional<std::string>& val_override = std::nullopt,
                         const std::optional<std::string>& val2_override = std::nullopt) const {
        switch (prim_) {
            case 0:
                return "which items satisfy its " + h() + " is greater than " +
                       (val_override ? *val_override : val());
            case 1: return "which are the largest " + k() + " items for " + h();
            case 2:
                return "which items satisfy its " + h() + " is greater than " +
                       (val_override ? *val_override : col());
            case 3: return "what is the " + ord() + " largest " + h();
            case 4: return "what is the sum of " + h();
            case 5: return "what is the number";
            case 6: return "which item has the " + ord() + " largest " + h();
            case 7: return "what is the " + h();
            case 8:
                return "what is " + val_override.value() + " plus " +
                       (val2_override ? *val2_override : val2());
            default: throw std::logic_error(no_form("question"));
        }
    }

private:
    std::string no_form(const char* form) const {
        return std::string("question form '") + form + "' does not exist for f" +
               std::to_string(prim_);
    }
    std::string h() const { return p_->h.value(); }
    std::string col() const { return p_->col.value(); }
    std::string val() const { return std::to_string(p_->val.value()); }
    std::string val2() const { return std::to_string(p_->val2.value()); }
    std::string k() const { return std::to_string(p_->k.value()); }
    std::string ord() const { return ordinal(p_->k.value()); }

    int prim_;
    const NodeParams* p_;
};

}  // namespace qgen

// Composes the question from per-node fragments following the fixed template
// of the scheme's typed label. Throws on a label with no template, which
// would mean the enumeration admitted an unverbalizable composition.
inline std::string generate_question(const Scheme& s, const std::array<NodeParams, 4>& params) {
    using qgen::QNode;
    const QNode n0(s.assignment[0], params[0]);
    const QNode n1(s.assignment[1], params[1]);
    const QNode n2(s.assignment[2], params[2]);
    const QNode n3(s.assignment[3], params[3]);
    const std::string& label = s.typed_label;

    if (label == "0-AAA") {
        return "Among " + n1.scope() + " " + n1.link() + " " + n0.leaf_scope() + ", " +
               n3.question() + " " + n3.link() + " " + n2.scope() + " among them?";
    }
    if (label == "0-AAB") {
        const std::string v = n2.value() + " " + n2.link() + " " + n1.scope() + " " + n1.link() +
                              " " + n0.leaf_scope();
        return "Among all items, " + n3.question(v) + "?";
    }
    if (label == "0-ABA") {
        const std::string v = n1.value() + " " + n1.link() + " " + n0.leaf_scope();
        return n3.link() + " " + n2.scope(v) + ", " + n3.question() + "?";
    }
    if (label == "0-ABB") {
        const std::string v1 = n1.value() + " " + n1.link() + " " + n0.leaf_scope();
        const std::string v2 = n2.value(v1);
        return "Among all items, " + n3.question(v2) + "?";
    }
    if (label == "0-BAA") {
        return "Among " + n1.scope(n0.leaf_value()) + ", " + n3.question() + " " + n3.link() +
               " " + n2.scope() + " among them?";
    }
    if (label == "0-BAB") {
        const std::string v =
            n2.value() + " " + n2.link() + " " + n1.scope(n0.leaf_value());
        return "Among all items, " + n3.question(v) + "?";
    }
    if (label == "0-BBA") {
        const std::string v = n1.value(n0.leaf_value());
        return n3.link() + " " + n2.scope(v) + ", " + n3.question() + "?";
    }
    if (label == "0-BBB") {
        return "Among all items, " + n3.question(n2.value(n1.value(n0.leaf_value()))) + "?";
    }
    if (label == "1-ABA") {
        return "Among " + n0.leaf_scope() + ", " + n3.question() + " " + n3.link() + " " +
               n2.scope(n1.leaf_value()) + "?";
    }
    if (label == "1-BBB") {
        return "Among all items, " + n3.question(n2.value(n0.leaf_value(), n1.leaf_value())) +
               "?";
    }
    if (label == "2-AAB") {
        return "Among " + n1.scope() + " " + n1.link() + " " + n0.leaf_scope() + ", " +
               n3.question(n2.leaf_value()) + "?";
    }
    if (label == "2-ABA") {
        const std::string v = n1.value() + " " + n1.link() + " " + n0.leaf_scope();
        return "Among " + n2.leaf_scope() + ", " + n3.question(v) + "?";
    }
    if (label == "2-ABB") {
        const std::string v = n1.value() + " " + n1.link() + " " + n0.leaf_scope();
        return n3.question(v, n2.leaf_value()) + "?";
    }
    if (label == "2-BBA") {
        const std::string v = n1.value(n0.leaf_value());
        return "Among " + n2.leaf_scope() + ", " + n3.question(v) + "?";
    }
    if (label == "3-AAB") {
        const std::string v = n2.value() + " " + n2.link() + " group A";
        return "Assuming that group A contains " + n0.leaf_scope() + ", " + n3.question(v) +
               " " + n3.link() + " " + n1.scope() + " among group A?";
    }
    if (label == "3-ABB") {
        const std::string v1 = n1.value() + " " + n1.link() + " them";
        const std::string v2 = n2.value() + " " + n2.link() + " them";
        return "Among " + n0.leaf_scope() + ", " + n3.question(v1, v2) + "?";
    }
    if (label == "4-AAB") {
        const std::string v = n2.value() + " " + n2.link() + " them";
        return "Among " + n1.scope() + " " + n1.link() + " " + n0.leaf_scope() + ", " +
               n3.question(v) + "?";
    }
    if (label == "5-ABA") {
        const std::string v = n1.value() + " " + n1.link() + " them";
        return "Among " + n0.leaf_scope() + ", " + n3.question() + " " + n3.link() + " " +
               n2.scope(v) + " among them?";
    }
    throw std::logic_error("generate_question: no template for label " + label);
}

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

struct Sample {
    int sample_id = -1;  // equals scheme_id: one sample per scheme per corpus
    int scheme_id = -1;
    int graph_id = -1;
    Assignment assignment{};
    std::string typed_label;
    std::uint64_t seed = 0;  // the derived per-sample seed actually used
    std::array<NodeParams, 4> params;
    Program gold;            // callees are opaque primitive ids
    std::string gold_text;   // render_program(gold)
    std::string question;
    std::set<int> primitive_set;
};

inline Sample instantiate(const Scheme& s, std::uint64_t corpus_seed, const GenRanges& r = {}) {
    Sample smp;
    smp.sample_id = s.scheme_id;
    smp.scheme_id = s.scheme_id;
    smp.graph_id = s.graph_id;
    smp.assignment = s.assignment;
    smp.typed_label = s.typed_label;
    smp.seed = derive_seed(corpus_seed, stream::kSampleParams,
                           static_cast<std::uint64_t>(s.scheme_id));
    Rng rng(smp.seed);
    smp.params = draw_params(s, rng, r);
    smp.gold = emit_program(s, smp.params);
    smp.gold_text = render_program(smp.gold);
    smp.question = generate_question(s, smp.params);
    for (int prim : s.assignment) smp.primitive_set.insert(prim);
    return smp;
}

inline std::vector<Sample> generate_corpus(const std::vector<Scheme>& schemes,
                                           std::uint64_t corpus_seed, const GenRanges& r = {}) {
    std::vector<Sample> corpus;
    corpus.reserve(schemes.size());
    for (const auto& s : schemes) corpus.push_back(instantiate(s, corpus_seed, r));
    return corpus;
}

}  // namespace dedc
