#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dedc/formal_core.hpp"

namespace dedc {

// ---------------------------------------------------------------------------
// Canonical final-expression expansion
// ---------------------------------------------------------------------------

// Substituting definitions into uses turns a program into the set of fully
// inlined call expressions its "result" may denote. The set has more than one
// element exactly when add appears: its two arguments are interchangeable, so
// both orders are generated and two programs are equivalent iff their sets
// intersect. Growth is bounded by 2^(number of adds); a safety cap guards
// against adversarial outputs.
inline constexpr std::size_t kExpansionCap = 4096;

namespace detail {

struct Expansion {
    std::map<std::string, std::set<std::string>> defs;  // later definitions shadow earlier
    std::vector<std::string> diagnostics;
    bool truncated = false;
};

inline void expand_statement(Expansion& ex, const Expression& e, const NamingScheme& naming) {
    // Callees resolve to canonical primitive ids; unknown callees keep their
    // surface name so the mismatch shows up as plain inequality.
    std::string callee = e.callee;
    bool swappable = false;
    if (auto id = naming.resolve(e.callee)) {
        callee = primitive(*id).opaque_name();
        swappable = primitive(*id).swappable;
    } else {
        ex.diagnostics.push_back("unknown callee '" + e.callee + "'");
    }

    // Each argument denotes a set of strings: the expansion of a defined
    // variable, or the token itself (literals, "all", never-defined names).
    std::vector<const std::set<std::string>*> arg_sets;
    std::vector<std::set<std::string>> own;
    own.reserve(e.args.size());
    for (const auto& a : e.args) {
        auto it = ex.defs.find(a);
        if (it != ex.defs.end()) {
            arg_sets.push_back(&it->second);
        } else {
            if (is_variable_token(a)) {
                ex.diagnostics.push_back("unresolved variable '" + a + "' in definition of '" +
                                         e.lhs + "'");
            }
            own.emplace_back(std::set<std::string>{a});
            arg_sets.push_back(&own.back());
        }
    }

    std::vector<std::vector<std::string>> tuples{{}};
    for (const auto* s : arg_sets) {
        std::vector<std::vector<std::string>> next;
        for (const auto& t : tuples) {
            for (const auto& choice : *s) {
                auto nt = t;
                nt.push_back(choice);
                next.push_back(std::move(nt));
                if (next.size() > kExpansionCap) {
                    ex.truncated = true;
                    break;
                }
            }
            if (ex.truncated) break;
        }
        tuples = std::move(next);
        if (ex.truncated) break;
    }

    std::set<std::string> variants;
    auto render = [&](const std::vector<std::string>& args) {
        std::string out = callee;
        out += " (";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += ", ";
            out += args[i];
        }
        out += ")";
        return out;
    };
    for (const auto& t : tuples) {
        variants.insert(render(t));
        if (swappable && t.size() == 2 && t[0] != t[1]) {
            variants.insert(render({t[1], t[0]}));
        }
        if (variants.size() > kExpansionCap) {
            ex.truncated = true;
            break;
        }
    }
    ex.defs[e.lhs] = std::move(variants);  // assignment shadows any earlier definition
}

inline Expansion expand(const Program& p, const NamingScheme& naming) {
    Expansion ex;
    for (const auto& e : p) expand_statement(ex, e, naming);
    return ex;
}

}  // namespace detail

// The set of canonical strings the program's "result" may denote, with
// callees resolved through `naming` to primitive ids. Empty set iff the
// program never defines "result".
inline std::set<std::string> canonical_final(const Program& p,
                                             const NamingScheme& naming = NamingScheme::opaque()) {
    auto ex = detail::expand(p, naming);
    auto it = ex.defs.find(std::string(kResultName));
    if (it == ex.defs.end()) return {};
    return it->second;
}

// ---------------------------------------------------------------------------
// Judging
// ---------------------------------------------------------------------------

enum class VerdictStatus { Correct, Incorrect, Malformed };

inline const char* to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Correct: return "correct";
        case VerdictStatus::Incorrect: return "incorrect";
        case VerdictStatus::Malformed: return "malformed";
    }
    return "?";
}

struct Verdict {
    VerdictStatus status = VerdictStatus::Malformed;
    Program extracted;                             // statements recovered from the output
    std::set<std::string> canonical_predicted;
    std::set<std::string> canonical_gold;
    std::vector<std::string> diagnostics;
};

// Compares a model's raw output against the gold program. The output is
// judged Malformed when no statement parses or "result" is never defined;
// otherwise Correct iff the canonical expansions intersect. Extra but
// consistent intermediate definitions therefore do not penalize, argument
// order of add does not matter, and any other divergence is Incorrect.
inline Verdict judge(const Program& gold, const std::string& output_text,
                     const NamingScheme& naming) {
    Verdict v;
    v.canonical_gold = canonical_final(gold);

    auto parsed = parse_program(output_text);
    v.extracted = parsed.program;
    v.diagnostics = parsed.diagnostics;
    if (parsed.program.empty()) {
        v.status = VerdictStatus::Malformed;
        return v;
    }

    auto ex = detail::expand(parsed.program, naming);
    for (auto& d : ex.diagnostics) v.diagnostics.push_back(std::move(d));
    if (ex.truncated) v.diagnostics.push_back("expansion truncated at cap");
    auto it = ex.defs.find(std::string(kResultName));
    if (it == ex.defs.end()) {
        v.status = VerdictStatus::Malformed;
        v.diagnostics.push_back("no definition of 'result'");
        return v;
    }
    v.canonical_predicted = it->second;

    const auto& small = v.canonical_predicted.size() <= v.canonical_gold.size()
                            ? v.canonical_predicted
                            : v.canonical_gold;
    const auto& large = &small == &v.canonical_predicted ? v.canonical_gold
                                                         : v.canonical_predicted;
    const bool hit = std::any_of(small.begin(), small.end(),
                                 [&](const std::string& s) { return large.count(s) > 0; });
    v.status = hit ? VerdictStatus::Correct : VerdictStatus::Incorrect;
    return v;
}

}  // namespace dedc
