#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dedc/checker.hpp"
#include "dedc/formal_core.hpp"

namespace dedc {

// Heuristic attribution of failure modes to parsable-but-incorrect outputs.
// Advisory only: score tables never depend on these labels.

enum class ErrorKind {
    VariableMisuse,
    PrimitiveFiction,
    PrimitiveConfusion,
    Omission,
    Redundancy,
    IncorrectMeaning,
    Unparseable,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::VariableMisuse: return "variable_misuse";
        case ErrorKind::PrimitiveFiction: return "primitive_fiction";
        case ErrorKind::PrimitiveConfusion: return "primitive_confusion";
        case ErrorKind::Omission: return "omission";
        case ErrorKind::Redundancy: return "redundancy";
        case ErrorKind::IncorrectMeaning: return "incorrect_meaning";
        case ErrorKind::Unparseable: return "unparseable";
    }
    return "?";
}

struct ErrorLabel {
    ErrorKind kind;
    std::string evidence;
};

namespace detail {

// Surface token classes used for signature compatibility. Variable types are
// not inferred from name prefixes: models rename intermediates freely, so only
// the token class (literal vs. variable) is checkable against the registry.
enum class TokenClass { AllConstant, AttrLiteral, Integer, Variable, Other };

inline TokenClass token_class(const std::string& t) {
    if (t == kAllViews) return TokenClass::AllConstant;
    if (is_attr_literal(t)) return TokenClass::AttrLiteral;
    if (is_integer_token(t)) return TokenClass::Integer;
    if (is_identifier_token(t)) return TokenClass::Variable;
    return TokenClass::Other;
}

inline bool token_fits_slot(TokenClass c, ParamKind k) {
    switch (k) {
        case ParamKind::ViewSlot:
            return c == TokenClass::AllConstant || c == TokenClass::Variable;
        case ParamKind::AttrLiteral:
            return c == TokenClass::AttrLiteral;
        case ParamKind::ColumnSlot:
            return c == TokenClass::AttrLiteral || c == TokenClass::Variable;
        case ParamKind::NumberSlot:
        case ParamKind::KSlot:
            return c == TokenClass::Integer || c == TokenClass::Variable;
        case ParamKind::RowSlot:
            return c == TokenClass::Variable;
    }
    return false;
}

inline std::vector<std::string> sorted_args(const Expression& e) {
    auto v = e.args;
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace detail

// Applies the detectors in fixed priority and returns every label that fires,
// most significant first; callers treat the first as the primary label.
//
// (1) VariableMisuse: a reference to a not-yet-defined variable, or a
//     definition whose value never reaches "result".
// (2) PrimitiveFiction: a known callee used with the wrong arity or with a
//     token class no parameter position admits. Suppressed for expressions
//     that align with a gold expression up to the primitive id, where the
//     signature mismatch is a symptom of the confusion, not a separate error.
// (3) PrimitiveConfusion: an expression that matches a gold expression in
//     assigned name and argument multiset but calls a different primitive.
// (4) Omission: fewer expressions than gold and some gold step has no
//     argument-multiset counterpart.
// (5) Redundancy: more expressions than gold's minimal count.
// (6) IncorrectMeaning: an aligned pair (same lhs, same primitive) diverges in
//     argument order or antecedents, or nothing else fired.
inline std::vector<ErrorLabel> classify(const Program& gold, const Program& predicted,
                                        const NamingScheme& naming) {
    static const NamingScheme opaque = NamingScheme::opaque();
    std::vector<ErrorLabel> labels;

    auto resolve = [&](const Expression& e) { return naming.resolve(e.callee); };
    auto resolve_gold = [&](const Expression& e) { return opaque.resolve(e.callee); };

    // --- (1) VariableMisuse -------------------------------------------------
    {
        std::set<std::string> defined;
        for (const auto& e : predicted) {
            for (const auto& a : e.args) {
                if (is_variable_token(a) && !defined.count(a)) {
                    labels.push_back({ErrorKind::VariableMisuse,
                                      "reference to undefined variable '" + a +
                                          "' in definition of '" + e.lhs + "'"});
                }
            }
            defined.insert(e.lhs);
        }

        // Dangling definitions: walk the reference closure backward from the
        // last definition of "result"; sequential semantics, so a use binds to
        // the most recent prior definition.
        std::optional<std::size_t> result_idx;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            if (predicted[i].lhs == kResultName) result_idx = i;
        }
        if (result_idx) {
            std::vector<bool> live(predicted.size(), false);
            std::vector<std::size_t> work{*result_idx};
            live[*result_idx] = true;
            while (!work.empty()) {
                const std::size_t i = work.back();
                work.pop_back();
                for (const auto& a : predicted[i].args) {
                    if (!is_variable_token(a)) continue;
                    for (std::size_t j = i; j-- > 0;) {
                        if (predicted[j].lhs != a) continue;
                        if (!live[j]) {
                            live[j] = true;
                            work.push_back(j);
                        }
                        break;
                    }
                }
            }
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                if (!live[i]) {
                    labels.push_back({ErrorKind::VariableMisuse,
                                      "definition of '" + predicted[i].lhs +
                                          "' never reaches 'result'"});
                }
            }
        }
    }

    // Alignment helpers shared by (2), (3) and (6).
    auto confusion_partner = [&](const Expression& p) -> const Expression* {
        auto pid = resolve(p);
        for (const auto& g : gold) {
            auto gid = resolve_gold(g);
            if (!gid) continue;
            if (g.lhs == p.lhs && detail::sorted_args(g) == detail::sorted_args(p) &&
                (!pid || *gid != *pid)) {
                return &g;
            }
        }
        return nullptr;
    };

    // --- (2) PrimitiveFiction -----------------------------------------------
    for (const auto& p : predicted) {
        auto pid = resolve(p);
        if (!pid) continue;  // unknown callees surface as plain inequality
        const auto& spec = primitive(*pid);
        if (confusion_partner(p)) continue;  // aligned up to the primitive id: see (3)
        if (static_cast<int>(p.args.size()) != spec.arity()) {
            labels.push_back({ErrorKind::PrimitiveFiction,
                              "'" + p.callee + "' called with " +
                                  std::to_string(p.args.size()) + " arguments, expects " +
                                  std::to_string(spec.arity())});
            continue;
        }
        for (std::size_t pos = 0; pos < p.args.size(); ++pos) {
            const auto cls = detail::token_class(p.args[pos]);
            const auto kind = spec.params[pos];
            if (!detail::token_fits_slot(cls, kind)) {
                labels.push_back({ErrorKind::PrimitiveFiction,
                                  "argument '" + p.args[pos] + "' of '" + p.callee +
                                      "' does not fit " + std::string(to_string(kind)) +
                                      " at position " + std::to_string(pos)});
            }
        }
    }

    // --- (3) PrimitiveConfusion ---------------------------------------------
    for (const auto& p : predicted) {
        if (!resolve(p)) continue;
        if (const Expression* g = confusion_partner(p)) {
            labels.push_back({ErrorKind::PrimitiveConfusion,
                              "'" + p.callee + "' used where '" + g->callee +
                                  "' was expected on identical arguments"});
        }
    }

    // --- (4) Omission ---------------------------------------------------------
    if (predicted.size() < gold.size()) {
        for (const auto& g : gold) {
            const auto gargs = detail::sorted_args(g);
            const bool aligned =
                std::any_of(predicted.begin(), predicted.end(), [&](const Expression& p) {
                    return detail::sorted_args(p) == gargs;
                });
            if (!aligned) {
                labels.push_back({ErrorKind::Omission,
                                  "no expression corresponds to gold step '" +
                                      render_expression(g) + "'"});
            }
        }
    }

    // --- (5) Redundancy -------------------------------------------------------
    if (predicted.size() > gold.size()) {
        labels.push_back({ErrorKind::Redundancy,
                          std::to_string(predicted.size()) + " expressions against a gold "
                          "program of " + std::to_string(gold.size())});
    }

    // --- (6) IncorrectMeaning --------------------------------------------------
    {
        bool diverges = false;
        std::string evidence;
        for (const auto& p : predicted) {
            auto pid = resolve(p);
            if (!pid) continue;
            for (const auto& g : gold) {
                auto gid = resolve_gold(g);
                if (!gid || *gid != *pid || g.lhs != p.lhs) continue;
                if (g.args == p.args) continue;
                if (detail::sorted_args(g) == detail::sorted_args(p)) {
                    if (!primitive(*pid).swappable) {
                        diverges = true;
                        evidence = "argument order diverges in definition of '" + p.lhs + "'";
                    }
                } else {
                    diverges = true;
                    evidence = "antecedents diverge in definition of '" + p.lhs + "'";
                }
            }
        }
        if (diverges) {
            labels.push_back({ErrorKind::IncorrectMeaning, evidence});
        } else if (labels.empty()) {
            labels.push_back({ErrorKind::IncorrectMeaning,
                              "canonical expansions diverge with no more specific signature"});
        }
    }

    return labels;
}

inline std::vector<ErrorLabel> classify_malformed(const std::string& reason) {
    return {{ErrorKind::Unparseable, reason}};
}

}  // namespace dedc
