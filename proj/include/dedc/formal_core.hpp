#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dedc {

// ---------------------------------------------------------------------------
// Primitive registry
// ---------------------------------------------------------------------------

enum class OutputType { View, Value, Row, Column };

inline const char* to_string(OutputType t) {
    switch (t) {
        case OutputType::View: return "View";
        case OutputType::Value: return "Value";
        case OutputType::Row: return "Row";
        case OutputType::Column: return "Column";
    }
    return "?";
}

// What a parameter position accepts on the surface.
enum class ParamKind {
    ViewSlot,     // "all" or a View-typed variable
    AttrLiteral,  // attr_<digits> literal only
    ColumnSlot,   // attr_<digits> literal or a Column-typed variable
    NumberSlot,   // integer literal or a Value-typed variable
    KSlot,        // integer literal or a Value-typed variable
    RowSlot,      // Row-typed variable only
};

inline const char* to_string(ParamKind k) {
    switch (k) {
        case ParamKind::ViewSlot: return "View-slot";
        case ParamKind::AttrLiteral: return "Attr-literal";
        case ParamKind::ColumnSlot: return "Column-slot";
        case ParamKind::NumberSlot: return "Number-slot";
        case ParamKind::KSlot: return "K-slot";
        case ParamKind::RowSlot: return "Row-slot";
    }
    return "?";
}

// A parameter position that a predecessor's output may occupy when primitives
// are composed. `param` indexes into PrimitiveSpec::params.
struct ConsumableSlot {
    OutputType type;
    int param;
};

struct PrimitiveSpec {
    int id = -1;                          // 0..9; canonical surface name is "f<id>"
    std::string intuitive_name;           // e.g. "filter_gt"
    std::vector<ParamKind> params;        // surface signature
    OutputType output = OutputType::View;
    std::string category;                 // Filter | MathOp | Count | Other
    bool swappable = false;               // argument order irrelevant (only add)
    std::vector<ConsumableSlot> consumable;  // positions a composition edge may fill
    bool leaf_capable = false;            // may appear with all-literal arguments
    bool final_capable = false;           // has an interrogative surface form
    std::string gloss;

    std::string opaque_name() const { return "f" + std::to_string(id); }
    int arity() const { return static_cast<int>(params.size()); }
};

inline const std::vector<PrimitiveSpec>& primitive_registry() {
    static const std::vector<PrimitiveSpec> reg = [] {
        using OT = OutputType;
        using PK = ParamKind;
        std::vector<PrimitiveSpec> r(10);
        r[0] = {0, "filter_gt", {PK::ViewSlot, PK::ColumnSlot, PK::NumberSlot}, OT::View,
                "Filter", false, {{OT::View, 0}, {OT::Value, 2}}, true, true,
                "items of the view whose value under the column is greater than the value"};
        r[1] = {1, "top_k", {PK::ViewSlot, PK::AttrLiteral, PK::KSlot}, OT::View,
                "Filter", false, {{OT::View, 0}}, true, true,
                "the k items of the view with the largest values under the column"};
        r[2] = {2, "filter_gt_c", {PK::ViewSlot, PK::ColumnSlot, PK::ColumnSlot}, OT::View,
                "Filter", false, {{OT::View, 0}, {OT::Column, 2}}, true, true,
                "items of the view whose value under the first column is greater than its value "
                "under the second column"};
        r[3] = {3, "kth_max", {PK::ViewSlot, PK::AttrLiteral, PK::KSlot}, OT::Value,
                "Other", false, {{OT::View, 0}}, true, true,
                "the kth largest value under the column in the view"};
        r[4] = {4, "sum", {PK::ViewSlot, PK::AttrLiteral}, OT::Value,
                "Other", false, {{OT::View, 0}}, true, true,
                "the sum of values under the column in the view"};
        r[5] = {5, "count", {PK::ViewSlot}, OT::Value,
                "Count", false, {{OT::View, 0}}, true, true,
                "the number of items in the view"};
        r[6] = {6, "kth_argmax", {PK::ViewSlot, PK::AttrLiteral, PK::KSlot}, OT::Row,
                "Other", false, {{OT::View, 0}}, true, true,
                "the item of the view with the kth largest value under the column"};
        r[7] = {7, "hop", {PK::RowSlot, PK::AttrLiteral}, OT::Value,
                "Other", false, {}, false, true,
                "the value of the item under the column"};
        r[8] = {8, "add", {PK::NumberSlot, PK::NumberSlot}, OT::Value,
                "MathOp", true, {{OT::Value, 0}, {OT::Value, 1}}, false, true,
                "the sum of the two values"};
        r[9] = {9, "add_c", {PK::ColumnSlot, PK::NumberSlot}, OT::Column,
                "MathOp", false, {{OT::Value, 1}}, true, false,
                "a derived column: each item's value under the column plus the value"};
        return r;
    }();
    return reg;
}

inline const PrimitiveSpec& primitive(int id) {
    const auto& reg = primitive_registry();
    if (id < 0 || id >= static_cast<int>(reg.size())) {
        throw std::out_of_range("primitive: id out of range: " + std::to_string(id));
    }
    return reg[static_cast<std::size_t>(id)];
}

// ---------------------------------------------------------------------------
// Naming schemes
// ---------------------------------------------------------------------------

enum class NamingKind { Opaque, Anomalous, CrossMapping };

inline const char* to_string(NamingKind k) {
    switch (k) {
        case NamingKind::Opaque: return "opaque";
        case NamingKind::Anomalous: return "anomalous";
        case NamingKind::CrossMapping: return "cross_mapping";
    }
    return "?";
}

inline NamingKind naming_kind_from_string(std::string_view s) {
    if (s == "opaque") return NamingKind::Opaque;
    if (s == "anomalous") return NamingKind::Anomalous;
    if (s == "cross_mapping") return NamingKind::CrossMapping;
    throw std::invalid_argument("unknown naming kind: " + std::string(s));
}

// A bijection between primitive ids and surface names used in prompts/outputs.
class NamingScheme {
public:
    static NamingScheme opaque() {
        std::array<std::string, 10> t;
        for (int i = 0; i < 10; ++i) t[static_cast<std::size_t>(i)] = "f" + std::to_string(i);
        return NamingScheme(NamingKind::Opaque, t);
    }

    // Plausible but wrong: each name describes a different operation than the
    // primitive performs (default table; configurable).
    static NamingScheme anomalous() {
        return NamingScheme(NamingKind::Anomalous, default_anomalous_table());
    }

    // The intuitive names, permuted with no fixed point.
    static NamingScheme cross_mapping() {
        return NamingScheme(NamingKind::CrossMapping, default_cross_table());
    }

    static NamingScheme from_table(NamingKind kind, std::array<std::string, 10> table) {
        return NamingScheme(kind, std::move(table));
    }

    static const std::array<std::string, 10>& default_anomalous_table() {
        static const std::array<std::string, 10> t = {
            "filter_le", "bottom_k", "filter_le_c", "kth_min", "product",
            "width",     "kth_argmin", "drop",      "subtract", "subtract_c"};
        return t;
    }

    static const std::array<std::string, 10>& default_cross_table() {
        static const std::array<std::string, 10> t = {
            "top_k",  "kth_max", "filter_gt", "sum", "count",
            "kth_argmax", "hop", "add",       "add_c", "filter_gt_c"};
        return t;
    }

    NamingKind kind() const { return kind_; }

    const std::string& name_of(int id) const {
        if (id < 0 || id >= 10) throw std::out_of_range("NamingScheme::name_of: bad id");
        return table_[static_cast<std::size_t>(id)];
    }

    std::optional<int> resolve(std::string_view name) const {
        auto it = inverse_.find(name);
        if (it == inverse_.end()) return std::nullopt;
        return it->second;
    }

    const std::array<std::string, 10>& table() const { return table_; }

private:
    NamingScheme(NamingKind kind, std::array<std::string, 10> table)
        : kind_(kind), table_(std::move(table)) {
        std::set<std::string> seen;
        for (const auto& n : table_) {
            if (n.empty()) throw std::invalid_argument("NamingScheme: empty name");
            if (!seen.insert(n).second) {
                throw std::invalid_argument("NamingScheme: duplicate name: " + n);
            }
        }
        if (kind_ == NamingKind::Anomalous) {
            for (int i = 0; i < 10; ++i) {
                for (const auto& p : primitive_registry()) {
                    if (table_[static_cast<std::size_t>(i)] == p.intuitive_name) {
                        throw std::invalid_argument(
                            "NamingScheme: anomalous name collides with an intuitive name: " +
                            p.intuitive_name);
                    }
                }
            }
        }
        if (kind_ == NamingKind::CrossMapping) {
            std::set<std::string> intuitive;
            for (const auto& p : primitive_registry()) intuitive.insert(p.intuitive_name);
            for (int i = 0; i < 10; ++i) {
                const auto& n = table_[static_cast<std::size_t>(i)];
                if (!intuitive.count(n)) {
                    throw std::invalid_argument(
                        "NamingScheme: cross-mapping name is not an intuitive name: " + n);
                }
                if (n == primitive(i).intuitive_name) {
                    throw std::invalid_argument(
                        "NamingScheme: cross-mapping has a fixed point at f" + std::to_string(i));
                }
            }
        }
        for (int i = 0; i < 10; ++i) inverse_.emplace(table_[static_cast<std::size_t>(i)], i);
    }

    NamingKind kind_;
    std::array<std::string, 10> table_;
    std::map<std::string, int, std::less<>> inverse_;
};

// ---------------------------------------------------------------------------
// Expressions and programs
// ---------------------------------------------------------------------------

// One assignment statement: `lhs := callee (arg1, arg2, ...);`
// `callee` is a surface name; in stored gold programs it is always an opaque
// primitive id ("f0".."f9").
struct Expression {
    std::string lhs;
    std::string callee;
    std::vector<std::string> args;

    bool operator==(const Expression&) const = default;
};

using Program = std::vector<Expression>;

inline constexpr std::string_view kAllViews = "all";  // reserved full-table View constant
inline constexpr std::string_view kResultName = "result";

// Token classification helpers shared by the parser, checker and classifier.
inline bool is_integer_token(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

inline bool is_identifier_token(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s[0]);
    if (!std::isalpha(head) && s[0] != '_') return false;
    return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) {
        return std::isalnum(c) != 0 || c == '_';
    });
}

inline bool is_attr_literal(std::string_view s) {
    if (s.size() < 6 || s.substr(0, 5) != "attr_") return false;
    return is_integer_token(s.substr(5));
}

// A variable token: an identifier that is neither the reserved "all" constant
// nor an attribute literal.
inline bool is_variable_token(std::string_view s) {
    return is_identifier_token(s) && s != kAllViews && !is_attr_literal(s);
}

inline std::string render_expression(const Expression& e) {
    std::string out = e.lhs;
    out += " := ";
    out += e.callee;
    out += " (";
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        out += e.args[i];
    }
    out += ");";
    return out;
}

inline std::string render_program(const Program& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += '\n';
        out += render_expression(p[i]);
    }
    return out;
}

// Render with callees mapped from opaque primitive ids to `naming` surface
// names. Every callee must be an opaque id.
inline std::string render_program(const Program& p, const NamingScheme& naming) {
    static const NamingScheme opaque = NamingScheme::opaque();
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += '\n';
        auto id = opaque.resolve(p[i].callee);
        if (!id) {
            throw std::invalid_argument("render_program: callee is not a primitive id: " +
                                        p[i].callee);
        }
        Expression e = p[i];
        e.callee = naming.name_of(*id);
        out += render_expression(e);
    }
    return out;
}

// Re-map callees from one naming scheme to another. Throws if a callee is not
// resolvable under `from`.
inline Program apply_naming(const Program& p, const NamingScheme& from, const NamingScheme& to) {
    Program out;
    out.reserve(p.size());
    for (const auto& e : p) {
        auto id = from.resolve(e.callee);
        if (!id) {
            throw std::invalid_argument("apply_naming: callee not in source scheme: " + e.callee);
        }
        Expression n = e;
        n.callee = to.name_of(*id);
        out.push_back(std::move(n));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tolerant parser
// ---------------------------------------------------------------------------

struct SkippedSpan {
    std::size_t begin = 0;  // byte offsets into the input
    std::size_t end = 0;
};

struct ParseResult {
    Program program;
    std::vector<std::string> diagnostics;
    std::vector<SkippedSpan> skipped;

    bool no_program() const { return program.empty(); }
};

namespace detail {

class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }
    bool eof() const { return pos_ >= text_.size(); }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    // Reads an identifier or integer token; empty view on failure.
    std::string_view token() {
        if (eof()) return {};
        const std::size_t start = pos_;
        auto c = static_cast<unsigned char>(text_[pos_]);
        if (std::isdigit(c)) {
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            return text_.substr(start, pos_ - start);
        }
        if (std::isalpha(c) || text_[pos_] == '_') {
            while (pos_ < text_.size()) {
                auto d = static_cast<unsigned char>(text_[pos_]);
                if (!std::isalnum(d) && text_[pos_] != '_') break;
                ++pos_;
            }
            return text_.substr(start, pos_ - start);
        }
        return {};
    }

    bool literal(std::string_view lit) {
        if (text_.substr(pos_, lit.size()) != lit) return false;
        pos_ += lit.size();
        return true;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Scans free-form text for assignment statements of the grammar
//   ident := ident ( arg {, arg} ) ;
// where arg is an identifier or an integer literal. Anything between
// statements is recorded as a skipped span; a statement lacking only its
// trailing semicolon is accepted with a diagnostic. No statement at all
// yields an empty program and a "no program" diagnostic.
inline ParseResult parse_program(std::string_view text) {
    ParseResult result;
    std::size_t consumed_to = 0;  // end of the last accepted statement
    std::size_t cursor = 0;

    auto flush_skipped = [&](std::size_t upto) {
        // Record the gap [consumed_to, upto) if it contains non-whitespace.
        bool meaningful = false;
        for (std::size_t i = consumed_to; i < upto; ++i) {
            if (!std::isspace(static_cast<unsigned char>(text[i]))) {
                meaningful = true;
                break;
            }
        }
        if (meaningful) result.skipped.push_back({consumed_to, upto});
    };

    while (cursor < text.size()) {
        auto c = static_cast<unsigned char>(text[cursor]);
        if (!std::isalpha(c) && text[cursor] != '_') {
            ++cursor;
            continue;
        }
        detail::Scanner s(text);
        s.seek(cursor);
        const std::size_t stmt_begin = s.pos();

        Expression e;
        auto lhs = s.token();
        if (lhs.empty() || !is_identifier_token(lhs)) {
            ++cursor;
            continue;
        }
        s.skip_ws();
        if (!s.literal(":=")) {
            cursor = stmt_begin + lhs.size();
            continue;
        }
        s.skip_ws();
        auto callee = s.token();
        if (callee.empty() || !is_identifier_token(callee)) {
            cursor = stmt_begin + 1;
            continue;
        }
        s.skip_ws();
        if (!s.literal("(")) {
            cursor = stmt_begin + 1;
            continue;
        }
        std::vector<std::string> args;
        bool args_ok = true;
        s.skip_ws();
        if (!s.literal(")")) {
            for (;;) {
                s.skip_ws();
                auto a = s.token();
                if (a.empty()) {
                    args_ok = false;
                    break;
                }
                args.emplace_back(a);
                s.skip_ws();
                if (s.literal(",")) continue;
                if (s.literal(")")) break;
                args_ok = false;
                break;
            }
        }
        if (!args_ok) {
            cursor = stmt_begin + 1;
            continue;
        }
        e.lhs = std::string(lhs);
        e.callee = std::string(callee);
        e.args = std::move(args);

        s.skip_ws();
        if (!s.literal(";")) {
            result.diagnostics.push_back("missing semicolon after definition of '" + e.lhs + "'");
        }
        flush_skipped(stmt_begin);
        result.program.push_back(std::move(e));
        consumed_to = s.pos();
        cursor = s.pos();
    }
    flush_skipped(text.size());

    if (result.program.empty()) {
        result.diagnostics.push_back("no program: no assignment statement found");
    }
    return result;
}

}  // namespace dedc
