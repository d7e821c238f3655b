#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dedc/config.hpp"
#include "dedc/formal_core.hpp"
#include "dedc/hash.hpp"
#include "dedc/rng.hpp"
#include "dedc/sample_gen.hpp"

namespace dedc {

enum class Mode { DC, C };

inline const char* to_string(Mode m) { return m == Mode::DC ? "dc" : "c"; }

inline Mode mode_from_string(std::string_view s) {
    if (s == "dc") return Mode::DC;
    if (s == "c") return Mode::C;
    throw std::invalid_argument("unknown mode: " + std::string(s));
}

enum class GapSetting { Base, ZeroGap, FullGap };

inline const char* to_string(GapSetting g) {
    switch (g) {
        case GapSetting::Base: return "base";
        case GapSetting::ZeroGap: return "gap0";
        case GapSetting::FullGap: return "gap100";
    }
    return "?";
}

// A compositional gap exists when at least one demonstration's typed label
// differs from the test sample's.
inline bool has_gap(const Sample& test, const std::vector<const Sample*>& demos) {
    return std::any_of(demos.begin(), demos.end(), [&](const Sample* d) {
        return d->typed_label != test.typed_label;
    });
}

struct InfeasibleSelection : std::runtime_error {
    InfeasibleSelection(int sample_id, const std::string& constraint)
        : std::runtime_error("no demonstration triple for sample " + std::to_string(sample_id) +
                             " satisfies: " + constraint),
          sample_id(sample_id),
          constraint(constraint) {}
    int sample_id;
    std::string constraint;
};

namespace detail {

inline bool covers(const Sample& test, const std::array<const Sample*, 3>& demos) {
    // Every demo shares a primitive with the test sample, and together the
    // demos cover all of the test sample's primitives.
    for (const Sample* d : demos) {
        const bool shares = std::any_of(test.primitive_set.begin(), test.primitive_set.end(),
                                        [&](int p) { return d->primitive_set.count(p) > 0; });
        if (!shares) return false;
    }
    return std::all_of(test.primitive_set.begin(), test.primitive_set.end(), [&](int p) {
        return std::any_of(demos.begin(), demos.end(),
                           [&](const Sample* d) { return d->primitive_set.count(p) > 0; });
    });
}

inline bool gap_ok(const Sample& test, const std::array<const Sample*, 3>& demos,
                   GapSetting gap, bool strict_full) {
    switch (gap) {
        case GapSetting::Base:
            return true;
        case GapSetting::ZeroGap:
            return std::all_of(demos.begin(), demos.end(), [&](const Sample* d) {
                return d->typed_label == test.typed_label;
            });
        case GapSetting::FullGap:
            if (strict_full) {
                return std::all_of(demos.begin(), demos.end(), [&](const Sample* d) {
                    return d->typed_label != test.typed_label;
                });
            }
            return std::any_of(demos.begin(), demos.end(), [&](const Sample* d) {
                return d->typed_label != test.typed_label;
            });
    }
    return false;
}

}  // namespace detail

inline constexpr int kSelectionRejectionCap = 10000;

// Uniform choice among demonstration triples satisfying the coverage and gap
// constraints: rejection sampling over the admissible pool, falling back to an
// exhaustive uniform pick if the cap is hit. Demo ids are returned ascending.
// The RNG stream depends on (seed, sample), not on the mode, so both modes of
// one configuration reuse identical demonstrations.
inline std::array<int, 3> select_demos(const Sample& test, const std::vector<Sample>& corpus,
                                       GapSetting gap, std::uint64_t seed,
                                       bool strict_full = true) {
    // Label-based constraints restrict the admissible pool up front; this only
    // narrows rejection sampling to candidates the constraint check would
    // admit anyway, so the distribution over satisfying triples is unchanged.
    std::vector<const Sample*> pool;
    for (const auto& s : corpus) {
        if (s.sample_id == test.sample_id) continue;
        if (gap == GapSetting::ZeroGap && s.typed_label != test.typed_label) continue;
        if (gap == GapSetting::FullGap && strict_full && s.typed_label == test.typed_label) {
            continue;
        }
        pool.push_back(&s);
    }
    const char* constraint_desc =
        gap == GapSetting::ZeroGap
            ? "3 distinct same-label demonstrations jointly covering the test primitives"
        : gap == GapSetting::FullGap
            ? "3 distinct gap-introducing demonstrations jointly covering the test primitives"
            : "3 distinct demonstrations jointly covering the test primitives";
    if (pool.size() < 3) throw InfeasibleSelection(test.sample_id, constraint_desc);

    Rng rng(derive_seed(seed, stream::kDemoSelect, static_cast<std::uint64_t>(test.sample_id)));
    const auto n = static_cast<std::uint64_t>(pool.size());
    for (int iter = 0; iter < kSelectionRejectionCap; ++iter) {
        const auto a = rng.below(n), b = rng.below(n), c = rng.below(n);
        if (a == b || a == c || b == c) continue;
        const std::array<const Sample*, 3> cand = {pool[a], pool[b], pool[c]};
        if (!detail::covers(test, cand)) continue;
        if (!detail::gap_ok(test, cand, gap, strict_full)) continue;
        std::array<int, 3> ids = {cand[0]->sample_id, cand[1]->sample_id, cand[2]->sample_id};
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    // Exhaustive fallback: collect satisfying triples, then one uniform draw.
    std::vector<std::array<int, 3>> satisfying;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            for (std::size_t k = j + 1; k < pool.size(); ++k) {
                const std::array<const Sample*, 3> cand = {pool[i], pool[j], pool[k]};
                if (!detail::covers(test, cand)) continue;
                if (!detail::gap_ok(test, cand, gap, strict_full)) continue;
                satisfying.push_back(
                    {cand[0]->sample_id, cand[1]->sample_id, cand[2]->sample_id});
            }
        }
    }
    if (satisfying.empty()) throw InfeasibleSelection(test.sample_id, constraint_desc);
    auto ids = satisfying[rng.below(satisfying.size())];
    std::sort(ids.begin(), ids.end());
    return ids;
}

// ---------------------------------------------------------------------------
// Per-primitive demonstrations (mode C)
// ---------------------------------------------------------------------------

struct PrimitiveDemo {
    int prim = -1;
    std::string question;
    Program program;  // opaque callee ids
};

// Minimal single-operation samples, one per primitive of the test sample
// (ascending primitive id). add_c has no interrogative form, so its demo
// composes with a column filter, the smallest composition that verbalizes it.
inline std::vector<PrimitiveDemo> build_primitive_demos(const Sample& test,
                                                        std::uint64_t seed,
                                                        const GenRanges& r = {}) {
    std::vector<PrimitiveDemo> demos;
    for (int prim : test.primitive_set) {
        Rng rng(derive_seed(seed, stream::kPrimitiveDemo,
                            (static_cast<std::uint64_t>(test.sample_id) << 4) |
                                static_cast<std::uint64_t>(prim)));
        std::set<long long> used;
        auto fresh_attr = [&]() {
            for (;;) {
                const long long n = rng.range(r.attr_lo, r.attr_hi);
                if (used.insert(n).second) return "attr_" + std::to_string(n);
            }
        };

        PrimitiveDemo d;
        d.prim = prim;
        NodeParams p;
        switch (prim) {
            case 0: {
                p.h = fresh_attr();
                p.val = rng.range(r.num_lo, r.num_hi);
                d.program = {{std::string(kResultName), "f0",
                              {std::string(kAllViews), *p.h, std::to_string(*p.val)}}};
                break;
            }
            case 1: case 3: case 6: {
                p.h = fresh_attr();
                p.k = static_cast<int>(rng.range(r.k_lo, r.k_hi));
                d.program = {{std::string(kResultName), "f" + std::to_string(prim),
                              {std::string(kAllViews), *p.h, std::to_string(*p.k)}}};
                break;
            }
            case 2: {
                p.h = fresh_attr();
                p.col = fresh_attr();
                d.program = {{std::string(kResultName), "f2",
                              {std::string(kAllViews), *p.h, *p.col}}};
                break;
            }
            case 4: {
                p.h = fresh_attr();
                d.program = {{std::string(kResultName), "f4", {std::string(kAllViews), *p.h}}};
                break;
            }
            case 5: {
                d.program = {{std::string(kResultName), "f5", {std::string(kAllViews)}}};
                break;
            }
            case 8: {
                p.val = rng.range(r.num_lo, r.num_hi);
                p.val2 = rng.range(r.num_lo, r.num_hi);
                d.program = {{std::string(kResultName), "f8",
                              {std::to_string(*p.val), std::to_string(*p.val2)}}};
                d.question = "Among all items, " +
                             qgen::QNode(8, p).question(std::to_string(*p.val),
                                                        std::to_string(*p.val2)) +
                             "?";
                demos.push_back(std::move(d));
                continue;
            }
            case 9: {
                p.h = fresh_attr();
                p.val = rng.range(r.num_lo, r.num_hi);
                NodeParams pf2;
                pf2.h = fresh_attr();
                d.program = {{"col_1", "f9", {*p.h, std::to_string(*p.val)}},
                             {std::string(kResultName), "f2",
                              {std::string(kAllViews), *pf2.h, "col_1"}}};
                d.question = "Among all items, " +
                             qgen::QNode(2, pf2).question(qgen::QNode(9, p).leaf_value()) + "?";
                demos.push_back(std::move(d));
                continue;
            }
            default:
                throw std::logic_error("build_primitive_demos: unsupported primitive f" +
                                       std::to_string(prim));
        }
        d.question = "Among all items, " + qgen::QNode(prim, p).question() + "?";
        demos.push_back(std::move(d));
    }
    return demos;
}

// ---------------------------------------------------------------------------
// Tasks and prompts
// ---------------------------------------------------------------------------

struct Task {
    int task_id = -1;  // equals the test sample id within one run
    int test_sample_id = -1;
    Mode mode = Mode::DC;
    GapSetting gap = GapSetting::Base;
    NamingKind naming_kind = NamingKind::Opaque;
    std::array<int, 3> demo_ids{};
    bool gap_present = false;
    std::vector<PrimitiveDemo> primitive_demos;  // mode C only
    std::string prompt;
    std::string prompt_hash;
    // Carried along so evaluation does not need the corpus file.
    std::string question;
    Program gold;
    std::string gold_text;
};

// Deterministic prompt layout. Mode C differs from mode DC only by the
// primitive-demonstrations section inserted between the header and the
// demonstrations.
inline std::string assemble_prompt(const std::string& header,
                                   const std::vector<PrimitiveDemo>& primitive_demos,
                                   const std::vector<const Sample*>& demos,
                                   const Sample& test, const NamingScheme& naming) {
    std::string out = header;
    out += "\n";
    if (!primitive_demos.empty()) {
        out += "### Primitive demonstrations\n\n";
        for (const auto& d : primitive_demos) {
            out += "Question: " + d.question + "\n";
            out += "Expressions:\n" + render_program(d.program, naming) + "\n\n";
        }
    }
    out += "### Demonstrations\n\n";
    for (const Sample* d : demos) {
        out += "Question: " + d->question + "\n";
        out += "Expressions:\n" + render_program(d->gold, naming) + "\n\n";
    }
    out += "### Test\n\nQuestion: " + test.question + "\nExpressions:\n";
    return out;
}

// Builds one run: a task per corpus sample, ascending sample id.
inline std::vector<Task> build_run(const std::vector<Sample>& corpus, Mode mode, GapSetting gap,
                                   NamingKind naming_kind, const RunConfig& cfg) {
    const NamingScheme naming = cfg.naming(naming_kind);
    std::vector<const Sample*> by_id(corpus.size(), nullptr);
    for (const auto& s : corpus) {
        if (s.sample_id < 0 || s.sample_id >= static_cast<int>(corpus.size())) {
            throw std::invalid_argument("build_run: sample ids must be dense");
        }
        by_id[static_cast<std::size_t>(s.sample_id)] = &s;
    }

    std::vector<Task> tasks;
    tasks.reserve(corpus.size());
    for (const auto& test : corpus) {
        Task t;
        t.task_id = test.sample_id;
        t.test_sample_id = test.sample_id;
        t.mode = mode;
        t.gap = gap;
        t.naming_kind = naming_kind;
        t.demo_ids = select_demos(test, corpus, gap, cfg.seed, cfg.strict_full_gap);
        std::vector<const Sample*> demos;
        for (int id : t.demo_ids) demos.push_back(by_id[static_cast<std::size_t>(id)]);
        t.gap_present = has_gap(test, demos);
        if (mode == Mode::C) {
            t.primitive_demos = build_primitive_demos(test, cfg.seed, cfg.ranges);
        }
        t.prompt = assemble_prompt(cfg.prompt_header, t.primitive_demos, demos, test, naming);
        t.prompt_hash = sha256_hex(t.prompt);
        t.question = test.question;
        t.gold = test.gold;
        t.gold_text = test.gold_text;
        tasks.push_back(std::move(t));
    }
    return tasks;
}

}  // namespace dedc
