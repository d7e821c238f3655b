#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "dedc/dedc.hpp"

namespace {

const std::vector<dedc::Scheme>& schemes() {
    static const std::vector<dedc::Scheme> s = dedc::enumerate_schemes();
    return s;
}

const std::vector<dedc::Sample>& corpus() {
    static const std::vector<dedc::Sample> c = dedc::generate_corpus(schemes(), 1);
    return c;
}

const dedc::RunConfig& cfg() {
    static const dedc::RunConfig c{};
    return c;
}

const std::vector<dedc::Task>& dc_base_run() {
    static const std::vector<dedc::Task> r = dedc::build_run(
        corpus(), dedc::Mode::DC, dedc::GapSetting::Base, dedc::NamingKind::Opaque, cfg());
    return r;
}

const std::vector<dedc::Task>& c_base_run() {
    static const std::vector<dedc::Task> r = dedc::build_run(
        corpus(), dedc::Mode::C, dedc::GapSetting::Base, dedc::NamingKind::Opaque, cfg());
    return r;
}

const dedc::Sample& by_id(int id) { return corpus()[static_cast<std::size_t>(id)]; }

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("mode and gap-setting names round-trip") {
    CHECK(std::string(dedc::to_string(dedc::Mode::DC)) == "dc");
    CHECK(std::string(dedc::to_string(dedc::Mode::C)) == "c");
    CHECK(dedc::mode_from_string("dc") == dedc::Mode::DC);
    CHECK(dedc::mode_from_string("c") == dedc::Mode::C);
    CHECK_THROWS_AS(dedc::mode_from_string("both"), std::invalid_argument);

    CHECK(std::string(dedc::to_string(dedc::GapSetting::Base)) == "base");
    CHECK(std::string(dedc::to_string(dedc::GapSetting::ZeroGap)) == "gap0");
    CHECK(std::string(dedc::to_string(dedc::GapSetting::FullGap)) == "gap100");

    STATIC_CHECK(dedc::kSelectionRejectionCap == 10000);
}

TEST_CASE("selected demos are distinct, sorted, in range, and never the test sample") {
    for (std::size_t i = 0; i < corpus().size(); i += 7) {
        const auto& test = corpus()[i];
        const auto ids = dedc::select_demos(test, corpus(), dedc::GapSetting::Base, cfg().seed);
        CAPTURE(test.sample_id);
        CHECK(ids[0] < ids[1]);
        CHECK(ids[1] < ids[2]);
        for (int id : ids) {
            CHECK(id >= 0);
            CHECK(id < static_cast<int>(corpus().size()));
            CHECK(id != test.sample_id);
        }
    }
}

TEST_CASE("demo selection is deterministic in the seed") {
    const auto& test = by_id(42);
    const auto a = dedc::select_demos(test, corpus(), dedc::GapSetting::Base, 9);
    const auto b = dedc::select_demos(test, corpus(), dedc::GapSetting::Base, 9);
    CHECK(a == b);

    // Different seeds must be able to pick different triples; across the whole
    // corpus at least one sample's choice diverges (deterministic given seeds).
    bool any_diff = false;
    for (std::size_t i = 0; i < corpus().size() && !any_diff; i += 5) {
        const auto& t = corpus()[i];
        any_diff = dedc::select_demos(t, corpus(), dedc::GapSetting::Base, 1) !=
                   dedc::select_demos(t, corpus(), dedc::GapSetting::Base, 2);
    }
    CHECK(any_diff);
}

TEST_CASE("every demo shares a primitive and the triple covers the test primitives") {
    for (const auto gap : {dedc::GapSetting::Base, dedc::GapSetting::FullGap}) {
        for (std::size_t i = 0; i < corpus().size(); i += 7) {
            const auto& test = corpus()[i];
            const auto ids = dedc::select_demos(test, corpus(), gap, cfg().seed);
            std::set<int> covered;
            for (int id : ids) {
                const auto& d = by_id(id);
                bool shares = false;
                for (int p : test.primitive_set) shares = shares || d.primitive_set.count(p) > 0;
                CAPTURE(test.sample_id, id);
                CHECK(shares);
                covered.insert(d.primitive_set.begin(), d.primitive_set.end());
            }
            for (int p : test.primitive_set) {
                CAPTURE(test.sample_id, p);
                CHECK(covered.count(p) == 1);
            }
        }
    }
}

TEST_CASE("zero-gap demos all share the test label") {
    int checked = 0;
    for (const auto& test : corpus()) {
        if (test.typed_label != "0-AAA") continue;
        const auto ids = dedc::select_demos(test, corpus(), dedc::GapSetting::ZeroGap, cfg().seed);
        std::vector<const dedc::Sample*> demos;
        for (int id : ids) {
            CHECK(by_id(id).typed_label == test.typed_label);
            demos.push_back(&by_id(id));
        }
        CHECK_FALSE(dedc::has_gap(test, demos));
        ++checked;
        if (checked >= 12) break;
    }
    CHECK(checked == 12);
}

TEST_CASE("strict full-gap demos all differ from the test label") {
    for (std::size_t i = 0; i < corpus().size(); i += 11) {
        const auto& test = corpus()[i];
        const auto ids =
            dedc::select_demos(test, corpus(), dedc::GapSetting::FullGap, cfg().seed, true);
        std::vector<const dedc::Sample*> demos;
        for (int id : ids) {
            CAPTURE(test.sample_id, id);
            CHECK(by_id(id).typed_label != test.typed_label);
            demos.push_back(&by_id(id));
        }
        CHECK(dedc::has_gap(test, demos));
    }
}

TEST_CASE("non-strict full gap requires only one differing label") {
    const auto& test = by_id(0);
    const auto ids =
        dedc::select_demos(test, corpus(), dedc::GapSetting::FullGap, cfg().seed, false);
    int differing = 0;
    for (int id : ids) differing += by_id(id).typed_label != test.typed_label ? 1 : 0;
    CHECK(differing >= 1);
}

TEST_CASE("zero-gap selection is infeasible for a three-member label") {
    // The smallest typed label has exactly three samples; excluding the test
    // sample leaves only two same-label candidates for a triple.
    std::vector<int> small_label_ids;
    for (const auto& s : corpus()) {
        if (s.typed_label == "0-BBB") small_label_ids.push_back(s.sample_id);
    }
    REQUIRE(small_label_ids.size() == 3);
    for (int id : small_label_ids) {
        const auto& test = by_id(id);
        try {
            dedc::select_demos(test, corpus(), dedc::GapSetting::ZeroGap, cfg().seed);
            FAIL("expected InfeasibleSelection for sample " << id);
        } catch (const dedc::InfeasibleSelection& e) {
            CHECK(e.sample_id == id);
            CHECK(e.constraint ==
                  "3 distinct same-label demonstrations jointly covering the test primitives");
            CHECK(contains(e.what(), "no demonstration triple for sample " + std::to_string(id)));
        }
    }
}

TEST_CASE("demo ids do not depend on the mode") {
    REQUIRE(dc_base_run().size() == c_base_run().size());
    for (std::size_t i = 0; i < dc_base_run().size(); ++i) {
        CAPTURE(i);
        CHECK(dc_base_run()[i].demo_ids == c_base_run()[i].demo_ids);
    }
}

TEST_CASE("primitive demos cover exactly the test primitives, ascending") {
    const auto& test = by_id(157);  // uses f2, f3, f8, f9
    REQUIRE(test.primitive_set == std::set<int>{2, 3, 8, 9});
    const auto demos = dedc::build_primitive_demos(test, cfg().seed);
    REQUIRE(demos.size() == 4);
    std::vector<int> prims;
    for (const auto& d : demos) prims.push_back(d.prim);
    CHECK(prims == std::vector<int>{2, 3, 8, 9});

    for (const auto& d : demos) {
        CAPTURE(d.prim);
        CHECK(d.question.rfind("Among all items, ", 0) == 0);
        CHECK(d.question.back() == '?');
        REQUIRE_FALSE(d.program.empty());
        CHECK(d.program.back().lhs == "result");
    }
}

TEST_CASE("the derived-column primitive demo is a two-step composition") {
    const auto& test = by_id(157);
    const auto demos = dedc::build_primitive_demos(test, cfg().seed);
    const auto it = std::find_if(demos.begin(), demos.end(),
                                 [](const dedc::PrimitiveDemo& d) { return d.prim == 9; });
    REQUIRE(it != demos.end());
    REQUIRE(it->program.size() == 2);
    CHECK(it->program[0].lhs == "col_1");
    CHECK(it->program[0].callee == "f9");
    CHECK(it->program[1].lhs == "result");
    CHECK(it->program[1].callee == "f2");
    REQUIRE(it->program[1].args.size() == 3);
    CHECK(it->program[1].args[0] == "all");
    CHECK(it->program[1].args[2] == "col_1");

    // Every other primitive's demo is a single statement.
    for (const auto& d : demos) {
        if (d.prim != 9) CHECK(d.program.size() == 1);
    }
}

TEST_CASE("single-operation primitive demos have the frozen shapes") {
    // A sample whose primitive set includes the count and arithmetic ops.
    const dedc::Sample* with_f5 = nullptr;
    const dedc::Sample* with_f8 = nullptr;
    for (const auto& s : corpus()) {
        if (!with_f5 && s.primitive_set.count(5)) with_f5 = &s;
        if (!with_f8 && s.primitive_set.count(8)) with_f8 = &s;
    }
    REQUIRE(with_f5 != nullptr);
    REQUIRE(with_f8 != nullptr);

    for (const auto& d : dedc::build_primitive_demos(*with_f5, cfg().seed)) {
        if (d.prim != 5) continue;
        REQUIRE(d.program.size() == 1);
        CHECK(d.program[0].callee == "f5");
        CHECK(d.program[0].args == std::vector<std::string>{"all"});
    }
    for (const auto& d : dedc::build_primitive_demos(*with_f8, cfg().seed)) {
        if (d.prim != 8) continue;
        REQUIRE(d.program.size() == 1);
        CHECK(d.program[0].callee == "f8");
        REQUIRE(d.program[0].args.size() == 2);
        for (const auto& a : d.program[0].args) CHECK(dedc::is_integer_token(a));
    }
}

TEST_CASE("primitive demos are deterministic in (seed, sample)") {
    const auto& test = by_id(157);
    const auto a = dedc::build_primitive_demos(test, 5);
    const auto b = dedc::build_primitive_demos(test, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].prim == b[i].prim);
        CHECK(a[i].question == b[i].question);
        CHECK(dedc::render_program(a[i].program) == dedc::render_program(b[i].program));
    }
}

TEST_CASE("prompt layout: header, sections, and test tail") {
    const auto& t_dc = dc_base_run()[0];
    const auto& t_c = c_base_run()[0];
    const auto& test = by_id(0);

    for (const auto* t : {&t_dc, &t_c}) {
        CHECK(t->prompt.rfind(cfg().prompt_header + "\n", 0) == 0);
        CHECK(contains(t->prompt, "### Demonstrations\n\n"));
        const std::string tail =
            "### Test\n\nQuestion: " + test.question + "\nExpressions:\n";
        REQUIRE(t->prompt.size() >= tail.size());
        CHECK(t->prompt.substr(t->prompt.size() - tail.size()) == tail);
        CHECK(t->prompt_hash == dedc::sha256_hex(t->prompt));
    }

    CHECK_FALSE(contains(t_dc.prompt, "### Primitive demonstrations"));
    CHECK(contains(t_c.prompt, "### Primitive demonstrations\n\n"));
    CHECK(t_c.prompt.find("### Primitive demonstrations") <
          t_c.prompt.find("### Demonstrations"));

    // Each demonstration appears as its question plus its rendered program.
    for (int id : t_dc.demo_ids) {
        const auto& d = by_id(id);
        CHECK(contains(t_dc.prompt, "Question: " + d.question + "\n"));
        CHECK(contains(t_dc.prompt, "Expressions:\n" + d.gold_text + "\n\n"));
    }
    // The test sample's own gold program is never part of the prompt.
    CHECK_FALSE(contains(t_dc.prompt, test.gold_text));
}

TEST_CASE("prompts render callees under the task naming scheme") {
    const auto cross_run = dedc::build_run(corpus(), dedc::Mode::DC, dedc::GapSetting::Base,
                                           dedc::NamingKind::CrossMapping, cfg());
    const auto anom_run = dedc::build_run(corpus(), dedc::Mode::DC, dedc::GapSetting::Base,
                                          dedc::NamingKind::Anomalous, cfg());
    // Sample 0 composes f0 and f1, and every demo shares a primitive with it,
    // so the renamed callees must show up in the prompt.
    const auto& cross = cross_run[0];
    CHECK((contains(cross.prompt, ":= top_k (") || contains(cross.prompt, ":= kth_max (")));

    const auto& anom = anom_run[0];
    CHECK((contains(anom.prompt, ":= filter_le (") || contains(anom.prompt, ":= bottom_k (")));

    // No opaque callee survives renaming (names like filter_gt also start
    // with "f", so test the exact ten opaque forms).
    for (int p = 0; p < 10; ++p) {
        const std::string opaque = ":= f" + std::to_string(p) + " (";
        CHECK_FALSE(contains(cross.prompt, opaque));
        CHECK_FALSE(contains(anom.prompt, opaque));
    }

    // Renaming the callees must not disturb selection or the carried gold.
    CHECK(cross.demo_ids == dc_base_run()[0].demo_ids);
    CHECK(cross.gold_text == by_id(0).gold_text);
}

TEST_CASE("build_run fills every task field consistently") {
    REQUIRE(dc_base_run().size() == corpus().size());
    for (std::size_t i = 0; i < dc_base_run().size(); i += 13) {
        const auto& t = dc_base_run()[i];
        const auto& s = corpus()[i];
        CAPTURE(i);
        CHECK(t.task_id == static_cast<int>(i));
        CHECK(t.test_sample_id == s.sample_id);
        CHECK(t.mode == dedc::Mode::DC);
        CHECK(t.gap == dedc::GapSetting::Base);
        CHECK(t.naming_kind == dedc::NamingKind::Opaque);
        CHECK(t.primitive_demos.empty());
        CHECK(t.question == s.question);
        CHECK(t.gold_text == s.gold_text);
        CHECK(dedc::render_program(t.gold) == s.gold_text);

        std::vector<const dedc::Sample*> demos;
        for (int id : t.demo_ids) demos.push_back(&by_id(id));
        CHECK(t.gap_present == dedc::has_gap(s, demos));
    }

    for (std::size_t i = 0; i < c_base_run().size(); i += 13) {
        const auto& t = c_base_run()[i];
        const auto& s = corpus()[i];
        std::vector<int> prims;
        for (const auto& d : t.primitive_demos) prims.push_back(d.prim);
        CHECK(prims == std::vector<int>(s.primitive_set.begin(), s.primitive_set.end()));
    }
}

TEST_CASE("base-setting tasks almost always carry a gap") {
    // Frozen regression for the default seed: with 18 labels over 336 samples
    // a uniformly chosen triple nearly always mixes labels.
    int gaps = 0;
    for (const auto& t : dc_base_run()) gaps += t.gap_present ? 1 : 0;
    CHECK(gaps == 335);
}

TEST_CASE("full-gap runs have a gap everywhere") {
    const auto run = dedc::build_run(corpus(), dedc::Mode::DC, dedc::GapSetting::FullGap,
                                     dedc::NamingKind::Opaque, cfg());
    CHECK(std::all_of(run.begin(), run.end(),
                      [](const dedc::Task& t) { return t.gap_present; }));
}

TEST_CASE("build_run rejects non-dense sample ids") {
    std::vector<dedc::Sample> broken = {corpus()[0], corpus()[1]};
    broken[1].sample_id = 5;
    CHECK_THROWS_AS(dedc::build_run(broken, dedc::Mode::DC, dedc::GapSetting::Base,
                                    dedc::NamingKind::Opaque, cfg()),
                    std::invalid_argument);
}
