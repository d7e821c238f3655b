#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "dedc/scheme_enum.hpp"

using namespace dedc;

TEST_CASE("base graphs are the six frozen 4-node DAGs") {
    const auto& gs = base_graphs();
    REQUIRE(gs.size() == 6);
    using E = std::vector<std::pair<int, int>>;
    CHECK(gs[0].edges == E{{0, 1}, {1, 2}, {2, 3}});
    CHECK(gs[1].edges == E{{0, 2}, {1, 2}, {2, 3}});
    CHECK(gs[2].edges == E{{0, 1}, {1, 3}, {2, 3}});
    CHECK(gs[3].edges == E{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
    CHECK(gs[4].edges == E{{0, 1}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(gs[5].edges == E{{0, 1}, {0, 2}, {1, 2}, {2, 3}});

    // Structurally interchangeable node pairs (identical predecessor and
    // successor sets) drive the dedup rule.
    CHECK(gs[0].symmetric_pairs.empty());
    CHECK(gs[1].symmetric_pairs == std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(gs[2].symmetric_pairs.empty());
    CHECK(gs[3].symmetric_pairs == std::vector<std::pair<int, int>>{{1, 2}});
    CHECK(gs[4].symmetric_pairs.empty());
    CHECK(gs[5].symmetric_pairs.empty());
}

TEST_CASE("slot matching follows greedy lowest-position placement") {
    const auto& g0 = base_graphs()[0];

    // A value flowing into filter_gt lands in its number slot.
    auto m = is_valid_scheme(g0, {0, 1, 3, 0});
    REQUIRE(m.has_value());
    REQUIRE(m->size() == 3);
    CHECK((*m)[2].from == 2);
    CHECK((*m)[2].to == 3);
    CHECK((*m)[2].param == 2);

    // hop cannot consume anything, so a predecessor invalidates it.
    CHECK_FALSE(is_valid_scheme(g0, {0, 1, 7, 0}).has_value());
    // hop cannot be a leaf either (its row input must come from an edge).
    CHECK_FALSE(is_valid_scheme(g0, {7, 1, 3, 0}).has_value());
    // add cannot be a leaf.
    CHECK_FALSE(is_valid_scheme(g0, {8, 1, 3, 0}).has_value());
    // a view cannot flow into add.
    CHECK_FALSE(is_valid_scheme(g0, {0, 8, 3, 0}).has_value());

    // Two values flowing into add fill both number slots in position order.
    const auto& g1 = base_graphs()[1];
    auto m2 = is_valid_scheme(g1, {3, 4, 8, 0});
    REQUIRE(m2.has_value());
    CHECK((*m2)[0].param == 0);
    CHECK((*m2)[1].param == 1);
}

TEST_CASE("each exclusion rule fires exactly on its constructed violator") {
    const auto& g0 = base_graphs()[0];
    const auto& g1 = base_graphs()[1];

    // Adjacent threshold filters (rule 1): valid, excluded by rule 1 alone.
    REQUIRE(is_valid_scheme(g0, {0, 0, 1, 3}).has_value());
    CHECK(violated_rules(g0, {0, 0, 1, 3}) == std::set<int>{1});

    // add feeding add collapses to one sum (rule 1 as well).
    REQUIRE(is_valid_scheme(g0, {3, 8, 8, 0}).has_value());
    CHECK(violated_rules(g0, {3, 8, 8, 0}) == std::set<int>{1});

    // count whose sole input is top_k is the constant k (rule 2).
    REQUIRE(is_valid_scheme(g0, {0, 1, 5, 8}).has_value());
    CHECK(violated_rules(g0, {0, 1, 5, 8}) == std::set<int>{2});

    // Column-producing final node has no interrogative form (rule 3).
    REQUIRE(is_valid_scheme(g0, {1, 3, 8, 9}).has_value());
    CHECK(violated_rules(g0, {1, 3, 8, 9}) == std::set<int>{3});

    // Symmetric-pair dedup (rule 4): the unordered variant is excluded, the
    // ordered one survives.
    REQUIRE(is_valid_scheme(g1, {4, 3, 8, 0}).has_value());
    CHECK(violated_rules(g1, {4, 3, 8, 0}) == std::set<int>{4});
    CHECK(violated_rules(g1, {3, 4, 8, 0}).empty());

    // Non-strict ordering: equal primitives on a symmetric pair survive.
    CHECK(violated_rules(g1, {3, 3, 8, 0}).empty());
}

TEST_CASE("enumeration yields the frozen scheme set") {
    auto schemes = enumerate_schemes();
    REQUIRE(schemes.size() == 336);

    // Dense ascending ids in enumeration order.
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        CHECK(schemes[i].scheme_id == static_cast<int>(i));
    }

    std::map<int, std::size_t> per_graph;
    for (const auto& s : schemes) per_graph[s.graph_id]++;
    CHECK(per_graph == std::map<int, std::size_t>{
                           {0, 221}, {1, 26}, {2, 50}, {3, 23}, {4, 6}, {5, 10}});

    auto hist = label_histogram(schemes);
    const std::map<std::string, int> expected = {
        {"0-AAA", 60}, {"0-AAB", 24}, {"0-ABA", 40}, {"0-ABB", 16}, {"0-BAA", 24},
        {"0-BAB", 24}, {"0-BBA", 30}, {"0-BBB", 3},  {"1-ABA", 20}, {"1-BBB", 6},
        {"2-AAB", 12}, {"2-ABA", 8},  {"2-ABB", 24}, {"2-BBA", 6},  {"3-AAB", 8},
        {"3-ABB", 15}, {"4-AAB", 6},  {"5-ABA", 10}};
    CHECK(hist == expected);

    // Every enumerated scheme is valid and passes the exclusions; every label
    // matches its assignment's output types.
    for (const auto& s : schemes) {
        const auto& g = base_graphs()[static_cast<std::size_t>(s.graph_id)];
        auto m = is_valid_scheme(g, s.assignment);
        REQUIRE(m.has_value());
        CHECK(*m == s.slot_matching);
        CHECK(passes_exclusions(g, s.assignment));
        CHECK(s.typed_label == typed_label(s.graph_id, s.assignment));
    }
}

TEST_CASE("typed labels encode graph id and per-node output letters") {
    CHECK(typed_label(0, {0, 1, 3, 0}) == "0-AAB");
    CHECK(typed_label(0, {3, 8, 9, 2}) == "0-BBB");
    CHECK(typed_label(5, {1, 3, 0, 1}) == "5-ABA");
}

TEST_CASE("label inventory matches the frozen per-graph template sets") {
    auto schemes = enumerate_schemes();
    std::map<int, std::set<std::string>> letters_by_graph;
    for (const auto& s : schemes) {
        letters_by_graph[s.graph_id].insert(s.typed_label.substr(2));
    }
    CHECK(letters_by_graph[0] ==
          std::set<std::string>{"AAA", "AAB", "ABA", "ABB", "BAA", "BAB", "BBA", "BBB"});
    CHECK(letters_by_graph[1] == std::set<std::string>{"ABA", "BBB"});
    CHECK(letters_by_graph[2] == std::set<std::string>{"AAB", "ABA", "ABB", "BBA"});
    CHECK(letters_by_graph[3] == std::set<std::string>{"AAB", "ABB"});
    CHECK(letters_by_graph[4] == std::set<std::string>{"AAB"});
    CHECK(letters_by_graph[5] == std::set<std::string>{"ABA"});
}

TEST_CASE("enumeration is deterministic") {
    auto a = enumerate_schemes();
    auto b = enumerate_schemes();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].graph_id == b[i].graph_id);
        CHECK(a[i].assignment == b[i].assignment);
        CHECK(a[i].typed_label == b[i].typed_label);
    }
}
