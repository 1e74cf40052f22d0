#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "pstrust/errors.hpp"
#include "pstrust/groups.hpp"

using namespace pstrust;

namespace {

std::vector<BuyerLocation> random_locations(std::mt19937_64& rng, std::size_t n, double extent) {
    std::vector<BuyerLocation> locs;
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(rng() % 10000) / 10000.0 * extent;
        double y = static_cast<double>(rng() % 10000) / 10000.0 * extent;
        locs.push_back(BuyerLocation{static_cast<std::uint32_t>(i), x, y});
    }
    return locs;
}

void check_partition_of_independent_sets(const ConflictGraph& graph,
                                         const std::vector<BuyerGroup>& groups) {
    std::set<std::uint32_t> seen;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        CHECK(groups[g].id == g);
        CHECK(!groups[g].members.empty());
        CHECK(std::is_sorted(groups[g].members.begin(), groups[g].members.end()));
        for (std::size_t i = 0; i < groups[g].members.size(); ++i) {
            CHECK(seen.insert(groups[g].members[i]).second);
            for (std::size_t j = i + 1; j < groups[g].members.size(); ++j)
                CHECK(!graph.adjacent(groups[g].members[i], groups[g].members[j]));
        }
    }
    CHECK(seen.size() == graph.node_count());
}

}  // namespace

TEST_CASE("conflict graph construction validates its input") {
    ConflictGraph g(3);
    CHECK(g.node_count() == 3);
    CHECK(g.edge_count() == 0);
    g.add_edge(0, 1);
    g.add_edge(1, 0);  // duplicate direction, same edge
    CHECK(g.edge_count() == 1);
    CHECK(g.adjacent(0, 1));
    CHECK(g.adjacent(1, 0));
    CHECK(!g.adjacent(0, 2));
    CHECK_THROWS_AS(g.add_edge(1, 1), InputError);
    CHECK_THROWS_AS(g.add_edge(0, 3), InputError);
    CHECK_THROWS_AS(g.adjacent(3, 0), InputError);

    std::vector<BuyerLocation> dup{{0, 0, 0}, {0, 1, 1}};
    CHECK_THROWS_AS(build_conflict_graph(dup, 1.0), InputError);
    std::vector<BuyerLocation> gap{{0, 0, 0}, {2, 1, 1}};
    CHECK_THROWS_AS(build_conflict_graph(gap, 1.0), InputError);
    CHECK_THROWS_AS(build_conflict_graph(dup, -1.0), InputError);
}

TEST_CASE("conflict distance is inclusive at the boundary") {
    std::vector<BuyerLocation> locs{{0, 0.0, 0.0}, {1, 3.0, 4.0}, {2, 100.0, 100.0}};
    ConflictGraph at = build_conflict_graph(locs, 5.0);  // distance exactly 5
    CHECK(at.adjacent(0, 1));
    CHECK(!at.adjacent(0, 2));
    ConflictGraph below = build_conflict_graph(locs, 4.999);
    CHECK(!below.adjacent(0, 1));
}

TEST_CASE("grouping is deterministic per seed and varies across seeds") {
    std::mt19937_64 rng(17);
    auto locs = random_locations(rng, 40, 100.0);
    ConflictGraph graph = build_conflict_graph(locs, 30.0);

    std::vector<BuyerGroup> a = form_groups(graph, 7);
    std::vector<BuyerGroup> b = form_groups(graph, 7);
    CHECK(a == b);

    bool any_difference = false;
    for (std::uint64_t seed = 8; seed < 16 && !any_difference; ++seed)
        any_difference = form_groups(graph, seed) != a;
    CHECK(any_difference);
}

TEST_CASE("groups partition the buyers into independent sets") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 1 + rng() % 60;
        auto locs = random_locations(rng, n, 100.0);
        double distance = static_cast<double>(rng() % 60);
        ConflictGraph graph = build_conflict_graph(locs, distance);
        std::vector<BuyerGroup> groups = form_groups(graph, rng());
        check_partition_of_independent_sets(graph, groups);
    }
}

TEST_CASE("extreme graphs form the expected group shapes") {
    // No conflicts at all: one group holding everyone.
    ConflictGraph empty(6);
    std::vector<BuyerGroup> one = form_groups(empty, 3);
    REQUIRE(one.size() == 1);
    CHECK(one[0].members == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5});

    // Complete graph: nobody can share, n singleton groups.
    ConflictGraph complete(5);
    for (std::uint32_t i = 0; i < 5; ++i)
        for (std::uint32_t j = i + 1; j < 5; ++j) complete.add_edge(i, j);
    std::vector<BuyerGroup> singles = form_groups(complete, 3);
    CHECK(singles.size() == 5);
    for (const BuyerGroup& g : singles) CHECK(g.members.size() == 1);

    // A single node still forms its own group.
    ConflictGraph lone(1);
    std::vector<BuyerGroup> solo = form_groups(lone, 1);
    REQUIRE(solo.size() == 1);
    CHECK(solo[0].members == std::vector<std::uint32_t>{0});

    // The empty graph has no groups.
    ConflictGraph none(0);
    CHECK(form_groups(none, 1).empty());
}

TEST_CASE("every pass takes a maximal independent set") {
    // Path graph 0-1-2-3-4: whatever the seed picks, the pass must keep
    // admitting nodes until none remain, so no group can be extended by a
    // node from a later group without a conflict.
    ConflictGraph path(5);
    for (std::uint32_t i = 0; i + 1 < 5; ++i) path.add_edge(i, i + 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::vector<BuyerGroup> groups = form_groups(path, seed);
        check_partition_of_independent_sets(path, groups);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            for (std::size_t later = g + 1; later < groups.size(); ++later) {
                for (std::uint32_t candidate : groups[later].members) {
                    bool conflicts = false;
                    for (std::uint32_t member : groups[g].members)
                        if (path.adjacent(member, candidate)) conflicts = true;
                    CHECK(conflicts);  // otherwise group g was not maximal
                }
            }
        }
    }
}
