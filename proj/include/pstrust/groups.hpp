#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pstrust {

struct BuyerLocation {
    std::uint32_t id;
    double x;
    double y;
};

struct BuyerGroup {
    std::uint32_t id;
    std::vector<std::uint32_t> members;  // buyer ids

    std::size_t size() const { return members.size(); }
    bool operator==(const BuyerGroup&) const = default;
};

// Undirected interference graph over buyer ids 0..n-1.
class ConflictGraph {
  public:
    explicit ConflictGraph(std::size_t node_count);

    std::size_t node_count() const { return adj_.size(); }
    std::size_t edge_count() const { return edges_; }
    void add_edge(std::uint32_t u, std::uint32_t v);
    bool adjacent(std::uint32_t u, std::uint32_t v) const;

  private:
    std::vector<std::vector<char>> adj_;
    std::size_t edges_ = 0;
};

// Edge between every pair of buyers whose distance is at most
// protection_distance (inclusive). Ids must be a permutation of 0..n-1.
ConflictGraph build_conflict_graph(std::span<const BuyerLocation> locations,
                                   double protection_distance);

// Partition into independent sets by repeated randomized maximal independent
// sets: each pass picks uniformly among the not-yet-grouped nodes, admits the
// pick, discards its neighbors for this pass, and repeats until the pass has
// no nodes left. Deterministic for a fixed (graph, seed).
std::vector<BuyerGroup> form_groups(const ConflictGraph& graph, std::uint64_t seed);

}  // namespace pstrust
