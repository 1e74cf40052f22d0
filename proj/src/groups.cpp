#include "pstrust/groups.hpp"

#include <algorithm>
#include <random>

#include "pstrust/errors.hpp"

namespace pstrust {

ConflictGraph::ConflictGraph(std::size_t node_count)
    : adj_(node_count, std::vector<char>(node_count, 0)) {}

void ConflictGraph::add_edge(std::uint32_t u, std::uint32_t v) {
    if (u >= adj_.size() || v >= adj_.size()) throw InputError("conflict graph: node out of range");
    if (u == v) throw InputError("conflict graph: self loop");
    if (!adj_[u][v]) ++edges_;
    adj_[u][v] = adj_[v][u] = 1;
}

bool ConflictGraph::adjacent(std::uint32_t u, std::uint32_t v) const {
    if (u >= adj_.size() || v >= adj_.size()) throw InputError("conflict graph: node out of range");
    return adj_[u][v] != 0;
}

ConflictGraph build_conflict_graph(std::span<const BuyerLocation> locations,
                                   double protection_distance) {
    if (protection_distance < 0) throw InputError("protection distance must be non-negative");
    std::size_t n = locations.size();
    std::vector<char> seen(n, 0);
    for (const auto& loc : locations) {
        if (loc.id >= n || seen[loc.id]) throw InputError("buyer ids must be a permutation of 0..n-1");
        seen[loc.id] = 1;
    }
    ConflictGraph g(n);
    double limit = protection_distance * protection_distance;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dx = locations[i].x - locations[j].x;
            double dy = locations[i].y - locations[j].y;
            if (dx * dx + dy * dy <= limit) g.add_edge(locations[i].id, locations[j].id);
        }
    }
    return g;
}

std::vector<BuyerGroup> form_groups(const ConflictGraph& graph, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::size_t n = graph.node_count();
    std::vector<std::uint32_t> ungrouped(n);
    for (std::size_t i = 0; i < n; ++i) ungrouped[i] = static_cast<std::uint32_t>(i);

    std::vector<BuyerGroup> groups;
    while (!ungrouped.empty()) {
        // One pass: a maximal independent set over the remaining nodes.
        std::vector<std::uint32_t> pool = ungrouped;
        BuyerGroup group;
        group.id = static_cast<std::uint32_t>(groups.size());
        while (!pool.empty()) {
            // Modulo draw: deterministic across standard library versions.
            std::size_t pick = static_cast<std::size_t>(rng() % pool.size());
            std::uint32_t node = pool[pick];
            group.members.push_back(node);
            std::vector<std::uint32_t> next;
            next.reserve(pool.size());
            for (std::uint32_t other : pool)
                if (other != node && !graph.adjacent(node, other)) next.push_back(other);
            pool = std::move(next);
        }
        std::sort(group.members.begin(), group.members.end());
        std::vector<std::uint32_t> rest;
        rest.reserve(ungrouped.size() - group.members.size());
        for (std::uint32_t node : ungrouped)
            if (!std::binary_search(group.members.begin(), group.members.end(), node))
                rest.push_back(node);
        ungrouped = std::move(rest);
        groups.push_back(std::move(group));
    }
    return groups;
}

}  // namespace pstrust
