#include "pstrust/auction.hpp"

#include <algorithm>
#include <numeric>

#include "pstrust/errors.hpp"

namespace pstrust {

namespace {

std::uint64_t saturation_high(int bid_bits) { return (std::uint64_t{1} << bid_bits) - 1; }

std::vector<std::uint32_t> identity_order(std::size_t n) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    return order;
}

void check_order(std::span<const std::uint32_t> order, std::size_t n, const char* what) {
    if (order.size() != n) throw InputError(std::string(what) + ": order length mismatch");
    std::vector<char> seen(n, 0);
    for (std::uint32_t v : order) {
        if (v >= n || seen[v]) throw InputError(std::string(what) + ": order is not a permutation");
        seen[v] = 1;
    }
}

}  // namespace

void validate_instance(const PlainInstance& inst) {
    if (inst.bid_bits < 2 || inst.bid_bits > 48) throw InputError("bid bit length out of range");
    if (inst.seller_bids.empty()) throw InputError("instance needs at least one seller");
    if (inst.buyer_bids.empty()) throw InputError("instance needs at least one buyer");
    if (inst.groups.empty()) throw InputError("instance needs at least one group");
    std::uint64_t cap = saturation_high(inst.bid_bits) - 1;  // 2^K - 2
    for (std::uint32_t b : inst.seller_bids)
        if (b < 1 || b > cap) throw InputError("seller bid outside [1, 2^K - 2]");
    for (std::uint32_t b : inst.buyer_bids)
        if (b < 1 || b > cap) throw InputError("buyer bid outside [1, 2^K - 2]");

    std::vector<char> seen(inst.buyer_bids.size(), 0);
    for (std::size_t g = 0; g < inst.groups.size(); ++g) {
        const BuyerGroup& group = inst.groups[g];
        if (group.id != g) throw InputError("group ids must be contiguous from 0");
        if (group.members.empty()) throw InputError("empty buyer group");
        std::uint32_t min_bid = 0;
        for (std::uint32_t m : group.members) {
            if (m >= inst.buyer_bids.size() || seen[m])
                throw InputError("groups must partition the buyers");
            seen[m] = 1;
            if (min_bid == 0 || inst.buyer_bids[m] < min_bid) min_bid = inst.buyer_bids[m];
        }
        if (group.size() * static_cast<std::uint64_t>(min_bid) > cap)
            throw InputError("group bid would reach the saturation value");
    }
    for (char s : seen)
        if (!s) throw InputError("groups must cover every buyer");
}

std::vector<std::uint64_t> compute_group_bids(const PlainInstance& inst) {
    std::vector<std::uint64_t> bids;
    bids.reserve(inst.groups.size());
    for (const BuyerGroup& group : inst.groups) {
        if (group.members.empty()) throw InputError("empty buyer group");
        std::uint64_t min_bid = 0;
        for (std::uint32_t m : group.members) {
            if (m >= inst.buyer_bids.size()) throw InputError("group member out of range");
            std::uint64_t b = inst.buyer_bids[m];
            if (min_bid == 0 || b < min_bid) min_bid = b;
        }
        bids.push_back(group.size() * min_bid);
    }
    return bids;
}

McafeeResult mcafee_auction(std::span<const std::uint32_t> seller_bids,
                            std::span<const std::uint32_t> buyer_bids) {
    if (seller_bids.empty() || buyer_bids.empty())
        throw InputError("mcafee_auction: empty side");
    std::vector<std::uint32_t> s_idx = identity_order(seller_bids.size());
    std::vector<std::uint32_t> b_idx = identity_order(buyer_bids.size());
    std::stable_sort(s_idx.begin(), s_idx.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return seller_bids[a] < seller_bids[b]; });
    std::stable_sort(b_idx.begin(), b_idx.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return buyer_bids[a] > buyer_bids[b]; });

    std::size_t pairs = std::min(seller_bids.size(), buyer_bids.size());
    std::size_t k = 0;  // largest 1-based index with ask <= bid
    for (std::size_t j = 0; j < pairs; ++j)
        if (seller_bids[s_idx[j]] <= buyer_bids[b_idx[j]]) k = j + 1;

    McafeeResult res;
    if (k == 0 || k == 1) {
        // No feasible pair, or only the price-setting pair: no trade.
        return res;
    }
    for (std::size_t j = 0; j + 1 < k; ++j) {
        res.winning_sellers.push_back(s_idx[j]);
        res.winning_buyers.push_back(b_idx[j]);
    }
    std::sort(res.winning_sellers.begin(), res.winning_sellers.end());
    std::sort(res.winning_buyers.begin(), res.winning_buyers.end());
    res.seller_price = seller_bids[s_idx[k - 1]];
    res.buyer_price = buyer_bids[b_idx[k - 1]];
    return res;
}

AuctionResult trust_plain_auction(const PlainInstance& inst,
                                  std::span<const std::uint32_t> seller_order,
                                  std::span<const std::uint32_t> group_order) {
    std::vector<std::uint32_t> s_order =
        seller_order.empty() ? identity_order(inst.seller_bids.size())
                             : std::vector<std::uint32_t>(seller_order.begin(), seller_order.end());
    std::vector<std::uint32_t> g_order =
        group_order.empty() ? identity_order(inst.groups.size())
                            : std::vector<std::uint32_t>(group_order.begin(), group_order.end());
    check_order(s_order, inst.seller_bids.size(), "seller order");
    check_order(g_order, inst.groups.size(), "group order");

    std::uint64_t high = saturation_high(inst.bid_bits);
    std::vector<std::uint64_t> group_bids = compute_group_bids(inst);

    // Working values in processing order; consumed entries saturate instead
    // of leaving the arrays, mirroring the secure pipeline bit-for-bit.
    std::vector<std::uint64_t> asks(s_order.size());
    for (std::size_t j = 0; j < s_order.size(); ++j) asks[j] = inst.seller_bids[s_order[j]];
    std::vector<std::uint64_t> offers(g_order.size());
    for (std::size_t j = 0; j < g_order.size(); ++j) offers[j] = group_bids[g_order[j]];

    struct Pair {
        std::size_t seller_pos;
        std::size_t group_pos;
        std::uint64_t ask;
        std::uint64_t offer;
    };
    std::vector<Pair> candidates;
    std::size_t limit = std::min(asks.size(), offers.size());
    for (std::size_t round = 0; round < limit; ++round) {
        std::size_t a = static_cast<std::size_t>(
            std::min_element(asks.begin(), asks.end()) - asks.begin());
        std::size_t b = static_cast<std::size_t>(
            std::max_element(offers.begin(), offers.end()) - offers.begin());
        if (offers[b] < asks[a]) break;
        candidates.push_back(Pair{a, b, asks[a], offers[b]});
        asks[a] = high;
        offers[b] = 0;
    }

    AuctionResult res;
    if (candidates.size() < 2) return res;  // the critical pair never trades
    const Pair& critical = candidates.back();
    res.selling_price = critical.ask;
    res.buying_group_price = critical.offer;
    for (std::size_t j = 0; j + 1 < candidates.size(); ++j) {
        std::uint32_t seller = s_order[candidates[j].seller_pos];
        std::uint32_t group = g_order[candidates[j].group_pos];
        res.winning_sellers.push_back(seller);
        res.winning_groups.push_back(group);
        const BuyerGroup& g = inst.groups[group];
        // Equal shares rounded up: the group as a whole never pays less than
        // its clearing price, which keeps the auction budget balanced, and a
        // winning member's bid always covers the rounded share.
        res.per_buyer_payments[group] =
            (*res.buying_group_price + g.size() - 1) / g.size();
        res.winning_buyers.insert(res.winning_buyers.end(), g.members.begin(), g.members.end());
    }
    std::sort(res.winning_sellers.begin(), res.winning_sellers.end());
    std::sort(res.winning_groups.begin(), res.winning_groups.end());
    std::sort(res.winning_buyers.begin(), res.winning_buyers.end());
    return res;
}

}  // namespace pstrust
