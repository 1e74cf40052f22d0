#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "pstrust/groups.hpp"

namespace pstrust {

// Plaintext view of one auction: the correctness oracle operates on this and
// the secure pipeline must reproduce its results exactly.
struct PlainInstance {
    std::vector<std::uint32_t> seller_bids;
    std::vector<std::uint32_t> buyer_bids;
    std::vector<BuyerGroup> groups;  // partition of buyer ids
    int bid_bits;                    // bids live in [1, 2^bid_bits - 2]
};

// Throws InputError when bids leave [1, 2^K - 2], the groups fail to
// partition the buyers, or any group bid would reach the saturation value.
void validate_instance(const PlainInstance& inst);

// n_i * (minimum member bid) per group, in group id order.
std::vector<std::uint64_t> compute_group_bids(const PlainInstance& inst);

struct McafeeResult {
    std::vector<std::uint32_t> winning_sellers;  // original ids, ascending
    std::vector<std::uint32_t> winning_buyers;
    std::optional<std::uint32_t> seller_price;   // present iff winners exist
    std::optional<std::uint32_t> buyer_price;

    bool operator==(const McafeeResult&) const = default;
};

// Single-unit double auction: sellers sorted non-decreasing, buyers sorted
// non-increasing (both stable with original-index tiebreak), k the largest
// index where the seller ask does not exceed the buyer bid; the first k-1
// pairs trade at the k-th pair's prices.
McafeeResult mcafee_auction(std::span<const std::uint32_t> seller_bids,
                            std::span<const std::uint32_t> buyer_bids);

struct AuctionResult {
    std::vector<std::uint32_t> winning_sellers;  // original ids, ascending
    std::vector<std::uint32_t> winning_groups;
    std::vector<std::uint32_t> winning_buyers;
    std::optional<std::uint64_t> selling_price;        // present iff winners exist
    std::optional<std::uint64_t> buying_group_price;
    // Winning group id -> equal per-member share, price / size rounded up so
    // the group always covers its clearing price.
    std::map<std::uint32_t, std::uint64_t> per_buyer_payments;

    bool operator==(const AuctionResult&) const = default;
};

// Reference auction over group bids: repeatedly pair the lowest remaining
// seller ask with the highest remaining group bid while the ask does not
// exceed the bid; the last pair formed is critical and sets both prices, and
// the pairs before it win. Ties pick the earliest position in the supplied
// processing orders (original order when empty). Matching the secure
// pipeline, consumed sellers are replaced by the saturation ask 2^K - 1 and
// consumed groups by the saturation bid 0 rather than being removed.
AuctionResult trust_plain_auction(const PlainInstance& inst,
                                  std::span<const std::uint32_t> seller_order = {},
                                  std::span<const std::uint32_t> group_order = {});

}  // namespace pstrust
