#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pstrust/auction.hpp"
#include "pstrust/ebv.hpp"
#include "pstrust/transport.hpp"

namespace pstrust {

// Two-party session: the auctioneer holds only encrypted bids and drives the
// computation; the agent holds the keypair, answers masked-product queries,
// and tracks winner marks. Neither party alone can recover the bids.

struct SessionConfig {
    int key_bits = 512;
    // Seeded, reproducible permutations when set; otherwise drawn from the
    // cryptographic source.
    std::optional<std::uint64_t> perm_seed;
    // Disabling the seller/group permutation is a test hook for the leakage
    // harness's negative control. Never disable it in a real session.
    bool permute = true;
    // Keep raw copies of every frame the auctioneer receives (audit input).
    bool record_auctioneer_inbound = false;
    // Keep the masked plaintexts the agent decrypts (uniformity checks).
    bool capture_agent_masks = false;
};

struct TranscriptStats {
    ChannelStats channel;
    std::uint64_t product_calls = 0;
    std::uint32_t rounds = 0;  // pair rounds including the stopping one
    double wall_ms = 0.0;
};

// Bidder-side validation and encoding: every bid must lie strictly between
// the saturation values, i.e. in [1, 2^K - 2]. InputError names the first
// offending bidder.
std::vector<EbvBid> submit_bids(const PublicKey& pk, std::span<const std::uint32_t> bids,
                                int ebv_bits);

// Group bid per group: (size) * (minimum member bid), both factors encrypted
// throughout; group order follows the input.
std::vector<EbvBid> group_bidding(const PublicKey& pk, OracleEndpoint& oracle,
                                  std::span<const EbvBid> buyer_bids,
                                  std::span<const BuyerGroup> groups);

// Seller and group processing orders for one session; order[j] is the
// original index processed at position j.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> session_permutations(
    std::uint32_t sellers, std::uint32_t groups, const SessionConfig& cfg);

struct AuctioneerOutcome {
    AuctionResult result;
    TranscriptStats stats;
    // Permutations actually used; feeding these to trust_plain_auction must
    // reproduce `result` exactly.
    std::vector<std::uint32_t> seller_order;
    std::vector<std::uint32_t> group_order;
    // Raw inbound frames when record_auctioneer_inbound is set.
    std::vector<std::vector<std::uint8_t>> inbound_frames;
};

struct AgentRound {
    std::uint32_t seller_index;  // permuted space
    std::uint32_t group_index;
    std::uint8_t compare_flag;   // 0 = pair becomes a candidate
};

struct AgentOutcome {
    // Winner marks in permuted space, critical pair already cleared.
    std::vector<std::uint8_t> seller_marks;
    std::vector<std::uint8_t> group_marks;
    // Present iff the published result carries prices.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> prices;
    std::vector<AgentRound> rounds;
    TranscriptStats stats;
    MaskLog observed_masks;
};

// Runs the auctioneer end of a session over an established channel. The
// plain instance stays on this side only to play the bidders; the party
// logic consumes nothing but ciphertexts from it.
AuctioneerOutcome run_auctioneer_session(Channel& channel, const PlainInstance& inst,
                                         const SessionConfig& cfg);

// Runs the key-holding agent end over an established channel.
AgentOutcome run_agent_session(Channel& channel, const SessionConfig& cfg);

struct LocalRunOutcome {
    AuctioneerOutcome auctioneer;
    AgentOutcome agent;
};

// Both parties in-process over the given channel pair (agent on a second
// thread). Channels are consumed.
LocalRunOutcome run_paired(const PlainInstance& inst, const SessionConfig& cfg,
                           std::unique_ptr<Channel> auctioneer_end,
                           std::unique_ptr<Channel> agent_end);

// run_paired over an in-memory channel pair.
LocalRunOutcome run_local(const PlainInstance& inst, const SessionConfig& cfg);

// Structural leakage audit over the auctioneer's recorded inbound frames:
// the only plaintext fields allowed in are the winner marks, the per-round
// compare flag, and the two clearing prices (plus the key material of the
// handshake). Returns one description per violation, empty when clean.
std::vector<std::string> audit_auctioneer_inbound(
    std::span<const std::vector<std::uint8_t>> frames);

}  // namespace pstrust
