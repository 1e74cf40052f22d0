#include "pstrust/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <numeric>
#include <random>
#include <thread>

#include "pstrust/errors.hpp"
#include "pstrust/messages.hpp"
#include "pstrust/rng.hpp"

namespace pstrust {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Typed send/recv over a channel, with optional raw capture of every
// received frame for the leakage audit.
class MessagePort {
  public:
    MessagePort(Channel& channel, std::vector<std::vector<std::uint8_t>>* capture)
        : channel_(channel), capture_(capture) {}

    void send(const Message& msg) { channel_.send_frame(encode_message(msg)); }

    Message recv() {
        std::vector<std::uint8_t> frame = channel_.recv_frame();
        if (capture_) capture_->push_back(frame);
        return decode_message(frame);
    }

    template <typename T>
    T expect(const char* what, int round = 0) {
        Message msg = recv();
        if (auto* typed = std::get_if<T>(&msg)) return std::move(*typed);
        throw ProtocolError(std::string("expected ") + what + ", received " +
                                message_type_name(message_type(msg)),
                            round);
    }

  private:
    Channel& channel_;
    std::vector<std::vector<std::uint8_t>>* capture_;
};

Ciphertext checked_ciphertext(const PublicKey& pk, const mpz_class& value, const char* what,
                              int round = 0) {
    if (sgn(value) <= 0 || value >= pk.modulus_squared())
        throw ProtocolError(std::string(what) + ": ciphertext outside (0, N^2)", round);
    return Ciphertext{value, pk.tag()};
}

// Auctioneer-side handle that forwards masked-product requests to the agent.
class ChannelOracle final : public OracleEndpoint {
  public:
    ChannelOracle(MessagePort& port, const PublicKey& pk) : port_(port), pk_(pk) {}

  private:
    Ciphertext do_masked_product(const Ciphertext& x2, const Ciphertext& y2) override {
        port_.send(ProdReq{x2.value, y2.value});
        ProdResp resp = port_.expect<ProdResp>("PROD_RESP");
        return checked_ciphertext(pk_, resp.product, "PROD_RESP product");
    }

    MessagePort& port_;
    const PublicKey& pk_;
};

std::uint32_t popcount(const std::vector<std::uint8_t>& bits) {
    std::uint32_t n = 0;
    for (std::uint8_t b : bits) n += b;
    return n;
}

std::uint32_t decrypted_index(const SecretKey& sk, const Ciphertext& c, std::uint32_t bound,
                              const char* what, int round) {
    mpz_class v = decrypt(sk, c);
    if (!v.fits_uint_p() || v.get_ui() >= bound)
        throw ProtocolError(std::string(what) + " out of range", round);
    return static_cast<std::uint32_t>(v.get_ui());
}

}  // namespace

std::vector<EbvBid> submit_bids(const PublicKey& pk, std::span<const std::uint32_t> bids,
                                int ebv_bits) {
    if (ebv_bits < 2 || ebv_bits > 48) throw InputError("submit_bids: bid bit length out of range");
    std::uint64_t cap = (std::uint64_t{1} << ebv_bits) - 2;
    std::vector<EbvBid> out;
    out.reserve(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (bids[i] < 1 || bids[i] > cap)
            throw InputError("bidder " + std::to_string(i) + ": bid " + std::to_string(bids[i]) +
                             " outside [1, 2^K - 2]");
        out.push_back(encode_ebv(pk, bids[i], ebv_bits));
    }
    return out;
}

std::vector<EbvBid> group_bidding(const PublicKey& pk, OracleEndpoint& oracle,
                                  std::span<const EbvBid> buyer_bids,
                                  std::span<const BuyerGroup> groups) {
    std::vector<EbvBid> out;
    out.reserve(groups.size());
    for (const BuyerGroup& group : groups) {
        if (group.members.empty()) throw InputError("group_bidding: empty group");
        std::vector<EbvBid> members;
        members.reserve(group.members.size());
        for (std::uint32_t id : group.members) {
            if (id >= buyer_bids.size()) throw InputError("group_bidding: member out of range");
            members.push_back(buyer_bids[id]);
        }
        SelectionResult lowest =
            multi_bid_extreme(pk, oracle, members, Direction::minimum);
        out.push_back(ebv_mul_const(pk, oracle, lowest.extreme, group.members.size()));
    }
    return out;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> session_permutations(
    std::uint32_t sellers, std::uint32_t groups, const SessionConfig& cfg) {
    std::vector<std::uint32_t> s_order(sellers), g_order(groups);
    std::iota(s_order.begin(), s_order.end(), 0u);
    std::iota(g_order.begin(), g_order.end(), 0u);
    if (!cfg.permute) return {std::move(s_order), std::move(g_order)};
    if (cfg.perm_seed) {
        std::mt19937_64 rng(*cfg.perm_seed);
        std::shuffle(s_order.begin(), s_order.end(), rng);
        std::shuffle(g_order.begin(), g_order.end(), rng);
    } else {
        std::shuffle(s_order.begin(), s_order.end(), secure_rng());
        std::shuffle(g_order.begin(), g_order.end(), secure_rng());
    }
    return {std::move(s_order), std::move(g_order)};
}

namespace {

// Runs each bid through the submission message path: encoded as a BID_SUBMIT
// frame by the bidder, decoded by the auctioneer. Bidders talk only to the
// auctioneer, so these frames never touch the agent channel.
std::vector<EbvBid> receive_bids(const PublicKey& pk, std::span<const std::uint32_t> plain_bids,
                                 int ebv_bits, std::uint8_t role) {
    std::vector<EbvBid> encoded = submit_bids(pk, plain_bids, ebv_bits);
    std::vector<EbvBid> accepted(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        BidSubmit msg;
        msg.role = role;
        msg.bidder_id = static_cast<std::uint32_t>(i);
        msg.bid_bits.reserve(encoded[i].bits.size());
        for (const Ciphertext& c : encoded[i].bits) msg.bid_bits.push_back(c.value);
        Message decoded = decode_message(encode_message(msg));
        auto& submit = std::get<BidSubmit>(decoded);
        if (submit.role != role || submit.bidder_id >= accepted.size())
            throw ProtocolError("bid submission rejected");
        EbvBid bid;
        bid.bits.reserve(submit.bid_bits.size());
        for (const mpz_class& v : submit.bid_bits)
            bid.bits.push_back(checked_ciphertext(pk, v, "BID_SUBMIT bit"));
        accepted[submit.bidder_id] = std::move(bid);
    }
    return accepted;
}

AuctionResult assemble_result(const PlainInstance& inst,
                              const std::vector<std::uint8_t>& seller_marks,
                              const std::vector<std::uint8_t>& group_marks,
                              const std::vector<std::uint32_t>& s_order,
                              const std::vector<std::uint32_t>& g_order,
                              const std::optional<std::pair<std::uint64_t, std::uint64_t>>& prices) {
    AuctionResult res;
    for (std::size_t j = 0; j < seller_marks.size(); ++j)
        if (seller_marks[j]) res.winning_sellers.push_back(s_order[j]);
    for (std::size_t j = 0; j < group_marks.size(); ++j)
        if (group_marks[j]) res.winning_groups.push_back(g_order[j]);
    std::sort(res.winning_sellers.begin(), res.winning_sellers.end());
    std::sort(res.winning_groups.begin(), res.winning_groups.end());
    if (!res.winning_sellers.empty()) {
        if (!prices) throw ProtocolError("winners present but no prices decrypted");
        res.selling_price = prices->first;
        res.buying_group_price = prices->second;
        for (std::uint32_t g : res.winning_groups) {
            const BuyerGroup& group = inst.groups[g];
            res.per_buyer_payments[g] =
                (*res.buying_group_price + group.size() - 1) / group.size();
            res.winning_buyers.insert(res.winning_buyers.end(), group.members.begin(),
                                      group.members.end());
        }
        std::sort(res.winning_buyers.begin(), res.winning_buyers.end());
    }
    return res;
}

}  // namespace

AuctioneerOutcome run_auctioneer_session(Channel& channel, const PlainInstance& inst,
                                         const SessionConfig& cfg) {
    auto start = Clock::now();
    validate_instance(inst);
    const int ebv_bits = inst.bid_bits;
    const auto sellers = static_cast<std::uint32_t>(inst.seller_bids.size());
    const auto hgroups = static_cast<std::uint32_t>(inst.groups.size());

    AuctioneerOutcome out;
    MessagePort port(channel, cfg.record_auctioneer_inbound ? &out.inbound_frames : nullptr);

    // Handshake: learn the public key, announce the public dimensions.
    KeyPublish key = port.expect<KeyPublish>("KEY_PUBLISH");
    PublicKey pk(key.modulus);
    if (pk.bit_length() < 2 * ebv_bits + 8)
        throw ProtocolError("published key is too short for the bid length");
    port.send(SessionSetup{sellers, hgroups, static_cast<std::uint32_t>(ebv_bits)});

    // Bidders hand over encrypted bids; plaintext bids never enter the
    // auctioneer's working state.
    std::vector<EbvBid> seller_ebv = receive_bids(pk, inst.seller_bids, ebv_bits, 0);
    std::vector<EbvBid> buyer_ebv = receive_bids(pk, inst.buyer_bids, ebv_bits, 1);

    ChannelOracle oracle(port, pk);
    std::vector<EbvBid> group_ebv = group_bidding(pk, oracle, buyer_ebv, inst.groups);

    auto [s_order, g_order] = session_permutations(sellers, hgroups, cfg);
    std::vector<EbvBid> asks, offers;
    asks.reserve(sellers);
    offers.reserve(hgroups);
    for (std::uint32_t j : s_order) asks.push_back(seller_ebv[j]);
    for (std::uint32_t j : g_order) offers.push_back(group_ebv[j]);

    const std::uint32_t round_cap = std::min(sellers, hgroups) + 1;
    std::uint32_t candidates = 0;
    EbvBid critical_ask, critical_offer;
    std::vector<std::uint8_t> seller_marks, group_marks;

    std::uint32_t round = 0;
    for (;;) {
        ++round;
        if (round > round_cap)
            throw ProtocolError("agent never stopped the candidate loop", static_cast<int>(round));
        SelectionResult low_ask = multi_bid_extreme(pk, oracle, asks, Direction::minimum);
        SelectionResult high_offer = multi_bid_extreme(pk, oracle, offers, Direction::maximum);
        // Flag 0 iff the highest offer is at least the lowest ask.
        SelectionResult compare =
            two_bid_extreme(pk, oracle, high_offer.extreme, low_ask.extreme, Direction::maximum);
        port.send(PairAnnounce{low_ask.selector.value, high_offer.selector.value,
                               compare.selector.value});

        Message reply = port.recv();
        if (auto* enc = std::get_if<CandEnc>(&reply)) {
            if (enc->compare_flag != 0)
                throw ProtocolError("CAND_ENC carries a nonzero flag", static_cast<int>(round));
            if (enc->seller_marks.size() != sellers || enc->group_marks.size() != hgroups)
                throw ProtocolError("CAND_ENC mark vector sizes are wrong", static_cast<int>(round));
            ++candidates;
            critical_ask = low_ask.extreme;
            critical_offer = high_offer.extreme;
            // Push every marked seller to the top of the bid range and every
            // marked group to the bottom so later rounds skip them:
            //   ask bit    <- bit + mark - mark*bit   (forces all-ones)
            //   offer bit  <- bit - mark*bit          (forces all-zeros)
            for (std::uint32_t j = 0; j < sellers; ++j) {
                Ciphertext mark =
                    checked_ciphertext(pk, enc->seller_marks[j], "seller mark", static_cast<int>(round));
                for (Ciphertext& bit : asks[j].bits) {
                    Ciphertext overlap = secure_product(pk, oracle, mark, bit);
                    bit = hom_sub(pk, hom_add(pk, bit, mark), overlap);
                }
            }
            for (std::uint32_t j = 0; j < hgroups; ++j) {
                Ciphertext mark =
                    checked_ciphertext(pk, enc->group_marks[j], "group mark", static_cast<int>(round));
                for (Ciphertext& bit : offers[j].bits) {
                    Ciphertext overlap = secure_product(pk, oracle, mark, bit);
                    bit = hom_sub(pk, bit, overlap);
                }
            }
        } else if (auto* plain = std::get_if<CandPlain>(&reply)) {
            if (plain->compare_flag != 1)
                throw ProtocolError("CAND_PLAIN carries a zero flag", static_cast<int>(round));
            if (plain->seller_marks.size() != sellers || plain->group_marks.size() != hgroups)
                throw ProtocolError("CAND_PLAIN mark vector sizes are wrong",
                                    static_cast<int>(round));
            std::uint32_t expected = candidates > 0 ? candidates - 1 : 0;
            if (popcount(plain->seller_marks) != expected ||
                popcount(plain->group_marks) != expected)
                throw ProtocolError("winner marks disagree with the candidate count",
                                    static_cast<int>(round));
            seller_marks = plain->seller_marks;
            group_marks = plain->group_marks;
            break;
        } else {
            throw ProtocolError(std::string("unexpected ") +
                                    message_type_name(message_type(reply)) +
                                    " during the candidate loop",
                                static_cast<int>(round));
        }
    }

    // Open the critical pair's bids; they are fresh selection outputs, and
    // rerandomizing once more unlinks them from the transcript the agent saw.
    std::optional<std::pair<std::uint64_t, std::uint64_t>> prices;
    if (candidates > 0) {
        DecryptReq req;
        req.ask_bits.reserve(critical_ask.bits.size());
        req.offer_bits.reserve(critical_offer.bits.size());
        for (const Ciphertext& c : critical_ask.bits)
            req.ask_bits.push_back(rerandomize(pk, c).value);
        for (const Ciphertext& c : critical_offer.bits)
            req.offer_bits.push_back(rerandomize(pk, c).value);
        port.send(req);
        DecryptResp resp = port.expect<DecryptResp>("DECRYPT_RESP");
        prices = std::make_pair(resp.selling_price, resp.buying_group_price);
    }

    out.result = assemble_result(inst, seller_marks, group_marks, s_order, g_order, prices);

    ResultMsg echo;
    echo.seller_marks = seller_marks;
    echo.group_marks = group_marks;
    echo.has_prices = out.result.selling_price ? 1 : 0;
    echo.selling_price = out.result.selling_price.value_or(0);
    echo.buying_group_price = out.result.buying_group_price.value_or(0);
    port.send(echo);

    out.seller_order = std::move(s_order);
    out.group_order = std::move(g_order);
    out.stats.channel = channel.stats();
    out.stats.product_calls = oracle.product_calls();
    out.stats.rounds = round;
    out.stats.wall_ms = ms_since(start);
    return out;
}

AgentOutcome run_agent_session(Channel& channel, const SessionConfig& cfg) {
    auto start = Clock::now();
    AgentOutcome out;
    MessagePort port(channel, nullptr);

    Keypair keys = keygen(cfg.key_bits);
    const PublicKey& pk = keys.pub;
    port.send(KeyPublish{pk.modulus()});

    SessionSetup setup = port.expect<SessionSetup>("SESSION_SETUP");
    if (setup.sellers == 0 || setup.groups == 0)
        throw ProtocolError("session has an empty side");
    if (setup.ebv_bits < 2 || setup.ebv_bits > 48)
        throw ProtocolError("session bid bit length out of range");
    if (pk.bit_length() < static_cast<int>(2 * setup.ebv_bits + 8))
        throw ProtocolError("own key is too short for the bid length");
    const int ebv_bits = static_cast<int>(setup.ebv_bits);
    const std::uint32_t round_cap = std::min(setup.sellers, setup.groups) + 1;

    std::vector<std::uint8_t> seller_marks(setup.sellers, 0);
    std::vector<std::uint8_t> group_marks(setup.groups, 0);
    std::int64_t critical_seller = -1, critical_group = -1;
    std::uint32_t candidates = 0;
    std::uint64_t served = 0;
    bool stopped = false;
    bool price_served = false;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> decrypted_prices;

    for (;;) {
        Message msg = port.recv();
        int round_tag = static_cast<int>(out.rounds.size());

        if (auto* prod = std::get_if<ProdReq>(&msg)) {
            if (stopped)
                throw ProtocolError("product query after the candidate loop stopped", round_tag);
            Ciphertext x2 = checked_ciphertext(pk, prod->x2, "PROD_REQ x2", round_tag);
            Ciphertext y2 = checked_ciphertext(pk, prod->y2, "PROD_REQ y2", round_tag);
            Ciphertext resp = serve_product(keys.sec, x2, y2,
                                            cfg.capture_agent_masks ? &out.observed_masks : nullptr);
            ++served;
            port.send(ProdResp{resp.value});
        } else if (auto* pair = std::get_if<PairAnnounce>(&msg)) {
            if (stopped) throw ProtocolError("pair announced after stop", round_tag);
            std::uint32_t round = static_cast<std::uint32_t>(out.rounds.size()) + 1;
            if (round > round_cap)
                throw ProtocolError("candidate loop exceeded its round cap",
                                    static_cast<int>(round));
            std::uint32_t a = decrypted_index(
                keys.sec,
                checked_ciphertext(pk, pair->seller_index, "seller index", static_cast<int>(round)),
                setup.sellers, "seller index", static_cast<int>(round));
            std::uint32_t b = decrypted_index(
                keys.sec,
                checked_ciphertext(pk, pair->group_index, "group index", static_cast<int>(round)),
                setup.groups, "group index", static_cast<int>(round));
            mpz_class flag = decrypt(
                keys.sec,
                checked_ciphertext(pk, pair->compare_flag, "compare flag", static_cast<int>(round)));
            if (flag != 0 && flag != 1)
                throw CorruptionError("compare flag decrypts outside {0, 1}");
            out.rounds.push_back(AgentRound{a, b, static_cast<std::uint8_t>(flag.get_ui())});

            if (flag == 0) {
                // The announced pair trades; mark both sides as candidates.
                if (seller_marks[a] || group_marks[b])
                    throw CorruptionError("winner mark set twice: saturation failed");
                seller_marks[a] = 1;
                group_marks[b] = 1;
                critical_seller = a;
                critical_group = b;
                ++candidates;
                if (popcount(seller_marks) != candidates || popcount(group_marks) != candidates)
                    throw CorruptionError("winner mark counts diverged");
                CandEnc reply;
                reply.compare_flag = 0;
                reply.seller_marks.reserve(seller_marks.size());
                reply.group_marks.reserve(group_marks.size());
                for (std::uint8_t m : seller_marks)
                    reply.seller_marks.push_back(encrypt(pk, m).value);
                for (std::uint8_t m : group_marks)
                    reply.group_marks.push_back(encrypt(pk, m).value);
                port.send(reply);
            } else {
                // Stop round: the last candidate pair is critical and is
                // removed from the winners. A stop on the very first round
                // leaves nothing to clear.
                if (critical_seller >= 0) {
                    seller_marks[static_cast<std::size_t>(critical_seller)] = 0;
                    group_marks[static_cast<std::size_t>(critical_group)] = 0;
                }
                stopped = true;
                CandPlain reply;
                reply.seller_marks = seller_marks;
                reply.group_marks = group_marks;
                reply.compare_flag = 1;
                port.send(reply);
            }
        } else if (auto* dec = std::get_if<DecryptReq>(&msg)) {
            if (!stopped || candidates == 0 || price_served)
                throw ProtocolError("unexpected decryption request", round_tag);
            if (dec->ask_bits.size() != static_cast<std::size_t>(ebv_bits) ||
                dec->offer_bits.size() != static_cast<std::size_t>(ebv_bits))
                throw ProtocolError("decryption request has the wrong width", round_tag);
            EbvBid ask, offer;
            for (const mpz_class& v : dec->ask_bits)
                ask.bits.push_back(checked_ciphertext(pk, v, "DECRYPT_REQ ask bit", round_tag));
            for (const mpz_class& v : dec->offer_bits)
                offer.bits.push_back(checked_ciphertext(pk, v, "DECRYPT_REQ offer bit", round_tag));
            std::uint64_t selling = decode_ebv(keys.sec, ask);
            std::uint64_t buying = decode_ebv(keys.sec, offer);
            decrypted_prices = std::make_pair(selling, buying);
            price_served = true;
            port.send(DecryptResp{selling, buying});
        } else if (auto* res = std::get_if<ResultMsg>(&msg)) {
            if (!stopped) throw ProtocolError("result arrived before the stop round", round_tag);
            if (res->seller_marks != seller_marks || res->group_marks != group_marks)
                throw ProtocolError("published winner marks disagree with own view", round_tag);
            bool expect_prices = popcount(seller_marks) > 0;
            if ((res->has_prices != 0) != expect_prices)
                throw ProtocolError("published price flag disagrees with the winner marks",
                                    round_tag);
            if (expect_prices) {
                if (!decrypted_prices || res->selling_price != decrypted_prices->first ||
                    res->buying_group_price != decrypted_prices->second)
                    throw ProtocolError("published prices disagree with the decrypted ones",
                                        round_tag);
                out.prices = decrypted_prices;
            }
            break;
        } else {
            throw ProtocolError(std::string("unexpected ") +
                                    message_type_name(message_type(msg)) + " at the agent",
                                round_tag);
        }
    }

    out.seller_marks = std::move(seller_marks);
    out.group_marks = std::move(group_marks);
    out.stats.channel = channel.stats();
    out.stats.product_calls = served;
    out.stats.rounds = static_cast<std::uint32_t>(out.rounds.size());
    out.stats.wall_ms = ms_since(start);
    return out;
}

LocalRunOutcome run_paired(const PlainInstance& inst, const SessionConfig& cfg,
                           std::unique_ptr<Channel> auctioneer_end,
                           std::unique_ptr<Channel> agent_end) {
    std::promise<AgentOutcome> agent_promise;
    std::future<AgentOutcome> agent_future = agent_promise.get_future();
    std::thread agent_thread(
        [cfg, channel = std::move(agent_end), promise = std::move(agent_promise)]() mutable {
            try {
                promise.set_value(run_agent_session(*channel, cfg));
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
            // The channel closes as this scope unwinds, releasing a peer
            // that is still blocked in recv.
        });

    AuctioneerOutcome auctioneer;
    std::exception_ptr failure;
    try {
        auctioneer = run_auctioneer_session(*auctioneer_end, inst, cfg);
    } catch (...) {
        failure = std::current_exception();
    }
    auctioneer_end.reset();
    agent_thread.join();
    if (failure) std::rethrow_exception(failure);
    return LocalRunOutcome{std::move(auctioneer), agent_future.get()};
}

LocalRunOutcome run_local(const PlainInstance& inst, const SessionConfig& cfg) {
    auto [ae_end, aa_end] = make_memory_channel();
    return run_paired(inst, cfg, std::move(ae_end), std::move(aa_end));
}

std::vector<std::string> audit_auctioneer_inbound(
    std::span<const std::vector<std::uint8_t>> frames) {
    std::vector<std::string> violations;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        Message msg;
        try {
            msg = decode_message(frames[i]);
        } catch (const CodecError& err) {
            violations.push_back("frame " + std::to_string(i) + ": undecodable (" + err.what() +
                                 ")");
            continue;
        }
        // Allowed inbound: key material (KEY_PUBLISH), ciphertext-only
        // payloads (PROD_RESP, the mark vectors of CAND_ENC), and the
        // result-equivalent plaintexts: compare flags, final winner marks,
        // clearing prices. Anything else reaching the auctioneer leaks.
        switch (message_type(msg)) {
            case MsgType::key_publish:
            case MsgType::prod_resp:
            case MsgType::cand_enc:
            case MsgType::cand_plain:
            case MsgType::decrypt_resp:
                break;
            default:
                violations.push_back("frame " + std::to_string(i) + ": inbound " +
                                     message_type_name(message_type(msg)) +
                                     " is not an allowed auctioneer input");
        }
    }
    return violations;
}

}  // namespace pstrust
