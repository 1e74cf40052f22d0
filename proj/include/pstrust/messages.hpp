#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace pstrust {

// Wire format: every frame is
//   [4-byte big-endian total length][1-byte message type][payload]
// where the total length counts the type byte plus the payload. Integers,
// vectors and bit vectors inside payloads use the field primitives from
// wire.hpp. Encrypted values travel as their raw ciphertext integers.

enum class MsgType : std::uint8_t {
    key_publish = 0x01,    // agent -> auctioneer: public key modulus
    session_setup = 0x02,  // auctioneer -> agent: sellers, groups, bid bits
    bid_submit = 0x03,     // bidder -> auctioneer: one encrypted bid
    prod_req = 0x04,       // auctioneer -> agent: masked product operands
    prod_resp = 0x05,      // agent -> auctioneer: masked product result
    pair_announce = 0x06,  // auctioneer -> agent: encrypted pair of the round
    cand_enc = 0x07,       // agent -> auctioneer: encrypted winner marks
    cand_plain = 0x08,     // agent -> auctioneer: final winner marks
    decrypt_req = 0x09,    // auctioneer -> agent: critical bids to open
    decrypt_resp = 0x0a,   // agent -> auctioneer: clearing prices
    result = 0x0b,         // auctioneer -> agent: published outcome echo
};

struct KeyPublish {
    mpz_class modulus;
};

struct SessionSetup {
    std::uint32_t sellers;   // M
    std::uint32_t groups;    // H
    std::uint32_t ebv_bits;  // K
};

struct BidSubmit {
    std::uint8_t role;  // 0 seller, 1 buyer
    std::uint32_t bidder_id;
    std::vector<mpz_class> bid_bits;  // ciphertexts, most significant first
};

struct ProdReq {
    mpz_class x2;
    mpz_class y2;
};

struct ProdResp {
    mpz_class product;
};

struct PairAnnounce {
    mpz_class seller_index;  // encrypted position of the lowest ask
    mpz_class group_index;   // encrypted position of the highest offer
    mpz_class compare_flag;  // encrypted; 0 means the offer covers the ask
};

struct CandEnc {
    std::vector<mpz_class> seller_marks;  // encrypted winner marks, one per seller
    std::vector<mpz_class> group_marks;
    std::uint8_t compare_flag;  // plain copy of the round's flag (always 0 here)
};

struct CandPlain {
    std::vector<std::uint8_t> seller_marks;  // final marks, critical pair cleared
    std::vector<std::uint8_t> group_marks;
    std::uint8_t compare_flag;  // always 1: the stop round
};

struct DecryptReq {
    std::vector<mpz_class> ask_bits;    // critical seller bid, rerandomized
    std::vector<mpz_class> offer_bits;  // critical group bid, rerandomized
};

struct DecryptResp {
    std::uint64_t selling_price;
    std::uint64_t buying_group_price;
};

struct ResultMsg {
    std::vector<std::uint8_t> seller_marks;
    std::vector<std::uint8_t> group_marks;
    std::uint8_t has_prices;
    std::uint64_t selling_price;        // 0 when has_prices is 0
    std::uint64_t buying_group_price;
};

using Message = std::variant<KeyPublish, SessionSetup, BidSubmit, ProdReq, ProdResp, PairAnnounce,
                             CandEnc, CandPlain, DecryptReq, DecryptResp, ResultMsg>;

MsgType message_type(const Message& msg);
const char* message_type_name(MsgType type);

// Produces a complete frame, length prefix included.
std::vector<std::uint8_t> encode_message(const Message& msg);

// Consumes a complete frame; CodecError on truncation, unknown type,
// non-canonical integers, or trailing bytes.
Message decode_message(std::span<const std::uint8_t> frame);

}  // namespace pstrust
