#include "pstrust/messages.hpp"

#include "pstrust/errors.hpp"
#include "pstrust/wire.hpp"

namespace pstrust {

namespace {

struct TypeVisitor {
    MsgType operator()(const KeyPublish&) const { return MsgType::key_publish; }
    MsgType operator()(const SessionSetup&) const { return MsgType::session_setup; }
    MsgType operator()(const BidSubmit&) const { return MsgType::bid_submit; }
    MsgType operator()(const ProdReq&) const { return MsgType::prod_req; }
    MsgType operator()(const ProdResp&) const { return MsgType::prod_resp; }
    MsgType operator()(const PairAnnounce&) const { return MsgType::pair_announce; }
    MsgType operator()(const CandEnc&) const { return MsgType::cand_enc; }
    MsgType operator()(const CandPlain&) const { return MsgType::cand_plain; }
    MsgType operator()(const DecryptReq&) const { return MsgType::decrypt_req; }
    MsgType operator()(const DecryptResp&) const { return MsgType::decrypt_resp; }
    MsgType operator()(const ResultMsg&) const { return MsgType::result; }
};

struct PayloadVisitor {
    std::vector<std::uint8_t>& out;

    void operator()(const KeyPublish& m) const { wire::put_bigint(out, m.modulus); }

    void operator()(const SessionSetup& m) const {
        wire::put_bigint(out, m.sellers);
        wire::put_bigint(out, m.groups);
        wire::put_bigint(out, m.ebv_bits);
    }

    void operator()(const BidSubmit& m) const {
        wire::put_bigint(out, m.role);
        wire::put_bigint(out, m.bidder_id);
        wire::put_bigint_vec(out, m.bid_bits);
    }

    void operator()(const ProdReq& m) const {
        wire::put_bigint(out, m.x2);
        wire::put_bigint(out, m.y2);
    }

    void operator()(const ProdResp& m) const { wire::put_bigint(out, m.product); }

    void operator()(const PairAnnounce& m) const {
        wire::put_bigint(out, m.seller_index);
        wire::put_bigint(out, m.group_index);
        wire::put_bigint(out, m.compare_flag);
    }

    void operator()(const CandEnc& m) const {
        wire::put_bigint_vec(out, m.seller_marks);
        wire::put_bigint_vec(out, m.group_marks);
        wire::put_bigint(out, m.compare_flag);
    }

    void operator()(const CandPlain& m) const {
        wire::put_bitvec(out, m.seller_marks);
        wire::put_bitvec(out, m.group_marks);
        wire::put_bigint(out, m.compare_flag);
    }

    void operator()(const DecryptReq& m) const {
        wire::put_bigint_vec(out, m.ask_bits);
        wire::put_bigint_vec(out, m.offer_bits);
    }

    void operator()(const DecryptResp& m) const {
        wire::put_bigint(out, m.selling_price);
        wire::put_bigint(out, m.buying_group_price);
    }

    void operator()(const ResultMsg& m) const {
        wire::put_bitvec(out, m.seller_marks);
        wire::put_bitvec(out, m.group_marks);
        wire::put_bigint(out, m.has_prices);
        wire::put_bigint(out, m.selling_price);
        wire::put_bigint(out, m.buying_group_price);
    }
};

std::uint8_t small_u8(wire::Reader& r, const char* what) {
    std::size_t at = r.offset();
    std::uint64_t v = r.small_int();
    if (v > 0xff) throw CodecError(std::string(what) + " out of byte range", at);
    return static_cast<std::uint8_t>(v);
}

std::uint32_t small_u32(wire::Reader& r, const char* what) {
    std::size_t at = r.offset();
    std::uint64_t v = r.small_int();
    if (v > 0xffffffffull) throw CodecError(std::string(what) + " out of 32-bit range", at);
    return static_cast<std::uint32_t>(v);
}

}  // namespace

MsgType message_type(const Message& msg) { return std::visit(TypeVisitor{}, msg); }

const char* message_type_name(MsgType type) {
    switch (type) {
        case MsgType::key_publish: return "KEY_PUBLISH";
        case MsgType::session_setup: return "SESSION_SETUP";
        case MsgType::bid_submit: return "BID_SUBMIT";
        case MsgType::prod_req: return "PROD_REQ";
        case MsgType::prod_resp: return "PROD_RESP";
        case MsgType::pair_announce: return "PAIR_ANNOUNCE";
        case MsgType::cand_enc: return "CAND_ENC";
        case MsgType::cand_plain: return "CAND_PLAIN";
        case MsgType::decrypt_req: return "DECRYPT_REQ";
        case MsgType::decrypt_resp: return "DECRYPT_RESP";
        case MsgType::result: return "RESULT";
    }
    return "UNKNOWN";
}

std::vector<std::uint8_t> encode_message(const Message& msg) {
    std::vector<std::uint8_t> body;
    body.push_back(static_cast<std::uint8_t>(message_type(msg)));
    std::visit(PayloadVisitor{body}, msg);
    if (body.size() > 0xffffffffull) throw InputError("message exceeds the 4-byte frame cap");
    std::vector<std::uint8_t> frame;
    frame.reserve(4 + body.size());
    wire::put_u32(frame, static_cast<std::uint32_t>(body.size()));
    frame.insert(frame.end(), body.begin(), body.end());
    return frame;
}

Message decode_message(std::span<const std::uint8_t> frame) {
    wire::Reader r(frame);
    std::uint32_t declared = r.u32();
    if (frame.size() < 4 || declared != frame.size() - 4)
        throw CodecError("frame length does not match its declared length", 0);
    std::uint8_t type = r.u8();
    Message msg;
    switch (static_cast<MsgType>(type)) {
        case MsgType::key_publish: {
            KeyPublish m;
            m.modulus = r.bigint();
            msg = std::move(m);
            break;
        }
        case MsgType::session_setup: {
            SessionSetup m;
            m.sellers = small_u32(r, "seller count");
            m.groups = small_u32(r, "group count");
            m.ebv_bits = small_u32(r, "bid bit length");
            msg = m;
            break;
        }
        case MsgType::bid_submit: {
            BidSubmit m;
            m.role = small_u8(r, "bidder role");
            m.bidder_id = small_u32(r, "bidder id");
            m.bid_bits = r.bigint_vec();
            msg = std::move(m);
            break;
        }
        case MsgType::prod_req: {
            ProdReq m;
            m.x2 = r.bigint();
            m.y2 = r.bigint();
            msg = std::move(m);
            break;
        }
        case MsgType::prod_resp: {
            ProdResp m;
            m.product = r.bigint();
            msg = std::move(m);
            break;
        }
        case MsgType::pair_announce: {
            PairAnnounce m;
            m.seller_index = r.bigint();
            m.group_index = r.bigint();
            m.compare_flag = r.bigint();
            msg = std::move(m);
            break;
        }
        case MsgType::cand_enc: {
            CandEnc m;
            m.seller_marks = r.bigint_vec();
            m.group_marks = r.bigint_vec();
            m.compare_flag = small_u8(r, "compare flag");
            msg = std::move(m);
            break;
        }
        case MsgType::cand_plain: {
            CandPlain m;
            m.seller_marks = r.bitvec();
            m.group_marks = r.bitvec();
            m.compare_flag = small_u8(r, "compare flag");
            msg = std::move(m);
            break;
        }
        case MsgType::decrypt_req: {
            DecryptReq m;
            m.ask_bits = r.bigint_vec();
            m.offer_bits = r.bigint_vec();
            msg = std::move(m);
            break;
        }
        case MsgType::decrypt_resp: {
            DecryptResp m;
            m.selling_price = r.small_int();
            m.buying_group_price = r.small_int();
            msg = m;
            break;
        }
        case MsgType::result: {
            ResultMsg m;
            m.seller_marks = r.bitvec();
            m.group_marks = r.bitvec();
            m.has_prices = small_u8(r, "price flag");
            m.selling_price = r.small_int();
            m.buying_group_price = r.small_int();
            msg = std::move(m);
            break;
        }
        default:
            throw CodecError("unknown message type " + std::to_string(type), 4);
    }
    r.expect_end();
    return msg;
}

}  // namespace pstrust
