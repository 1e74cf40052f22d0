#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include "pstrust/errors.hpp"
#include "pstrust/messages.hpp"
#include "pstrust/transport.hpp"
#include "pstrust/wire.hpp"

using namespace pstrust;

namespace {

std::vector<std::uint8_t> bytes(std::initializer_list<int> raw) {
    std::vector<std::uint8_t> out;
    for (int b : raw) out.push_back(static_cast<std::uint8_t>(b));
    return out;
}

}  // namespace

TEST_CASE("wire integers are canonical big-endian with a 2-byte length") {
    std::vector<std::uint8_t> out;
    wire::put_bigint(out, 0);
    CHECK(out == bytes({0x00, 0x00}));
    out.clear();
    wire::put_bigint(out, 5);
    CHECK(out == bytes({0x00, 0x01, 0x05}));
    out.clear();
    wire::put_bigint(out, 256);
    CHECK(out == bytes({0x00, 0x02, 0x01, 0x00}));

    auto non_canonical = bytes({0x00, 0x02, 0x00, 0x05});
    wire::Reader r(non_canonical);
    CHECK_THROWS_AS(r.bigint(), CodecError);

    CHECK_THROWS_AS(wire::put_bigint(out, mpz_class(-1)), InputError);
}

TEST_CASE("wire bit vectors pack most significant bit first with zero padding") {
    std::vector<std::uint8_t> out;
    wire::put_bitvec(out, {1, 0, 1, 1, 0});
    CHECK(out == bytes({0x00, 0x05, 0xb0}));

    wire::Reader ok(out);
    CHECK(ok.bitvec() == std::vector<std::uint8_t>{1, 0, 1, 1, 0});

    auto dirty = bytes({0x00, 0x05, 0xb1});  // nonzero padding bit
    wire::Reader bad(dirty);
    CHECK_THROWS_AS(bad.bitvec(), CodecError);

    CHECK_THROWS_AS(wire::put_bitvec(out, {2}), InputError);
}

TEST_CASE("a frozen frame encodes as expected, byte for byte") {
    // SESSION_SETUP(sellers=1, groups=2, ebv_bits=3):
    // length 0x0a, type 0x02, then three one-byte canonical integers.
    auto frame = encode_message(SessionSetup{1, 2, 3});
    CHECK(frame == bytes({0x00, 0x00, 0x00, 0x0a, 0x02, 0x00, 0x01, 0x01, 0x00, 0x01, 0x02, 0x00,
                          0x01, 0x03}));
    Message msg = decode_message(frame);
    auto& setup = std::get<SessionSetup>(msg);
    CHECK(setup.sellers == 1);
    CHECK(setup.groups == 2);
    CHECK(setup.ebv_bits == 3);
}

TEST_CASE("every message type survives an encode/decode round trip") {
    std::vector<Message> all{
        KeyPublish{mpz_class("123456789012345678901234567890")},
        SessionSetup{10, 30, 16},
        BidSubmit{1, 7, {mpz_class(12), mpz_class(0), mpz_class("99999999999999999999")}},
        ProdReq{mpz_class("5555555555"), mpz_class(1)},
        ProdResp{mpz_class("123123123")},
        PairAnnounce{mpz_class(11), mpz_class(22), mpz_class(33)},
        CandEnc{{mpz_class(1), mpz_class(2)}, {mpz_class(3)}, 0},
        CandPlain{{1, 0, 1}, {0, 0, 0, 1}, 1},
        DecryptReq{{mpz_class(4), mpz_class(5)}, {mpz_class(6), mpz_class(7)}},
        DecryptResp{123, 456},
        ResultMsg{{0, 1}, {1, 0}, 1, 99, 100},
    };
    for (const Message& msg : all) {
        auto frame = encode_message(msg);
        Message back = decode_message(frame);
        CHECK(message_type(back) == message_type(msg));
        // Re-encoding the decoded message must reproduce the frame exactly.
        CHECK(encode_message(back) == frame);
    }
}

TEST_CASE("decoding rejects malformed frames") {
    auto frame = encode_message(DecryptResp{1, 2});

    SUBCASE("truncation at every length") {
        for (std::size_t cut = 0; cut < frame.size(); ++cut) {
            std::vector<std::uint8_t> part(frame.begin(), frame.begin() + cut);
            CHECK_THROWS_AS(decode_message(part), CodecError);
        }
    }
    SUBCASE("declared length mismatch") {
        auto grown = frame;
        grown.push_back(0x00);
        CHECK_THROWS_AS(decode_message(grown), CodecError);
    }
    SUBCASE("trailing garbage inside the declared length") {
        auto padded = frame;
        padded.push_back(0xaa);
        padded[3] += 1;  // keep the prefix consistent
        CHECK_THROWS_AS(decode_message(padded), CodecError);
    }
    SUBCASE("unknown message type") {
        auto unknown = bytes({0x00, 0x00, 0x00, 0x01, 0x7f});
        try {
            decode_message(unknown);
            FAIL("expected CodecError");
        } catch (const CodecError& err) {
            CHECK(err.offset() == 4);
        }
    }
    SUBCASE("out-of-range scalar") {
        // SESSION_SETUP with a 5-byte seller count overflowing 32 bits.
        std::vector<std::uint8_t> body{0x02};
        wire::put_bigint(body, mpz_class("1099511627776"));  // 2^40
        wire::put_bigint(body, 1);
        wire::put_bigint(body, 1);
        std::vector<std::uint8_t> over;
        wire::put_u32(over, static_cast<std::uint32_t>(body.size()));
        over.insert(over.end(), body.begin(), body.end());
        CHECK_THROWS_AS(decode_message(over), CodecError);
    }
}

TEST_CASE("memory channels deliver frames in order and count them") {
    auto [left, right] = make_memory_channel();
    auto f1 = encode_message(DecryptResp{1, 2});
    auto f2 = encode_message(DecryptResp{3, 4});
    left->send_frame(f1);
    left->send_frame(f2);
    CHECK(right->recv_frame() == f1);
    CHECK(right->recv_frame() == f2);

    auto f3 = encode_message(SessionSetup{1, 1, 8});
    right->send_frame(f3);
    CHECK(left->recv_frame() == f3);

    CHECK(left->stats().frames_sent == 2);
    CHECK(left->stats().bytes_sent == f1.size() + f2.size());
    CHECK(left->stats().frames_received == 1);
    CHECK(right->stats().frames_received == 2);
    CHECK(right->stats().bytes_received == f1.size() + f2.size());
}

TEST_CASE("channels refuse malformed frames at the send boundary") {
    auto [left, right] = make_memory_channel();
    CHECK_THROWS_AS(left->send_frame(bytes({0x01})), TransportError);
    auto lying = bytes({0x00, 0x00, 0x00, 0x09, 0x0a});  // claims 9, carries 1
    CHECK_THROWS_AS(left->send_frame(lying), TransportError);
}

TEST_CASE("closing a memory endpoint releases and then fails the peer") {
    auto [left, right] = make_memory_channel();
    auto frame = encode_message(DecryptResp{7, 8});
    left->send_frame(frame);
    left.reset();
    // The pending frame is still delivered, then the closed peer shows.
    CHECK(right->recv_frame() == frame);
    CHECK_THROWS_AS(right->recv_frame(), TransportError);
    CHECK_THROWS_AS(right->send_frame(frame), TransportError);
}

TEST_CASE("a blocked receiver wakes up when the peer closes") {
    auto [left, right] = make_memory_channel();
    std::thread closer([&left] {
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        left.reset();
    });
    CHECK_THROWS_AS(right->recv_frame(), TransportError);
    closer.join();
}

TEST_CASE("tcp loopback carries frames both ways") {
    TcpListener listener = TcpListener::bind("127.0.0.1", 0);
    REQUIRE(listener.port() != 0);

    std::unique_ptr<Channel> client;
    std::thread connector(
        [&client, port = listener.port()] { client = tcp_connect("127.0.0.1", port); });
    std::unique_ptr<Channel> server = listener.accept_one();
    connector.join();
    REQUIRE(client);

    auto ping = encode_message(SessionSetup{2, 3, 8});
    auto pong = encode_message(DecryptResp{5, 6});
    client->send_frame(ping);
    CHECK(server->recv_frame() == ping);
    server->send_frame(pong);
    CHECK(client->recv_frame() == pong);

    // Many frames in a burst arrive intact and ordered.
    for (int i = 0; i < 100; ++i)
        client->send_frame(encode_message(DecryptResp{static_cast<std::uint64_t>(i), 0}));
    for (int i = 0; i < 100; ++i) {
        Message msg = decode_message(server->recv_frame());
        CHECK(std::get<DecryptResp>(msg).selling_price == static_cast<std::uint64_t>(i));
    }

    client.reset();
    CHECK_THROWS_AS(server->recv_frame(), TransportError);
}

TEST_CASE("tcp connect to a dead port fails after its deadline") {
    using namespace std::chrono_literals;
    // Grab an ephemeral port, then close it so nothing listens there.
    std::uint16_t dead_port;
    {
        TcpListener listener = TcpListener::bind("127.0.0.1", 0);
        dead_port = listener.port();
    }
    CHECK_THROWS_AS(tcp_connect("127.0.0.1", dead_port, 200ms), TransportError);
}

TEST_CASE("endpoint strings parse into host and port") {
    auto [host, port] = parse_endpoint("127.0.0.1:8080");
    CHECK(host == "127.0.0.1");
    CHECK(port == 8080);
    CHECK_THROWS_AS(parse_endpoint("nocolon"), InputError);
    CHECK_THROWS_AS(parse_endpoint(":99"), InputError);
    CHECK_THROWS_AS(parse_endpoint("host:"), InputError);
    CHECK_THROWS_AS(parse_endpoint("host:notanumber"), InputError);
    CHECK_THROWS_AS(parse_endpoint("host:70000"), InputError);
}
