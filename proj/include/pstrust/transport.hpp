#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pstrust {

struct ChannelStats {
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_received = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t bytes_received = 0;
};

// Ordered, reliable duplex frame pipe. Implementations must deliver frames
// intact and in order; recv blocks until a frame arrives or the peer is gone.
class Channel {
  public:
    virtual ~Channel() = default;

    // frame must be a complete encoded frame (4-byte length prefix included).
    void send_frame(std::span<const std::uint8_t> frame);

    // Returns one complete frame. TransportError once the peer has closed
    // and everything already delivered has been drained.
    std::vector<std::uint8_t> recv_frame();

    const ChannelStats& stats() const { return stats_; }

  private:
    virtual void do_send(std::span<const std::uint8_t> frame) = 0;
    virtual std::vector<std::uint8_t> do_recv() = 0;

    ChannelStats stats_;
};

// Two endpoints of an in-process queue pair.
std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_memory_channel();

// Listening TCP socket; accept_one blocks for the next connection.
class TcpListener {
  public:
    TcpListener(TcpListener&& other) noexcept;
    TcpListener& operator=(TcpListener&&) = delete;
    ~TcpListener();

    // host may be an IP or a name; port 0 picks an ephemeral port.
    static TcpListener bind(const std::string& host, std::uint16_t port);

    std::uint16_t port() const { return port_; }
    std::unique_ptr<Channel> accept_one();

  private:
    TcpListener(int fd, std::uint16_t port) : fd_(fd), port_(port) {}

    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// Connects, retrying until the deadline (the peer may still be binding).
std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     std::chrono::milliseconds retry_for =
                                         std::chrono::milliseconds(5000));

// "host:port" -> pair; InputError on malformed input.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace pstrust
