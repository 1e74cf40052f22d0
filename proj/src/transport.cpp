#include "pstrust/transport.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "pstrust/errors.hpp"

namespace pstrust {

namespace {

// Frames above this are treated as corruption rather than honored, to keep a
// bad length prefix from provoking a giant allocation.
constexpr std::uint32_t kMaxFrameBody = 1u << 30;

std::uint32_t read_be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) |
           std::uint32_t(p[3]);
}

}  // namespace

void Channel::send_frame(std::span<const std::uint8_t> frame) {
    if (frame.size() < 5) throw TransportError("refusing to send a short frame");
    if (read_be32(frame.data()) != frame.size() - 4)
        throw TransportError("frame length prefix does not match frame size");
    do_send(frame);
    ++stats_.frames_sent;
    stats_.bytes_sent += frame.size();
}

std::vector<std::uint8_t> Channel::recv_frame() {
    std::vector<std::uint8_t> frame = do_recv();
    ++stats_.frames_received;
    stats_.bytes_received += frame.size();
    return frame;
}

namespace {

// Shared state of an in-process channel pair. Each endpoint owns one
// direction's queue for receiving and marks itself closed on destruction.
struct MemoryCore {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> queue[2];
    bool closed[2] = {false, false};
};

class MemoryChannel final : public Channel {
  public:
    MemoryChannel(std::shared_ptr<MemoryCore> core, int side) : core_(std::move(core)), side_(side) {}

    ~MemoryChannel() override {
        std::lock_guard<std::mutex> lock(core_->mu);
        core_->closed[side_] = true;
        core_->cv.notify_all();
    }

  private:
    void do_send(std::span<const std::uint8_t> frame) override {
        std::lock_guard<std::mutex> lock(core_->mu);
        if (core_->closed[1 - side_]) throw TransportError("peer endpoint is closed");
        core_->queue[1 - side_].emplace_back(frame.begin(), frame.end());
        core_->cv.notify_all();
    }

    std::vector<std::uint8_t> do_recv() override {
        std::unique_lock<std::mutex> lock(core_->mu);
        core_->cv.wait(lock, [&] { return !core_->queue[side_].empty() || core_->closed[1 - side_]; });
        if (core_->queue[side_].empty()) throw TransportError("peer closed with no frame pending");
        std::vector<std::uint8_t> frame = std::move(core_->queue[side_].front());
        core_->queue[side_].pop_front();
        return frame;
    }

    std::shared_ptr<MemoryCore> core_;
    int side_;
};

class TcpChannel final : public Channel {
  public:
    explicit TcpChannel(int fd) : fd_(fd) {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }

    ~TcpChannel() override {
        if (fd_ >= 0) ::close(fd_);
    }

  private:
    void do_send(std::span<const std::uint8_t> frame) override {
        std::size_t sent = 0;
        while (sent < frame.size()) {
            ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
            if (n <= 0) throw TransportError("send failed: " + std::string(std::strerror(errno)));
            sent += static_cast<std::size_t>(n);
        }
    }

    std::vector<std::uint8_t> do_recv() override {
        std::uint8_t head[4];
        read_exact(head, 4, false);
        std::uint32_t body = read_be32(head);
        if (body == 0 || body > kMaxFrameBody)
            throw TransportError("frame length " + std::to_string(body) + " is out of bounds");
        std::vector<std::uint8_t> frame(4 + body);
        std::memcpy(frame.data(), head, 4);
        read_exact(frame.data() + 4, body, true);
        return frame;
    }

    void read_exact(std::uint8_t* out, std::size_t len, bool mid_frame) {
        std::size_t got = 0;
        while (got < len) {
            ssize_t n = ::recv(fd_, out + got, len - got, 0);
            if (n == 0)
                throw TransportError(mid_frame ? "peer closed mid-frame"
                                               : "peer closed with no frame pending");
            if (n < 0) throw TransportError("recv failed: " + std::string(std::strerror(errno)));
            got += static_cast<std::size_t>(n);
        }
    }

    int fd_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_memory_channel() {
    auto core = std::make_shared<MemoryCore>();
    return {std::make_unique<MemoryChannel>(core, 0), std::make_unique<MemoryChannel>(core, 1)};
}

TcpListener::TcpListener(TcpListener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
    other.fd_ = -1;
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

TcpListener TcpListener::bind(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
    if (rc != 0) throw TransportError("cannot resolve " + host + ": " + gai_strerror(rc));
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw TransportError("cannot bind " + host + ":" + std::to_string(port));
    sockaddr_storage local{};
    socklen_t len = sizeof(local);
    std::uint16_t actual = port;
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&local), &len) == 0) {
        if (local.ss_family == AF_INET)
            actual = ntohs(reinterpret_cast<sockaddr_in*>(&local)->sin_port);
        else if (local.ss_family == AF_INET6)
            actual = ntohs(reinterpret_cast<sockaddr_in6*>(&local)->sin6_port);
    }
    return TcpListener(fd, actual);
}

std::unique_ptr<Channel> TcpListener::accept_one() {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) throw TransportError("accept failed: " + std::string(std::strerror(errno)));
    return std::make_unique<TcpChannel>(fd);
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port,
                                     std::chrono::milliseconds retry_for) {
    auto deadline = std::chrono::steady_clock::now() + retry_for;
    std::string last_error = "no address candidates";
    do {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
        if (rc != 0) {
            last_error = gai_strerror(rc);
        } else {
            for (addrinfo* ai = res; ai; ai = ai->ai_next) {
                int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
                if (fd < 0) continue;
                if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
                    ::freeaddrinfo(res);
                    return std::make_unique<TcpChannel>(fd);
                }
                last_error = std::strerror(errno);
                ::close(fd);
            }
            ::freeaddrinfo(res);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    } while (std::chrono::steady_clock::now() < deadline);
    throw TransportError("cannot connect to " + host + ":" + std::to_string(port) + ": " +
                         last_error);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
    std::size_t colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size())
        throw InputError("endpoint must look like host:port");
    std::string host = endpoint.substr(0, colon);
    const std::string port_str = endpoint.substr(colon + 1);
    unsigned long port = 0;
    try {
        std::size_t used = 0;
        port = std::stoul(port_str, &used);
        if (used != port_str.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw InputError("endpoint port is not a number");
    }
    if (port > 0xffff) throw InputError("endpoint port out of range");
    return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace pstrust
