#include "tspa/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <thread>

namespace tspa {

const char* to_string(SessionOutcome::Kind k) {
    switch (k) {
        case SessionOutcome::Kind::server_authenticated: return "server_authenticated";
        case SessionOutcome::Kind::rejected: return "rejected";
        case SessionOutcome::Kind::server_auth_failed: return "server_auth_failed";
        case SessionOutcome::Kind::transport_error: return "transport_error";
    }
    return "?";
}

namespace {

constexpr std::uint32_t kMaxFrame = 1 << 20;

struct Addr {
    sockaddr_in sa{};
};

bool parse_address(const std::string& address, Addr& out) {
    auto colon = address.rfind(':');
    if (colon == std::string::npos) return false;
    std::string host = address.substr(0, colon);
    if (host == "localhost" || host.empty()) host = "127.0.0.1";
    int port = 0;
    try {
        port = std::stoi(address.substr(colon + 1));
    } catch (...) {
        return false;
    }
    if (port < 0 || port > 65535) return false;
    out.sa.sin_family = AF_INET;
    out.sa.sin_port = htons(static_cast<std::uint16_t>(port));
    return inet_pton(AF_INET, host.c_str(), &out.sa.sin_addr) == 1;
}

bool read_exact(int fd, std::uint8_t* buf, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        ssize_t r = ::recv(fd, buf + got, len - got, 0);
        if (r <= 0) return false;
        got += static_cast<std::size_t>(r);
    }
    return true;
}

bool write_all(int fd, const Bytes& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        ssize_t r = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (r <= 0) return false;
        sent += static_cast<std::size_t>(r);
    }
    return true;
}

bool read_frame(int fd, Bytes& out) {
    std::uint8_t hdr[4];
    if (!read_exact(fd, hdr, 4)) return false;
    std::uint32_t len = (std::uint32_t(hdr[0]) << 24) | (std::uint32_t(hdr[1]) << 16) |
                        (std::uint32_t(hdr[2]) << 8) | hdr[3];
    if (len == 0 || len > kMaxFrame) return false;
    out.resize(len);
    return read_exact(fd, out.data(), len);
}

bool write_frame(int fd, const Bytes& payload) {
    Bytes framed;
    framed.reserve(payload.size() + 4);
    std::uint32_t len = static_cast<std::uint32_t>(payload.size());
    framed.push_back(static_cast<std::uint8_t>(len >> 24));
    framed.push_back(static_cast<std::uint8_t>(len >> 16));
    framed.push_back(static_cast<std::uint8_t>(len >> 8));
    framed.push_back(static_cast<std::uint8_t>(len));
    framed.insert(framed.end(), payload.begin(), payload.end());
    return write_all(fd, framed);
}

void set_read_timeout(int fd, std::uint64_t seconds) {
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(seconds);
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

struct ServerState {
    SystemParams params;
    ServeOptions opts;
    ReplayCache replay;

    ServerState(SystemParams p, ServeOptions o)
        : params(std::move(p)), opts(std::move(o)), replay(opts.clock.delta_t) {}
};

Bytes reject_frame(const ServerState& st, std::uint8_t code) {
    LogicalMessage m;
    m.scheme = st.opts.scheme;
    m.type = MsgType::reject;
    m.body = RejectMsg{code};
    return encode_message(m, st.params.modulus_width);
}

Bytes handle_login_frame(const ServerState& st, ReplayCache& replay,
                         const Bytes& frame) {
    DecodeResult dec = decode_message(frame);
    if (!dec.ok()) return reject_frame(st, reason_code(dec.error));
    if (dec.msg->type != MsgType::login || dec.msg->scheme != st.opts.scheme)
        return reject_frame(st, kRejectSchemeMismatch);

    VerifyPolicy policy;
    policy.clock = st.opts.clock;
    policy.id = st.opts.id;
    policy.replay = st.opts.replay_cache ? &replay : nullptr;
    Timestamp t_recv = st.opts.clock.clock->now();

    std::optional<ServerResponse> resp;
    std::optional<RejectReason> reason;
    if (st.opts.scheme == Scheme::shen) {
        auto [trace, r] = shen_verify(st.params, policy,
                                      std::get<LoginRequestShen>(dec.msg->body), t_recv);
        resp = r;
        reason = trace.reason;
    } else {
        auto [trace, r] =
            improved_verify(st.params, policy,
                            std::get<LoginRequestImproved>(dec.msg->body), t_recv);
        resp = r;
        reason = trace.reason;
    }
    if (!resp) return reject_frame(st, reason_code(*reason));
    LogicalMessage m;
    m.scheme = st.opts.scheme;
    m.type = MsgType::server_response;
    m.body = *resp;
    return encode_message(m, st.params.modulus_width);
}

} // namespace

struct Service::Impl {
    std::shared_ptr<ServerState> state;
    int listen_fd = -1;
    std::uint16_t port = 0;
    std::atomic<bool> running{true};
    std::thread acceptor;

    void stop() {
        bool was = running.exchange(false);
        if (!was) return;
        ::shutdown(listen_fd, SHUT_RDWR);
        ::close(listen_fd);
        if (acceptor.joinable()) acceptor.join();
    }

    ~Impl() { stop(); }
};

Service::Service(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
Service::Service(Service&&) noexcept = default;
Service::~Service() = default;
std::uint16_t Service::port() const { return impl_->port; }
std::string Service::address() const {
    return "127.0.0.1:" + std::to_string(impl_->port);
}
void Service::stop() { impl_->stop(); }

Service serve(const SystemParams& params, const ServeOptions& opts,
              const std::string& address) {
    Addr addr;
    if (!parse_address(address, addr))
        throw std::runtime_error("serve: bad address " + address);

    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw std::runtime_error("serve: socket() failed");
    int one = 1;
    setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr.sa), sizeof(addr.sa)) < 0) {
        ::close(fd);
        throw std::runtime_error("serve: cannot bind " + address);
    }
    if (::listen(fd, 64) < 0) {
        ::close(fd);
        throw std::runtime_error("serve: listen() failed");
    }
    sockaddr_in bound{};
    socklen_t blen = sizeof(bound);
    getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &blen);

    auto impl = std::make_unique<Service::Impl>();
    impl->state = std::make_shared<ServerState>(params, opts);
    impl->listen_fd = fd;
    impl->port = ntohs(bound.sin_port);

    auto state = impl->state;
    auto* running = &impl->running;
    impl->acceptor = std::thread([fd, state, running] {
        while (running->load()) {
            int conn = ::accept(fd, nullptr, nullptr);
            if (conn < 0) {
                if (!running->load()) break;
                continue;
            }
            // one logical session per connection; failures stay isolated
            std::thread([conn, state] {
                set_read_timeout(conn, state->opts.read_timeout_seconds);
                Bytes frame;
                if (read_frame(conn, frame)) {
                    Bytes reply;
                    try {
                        reply = handle_login_frame(*state, state->replay, frame);
                    } catch (const std::exception&) {
                        reply = reject_frame(*state, kRejectSchemeMismatch);
                    }
                    write_frame(conn, reply);
                }
                ::close(conn);
            }).detach();
        }
    });
    return Service(std::move(impl));
}

namespace {

int connect_to(const std::string& address) {
    Addr addr;
    if (!parse_address(address, addr)) return -1;
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) return -1;
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr.sa), sizeof(addr.sa)) < 0) {
        ::close(fd);
        return -1;
    }
    return fd;
}

} // namespace

std::optional<Bytes> exchange_frame(const std::string& address, const Bytes& frame) {
    int fd = connect_to(address);
    if (fd < 0) return std::nullopt;
    set_read_timeout(fd, 10);
    std::optional<Bytes> out;
    Bytes reply;
    if (write_frame(fd, frame) && read_frame(fd, reply)) out = std::move(reply);
    ::close(fd);
    return out;
}

SessionOutcome client_session(const CardData& card, const std::string& password,
                              const std::string& address, Scheme scheme,
                              const ClockPolicy& clock, Rng& rng) {
    SessionOutcome out;
    BigInt r_i = rng.range(2, card.n - 2);
    Timestamp t = clock.clock->now();

    LogicalMessage login;
    login.scheme = scheme;
    login.type = MsgType::login;
    if (scheme == Scheme::shen)
        login.body = shen_login(card, password, r_i, t);
    else
        login.body = improved_login(card, password, r_i, t);

    auto reply = exchange_frame(address, encode_message(login, card.modulus_width));
    if (!reply) {
        out.detail = "connect/timeout failure";
        return out;
    }
    DecodeResult dec = decode_message(*reply);
    if (!dec.ok()) {
        out.detail = std::string("undecodable reply: ") + to_string(dec.error);
        return out;
    }
    if (dec.msg->type == MsgType::reject) {
        out.kind = SessionOutcome::Kind::rejected;
        out.reject_code = std::get<RejectMsg>(dec.msg->body).reason;
        out.detail = "server rejected login";
        return out;
    }
    if (dec.msg->type != MsgType::server_response) {
        out.detail = "unexpected reply type";
        return out;
    }
    const auto& resp = std::get<ServerResponse>(dec.msg->body);
    ServerAuthResult auth =
        verify_server_response(card, resp, clock.clock->now(), clock);
    if (auth.ok) {
        out.kind = SessionOutcome::Kind::server_authenticated;
    } else {
        out.kind = SessionOutcome::Kind::server_auth_failed;
        out.detail = auth.reason ? to_string(*auth.reason) : "token mismatch";
    }
    return out;
}

} // namespace tspa
