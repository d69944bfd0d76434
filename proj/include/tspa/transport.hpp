#ifndef TSPA_TRANSPORT_HPP
#define TSPA_TRANSPORT_HPP

#include "tspa/scheme_improved.hpp"

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace tspa {

enum class Scheme : std::uint8_t { shen = 0x00, improved = 0x01 };
enum class MsgType : std::uint8_t {
    login = 0x01,
    server_response = 0x02,
    reject = 0x03,
    accept_notice = 0x04,
};

const char* to_string(Scheme s);

struct RejectMsg {
    std::uint8_t reason = 0;
};
struct AcceptNotice {};

struct LogicalMessage {
    Scheme scheme = Scheme::shen;
    MsgType type = MsgType::login;
    std::variant<LoginRequestShen, LoginRequestImproved, ServerResponse,
                 RejectMsg, AcceptNotice>
        body;
};

enum class DecodeError : std::uint8_t {
    BadMagic = 1,
    BadVersion,
    BadScheme,
    BadMsgType,
    BadFieldCount,
    TruncatedField,
    DuplicateTag,
    UnexpectedTag,
    MissingField,
    TrailingBytes,
    BadFieldWidth,
};

const char* to_string(DecodeError e);

struct DecodeResult {
    std::optional<LogicalMessage> msg;
    DecodeError error{};
    bool ok() const { return msg.has_value(); }
};

struct FieldOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// TLV wire layout: "TSPA" | version | scheme | msg_type | field_count |
// (tag, 4-byte BE length, value)*. Mod-n values at modulus width,
// timestamps 8 bytes, n/e/g minimal big-endian.
Bytes encode_message(const LogicalMessage& m, std::size_t modulus_width);
DecodeResult decode_message(const Bytes& wire);

// Reject reason codes on the wire: protocol reasons as-is, decode errors
// offset by 0x10, scheme mismatch 0x20.
inline std::uint8_t reason_code(RejectReason r) { return static_cast<std::uint8_t>(r); }
inline std::uint8_t reason_code(DecodeError e) {
    return static_cast<std::uint8_t>(0x10 + static_cast<std::uint8_t>(e));
}
inline constexpr std::uint8_t kRejectSchemeMismatch = 0x20;

// ---- key / card files: line-oriented "name = hex" ----

void save_key_file(const std::string& path, const Kic& kic);
Kic load_key_file(const std::string& path);

void save_card_file(const std::string& path, const CardData& card);
CardData load_card_file(const std::string& path);

// ---- in-process insecure channel with tap and injection ----

class ChannelSim {
public:
    enum class Direction { to_server, to_client };
    using TapFn = std::function<void(Direction, const Bytes&, Timestamp)>;

    explicit ChannelSim(std::shared_ptr<const Clock> clock,
                        std::uint64_t fixed_delay = 0, std::uint64_t jitter = 0,
                        std::uint64_t jitter_seed = 0);

    void send(Direction dir, const Bytes& frame);
    // Injected frames are delivered ahead of queued traffic and bypass the tap.
    void inject(Direction dir, const Bytes& frame);
    std::optional<Bytes> recv(Direction dir);
    void attach_tap(TapFn tap);

private:
    struct Pending {
        Bytes frame;
        std::uint64_t ready_at;
        bool injected;
    };
    std::deque<Pending>& queue(Direction dir);

    std::shared_ptr<const Clock> clock_;
    std::uint64_t fixed_delay_, jitter_;
    std::mt19937_64 jitter_eng_;
    std::mutex mu_;
    std::deque<Pending> to_server_, to_client_;
    TapFn tap_;
};

// ---- loopback service ----

struct ServeOptions {
    Scheme scheme = Scheme::shen;
    ClockPolicy clock;
    IdPolicy id;
    bool replay_cache = false; // defaulted per scheme by the CLI
    std::uint64_t read_timeout_seconds = 10;
};

class Service {
public:
    ~Service();
    Service(Service&&) noexcept;
    Service& operator=(Service&&) = delete;
    std::uint16_t port() const;
    std::string address() const;
    void stop();

private:
    friend Service serve(const SystemParams&, const ServeOptions&, const std::string&);
    struct Impl;
    explicit Service(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

// address "host:port"; port 0 binds an ephemeral port.
Service serve(const SystemParams& params, const ServeOptions& opts,
              const std::string& address);

struct SessionOutcome {
    enum class Kind {
        server_authenticated,
        rejected,
        server_auth_failed,
        transport_error,
    };
    Kind kind = Kind::transport_error;
    std::uint8_t reject_code = 0; // for Kind::rejected
    std::string detail;
};

const char* to_string(SessionOutcome::Kind k);

SessionOutcome client_session(const CardData& card, const std::string& password,
                              const std::string& address, Scheme scheme,
                              const ClockPolicy& clock, Rng& rng);

// Raw frame exchange against a live service (fuzzing, forged submissions).
// Returns the response frame, or nullopt on connect/timeout failure.
std::optional<Bytes> exchange_frame(const std::string& address, const Bytes& frame);

} // namespace tspa

#endif
