#ifndef TSPA_SCHEME_SHEN_HPP
#define TSPA_SCHEME_SHEN_HPP

#include "tspa/registration.hpp"

#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace tspa {

enum class RejectReason : std::uint8_t {
    BadIdFormat = 1,
    CidMismatch = 2,
    StaleTimestamp = 3,
    FutureTimestamp = 4,
    CongruenceFailed = 5,
    Replayed = 6,
};

const char* to_string(RejectReason r);

/// 8-field login message of the baseline scheme.
struct LoginRequestShen {
    BigInt id, cid, x, y;
    BigInt n, e, g;
    Timestamp t;
};

struct ServerResponse {
    BigInt r;
    Timestamp t2; // T''
};

struct ShenVerificationTrace {
    BigInt cid_prime;
    bool window_ok = false;
    BigInt lhs; // Y^e mod n
    BigInt rhs; // ID * X^f(CID,T) mod n
    bool accepted = false;
    std::optional<RejectReason> reason;
};

struct ServerAuthResult {
    BigInt r_prime;
    BigInt expected;
    bool ok = false;
    std::optional<RejectReason> reason; // StaleTimestamp, else token mismatch
};

/// Duplicate (id, timestamp) cache closing the within-window replay gap.
/// check_and_insert is atomic: a pair is accepted at most once.
class ReplayCache {
public:
    explicit ReplayCache(std::uint64_t retention_seconds = 60)
        : retention_(retention_seconds) {}

    // true if (id, t) is fresh (and now recorded), false if replayed
    bool check_and_insert(const BigInt& id, Timestamp t, Timestamp now);
    bool seen(const BigInt& id, Timestamp t) const;

private:
    void prune(Timestamp now);

    std::uint64_t retention_;
    mutable std::mutex mu_;
    std::set<std::pair<BigInt, std::uint64_t>> entries_;
};

struct VerifyPolicy {
    ClockPolicy clock;
    IdPolicy id;
    ReplayCache* replay = nullptr; // off by default for the baseline scheme
};

LoginRequestShen shen_login(const CardData& card, const std::string& password,
                            const BigInt& r_i, Timestamp t);

std::pair<ShenVerificationTrace, std::optional<ServerResponse>>
shen_verify(const SystemParams& params, const VerifyPolicy& policy,
            const LoginRequestShen& m, Timestamp t_recv);

ServerAuthResult verify_server_response(const CardData& card,
                                        const ServerResponse& resp,
                                        Timestamp t_recv,
                                        const ClockPolicy& policy);

// Shared freshness check: stale beyond delta_t, or future beyond skew.
std::optional<RejectReason> check_window(Timestamp msg_t, Timestamp t_recv,
                                         const ClockPolicy& policy);

} // namespace tspa

#endif
