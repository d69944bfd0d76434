#ifndef TSPA_ADVERSARY_HPP
#define TSPA_ADVERSARY_HPP

#include "tspa/transport.hpp"

namespace tspa {

/// Everything an eavesdropper on the channel learns from one login frame:
/// the raw bytes, their decoded form, and the public values they carry.
struct InterceptedMaterial {
    Bytes raw;
    Scheme scheme = Scheme::shen;
    std::variant<LoginRequestShen, LoginRequestImproved> message;
    BigInt n, e, g;
    OneWayConfig f_config; // f is public information
    std::size_t modulus_width = 0;
    Timestamp capture_time;
};

// Builds InterceptedMaterial from captured login bytes; nullopt if the
// frame is not a decodable login.
std::optional<InterceptedMaterial> intercept_from_frame(const Bytes& frame,
                                                        const OneWayConfig& f_config,
                                                        Timestamp capture_time);

/// Attack-local scratch values, populated only by the attack that uses them.
struct AttackContext {
    std::optional<BigInt> a, u, v, w, b, k, y;
    std::optional<Timestamp> t_attack;
    Bytes forged;
};

enum class AttackKind : std::uint8_t { euclid, scale, inverse_id, unity };
enum class AttackOutcome : std::uint8_t {
    accepted,
    rejected,
    search_exhausted,
    inapplicable,
};

const char* to_string(AttackKind k);
const char* to_string(AttackOutcome o);

struct AttackReport {
    AttackKind attack = AttackKind::euclid;
    Scheme scheme = Scheme::shen;
    AttackOutcome outcome = AttackOutcome::inapplicable;
    std::optional<std::uint8_t> reject_code;
    std::uint64_t attempts = 0;
    std::uint64_t wall_ms = 0;
    AttackContext context;
    std::string note;
};

// One line per run, "key=value" pairs; consumed by the matrix command.
std::string format_report_line(const AttackReport& r);

/// The verifier under attack, driven directly (no sockets): forged frames
/// pass through decode_message first, so the wire format gate applies.
struct AttackTarget {
    Scheme scheme = Scheme::shen;
    const SystemParams* params = nullptr;
    VerifyPolicy policy;
};

// Timestamp-search bounds; candidates stay inside the verifier's window.
struct SearchBudget {
    std::uint64_t max_attempts = 4096;
    std::uint64_t window_past = 60;
    std::uint64_t window_future = 5;
};

// Forged-frame submission shared by all attacks.
struct SubmitResult {
    bool accepted = false;
    std::uint8_t reject_code = 0;
};
SubmitResult submit_forged(const AttackTarget& target, const Bytes& frame);

AttackReport attack_euclid(const InterceptedMaterial& mat, const AttackTarget& target,
                           const Clock& clock, const SearchBudget& budget);

AttackReport attack_scale(const InterceptedMaterial& mat, const AttackTarget& target,
                          const Clock& clock, const SearchBudget& budget);

AttackReport attack_inverse_id(const InterceptedMaterial& mat,
                               const AttackTarget& target, Kic& kic,
                               const Clock& clock, Rng& rng);

// phi, when provided, is the white-box oracle: the exponent-group inverse
// b = a^-1 mod (p-1)(q-1). Without it, b is taken mod n as literally written.
AttackReport attack_unity(const InterceptedMaterial& mat, const AttackTarget& target,
                          const Clock& clock, const SearchBudget& budget, Rng& rng,
                          std::optional<BigInt> phi = std::nullopt);

/// Passive wiretap on a ChannelSim; records every frame crossing the
/// channel and supports injecting forged frames toward the server.
class ChannelTap {
public:
    ChannelTap(ChannelSim& channel, OneWayConfig f_config);

    struct Capture {
        ChannelSim::Direction direction;
        Bytes frame;
        Timestamp at;
    };

    std::vector<Capture> captures() const;
    // Login frames seen flowing toward the server, as attack material.
    std::vector<InterceptedMaterial> intercepted_logins() const;
    void inject_toward_server(const Bytes& frame);

private:
    ChannelSim& channel_;
    OneWayConfig f_config_;
    mutable std::mutex mu_;
    std::vector<Capture> captures_;
};

} // namespace tspa

#endif
