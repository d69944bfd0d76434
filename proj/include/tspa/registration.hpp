#ifndef TSPA_REGISTRATION_HPP
#define TSPA_REGISTRATION_HPP

#include "tspa/numtheory.hpp"

#include <map>
#include <string>
#include <variant>

namespace tspa {

enum class IdMode { strict, permissive };

/// ID format policy. Strict mode requires the top 16 bits of the ID
/// (at modulus width) to equal the tag; permissive mode accepts any
/// integer in [2, n-2]. The default tag stays below 0x4000 so tagged IDs
/// always fit under a generated n = p*q, which is at least 2^(bits-2).
struct IdPolicy {
    IdMode mode = IdMode::strict;
    std::uint16_t tag = 0x3A1D;
};

bool check_id_format(const IdPolicy& policy, const BigInt& id,
                     std::size_t modulus_width, const BigInt& n);

/// Smart-card contents as issued by the KIC.
struct CardData {
    BigInt n, e, g;
    BigInt id;
    BigInt cid;
    BigInt s; // ID^d mod n
    BigInt h; // g^(PW*d) mod n
    OneWayConfig f_config;
    std::size_t modulus_width = 0;
};

struct UserRecord {
    BigInt id;
    Timestamp enrolled_at;
    BigInt h; // retained so renewal can verify the old password
};

struct DuplicateId : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IdFormatRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IdNotCoprime : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownId : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OldPasswordMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Public KIC material, safe to hand to anyone.
struct PublicInfo {
    BigInt n, e, g;
    OneWayConfig f_config;
    std::size_t modulus_width = 0;
};

/// The Key Information Center: owns the system parameters, enrolls users,
/// issues cards, serves password renewal.
class Kic {
public:
    Kic(SystemParams params, IdPolicy policy)
        : params_(std::move(params)), policy_(policy) {}

    // Identity is either a name string (ID derived from it) or an explicit
    // integer (taken as-is after policy checks).
    using Identity = std::variant<std::string, BigInt>;

    CardData register_user(const Identity& who, const std::string& password,
                           Timestamp now);
    CardData renew_password(const BigInt& id, const std::string& old_password,
                            const std::string& new_password);

    BigInt derive_id(const std::string& identity) const;

    const SystemParams& params() const { return params_; }
    const IdPolicy& id_policy() const { return policy_; }
    PublicInfo public_info() const {
        return {params_.n, params_.e, params_.g, params_.f_config, params_.modulus_width};
    }
    const std::map<BigInt, UserRecord>& users() const { return users_; }
    void restore_user(UserRecord rec) { users_[rec.id] = std::move(rec); }

private:
    CardData issue(const BigInt& id, const BigInt& pw_int) const;

    SystemParams params_;
    IdPolicy policy_;
    std::map<BigInt, UserRecord> users_;
};

// Full setup: parameter generation plus an empty enrollment table.
Kic kic_setup(unsigned bits, std::optional<BigInt> e_choice,
              const OneWayConfig& f_config, const IdPolicy& policy, Rng& rng,
              int rounds = kDefaultMillerRabinRounds);

} // namespace tspa

#endif
