#ifndef TSPA_CODEC_HPP
#define TSPA_CODEC_HPP

#include "tspa/bigint.hpp"

#include <atomic>
#include <compare>
#include <memory>
#include <string>

namespace tspa {

enum class FMode { hash, toy };

/// Configuration of the one-way function f. In hash mode f maps into
/// [1, n-1]; toy mode clamps the range to [1, B] so the divisibility and
/// gcd searches used by the attacks finish at desk scale.
struct OneWayConfig {
    FMode mode = FMode::hash;
    std::uint64_t toy_bound = 16; // B, toy mode only; 2 <= B <= 2^32
    std::string digest = "SHA-256";
};

struct Timestamp {
    std::uint64_t seconds = 0;
    auto operator<=>(const Timestamp&) const = default;
};

class Clock {
public:
    virtual ~Clock() = default;
    virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Timestamp now() const override;
};

/// Test clock: set/advance explicitly. Safe to share across threads.
class ManualClock final : public Clock {
public:
    explicit ManualClock(std::uint64_t start = 1'700'000'000) : t_(start) {}
    Timestamp now() const override { return {t_.load()}; }
    void set(std::uint64_t t) { t_.store(t); }
    void advance(std::uint64_t dt) { t_.fetch_add(dt); }

private:
    std::atomic<std::uint64_t> t_;
};

struct ClockPolicy {
    std::uint64_t delta_t = 60;    // acceptance window, seconds
    std::uint64_t future_skew = 5; // max tolerated future-dating
    std::shared_ptr<const Clock> clock;
};

struct EncodingOverflow : std::domain_error {
    using std::domain_error::domain_error;
};

// Fixed-width big-endian encoding, zero-padded to exactly w bytes.
Bytes fw_encode(const BigInt& x, std::size_t w);
BigInt fw_decode(const Bytes& b);

// Bytewise XOR; lengths must match.
Bytes xor_fw(const Bytes& a, const Bytes& b);

// Raw digest (default SHA-256) of a byte string.
Bytes digest_bytes(const Bytes& input, const std::string& algorithm);

// The one-way function f: digest then reduce into [1, n-1] (hash mode)
// or [1, min(B, n-2)] (toy mode). Never returns 0.
BigInt oneway_f(const Bytes& input, const OneWayConfig& cfg, const BigInt& n);

// f(CID, T): CID at modulus width, timestamp as 8 bytes.
BigInt f_pair(const BigInt& cid, Timestamp t, const OneWayConfig& cfg,
              const BigInt& n, std::size_t modulus_width);

// f(CID, Y): same framing but Y at modulus width.
BigInt f_pair_y(const BigInt& cid, const BigInt& y, const OneWayConfig& cfg,
                const BigInt& n, std::size_t modulus_width);

// f(ID xor d) over fixed-width encodings.
BigInt f_id_xor_d(const BigInt& id, const BigInt& d, const OneWayConfig& cfg,
                  const BigInt& n, std::size_t modulus_width);

// Password-to-integer map. Always the full hash-mode reduction, regardless
// of cfg.mode, so toy mode never weakens the password itself.
BigInt pw_to_int(const std::string& password, const OneWayConfig& cfg, const BigInt& n);

} // namespace tspa

#endif
