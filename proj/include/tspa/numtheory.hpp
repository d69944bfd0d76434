#ifndef TSPA_NUMTHEORY_HPP
#define TSPA_NUMTHEORY_HPP

#include "tspa/bigint.hpp"
#include "tspa/codec.hpp"

#include <optional>
#include <stdexcept>
#include <tuple>

namespace tspa {

struct NotInvertible : std::domain_error {
    using std::domain_error::domain_error;
};

struct GenerationTimeout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// KIC key material: RSA-style (n, e, d) plus a g primitive in both GF(p)
/// and GF(q), and the f configuration shared with every card.
struct SystemParams {
    BigInt p, q;
    BigInt n; // p * q
    BigInt e; // public, prime
    BigInt d; // secret, e*d = 1 mod (p-1)(q-1)
    BigInt g;
    OneWayConfig f_config;
    std::size_t modulus_width = 0; // byte width of n

    BigInt phi() const { return (p - 1) * (q - 1); }
};

// base^exp mod m by square-and-multiply; exp >= 0, m >= 2.
BigInt mod_pow(const BigInt& base, const BigInt& exp, const BigInt& m);

// Multiplicative inverse of a mod m; throws NotInvertible if gcd != 1.
BigInt mod_inverse(const BigInt& a, const BigInt& m);

// Extended Euclid: returns (g, u, v) with a*u + b*v = g, u normalized to
// [0, b/g) when b > 0.
std::tuple<BigInt, BigInt, BigInt> ext_gcd(const BigInt& a, const BigInt& b);

inline constexpr int kDefaultMillerRabinRounds = 40;

// Miller-Rabin with random bases drawn from rng.
bool is_probable_prime(const BigInt& n, int rounds, Rng& rng);

// Random prime p with (p-1)/2 also prime, exactly `bits` bits.
BigInt gen_safe_prime(unsigned bits, Rng& rng,
                      int rounds = kDefaultMillerRabinRounds,
                      std::uint64_t max_attempts = 10'000'000);

// Smallest g >= 2 of full multiplicative order modulo both p and q.
// Order is checked through the factorizations of p-1 and q-1.
BigInt find_primitive_root_both(const BigInt& p, const BigInt& q);

// Full parameter generation: safe primes of bits/2 each, e the smallest
// prime >= 3 coprime to (p-1)(q-1) unless given explicitly.
SystemParams gen_system_params(unsigned bits, std::optional<BigInt> e_choice,
                               const OneWayConfig& f_config, Rng& rng,
                               int rounds = kDefaultMillerRabinRounds);

// Assemble params from fixed primes (test fixtures, known-answer vectors).
SystemParams make_system_params(const BigInt& p, const BigInt& q,
                                std::optional<BigInt> e_choice,
                                const OneWayConfig& f_config);

} // namespace tspa

#endif
