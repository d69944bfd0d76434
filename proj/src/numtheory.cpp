#include "tspa/numtheory.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <algorithm>
#include <array>
#include <vector>

namespace tspa {

namespace {

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        std::vector<std::uint32_t> out;
        std::vector<bool> sieve(10000, true);
        for (std::uint32_t i = 2; i < sieve.size(); ++i) {
            if (!sieve[i]) continue;
            out.push_back(i);
            for (std::uint32_t j = i * i; j < sieve.size(); j += i) sieve[j] = false;
        }
        return out;
    }();
    return primes;
}

bool divisible_by_small_prime(const BigInt& n) {
    for (std::uint32_t p : small_primes()) {
        if (n == p) return false;
        if (n % p == 0) return true;
    }
    return false;
}

} // namespace

BigInt mod_pow(const BigInt& base, const BigInt& exp, const BigInt& m) {
    if (m < 2) throw std::domain_error("mod_pow: modulus must be >= 2");
    if (exp < 0) throw std::domain_error("mod_pow: negative exponent");
    BigInt result = 1;
    BigInt b = base % m;
    if (b < 0) b += m;
    BigInt e = exp;
    while (e > 0) {
        if (bit_test(e, 0)) result = result * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return result;
}

std::tuple<BigInt, BigInt, BigInt> ext_gcd(const BigInt& a, const BigInt& b) {
    if (a < 0 || b < 0) throw std::domain_error("ext_gcd: negative input");
    if (a == 0 && b == 0) throw std::domain_error("ext_gcd: gcd(0,0) undefined");
    BigInt old_r = a, r = b;
    BigInt old_u = 1, u = 0;
    while (r != 0) {
        BigInt qq = old_r / r;
        BigInt tmp = old_r - qq * r;
        old_r = r; r = tmp;
        tmp = old_u - qq * u;
        old_u = u; u = tmp;
    }
    BigInt g = old_r;
    BigInt bu = old_u;
    if (b > 0) { // canonical coefficient: u in [0, b/g)
        BigInt m = b / g;
        bu %= m;
        if (bu < 0) bu += m;
    }
    BigInt bv = b == 0 ? BigInt(0) : (g - a * bu) / b;
    return {g, bu, bv};
}

BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    if (m < 2) throw std::domain_error("mod_inverse: modulus must be >= 2");
    BigInt ar = a % m;
    if (ar < 0) ar += m;
    auto [g, u, v] = ext_gcd(ar, m);
    if (g != 1) throw NotInvertible("mod_inverse: gcd != 1");
    return u; // already in [0, m)
}

bool is_probable_prime(const BigInt& n, int rounds, Rng& rng) {
    if (n < 2) return false;
    for (std::uint32_t p : small_primes()) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    // n - 1 = 2^s * t with t odd
    BigInt t = n - 1;
    unsigned s = 0;
    while (!bit_test(t, 0)) { t >>= 1; ++s; }
    for (int i = 0; i < rounds; ++i) {
        BigInt a = rng.range(2, n - 2);
        BigInt x = mod_pow(a, t, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (unsigned j = 1; j < s; ++j) {
            x = x * x % n;
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

BigInt gen_safe_prime(unsigned bits, Rng& rng, int rounds, std::uint64_t max_attempts) {
    if (bits < 8) throw std::domain_error("gen_safe_prime: bits must be >= 8");
    std::uint64_t attempts = 0;
    for (;;) {
        BigInt p = rng.random_bits(bits);
        // force p = 3 mod 4 so (p-1)/2 is odd
        bit_set(p, 0);
        bit_set(p, 1);
        BigInt limit = (BigInt(1) << bits) - 1;
        for (; p <= limit; p += 4) {
            if (++attempts > max_attempts)
                throw GenerationTimeout("gen_safe_prime: attempt cap exceeded");
            BigInt half = (p - 1) >> 1;
            if (divisible_by_small_prime(p) || divisible_by_small_prime(half)) continue;
            if (!is_probable_prime(half, rounds, rng)) continue;
            if (!is_probable_prime(p, rounds, rng)) continue;
            return p;
        }
    }
}

namespace {

// Prime factors by trial division; a large prime cofactor is accepted.
std::vector<BigInt> prime_factors(BigInt n) {
    std::vector<BigInt> factors;
    for (std::uint32_t p : small_primes()) {
        if (n % p == 0) {
            factors.emplace_back(p);
            while (n % p == 0) n /= p;
        }
        if (n == 1) break;
    }
    if (n > 1) {
        Rng local(0x5eed);
        if (!is_probable_prime(n, kDefaultMillerRabinRounds, local))
            throw ParamError("prime_factors: composite cofactor out of reach");
        factors.push_back(n);
    }
    return factors;
}

bool is_primitive_root(const BigInt& g, const BigInt& p,
                       const std::vector<BigInt>& factors_of_p_minus_1) {
    if (g % p == 0) return false;
    for (const BigInt& r : factors_of_p_minus_1) {
        if (mod_pow(g, (p - 1) / r, p) == 1) return false;
    }
    return true;
}

} // namespace

BigInt find_primitive_root_both(const BigInt& p, const BigInt& q) {
    if (p == q) throw std::domain_error("find_primitive_root_both: p == q");
    auto fp = prime_factors(p - 1);
    auto fq = prime_factors(q - 1);
    BigInt n = p * q;
    for (BigInt g = 2; g < n; ++g) {
        if (is_primitive_root(g, p, fp) && is_primitive_root(g, q, fq)) return g;
    }
    throw ParamError("find_primitive_root_both: no generator found");
}

namespace {

BigInt choose_auto_e(const BigInt& phi) {
    for (std::uint32_t cand : small_primes()) {
        if (cand < 3) continue;
        if (boost::integer::gcd(BigInt(cand), phi) == 1) return cand;
    }
    throw ParamError("choose_auto_e: no small prime coprime to phi");
}

SystemParams assemble(const BigInt& p, const BigInt& q,
                      std::optional<BigInt> e_choice,
                      const OneWayConfig& f_config, Rng& rng, int rounds) {
    SystemParams sp;
    sp.p = p;
    sp.q = q;
    sp.n = p * q;
    BigInt phi = (p - 1) * (q - 1);
    if (e_choice) {
        sp.e = *e_choice;
        if (!is_probable_prime(sp.e, rounds, rng))
            throw ParamError("explicit e is not prime");
        if (boost::integer::gcd(sp.e, phi) != 1)
            throw ParamError("explicit e not coprime to (p-1)(q-1)");
    } else {
        sp.e = choose_auto_e(phi);
    }
    sp.d = mod_inverse(sp.e, phi);
    sp.g = find_primitive_root_both(p, q);
    sp.f_config = f_config;
    sp.modulus_width = byte_width(sp.n);
    return sp;
}

} // namespace

SystemParams gen_system_params(unsigned bits, std::optional<BigInt> e_choice,
                               const OneWayConfig& f_config, Rng& rng, int rounds) {
    if (bits < 16) throw ParamError("gen_system_params: bits must be >= 16");
    unsigned half = bits / 2;
    for (int tries = 0; tries < 64; ++tries) {
        BigInt p = gen_safe_prime(half, rng, rounds);
        BigInt q = gen_safe_prime(half, rng, rounds);
        while (q == p) q = gen_safe_prime(half, rng, rounds);
        try {
            return assemble(p, q, e_choice, f_config, rng, rounds);
        } catch (const ParamError&) {
            if (e_choice) throw; // explicit e: surface the conflict
            // auto mode retries with fresh primes
        }
    }
    throw ParamError("gen_system_params: exhausted retries");
}

SystemParams make_system_params(const BigInt& p, const BigInt& q,
                                std::optional<BigInt> e_choice,
                                const OneWayConfig& f_config) {
    Rng local(0x5eed);
    if (!is_probable_prime(p, kDefaultMillerRabinRounds, local) ||
        !is_probable_prime(q, kDefaultMillerRabinRounds, local))
        throw ParamError("make_system_params: p, q must be prime");
    if (p == q) throw ParamError("make_system_params: p == q");
    return assemble(p, q, e_choice, f_config, local, kDefaultMillerRabinRounds);
}

} // namespace tspa
