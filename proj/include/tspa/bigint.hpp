#ifndef TSPA_BIGINT_HPP
#define TSPA_BIGINT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace tspa {

using BigInt = boost::multiprecision::cpp_int;
using Bytes = std::vector<std::uint8_t>;

// Minimal big-endian byte width of x (0 -> 1).
inline std::size_t byte_width(const BigInt& x) {
    if (x == 0) return 1;
    std::size_t bits = msb(x) + 1;
    return (bits + 7) / 8;
}

/// Deterministic random source; every protocol-level draw goes through one
/// of these so a fixed seed reproduces a whole run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform integer with exactly `bits` bits (top bit set) for bits >= 1.
    BigInt random_bits(unsigned bits) {
        if (bits == 0) return 0;
        BigInt r = 0;
        unsigned produced = 0;
        while (produced < bits) {
            r <<= 64;
            r |= next_u64();
            produced += 64;
        }
        r >>= (produced - bits);
        bit_set(r, bits - 1);
        return r;
    }

    // Uniform in [0, bound).
    BigInt below(const BigInt& bound) {
        if (bound <= 0) throw std::domain_error("Rng::below: bound must be positive");
        unsigned bits = static_cast<unsigned>(msb(bound)) + 1;
        for (;;) {
            BigInt r = 0;
            unsigned produced = 0;
            while (produced < bits) {
                r <<= 64;
                r |= next_u64();
                produced += 64;
            }
            r >>= (produced - bits);
            if (r < bound) return r;
        }
    }

    // Uniform in [lo, hi] inclusive.
    BigInt range(const BigInt& lo, const BigInt& hi) {
        if (lo > hi) throw std::domain_error("Rng::range: empty range");
        return lo + below(hi - lo + 1);
    }

    Bytes random_bytes(std::size_t len) {
        Bytes out(len);
        for (auto& b : out) b = static_cast<std::uint8_t>(next_u64() & 0xff);
        return out;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace tspa

#endif
