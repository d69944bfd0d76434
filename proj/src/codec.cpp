#include "tspa/codec.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <stdexcept>

namespace tspa {

Timestamp SystemClock::now() const {
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::system_clock::now().time_since_epoch())
                    .count();
    return {static_cast<std::uint64_t>(secs)};
}

Bytes fw_encode(const BigInt& x, std::size_t w) {
    if (x < 0) throw EncodingOverflow("fw_encode: negative value");
    if (byte_width(x) > w && x != 0)
        throw EncodingOverflow("fw_encode: value does not fit in width");
    Bytes out(w, 0);
    BigInt v = x;
    for (std::size_t i = 0; i < w && v != 0; ++i) {
        out[w - 1 - i] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
    if (v != 0) throw EncodingOverflow("fw_encode: value does not fit in width");
    return out;
}

BigInt fw_decode(const Bytes& b) {
    BigInt v = 0;
    for (std::uint8_t byte : b) {
        v <<= 8;
        v |= byte;
    }
    return v;
}

Bytes xor_fw(const Bytes& a, const Bytes& b) {
    if (a.size() != b.size()) throw std::domain_error("xor_fw: length mismatch");
    Bytes out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

Bytes digest_bytes(const Bytes& input, const std::string& algorithm) {
    EVP_MD* md = EVP_MD_fetch(nullptr, algorithm.c_str(), nullptr);
    if (!md) throw std::domain_error("unknown digest algorithm: " + algorithm);
    Bytes out(EVP_MAX_MD_SIZE);
    unsigned len = 0;
    int rc = EVP_Digest(input.data(), input.size(), out.data(), &len, md, nullptr);
    EVP_MD_free(md);
    if (rc != 1) throw std::runtime_error("digest failure");
    out.resize(len);
    return out;
}

BigInt oneway_f(const Bytes& input, const OneWayConfig& cfg, const BigInt& n) {
    if (n < 3) throw std::domain_error("oneway_f: modulus too small");
    BigInt h = fw_decode(digest_bytes(input, cfg.digest));
    BigInt range = n - 2;
    if (cfg.mode == FMode::toy) {
        BigInt b = cfg.toy_bound;
        if (b < range) range = b;
    }
    return h % range + 1;
}

BigInt f_pair(const BigInt& cid, Timestamp t, const OneWayConfig& cfg,
              const BigInt& n, std::size_t modulus_width) {
    Bytes in = fw_encode(cid, modulus_width);
    Bytes ts = fw_encode(BigInt(t.seconds), 8);
    in.insert(in.end(), ts.begin(), ts.end());
    return oneway_f(in, cfg, n);
}

BigInt f_pair_y(const BigInt& cid, const BigInt& y, const OneWayConfig& cfg,
                const BigInt& n, std::size_t modulus_width) {
    Bytes in = fw_encode(cid, modulus_width);
    Bytes yb = fw_encode(y, modulus_width);
    in.insert(in.end(), yb.begin(), yb.end());
    return oneway_f(in, cfg, n);
}

BigInt f_id_xor_d(const BigInt& id, const BigInt& d, const OneWayConfig& cfg,
                  const BigInt& n, std::size_t modulus_width) {
    return oneway_f(xor_fw(fw_encode(id, modulus_width), fw_encode(d, modulus_width)),
                    cfg, n);
}

BigInt pw_to_int(const std::string& password, const OneWayConfig& cfg, const BigInt& n) {
    OneWayConfig full = cfg;
    full.mode = FMode::hash; // passwords always use the full-range reduction
    Bytes in(password.begin(), password.end());
    return oneway_f(in, full, n);
}

} // namespace tspa
