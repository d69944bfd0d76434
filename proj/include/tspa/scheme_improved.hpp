#ifndef TSPA_SCHEME_IMPROVED_HPP
#define TSPA_SCHEME_IMPROVED_HPP

#include "tspa/scheme_shen.hpp"

namespace tspa {

/// 7-field login message: CID and X never travel in the clear; Z masks X
/// with CID and f(CID, Y).
struct LoginRequestImproved {
    BigInt id, y;
    Bytes z; // exactly modulus_width bytes
    BigInt n, e, g;
    Timestamp t;
};

struct ImprovedVerificationTrace {
    bool window_ok = false;
    BigInt cid_prime;
    BigInt val; // f(CID', Y)
    BigInt x_recovered;
    BigInt lhs, rhs;
    bool accepted = false;
    std::optional<RejectReason> reason;
};

LoginRequestImproved improved_login(const CardData& card,
                                    const std::string& password,
                                    const BigInt& r_i, Timestamp t);

std::pair<ImprovedVerificationTrace, std::optional<ServerResponse>>
improved_verify(const SystemParams& params, const VerifyPolicy& policy,
                const LoginRequestImproved& m, Timestamp t_recv);

// X = Z xor CID' xor f(CID', Y); total on any input of width w.
BigInt recover_x(const Bytes& z, const BigInt& cid_prime, const BigInt& y,
                 const OneWayConfig& cfg, const BigInt& n, std::size_t w);

} // namespace tspa

#endif
