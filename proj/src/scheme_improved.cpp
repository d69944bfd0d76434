#include "tspa/scheme_improved.hpp"

namespace tspa {

BigInt recover_x(const Bytes& z, const BigInt& cid_prime, const BigInt& y,
                 const OneWayConfig& cfg, const BigInt& n, std::size_t w) {
    if (z.size() != w) throw std::domain_error("recover_x: bad Z width");
    BigInt val = f_pair_y(cid_prime, y, cfg, n, w);
    return fw_decode(xor_fw(xor_fw(z, fw_encode(cid_prime, w)), fw_encode(val, w)));
}

LoginRequestImproved improved_login(const CardData& card,
                                    const std::string& password,
                                    const BigInt& r_i, Timestamp t) {
    const std::size_t w = card.modulus_width;
    LoginRequestShen base = shen_login(card, password, r_i, t);
    BigInt val = f_pair_y(card.cid, base.y, card.f_config, card.n, w);
    LoginRequestImproved m;
    m.id = base.id;
    m.y = base.y;
    m.z = xor_fw(xor_fw(fw_encode(base.x, w), fw_encode(card.cid, w)),
                 fw_encode(val, w));
    m.n = base.n;
    m.e = base.e;
    m.g = base.g;
    m.t = t;
    return m;
}

std::pair<ImprovedVerificationTrace, std::optional<ServerResponse>>
improved_verify(const SystemParams& params, const VerifyPolicy& policy,
                const LoginRequestImproved& m, Timestamp t_recv) {
    ImprovedVerificationTrace tr;
    auto reject = [&](RejectReason r) {
        tr.reason = r;
        return std::make_pair(tr, std::optional<ServerResponse>{});
    };
    const std::size_t w = params.modulus_width;

    // step 1: ID format
    if (!check_id_format(policy.id, m.id, w, params.n))
        return reject(RejectReason::BadIdFormat);

    // step 2: freshness window (before any secret-derived computation)
    if (auto r = check_window(m.t, t_recv, policy.clock)) return reject(*r);
    tr.window_ok = true;
    if (m.z.size() != w) return reject(RejectReason::CongruenceFailed);
    if (policy.replay && policy.replay->seen(m.id, m.t))
        return reject(RejectReason::Replayed);

    // step 3: recover X from Z
    tr.cid_prime = f_id_xor_d(m.id, params.d, params.f_config, params.n, w);
    tr.val = f_pair_y(tr.cid_prime, m.y, params.f_config, params.n, w);
    tr.x_recovered = fw_decode(xor_fw(xor_fw(m.z, fw_encode(tr.cid_prime, w)),
                                      fw_encode(tr.val, w)));

    // step 4: Y^e = ID * X^f(CID',T) mod n
    BigInt f = f_pair(tr.cid_prime, m.t, params.f_config, params.n, w);
    tr.lhs = mod_pow(m.y, params.e, params.n);
    tr.rhs = m.id * mod_pow(tr.x_recovered, f, params.n) % params.n;
    if (tr.lhs != tr.rhs) return reject(RejectReason::CongruenceFailed);

    if (policy.replay &&
        !policy.replay->check_and_insert(m.id, m.t, t_recv))
        return reject(RejectReason::Replayed);

    tr.accepted = true;
    // step 5: same mutual-auth token as the baseline scheme
    Timestamp t_now = policy.clock.clock->now();
    ServerResponse resp;
    resp.t2 = t_now;
    resp.r = mod_pow(f_pair(tr.cid_prime, t_now, params.f_config, params.n, w),
                     params.d, params.n);
    return {tr, resp};
}

} // namespace tspa
