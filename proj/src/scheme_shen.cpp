#include "tspa/scheme_shen.hpp"

namespace tspa {

const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::BadIdFormat: return "BadIdFormat";
        case RejectReason::CidMismatch: return "CidMismatch";
        case RejectReason::StaleTimestamp: return "StaleTimestamp";
        case RejectReason::FutureTimestamp: return "FutureTimestamp";
        case RejectReason::CongruenceFailed: return "CongruenceFailed";
        case RejectReason::Replayed: return "Replayed";
    }
    return "?";
}

bool ReplayCache::check_and_insert(const BigInt& id, Timestamp t, Timestamp now) {
    std::lock_guard lock(mu_);
    prune(now);
    return entries_.emplace(id, t.seconds).second;
}

bool ReplayCache::seen(const BigInt& id, Timestamp t) const {
    std::lock_guard lock(mu_);
    return entries_.contains({id, t.seconds});
}

void ReplayCache::prune(Timestamp now) {
    for (auto it = entries_.begin(); it != entries_.end();) {
        if (it->second + retention_ < now.seconds)
            it = entries_.erase(it);
        else
            ++it;
    }
}

std::optional<RejectReason> check_window(Timestamp msg_t, Timestamp t_recv,
                                         const ClockPolicy& policy) {
    if (msg_t.seconds > t_recv.seconds) {
        if (msg_t.seconds - t_recv.seconds > policy.future_skew)
            return RejectReason::FutureTimestamp;
        return std::nullopt;
    }
    if (t_recv.seconds - msg_t.seconds > policy.delta_t)
        return RejectReason::StaleTimestamp;
    return std::nullopt;
}

LoginRequestShen shen_login(const CardData& card, const std::string& password,
                            const BigInt& r_i, Timestamp t) {
    BigInt pw = pw_to_int(password, card.f_config, card.n);
    BigInt f = f_pair(card.cid, t, card.f_config, card.n, card.modulus_width);
    LoginRequestShen m;
    m.id = card.id;
    m.cid = card.cid;
    m.x = mod_pow(card.g, r_i * pw, card.n);
    m.y = card.s * mod_pow(card.h, r_i * f, card.n) % card.n;
    m.n = card.n;
    m.e = card.e;
    m.g = card.g;
    m.t = t;
    return m;
}

std::pair<ShenVerificationTrace, std::optional<ServerResponse>>
shen_verify(const SystemParams& params, const VerifyPolicy& policy,
            const LoginRequestShen& m, Timestamp t_recv) {
    ShenVerificationTrace tr;
    auto reject = [&](RejectReason r) {
        tr.reason = r;
        return std::make_pair(tr, std::optional<ServerResponse>{});
    };

    // step 1: ID format
    if (!check_id_format(policy.id, m.id, params.modulus_width, params.n))
        return reject(RejectReason::BadIdFormat);

    // step 2: CID' = f(ID xor d) must match the transmitted CID
    tr.cid_prime = f_id_xor_d(m.id, params.d, params.f_config, params.n,
                              params.modulus_width);
    if (tr.cid_prime != m.cid) return reject(RejectReason::CidMismatch);

    // step 3: freshness window
    if (auto r = check_window(m.t, t_recv, policy.clock)) return reject(*r);
    tr.window_ok = true;
    if (policy.replay && policy.replay->seen(m.id, m.t))
        return reject(RejectReason::Replayed);

    // step 4: Y^e = ID * X^f(CID,T) mod n
    BigInt f = f_pair(m.cid, m.t, params.f_config, params.n, params.modulus_width);
    tr.lhs = mod_pow(m.y, params.e, params.n);
    tr.rhs = m.id * mod_pow(m.x, f, params.n) % params.n;
    if (tr.lhs != tr.rhs) return reject(RejectReason::CongruenceFailed);

    if (policy.replay &&
        !policy.replay->check_and_insert(m.id, m.t, t_recv))
        return reject(RejectReason::Replayed);

    tr.accepted = true;
    // step 5: mutual-auth token R = f(CID', T'')^d
    Timestamp t_now = policy.clock.clock->now();
    ServerResponse resp;
    resp.t2 = t_now;
    resp.r = mod_pow(f_pair(tr.cid_prime, t_now, params.f_config, params.n,
                            params.modulus_width),
                     params.d, params.n);
    return {tr, resp};
}

ServerAuthResult verify_server_response(const CardData& card,
                                        const ServerResponse& resp,
                                        Timestamp t_recv,
                                        const ClockPolicy& policy) {
    ServerAuthResult res;
    if (auto r = check_window(resp.t2, t_recv, policy)) {
        res.reason = r;
        return res;
    }
    res.r_prime = mod_pow(resp.r, card.e, card.n);
    res.expected = f_pair(card.cid, resp.t2, card.f_config, card.n,
                          card.modulus_width);
    res.ok = res.r_prime == res.expected;
    if (!res.ok) res.reason = RejectReason::CongruenceFailed;
    return res;
}

} // namespace tspa
