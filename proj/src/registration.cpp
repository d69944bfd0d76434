#include "tspa/registration.hpp"

#include <boost/integer/common_factor_rt.hpp>

namespace tspa {

bool check_id_format(const IdPolicy& policy, const BigInt& id,
                     std::size_t modulus_width, const BigInt& n) {
    if (id < 2 || id > n - 2) return false;
    if (policy.mode == IdMode::permissive) return true;
    if (modulus_width < 2) return false; // no room for the tag
    BigInt top = id >> (8 * modulus_width - 16);
    return top == policy.tag;
}

BigInt Kic::derive_id(const std::string& identity) const {
    const std::size_t w = params_.modulus_width;
    for (std::uint32_t counter = 0;; ++counter) {
        Bytes in(identity.begin(), identity.end());
        Bytes c = fw_encode(counter, 4);
        in.insert(in.end(), c.begin(), c.end());
        BigInt h = fw_decode(digest_bytes(in, params_.f_config.digest));
        BigInt id;
        if (policy_.mode == IdMode::strict) {
            if (w < 2) throw IdFormatRejected("modulus too narrow for strict IDs");
            unsigned body_bits = static_cast<unsigned>(8 * w - 16);
            if ((BigInt(policy_.tag) << body_bits) > params_.n - 2)
                throw IdFormatRejected("strict tag does not fit under the modulus");
            id = (BigInt(policy_.tag) << body_bits) | (h & ((BigInt(1) << body_bits) - 1));
        } else {
            id = h % (params_.n - 3) + 2; // [2, n-2]
        }
        if (!check_id_format(policy_, id, w, params_.n)) continue;
        if (boost::integer::gcd(id, params_.n) != 1) continue;
        return id;
    }
}

CardData Kic::issue(const BigInt& id, const BigInt& pw_int) const {
    CardData card;
    card.n = params_.n;
    card.e = params_.e;
    card.g = params_.g;
    card.id = id;
    card.cid = f_id_xor_d(id, params_.d, params_.f_config, params_.n,
                          params_.modulus_width);
    card.s = mod_pow(id, params_.d, params_.n);
    card.h = mod_pow(params_.g, pw_int * params_.d, params_.n);
    card.f_config = params_.f_config;
    card.modulus_width = params_.modulus_width;
    return card;
}

CardData Kic::register_user(const Identity& who, const std::string& password,
                            Timestamp now) {
    BigInt id;
    if (std::holds_alternative<std::string>(who)) {
        id = derive_id(std::get<std::string>(who));
    } else {
        id = std::get<BigInt>(who);
        if (!check_id_format(policy_, id, params_.modulus_width, params_.n))
            throw IdFormatRejected("ID rejected by format policy");
        if (boost::integer::gcd(id, params_.n) != 1)
            throw IdNotCoprime("ID shares a factor with n");
    }
    if (users_.contains(id)) throw DuplicateId("ID already enrolled");
    BigInt pw_int = pw_to_int(password, params_.f_config, params_.n);
    CardData card = issue(id, pw_int);
    users_[id] = UserRecord{id, now, card.h};
    return card;
}

CardData Kic::renew_password(const BigInt& id, const std::string& old_password,
                             const std::string& new_password) {
    auto it = users_.find(id);
    if (it == users_.end()) throw UnknownId("ID not enrolled");
    BigInt old_pw_int = pw_to_int(old_password, params_.f_config, params_.n);
    // h^e = g^pw must hold for the previously issued h
    if (mod_pow(it->second.h, params_.e, params_.n) !=
        mod_pow(params_.g, old_pw_int, params_.n))
        throw OldPasswordMismatch("old password does not verify");
    BigInt new_pw_int = pw_to_int(new_password, params_.f_config, params_.n);
    CardData card = issue(id, new_pw_int);
    it->second.h = card.h;
    return card;
}

Kic kic_setup(unsigned bits, std::optional<BigInt> e_choice,
              const OneWayConfig& f_config, const IdPolicy& policy, Rng& rng,
              int rounds) {
    return Kic(gen_system_params(bits, std::move(e_choice), f_config, rng, rounds),
               policy);
}

} // namespace tspa
