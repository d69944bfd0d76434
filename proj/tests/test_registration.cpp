#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tspa/registration.hpp"

using namespace tspa;

namespace {

const OneWayConfig kHash{};

Kic tiny_kic(IdMode mode = IdMode::permissive) {
    IdPolicy policy;
    policy.mode = mode;
    return Kic(make_system_params(7, 11, BigInt(7), kHash), policy);
}

Kic desk_kic(IdMode mode, std::uint64_t seed = 21) {
    Rng rng(seed);
    IdPolicy policy;
    policy.mode = mode;
    return kic_setup(64, std::nullopt, kHash, policy, rng);
}

} // namespace

TEST_CASE("kic_setup tiny fixture and public info hygiene") {
    Kic kic = tiny_kic();
    CHECK(kic.params().d == 43);
    CHECK(kic.params().g == 17);

    PublicInfo pub = kic.public_info();
    CHECK(pub.n == 77);
    CHECK(pub.e == 7);
    CHECK(pub.g == 17);
    // PublicInfo has no p/q/d members at all; spot-check the values that do
    // leave the KIC carry no secret.
    static_assert(sizeof(PublicInfo) < sizeof(SystemParams));
}

TEST_CASE("kic_setup determinism") {
    Rng a(9), b(9);
    IdPolicy policy;
    Kic k1 = kic_setup(32, std::nullopt, kHash, policy, a);
    Kic k2 = kic_setup(32, std::nullopt, kHash, policy, b);
    CHECK(k1.params().n == k2.params().n);
    CHECK(k1.params().d == k2.params().d);
    CHECK(k1.params().g == k2.params().g);
}

TEST_CASE("register issues the card relations") {
    Kic kic = tiny_kic();
    CardData card = kic.register_user(BigInt(8), "pw-one", {100});
    CHECK(card.id == 8);
    CHECK(card.s == 50); // 8^43 mod 77, cross-check 50^7 mod 77 = 8
    CHECK(mod_pow(card.s, card.e, card.n) == card.id);

    BigInt pw = pw_to_int("pw-one", kHash, card.n);
    CHECK(card.h == mod_pow(BigInt(17), pw * 43, BigInt(77)));
    // h^e = g^pw round-trip
    CHECK(mod_pow(card.h, card.e, card.n) == mod_pow(card.g, pw, card.n));

    CHECK_THROWS_AS(kic.register_user(BigInt(8), "pw-two", {101}), DuplicateId);
    CHECK_THROWS_AS(kic.register_user(BigInt(7), "pw", {102}), IdNotCoprime);
}

TEST_CASE("issued cards satisfy public verifiability for derived ids") {
    Kic kic = desk_kic(IdMode::strict);
    for (int i = 0; i < 10; ++i) {
        CardData card =
            kic.register_user("user-" + std::to_string(i), "pw" + std::to_string(i), {1});
        CHECK(mod_pow(card.s, card.e, card.n) == card.id);
        BigInt pw = pw_to_int("pw" + std::to_string(i), kHash, card.n);
        CHECK(mod_pow(card.h, card.e, card.n) == mod_pow(card.g, pw, card.n));
        CHECK(check_id_format(kic.id_policy(), card.id, card.modulus_width, card.n));
    }
}

TEST_CASE("check_id_format") {
    Kic kic = tiny_kic();
    CHECK(check_id_format(IdPolicy{IdMode::permissive}, 8, 1, 77));
    CHECK_FALSE(check_id_format(IdPolicy{IdMode::permissive}, 1, 1, 77));
    CHECK_FALSE(check_id_format(IdPolicy{IdMode::permissive}, 76, 1, 77));

    IdPolicy strict{IdMode::strict, 0xA11C};
    BigInt wide_n = (BigInt(0xFFFF) << 48) | 0x1234;
    BigInt tagged = (BigInt(0xA11C) << (64 - 16)) | 0x1234;
    CHECK(check_id_format(strict, tagged, 8, wide_n));
    CHECK_FALSE(check_id_format(strict, tagged >> 1, 8, wide_n));
    CHECK_FALSE(check_id_format(strict, tagged, 1, 77)); // no room for the tag
}

TEST_CASE("strict policy rejects inverted identities with overwhelming probability") {
    Kic kic = desk_kic(IdMode::strict, 33);
    const auto& p = kic.params();
    int rejected = 0, total = 0;
    for (int i = 0; i < 1000; ++i) {
        BigInt id = kic.derive_id("victim-" + std::to_string(i));
        BigInt inv = mod_inverse(id, p.n);
        ++total;
        if (!check_id_format(kic.id_policy(), inv, p.modulus_width, p.n)) ++rejected;
    }
    CHECK(total == 1000);
    CHECK(rejected >= 999); // structural defence against the inverse-ID registration
}

TEST_CASE("renewal changes h and only h") {
    Kic kic = tiny_kic();
    CardData before = kic.register_user(BigInt(8), "old-pw", {10});
    CHECK(before.s == 50);

    CHECK_THROWS_AS(kic.renew_password(8, "wrong-pw", "new-pw"), OldPasswordMismatch);
    CHECK_THROWS_AS(kic.renew_password(9, "old-pw", "new-pw"), UnknownId);

    CardData after = kic.renew_password(8, "old-pw", "new-pw");
    CHECK(after.s == before.s);
    CHECK(after.cid == before.cid);
    CHECK(after.id == before.id);
    CHECK(after.h != before.h);
    BigInt pw = pw_to_int("new-pw", kHash, after.n);
    CHECK(mod_pow(after.h, after.e, after.n) == mod_pow(after.g, pw, after.n));

    // renewing again must authenticate against the new password
    CHECK_THROWS_AS(kic.renew_password(8, "old-pw", "third"), OldPasswordMismatch);
    CHECK_NOTHROW(kic.renew_password(8, "new-pw", "third"));
}

TEST_CASE("permissive KIC accepts an explicit inverted id") {
    Kic kic = tiny_kic(IdMode::permissive);
    kic.register_user(BigInt(8), "victim-pw", {5});
    BigInt inv = mod_inverse(8, 77);
    CHECK(inv == 29);
    CardData card = kic.register_user(inv, "attacker-pw", {6});
    CHECK(card.s == 57); // 29^43 mod 77
    CHECK(mod_inverse(card.s, BigInt(77)) == 50);
}
