#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tspa/codec.hpp"

#include <set>

using namespace tspa;

namespace {
const OneWayConfig kHash{};
const OneWayConfig kToy8{FMode::toy, 8};
} // namespace

TEST_CASE("fw_encode fixed vectors") {
    CHECK(fw_encode(0, 4) == Bytes{0, 0, 0, 0});
    CHECK(fw_encode(77, 1) == Bytes{0x4D});
    CHECK(fw_encode(50, 2) == Bytes{0x00, 0x32});
    CHECK_THROWS_AS(fw_encode(256, 1), EncodingOverflow);
    CHECK_THROWS_AS(fw_encode(-1, 4), EncodingOverflow);
}

TEST_CASE("fw_encode/fw_decode round-trip property") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        std::size_t w = 1 + static_cast<std::size_t>(rng.next_u64() % 40);
        BigInt x = rng.below(BigInt(1) << (8 * w));
        CHECK(fw_decode(fw_encode(x, w)) == x);
    }
}

TEST_CASE("xor_fw identities") {
    Rng rng(4);
    for (int i = 0; i < 200; ++i) {
        Bytes a = rng.random_bytes(16), b = rng.random_bytes(16);
        CHECK(xor_fw(a, a) == Bytes(16, 0));
        CHECK(xor_fw(a, Bytes(16, 0)) == a);
        CHECK(xor_fw(xor_fw(a, b), b) == a);
    }
    CHECK_THROWS_AS(xor_fw(Bytes{1}, Bytes{1, 2}), std::domain_error);
}

TEST_CASE("oneway_f range and determinism") {
    Rng rng(5);
    Bytes in = rng.random_bytes(12);
    CHECK(oneway_f(in, kHash, 77) == oneway_f(in, kHash, 77));

    OneWayConfig toy16{FMode::toy, 16};
    for (int i = 0; i < 1000; ++i) {
        Bytes b = rng.random_bytes(8);
        BigInt t = oneway_f(b, toy16, BigInt(1) << 64);
        CHECK(t >= 1);
        CHECK(t <= 16);
        BigInt h = oneway_f(b, kHash, 77);
        CHECK(h >= 1);
        CHECK(h <= 75);
    }
    CHECK_THROWS_AS(oneway_f(in, kHash, 2), std::domain_error);
}

TEST_CASE("f_pair determinism and collision behaviour") {
    BigInt n = (BigInt(1) << 128) + 0x61; // arbitrary modulus above 2^64
    BigInt cid = 0x123456;
    Timestamp t{1'700'000'123};
    CHECK(f_pair(cid, t, kHash, n, 17) == f_pair(cid, t, kHash, n, 17));

    // distinct timestamps: no duplicates expected at this modulus size
    std::set<BigInt> seen;
    for (std::uint64_t i = 0; i < 10'000; ++i)
        seen.insert(f_pair(cid, {t.seconds + i}, kHash, n, 17));
    CHECK(seen.size() == 10'000);
}

TEST_CASE("f_id_xor_d symmetry and golden vector") {
    BigInt n = 77;
    CHECK(f_id_xor_d(8, 43, kToy8, n, 1) == f_id_xor_d(43, 8, kToy8, n, 1));
    // frozen regression vector: digest(0x08 xor 0x2B) reduced into [1,8]
    CHECK(f_id_xor_d(8, 43, kToy8, n, 1) == 4);
    CHECK(f_id_xor_d(8, 43, kHash, n, 1) == 37);
}

TEST_CASE("pw_to_int ignores toy mode") {
    BigInt n = 77;
    // identical regardless of the protocol f mode
    CHECK(pw_to_int("hunter2", kToy8, n) == pw_to_int("hunter2", kHash, n));
    BigInt v = pw_to_int("hunter2", kHash, n);
    CHECK(v >= 1);
    CHECK(v <= 75);
    CHECK(pw_to_int("hunter2", kHash, n) != pw_to_int("hunter3", kHash, n));
}

TEST_CASE("manual clock and window policy plumbing") {
    auto clock = std::make_shared<ManualClock>(1000);
    CHECK(clock->now().seconds == 1000);
    clock->advance(61);
    CHECK(clock->now().seconds == 1061);
    clock->set(5);
    CHECK(clock->now().seconds == 5);
}
