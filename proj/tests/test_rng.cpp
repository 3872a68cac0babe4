#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gcml/rng.hpp"

using gcml::Philox4x64;
using gcml::RngStream;

// Known-answer blocks checked against an independent implementation of the
// same 10-round 4x64 cipher. Any change to the round function, constants or
// buffering breaks every seeded result in the project, so these are pinned
// bit-for-bit.
TEST_CASE("philox known answer vectors") {
    auto out = Philox4x64::block({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x16554d9eca36314cULL);
    CHECK(out[1] == 0xdb20fe9d672d0fdcULL);
    CHECK(out[2] == 0xd7e772cee186176bULL);
    CHECK(out[3] == 0x7e68b68aec7ba23bULL);

    out = Philox4x64::block({0, 0, 0, 0}, {0xa4093822299f31d0ULL, 0x13198a2e03707344ULL});
    CHECK(out[0] == 0xd84d62fbf76c0421ULL);
    CHECK(out[1] == 0x62e53e2d4b5d5b62ULL);
    CHECK(out[2] == 0x06340f36220b7ae6ULL);
    CHECK(out[3] == 0xa92f5702fbe81c4bULL);

    out = Philox4x64::block({1, 2, 3, 4}, {5, 6});
    CHECK(out[0] == 0xa39b5519339fe354ULL);
    CHECK(out[1] == 0xaceb1228efc25196ULL);
    CHECK(out[2] == 0xa0a2e3c25aa5f4fcULL);
    CHECK(out[3] == 0x08d0cfa9332720dfULL);

    const std::uint64_t ff = 0xffffffffffffffffULL;
    out = Philox4x64::block({ff, ff, ff, ff}, {ff, ff});
    CHECK(out[0] == 0x87b092c3013fe90bULL);
    CHECK(out[1] == 0x438c3c67be8d0224ULL);
    CHECK(out[2] == 0x9cc7d7c69cd777b6ULL);
    CHECK(out[3] == 0xa09caebf594f0ba0ULL);
}

TEST_CASE("philox sequential output walks the counter in block order") {
    Philox4x64 eng({7, 8}, {0, 0, 0, 0});
    const std::uint64_t expected[8] = {
        0xd2b465023e353dbcULL, 0xde63b7cd3a79f3eaULL, 0x859ce4498fec458dULL,
        0x9fcba7eecf80bd49ULL, 0xae99167db3610f4aULL, 0x2e77ca2ff06bc333ULL,
        0x3a7eea1b486841caULL, 0x585b39e2c5c8eaf3ULL,
    };
    for (std::uint64_t v : expected) CHECK(eng.next_u64() == v);
}

TEST_CASE("derive_seed separates labels and indices") {
    const std::uint64_t master = 42;
    CHECK(gcml::derive_seed(master, "boot", 3) == gcml::derive_seed(master, "boot", 3));
    CHECK(gcml::derive_seed(master, "boot", 3) != gcml::derive_seed(master, "boot", 4));
    CHECK(gcml::derive_seed(master, "boot", 3) != gcml::derive_seed(master, "fit", 3));
    CHECK(gcml::derive_seed(master, "boot", 3, 0) != gcml::derive_seed(master, "boot", 3, 1));
    CHECK(gcml::derive_seed(master, "a", 0) != gcml::derive_seed(master + 1, "a", 0));
}

TEST_CASE("streams with equal construction agree and others diverge") {
    RngStream a(99, "sim", 5);
    RngStream b(99, "sim", 5);
    RngStream c(99, "sim", 6);
    bool all_equal = true;
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        std::uint64_t va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);

    RngStream direct(gcml::derive_seed(99, "sim", 5));
    RngStream labeled(99, "sim", 5);
    CHECK(direct.next_u64() == labeled.next_u64());
}

TEST_CASE("uniform01 lands in [0,1) on the 53-bit lattice") {
    RngStream rng(123);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        // Values are k * 2^-53 by construction.
        double scaled = u * 9007199254740992.0; // 2^53
        CHECK(scaled == std::floor(scaled));
    }
}

TEST_CASE("uniform_below respects the bound and covers small ranges") {
    RngStream rng(7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 5000; ++i) {
        std::uint64_t v = rng.uniform_below(13);
        CHECK(v < 13);
        seen.insert(v);
    }
    CHECK(seen.size() == 13);
    for (int i = 0; i < 32; ++i) CHECK(rng.uniform_below(1) == 0);
}

TEST_CASE("normal has sane moments and a deterministic cached spare") {
    RngStream rng(2024);
    const int n = 40000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = rng.normal();
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);

    // The Box-Muller spare must replay identically.
    RngStream s1(55), s2(55);
    for (int i = 0; i < 9; ++i) CHECK(s1.normal() == s2.normal());
}

TEST_CASE("bernoulli tracks its probability") {
    RngStream rng(31);
    int hits = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
    double rate = static_cast<double>(hits) / n;
    CHECK(std::abs(rate - 0.3) < 0.015);
}
