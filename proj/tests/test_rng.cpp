#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"

#include "core/rng.hpp"

using namespace stochham;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors for the Philox4x32 bijection with 10 rounds.
    {
        auto out = philox4x32_10({0u, 0u, 0u, 0u}, {0u, 0u});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    {
        auto out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                 {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    {
        auto out = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                 {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("streams are deterministic and distinct") {
    Stream a(12345u, 7u);
    Stream b(12345u, 7u);
    Stream c(12345u, 8u);
    bool all_equal = true;
    bool any_equal_c = false;
    for (int i = 0; i < 1000; ++i) {
        uint64_t va = a.next_u64();
        uint64_t vb = b.next_u64();
        uint64_t vc = c.next_u64();
        all_equal = all_equal && (va == vb);
        any_equal_c = any_equal_c || (va == vc);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_c); // 1000 64-bit collisions across streams: impossible in practice
}

TEST_CASE("stream id scheme packs replica, role, summand") {
    CHECK(stream_id(0, Role::standalone, Summand::generic) == 0u);
    CHECK(stream_id(1, Role::action, Summand::diffusion) == 256u + 16u + 1u);
    CHECK(stream_id(2, Role::angle, Summand::large_jumps) == 512u + 32u + 3u);
}

TEST_CASE("purpose-salted master keys differ") {
    uint64_t seed = 99u;
    CHECK(master_key(seed, Purpose::main) != master_key(seed, Purpose::birkhoff));
    CHECK(master_key(seed, Purpose::main) != master_key(seed, Purpose::bootstrap));
    CHECK(mix64(0u) != 0u);
}

TEST_CASE("uniform01 stays strictly inside (0,1) with the right mean") {
    Stream rng(master_key(3u, Purpose::main), 0u);
    const int n = 100000;
    double sum = 0.0;
    bool inside = true;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform01();
        inside = inside && (u > 0.0) && (u < 1.0);
        sum += u;
    }
    CHECK(inside);
    double mean = sum / n;
    // se of the mean of U(0,1) is 1/sqrt(12 n); allow 4 se.
    CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("normal draws have unit variance and zero mean") {
    Stream rng(master_key(4u, Purpose::main), 1u);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("poisson sampling matches its mean for small and large rates") {
    Stream rng(master_key(5u, Purpose::main), 2u);
    for (double lambda : {0.3, 3.7, 45.0}) {
        const int n = 20000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(lambda));
        double mean = sum / n;
        CHECK(std::abs(mean - lambda) < 4.0 * std::sqrt(lambda / n));
    }
    CHECK(rng.poisson(0.0) == 0u);
}
