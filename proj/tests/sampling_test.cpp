#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "restobench/sampling.hpp"

using namespace restobench;

TEST_CASE("derive_stream matches the published splitmix64 sequence", "[sampling]") {
    // First outputs of splitmix64 seeded with 0 (well-known reference vector).
    RngState s{0};
    CHECK(s.next_u64() == 0xE220A8397B1DCDAFull);
    CHECK(s.next_u64() == 0x6E789E6AA1B965F4ull);
    CHECK(s.next_u64() == 0x06C45D188009454Full);

    // derive_stream(master, index) is the finalizer applied to
    // master + index*gamma, so stream 0 of master 0 starts at that same value.
    CHECK(derive_stream(0, 0).state == 0xE220A8397B1DCDAFull);
}

TEST_CASE("derive_stream yields distinct streams per clip index", "[sampling]") {
    for (uint64_t master : {uint64_t{0}, uint64_t{42}, uint64_t{0xDEADBEEF}}) {
        std::unordered_set<uint64_t> seen;
        for (uint64_t i = 0; i < 10000; ++i) seen.insert(derive_stream(master, i).state);
        CHECK(seen.size() == 10000);
    }
}

TEST_CASE("derive_stream is a pure function of master seed and index", "[sampling]") {
    CHECK(derive_stream(7, 123).state == derive_stream(7, 123).state);
    CHECK(derive_stream(7, 123).state != derive_stream(7, 124).state);
    CHECK(derive_stream(7, 123).state != derive_stream(8, 123).state);
}

TEST_CASE("next_unit regression values from state 42", "[sampling]") {
    RngState s{42};
    CHECK(next_unit(s) == 0.74156487877182331);
    CHECK(next_unit(s) == 0.1599103928769201);
    CHECK(next_unit(s) == 0.27860113025513866);
}

TEST_CASE("next_unit stays in [0,1)", "[sampling]") {
    for (uint64_t seed : {uint64_t{1}, uint64_t{999}, uint64_t{0xFFFFFFFFFFFFFFFFull}}) {
        RngState s{seed};
        for (int i = 0; i < 100000; ++i) {
            const double u = next_unit(s);
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
        }
    }
}

TEST_CASE("equal states produce identical streams", "[sampling]") {
    RngState a{123456789}, b{123456789};
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("box_muller maps u1=1 to exactly zero", "[sampling]") {
    // u1 = 1 means -2 ln(u1) = 0, so the radius (and the sample) is 0
    // regardless of the angle draw.
    CHECK(box_muller(1.0, 0.0) == 0.0);
    CHECK(box_muller(1.0, 0.25) == 0.0);
    CHECK(box_muller(1.0, 0.999) == 0.0);
}

TEST_CASE("box_muller radius uses u1 in (0,1]", "[sampling]") {
    // Small u1 gives a large but finite radius; u1 is never 0 by construction
    // (next_gaussian feeds 1 - next_unit which lies in (0,1]).
    const double g = box_muller(1e-12, 0.1);
    CHECK(std::isfinite(g));
    CHECK(std::abs(g) > 1.0);
}

TEST_CASE("gaussian draws have unit-normal sample statistics", "[sampling]") {
    RngState s{12345};
    const int n = 1000000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = next_gaussian(s);
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(var > 0.99);
    CHECK(var < 1.01);
}

TEST_CASE("gaussian draws are finite", "[sampling]") {
    RngState s{777};
    for (int i = 0; i < 100000; ++i) REQUIRE(std::isfinite(next_gaussian(s)));
}
