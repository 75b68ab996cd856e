#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "htc/codec.hpp"
#include "htc/error.hpp"

using namespace htc;

TEST_SUITE("codec") {

TEST_CASE("every sub-table is a permutation") {
    Codec codec(0, BlockLayout(8, 7, 1, 0), 64, 13);
    for (int j = 0; j < 8; ++j) {
        std::vector<bool> seen(256, false);
        for (int x = 0; x < 256; ++x) {
            uint16_t v = uint16_t((codec.table_value(uint16_t(x)) >> (8 * j)) & 0xFF);
            CHECK_FALSE(seen[v]);
            seen[v] = true;
        }
    }
}

TEST_CASE("construction is deterministic") {
    Codec a(0xDEADBEEF, BlockLayout(8, 6, 1, 1), 64, 13);
    Codec b(0xDEADBEEF, BlockLayout(8, 6, 1, 1), 64, 13);
    CHECK(a.initial_state() == b.initial_state());
    for (int x = 0; x < 256; ++x) CHECK(a.table_value(uint16_t(x)) == b.table_value(uint16_t(x)));

    Codec c(0xDEADBEF0, BlockLayout(8, 6, 1, 1), 64, 13);
    bool any_diff = c.initial_state() != a.initial_state();
    for (int x = 0; x < 256 && !any_diff; ++x)
        any_diff = c.table_value(uint16_t(x)) != a.table_value(uint16_t(x));
    CHECK(any_diff);
}

TEST_CASE("parameter validation") {
    BlockLayout layout(8, 7, 1, 0);
    CHECK_THROWS_AS(Codec(0, layout, 64, 16), Error); // 16 divides 64
    CHECK_THROWS_AS(Codec(0, layout, 64, 7), Error);  // below n
    CHECK_THROWS_AS(Codec(0, layout, 64, 64), Error); // not below N
    CHECK_THROWS_AS(Codec(0, layout, 60, 13), Error); // n does not divide N
    CHECK_NOTHROW(Codec(0, layout, 64, 13));
    CHECK_NOTHROW(Codec(0, BlockLayout(4, 2, 2, 0), 64, 13));
    CHECK_NOTHROW(Codec(0, layout, 32, 13));
}

TEST_CASE("zero state exposes the table") {
    Codec codec(42, BlockLayout(8, 7, 1, 0), 64, 13);
    for (int x = 0; x < 256; ++x) {
        uint64_t t = codec.table_value(uint16_t(x));
        auto step = codec.encode_step(uint16_t(x), 0);
        CHECK(step.y == (t & 0xFF));
        uint64_t rotated = (t << 13) | (t >> (64 - 13));
        CHECK(step.state == rotated);
    }
}

TEST_CASE("low bits of the transition are a bijection") {
    for (auto layout : {BlockLayout(8, 7, 1, 0), BlockLayout(4, 2, 2, 0),
                        BlockLayout(8, 6, 1, 1)}) {
        Codec codec(7, layout, 64, 13);
        std::vector<bool> seen(1u << layout.n, false);
        for (int x = 0; x < (1 << layout.n); ++x) {
            uint16_t y = codec.encode_step(uint16_t(x), 0).y;
            CHECK_FALSE(seen[y]);
            seen[y] = true;
        }
    }
}

TEST_CASE("states differing in low bits emit different y") {
    Codec codec(3, BlockLayout(8, 7, 1, 0), 64, 13);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        uint16_t x = uint16_t(rng() & 0xFF);
        uint64_t s1 = rng();
        uint64_t s2 = rng();
        if ((s1 & 0xFF) == (s2 & 0xFF)) continue;
        CHECK(codec.encode_step(x, s1).y != codec.encode_step(x, s2).y);
    }
}

TEST_CASE("decode_step inverts encode_step") {
    Codec codec(99, BlockLayout(8, 6, 1, 1), 64, 13);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10000; ++t) {
        uint16_t x = uint16_t(rng() & 0xFF);
        uint64_t s = rng();
        auto enc = codec.encode_step(x, s);
        auto dec = codec.decode_step(enc.y, s);
        REQUIRE(dec.x == x);
        REQUIRE(dec.state == enc.state);
    }
    // exhaustive in x at random states
    for (int t = 0; t < 100; ++t) {
        uint64_t s = rng();
        for (int x = 0; x < 256; ++x) {
            auto enc = codec.encode_step(uint16_t(x), s);
            auto dec = codec.decode_step(enc.y, s);
            REQUIRE(dec.x == x);
        }
    }
}

TEST_CASE("chain encode then decode reproduces the sequence") {
    for (auto layout : {BlockLayout(8, 7, 1, 0), BlockLayout(4, 2, 2, 0)}) {
        Codec codec(1234, layout, 64, 13);
        std::mt19937_64 rng(17);
        std::vector<uint16_t> xs(500);
        uint16_t zero_r_mask = uint16_t((1u << (layout.k + layout.f)) - 1);
        for (auto& x : xs) x = uint16_t(rng()) & zero_r_mask;

        uint64_t s = codec.initial_state();
        std::vector<uint16_t> ys;
        for (uint16_t x : xs) {
            auto step = codec.encode_step(x, s);
            ys.push_back(step.y);
            s = step.state;
        }
        uint64_t final_enc = s;

        s = codec.initial_state();
        for (size_t i = 0; i < ys.size(); ++i) {
            auto step = codec.decode_step(ys[i], s);
            REQUIRE(step.x == xs[i]);
            CHECK(step.redundancy_ok);
            s = step.state;
        }
        CHECK(s == final_enc);
    }
}

TEST_CASE("random blocks pass the redundancy check at rate 2^-R") {
    std::mt19937_64 rng(19);
    for (int R : {1, 2}) {
        Codec codec(5, BlockLayout(8, 6 - (R - 1), 1, R), 64, 13);
        const int trials = 100000;
        int ok = 0;
        uint64_t s = rng();
        for (int t = 0; t < trials; ++t) {
            uint16_t y = uint16_t(rng() & 0xFF);
            if (codec.decode_step(y, s).redundancy_ok) ++ok;
        }
        double p = std::pow(2.0, -R);
        double sigma = std::sqrt(p * (1 - p) * trials);
        CHECK(std::fabs(ok - trials * p) <= 3.0 * sigma);
    }
}

TEST_CASE("wrong-state decode passes redundancy with frequency 2^-R") {
    std::mt19937_64 rng(23);
    Codec codec(6, BlockLayout(8, 6, 1, 1), 64, 13);
    const int trials = 100000;
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        uint16_t x = uint16_t(rng()) & 0x7F; // zero redundancy field
        uint64_t s = rng();
        uint64_t wrong = rng();
        if (s == wrong) continue;
        auto enc = codec.encode_step(x, s);
        if (codec.decode_step(enc.y, wrong).redundancy_ok) ++ok;
    }
    double sigma = std::sqrt(0.25 * trials);
    CHECK(std::fabs(ok - trials * 0.5) <= 3.0 * sigma);
}

} // TEST_SUITE
