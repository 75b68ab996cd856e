#include <doctest.h>

#include <cmath>
#include <random>

#include "htc/analysis.hpp"
#include "htc/bitcore.hpp"
#include "htc/error.hpp"

using namespace htc;

TEST_SUITE("bitcore") {

TEST_CASE("unit shift is raster order") {
    Ordering o = build_ordering(4, 4, 1, 0);
    for (size_t i = 0; i < 16; ++i) CHECK(o.perm[i] == i);
}

TEST_CASE("shift (3,2) on 4x4 matches the generation rule") {
    Ordering o = build_ordering(4, 4, 3, 2);
    // independent placement, straight from the definition
    for (int i = 0; i < 16; ++i) {
        int x = (3 * i) % 4;
        int y = (2 * i + i / 4) % 4;
        CHECK(o.perm[i] == uint32_t(y * 4 + x));
    }
    // bijection
    std::vector<bool> seen(16, false);
    for (uint32_t p : o.perm) {
        CHECK_FALSE(seen[p]);
        seen[p] = true;
    }
}

TEST_CASE("degenerate shift is rejected") {
    CHECK_THROWS_AS(build_ordering(2, 2, 2, 0), Error);
    try {
        build_ordering(2, 2, 2, 0);
    } catch (const Error& e) {
        CHECK(e.code() == errc::non_permutation);
    }
}

TEST_CASE("random shifts either fail or verify as bijections") {
    std::mt19937_64 rng(101);
    int accepted = 0;
    for (int t = 0; t < 200; ++t) {
        int w = 1 + int(rng() % 12);
        int h = 1 + int(rng() % 12);
        int dx = int(rng() % 17) - 8;
        int dy = int(rng() % 17) - 8;
        try {
            Ordering o = build_ordering(w, h, dx, dy);
            ++accepted;
            std::vector<bool> seen(o.size(), false);
            for (uint32_t p : o.perm) {
                REQUIRE(p < o.size());
                REQUIRE_FALSE(seen[p]);
                seen[p] = true;
            }
            for (size_t i = 0; i < o.size(); ++i) CHECK(o.inv[o.perm[i]] == i);
        } catch (const Error& e) {
            CHECK(e.code() == errc::non_permutation);
        }
    }
    CHECK(accepted > 0);
}

TEST_CASE("permute round-trips and matches direct placement") {
    Ordering o = build_ordering(4, 4, 3, 2);
    std::mt19937_64 rng(77);
    std::vector<uint8_t> bits(16);
    for (auto& b : bits) b = rng() & 1;

    std::vector<uint8_t> fwd = permute(bits, o, PermuteDir::forward);
    for (size_t i = 0; i < bits.size(); ++i) CHECK(fwd[o.perm[i]] == bits[i]);

    CHECK(permute(fwd, o, PermuteDir::inverse) == bits);

    Ordering raster = build_ordering(2, 2, 1, 0);
    std::vector<uint8_t> v{0, 1, 0, 1};
    CHECK(permute(v, raster, PermuteDir::forward) == v);

    CHECK_THROWS_AS(permute(v, o, PermuteDir::forward), Error); // wrong length
}

TEST_CASE("inverse of forward is identity for random orderings") {
    std::mt19937_64 rng(303);
    for (int t = 0; t < 50; ++t) {
        int w = 2 + int(rng() % 10);
        int h = 2 + int(rng() % 10);
        Ordering o;
        try {
            o = build_ordering(w, h, 1 + int(rng() % (w - 1)), int(rng() % h));
        } catch (const Error&) {
            continue;
        }
        std::vector<uint8_t> bits(o.size());
        for (auto& b : bits) b = rng() & 1;
        CHECK(permute(permute(bits, o, PermuteDir::forward), o, PermuteDir::inverse) == bits);
    }
}

TEST_CASE("general grayness inverts the level exactly") {
    std::vector<uint16_t> zeros(6, 0);
    GraynessMap dark = grayness_general(zeros, 3, 2, 255);
    for (double g : dark.g) CHECK(g == 1.0);

    std::mt19937_64 rng(55);
    for (int maxval : {1, 255, 65535}) {
        std::vector<uint16_t> levels(64);
        for (auto& v : levels) v = uint16_t(rng() % (maxval + 1));
        GraynessMap map = grayness_general(levels, 8, 8, maxval);
        for (size_t i = 0; i < levels.size(); ++i)
            CHECK(map.g[i] + double(levels[i]) / maxval == 1.0);
    }
}

TEST_CASE("homogeneous grayness splits dark and light") {
    std::vector<uint16_t> levels{0, 255, 255, 0};
    GraynessMap map = grayness_homogeneous(levels, 2, 2, 255, 0.75);
    CHECK(map.g[0] == 0.75);
    CHECK(map.g[1] == 0.25);
    CHECK(map.g[2] == 0.25);
    CHECK(map.g[3] == 0.75);

    CHECK_THROWS_AS(grayness_homogeneous(levels, 2, 2, 255, 0.4), Error);
    CHECK_THROWS_AS(grayness_homogeneous(levels, 2, 2, 255, 1.1), Error);
}

TEST_CASE("kt grayness fixes classified pixels") {
    std::vector<uint16_t> levels{0, 128, 255, 17};
    GraynessMap map = grayness_kt(levels, 2, 2, 255, [](uint16_t level) {
        if (level < 64) return KtClass::fixed_black;
        if (level > 192) return KtClass::fixed_white;
        return KtClass::free_pixel;
    });
    CHECK(map.g[0] == 1.0);
    CHECK(map.g[1] == 0.5);
    CHECK(map.g[2] == 0.0);
    CHECK(map.g[3] == 1.0);

    // all pixels classified hard: a pure fixed-bit instance
    GraynessMap hard = grayness_kt(levels, 2, 2, 255, [](uint16_t level) {
        return level < 128 ? KtClass::fixed_black : KtClass::fixed_white;
    });
    for (double g : hard.g) CHECK((g == 0.0 || g == 1.0));
}

TEST_CASE("adjust leaves feasible maps alone") {
    GraynessMap map(4, 4, 0.5);
    GraynessMap out = adjust_grayness(map, 0.9, 0.0);
    CHECK(out.g == map.g);
}

TEST_CASE("adjust reaches the target entropy by shrinking toward 1/2") {
    GraynessMap map(8, 8, 0.9);
    GraynessMap out = adjust_grayness(map, 0.6, 0.0);
    // oracle: uniform map, so g' solves h(g') = 0.6 on the upper branch
    for (double g : out.g) CHECK(g == doctest::Approx(0.8538975966).epsilon(1e-6));
    double mean = 0;
    for (double g : out.g) mean += entropy(g);
    mean /= double(out.size());
    CHECK(std::fabs(mean - 0.6) <= 1e-6);
}

TEST_CASE("adjust with only fixed pixels is infeasible") {
    GraynessMap map(2, 2, 1.0);
    map.g[1] = 0.0;
    map.g[3] = 0.0;
    CHECK_THROWS_AS(adjust_grayness(map, 0.5, 0.0), Error);
}

TEST_CASE("adjust properties on random maps") {
    std::mt19937_64 rng(9001);
    for (int t = 0; t < 30; ++t) {
        GraynessMap map(8, 8);
        for (auto& g : map.g) {
            uint64_t r = rng() % 10;
            if (r == 0)
                g = 0.0;
            else if (r == 1)
                g = 1.0;
            else
                g = 0.05 + 0.9 * double(rng() % 1000) / 999.0;
        }
        double target = 0.80 + 0.15 * double(rng() % 100) / 99.0;
        GraynessMap out;
        try {
            out = adjust_grayness(map, target, 0.0);
        } catch (const Error& e) {
            CHECK(e.code() == errc::infeasible);
            continue;
        }
        double mean = 0;
        size_t count = 0;
        for (size_t i = 0; i < out.size(); ++i) {
            if (map.is_fixed(i)) {
                CHECK(out.g[i] == map.g[i]);
                continue;
            }
            ++count;
            mean += entropy(out.g[i]);
            // never crosses 1/2, only shrinks toward it
            CHECK((map.g[i] - 0.5) * (out.g[i] - 0.5) >= 0.0);
            CHECK(std::fabs(out.g[i] - 0.5) <= std::fabs(map.g[i] - 0.5) + 1e-15);
        }
        mean /= double(count);
        double premean = 0;
        for (size_t i = 0; i < map.size(); ++i)
            if (!map.is_fixed(i)) premean += entropy(map.g[i]);
        premean /= double(count);
        if (premean >= target)
            CHECK(out.g == map.g);
        else
            CHECK(std::fabs(mean - target) <= 1e-6);
    }
}

TEST_CASE("layout validation") {
    CHECK_THROWS_AS(BlockLayout(8, 6, 1, 0), Error);  // k+f+R != n
    CHECK_THROWS_AS(BlockLayout(17, 16, 1, 0), Error); // table guard
    CHECK_THROWS_AS(BlockLayout(8, -1, 9, 0), Error);
    BlockLayout ok(8, 6, 1, 1);
    CHECK(ok.rate() == doctest::Approx(0.75));
    CHECK(ok.freedom_level() == doctest::Approx(0.125));
}

} // TEST_SUITE
