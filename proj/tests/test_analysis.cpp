#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "htc/analysis.hpp"
#include "htc/bitcore.hpp"
#include "htc/error.hpp"

using namespace htc;

TEST_SUITE("analysis") {

TEST_CASE("entropy anchors and domain") {
    CHECK(entropy(0.5) == 1.0);
    CHECK(entropy(0.0) == 0.0);
    CHECK(entropy(1.0) == 0.0);
    CHECK(entropy(0.25) == doctest::Approx(0.8112781245).epsilon(1e-9));
    CHECK(1.0 - entropy(0.25) == doctest::Approx(0.1887218755).epsilon(1e-9));
    CHECK_THROWS_AS(entropy(-0.01), Error);
    CHECK_THROWS_AS(entropy(1.01), Error);
}

TEST_CASE("entropy symmetry and peak") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        double p = double(rng() % 10000) / 9999.0;
        CHECK(entropy(p) == doctest::Approx(entropy(1.0 - p)).epsilon(1e-12));
        CHECK(entropy(p) <= 1.0);
    }
}

TEST_CASE("entropy_inv is a branch inverse") {
    CHECK(entropy_inv(1.0, Branch::upper) == 0.5);
    CHECK(entropy_inv(0.0, Branch::upper) == 1.0);
    CHECK(entropy_inv(0.0, Branch::lower) == 0.0);
    CHECK(entropy_inv(0.875, Branch::upper) == doctest::Approx(0.7050738064).epsilon(1e-6));
    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
        double r = double(rng() % 10000) / 9999.0;
        double up = entropy_inv(r, Branch::upper);
        double lo = entropy_inv(r, Branch::lower);
        CHECK(up >= 0.5);
        CHECK(lo <= 0.5);
        CHECK(std::fabs(entropy(up) - r) <= 1e-9);
        CHECK(std::fabs(entropy(lo) - r) <= 1e-9);
        CHECK(std::fabs(entropy_inv(entropy(up), Branch::upper) - up) <= 1e-6);
    }
}

TEST_CASE("contrast limits") {
    LimitsRow full = contrast_limits(1.0);
    CHECK(full.optimal_contrast == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(full.systematic_contrast == 0.5);
    CHECK(full.damaged_ecc_contrast == doctest::Approx(0.5).epsilon(1e-9));

    LimitsRow none = contrast_limits(0.0);
    CHECK(none.optimal_contrast == 1.0);
    CHECK(none.systematic_contrast == 1.0);
    CHECK(none.damaged_ecc_contrast == 1.0);

    LimitsRow seven = contrast_limits(0.875);
    CHECK(seven.optimal_contrast == doctest::Approx(0.7050738064).epsilon(1e-6));
    CHECK(seven.systematic_contrast == 0.5625);
    CHECK(seven.damaged_ecc_contrast == doctest::Approx(0.5171286551).epsilon(1e-6));

    for (double rate = 0.05; rate < 1.0; rate += 0.05) {
        LimitsRow row = contrast_limits(rate);
        CHECK(row.optimal_contrast >= row.systematic_contrast - 1e-12);
        CHECK(row.systematic_contrast >= row.damaged_ecc_contrast - 1e-12);
    }
}

TEST_CASE("expected_min_ones exact values") {
    CHECK(expected_min_ones(4, 1) == 2.0);
    CHECK(expected_min_ones(4, 2) == 1.453125); // (5^2+11^2+15^2+1)/16^2 = 372/256
    CHECK(expected_min_ones(8, 2) == doctest::Approx(3.2144775390625).epsilon(1e-12));
    CHECK(expected_min_ones(8, 4) == doctest::Approx(2.5688679684).epsilon(1e-9));
    CHECK(expected_min_ones(16, 16) == doctest::Approx(4.5256044683).epsilon(1e-9));
    CHECK(expected_min_ones(4, 1 << 20) < 0.01);
    CHECK_THROWS_AS(expected_min_ones(0, 1), Error);
    CHECK_THROWS_AS(expected_min_ones(25, 1), Error);
    CHECK_THROWS_AS(expected_min_ones(4, 0), Error);
}

TEST_CASE("expected_min_ones agrees with Monte Carlo") {
    std::mt19937_64 rng(2024);
    const int trials = 100000;
    for (int n : {4, 8, 16}) {
        for (int m : {1, 2, 4, 16}) {
            double sum = 0, sumsq = 0;
            for (int t = 0; t < trials; ++t) {
                int best = n + 1;
                for (int j = 0; j < m; ++j) {
                    int ones = std::popcount(rng() & ((1ull << n) - 1));
                    best = std::min(best, ones);
                }
                sum += best;
                sumsq += double(best) * best;
            }
            double mean = sum / trials;
            double var = sumsq / trials - mean * mean;
            double se = std::sqrt(var / trials);
            CHECK(std::fabs(expected_min_ones(n, m) - mean) <= 3.0 * se + 1e-12);
        }
    }
}

TEST_CASE("pareto solver anchors") {
    CHECK(pareto_exponent(0.5, 1, 2) == 0.0);
    CHECK(pareto_exponent(0.46, 1, 2) == doctest::Approx(-0.4626510922).epsilon(1e-6));
    CHECK(pareto_exponent(0.48, 1, 2) == doctest::Approx(-0.2309544348).epsilon(1e-6));
    // the exponent depends only on q = f/n
    CHECK(pareto_exponent(0.46, 4, 8) == doctest::Approx(-0.4626510922).epsilon(1e-6));
}

TEST_CASE("pareto residual and monotonicity") {
    for (double pf : {0.05, 0.2, 0.3, 0.4, 0.46, 0.49}) {
        for (auto [f, n] : {std::pair{1, 2}, {2, 4}, {1, 8}, {3, 8}, {7, 16}}) {
            double q = double(f) / n;
            if (pf >= q) continue;
            double c = -pareto_exponent(pf, f, n);
            double residual = std::fabs(pf * std::exp2(c) + (1.0 - pf) - std::exp2(q * c));
            CHECK(residual <= 1e-9);
        }
    }
    double prev = -1e9;
    for (double pf : {0.30, 0.38, 0.44, 0.47, 0.49, 0.499}) {
        double c = pareto_exponent(pf, 1, 2);
        CHECK(c > prev); // |c| shrinks toward 0 as p_f approaches q
        prev = c;
    }
    CHECK_THROWS_AS(pareto_exponent(0.6, 1, 2), Error);
    CHECK(std::isinf(pareto_exponent(0.5, 2, 2)));
    CHECK_THROWS_AS(pareto_exponent(0.0, 1, 2), Error);
    CHECK_THROWS_AS(pareto_exponent(0.5, 0, 2), Error);
}

TEST_CASE("difficulty profile bookkeeping") {
    BlockLayout layout(8, 7, 1, 0);
    Ordering o = build_ordering(16, 16, 3, 2);

    GraynessMap free_map(16, 16, 0.5);
    DifficultyProfile p = difficulty_profile(free_map, layout, o);
    REQUIRE(p.rows.size() == 32);
    for (const ProfileRow& row : p.rows) {
        CHECK(row.constraint_cum == 0.0);
        CHECK(row.log2_population == row.freedom_cum);
    }
    CHECK(p.step_estimate == doctest::Approx(32.0));

    // matched grayness: 1 - h(g) = q, so population stays near zero
    double g = entropy_inv(1.0 - layout.freedom_level(), Branch::upper);
    GraynessMap matched(16, 16, g);
    DifficultyProfile pm = difficulty_profile(matched, layout, o);
    for (const ProfileRow& row : pm.rows) CHECK(std::fabs(row.log2_population) < 1e-6);

    // fixed pixels contribute one full bit each
    std::mt19937_64 rng(31);
    GraynessMap kt(16, 16, 0.5);
    size_t fixed = 0;
    for (auto& v : kt.g)
        if (rng() % 4 == 0) {
            v = rng() & 1 ? 1.0 : 0.0;
            ++fixed;
        }
    DifficultyProfile pk = difficulty_profile(kt, layout, o);
    CHECK(pk.rows.back().constraint_cum == doctest::Approx(double(fixed)));
    CHECK(pk.rows.back().freedom_cum == doctest::Approx(32.0 * layout.f));

    // final C equals the direct sum over all pixels
    GraynessMap soft(16, 16);
    for (auto& v : soft.g) v = double(rng() % 1000) / 999.0;
    DifficultyProfile ps = difficulty_profile(soft, layout, o);
    double direct = 0;
    for (double gg : soft.g) direct += 1.0 - entropy(gg);
    CHECK(ps.rows.back().constraint_cum == doctest::Approx(direct).epsilon(1e-9));

    // monotone rows
    for (size_t i = 1; i < ps.rows.size(); ++i) {
        CHECK(ps.rows[i].freedom_cum >= ps.rows[i - 1].freedom_cum);
        CHECK(ps.rows[i].constraint_cum >= ps.rows[i - 1].constraint_cum - 1e-12);
    }
}

TEST_CASE("capacity report") {
    CapacityReport rep = capacity_report(0.5);
    CHECK(rep.kt_limit == 0.5);
    CHECK(rep.damaged_ecc_limit == doctest::Approx(0.1887218755).epsilon(1e-9));
    CHECK(rep.ratio == doctest::Approx(2.6494013933).epsilon(1e-8));

    CapacityReport none = capacity_report(0.0);
    CHECK(none.kt_limit == 1.0);
    CHECK(none.damaged_ecc_limit == 1.0);
    CHECK(none.ratio == 1.0);

    CapacityReport full = capacity_report(1.0);
    CHECK(full.kt_limit == 0.0);
    CHECK(full.damaged_ecc_limit == 0.0);
    CHECK(std::isnan(full.ratio));

    CHECK_THROWS_AS(capacity_report(-0.1), Error);
}

} // TEST_SUITE
