#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htc/bitcore.hpp"

namespace htc {

/// Binary entropy h(p) = -p lg p - (1-p) lg(1-p), in bits; h(0) = h(1) = 0.
double entropy(double p);

enum class Branch { lower, upper };

/// Inverse of h on one branch: lower returns p in [0,1/2], upper in [1/2,1].
double entropy_inv(double r, Branch branch);

/// Maximal homogeneous contrast reachable at a given rate, per strategy.
struct LimitsRow {
    double rate = 0;
    double optimal_contrast = 0;      // g with h(g) = rate
    double systematic_contrast = 0;   // 1 - rate/2
    double damaged_ecc_contrast = 0;  // g with 1 - h(g - 1/2) = rate
};

LimitsRow contrast_limits(double rate);

/// E[min of m independent Binomial(n, 1/2) draws]; the best count of '1's
/// reachable by choosing among m independently scrambled blocks.
/// Exact binomial CDFs, n <= 24.
double expected_min_ones(int n, int64_t m);

/// Tail exponent c <= 0 such that the probability of a single search step
/// needing more than m candidates scales like m^c. Solves
/// 2^{c'q} = 2^{c'} p_f + (1 - p_f) for the positive root c' (q = f/n) and
/// returns -c'. Returns 0 when p_f == q; -infinity when f == n (population
/// grows without bound, no power-law tail). Throws no_root when p_f > q.
double pareto_exponent(double p_f, int f, int n);

/// Cumulative freedom vs. constraint bookkeeping per block, in stream order.
struct ProfileRow {
    int block_index = 0;        // 1-based
    double freedom_cum = 0;     // f * block_index
    double constraint_cum = 0;  // sum of (1 - h(g)) over bits so far
    double log2_population = 0; // freedom_cum - constraint_cum
};

struct DifficultyProfile {
    std::vector<ProfileRow> rows;
    double step_estimate = 0; // sum over blocks of 2^{max(0, C - F)}

    std::string csv() const;
};

DifficultyProfile difficulty_profile(const GraynessMap& map, const BlockLayout& layout,
                                     const Ordering& ordering);

struct CapacityReport {
    double kt_limit = 0;          // 1 - p_f
    double damaged_ecc_limit = 0; // 1 - h(p_f / 2)
    double ratio = 0;             // kt_limit / damaged_ecc_limit, NaN at 0/0
};

CapacityReport capacity_report(double p_f);

} // namespace htc
