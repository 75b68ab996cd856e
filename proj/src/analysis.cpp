#include "htc/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "htc/error.hpp"

namespace htc {

double entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        fail(errc::domain_error, "entropy argument must be in [0, 1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double entropy_inv(double r, Branch branch) {
    if (!(r >= 0.0 && r <= 1.0))
        fail(errc::domain_error, "entropy_inv argument must be in [0, 1]");
    bool upper = branch == Branch::upper;
    if (r == 0.0) return upper ? 1.0 : 0.0;
    if (r == 1.0) return 0.5;
    double lo = upper ? 0.5 : 0.0;
    double hi = upper ? 1.0 : 0.5;
    // h is decreasing on the upper branch, increasing on the lower
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        bool above = entropy(mid) > r;
        if (above == upper)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

LimitsRow contrast_limits(double rate) {
    if (!(rate >= 0.0 && rate <= 1.0))
        fail(errc::domain_error, "rate must be in [0, 1]");
    LimitsRow row;
    row.rate = rate;
    row.optimal_contrast = entropy_inv(rate, Branch::upper);
    row.systematic_contrast = 1.0 - rate / 2.0;
    row.damaged_ecc_contrast = 0.5 + entropy_inv(1.0 - rate, Branch::lower);
    return row;
}

namespace {

double pow_int(double base, int64_t e) {
    double r = 1.0;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

} // namespace

double expected_min_ones(int n, int64_t m) {
    if (n < 1 || n > 24) fail(errc::domain_error, "expected_min_ones needs 1 <= n <= 24");
    if (m < 1) fail(errc::domain_error, "expected_min_ones needs m >= 1");
    // E[min] = sum_{i=1..n} P(min >= i) = sum_i (1 - CDF(i-1))^m,
    // with exact integer binomial sums so each base is an exact double.
    uint64_t total = 1ull << n;
    uint64_t csum = 0;
    uint64_t coeff = 1; // C(n, 0)
    double expected = 0.0;
    for (int i = 1; i <= n; ++i) {
        csum += coeff; // now csum = sum_{t <= i-1} C(n, t)
        double tail = double(total - csum) / double(total);
        expected += pow_int(tail, m);
        coeff = coeff * uint64_t(n - (i - 1)) / uint64_t(i); // C(n, i)
    }
    return expected;
}

double pareto_exponent(double p_f, int f, int n) {
    if (!(p_f > 0.0 && p_f < 1.0)) fail(errc::domain_error, "p_f must be in (0, 1)");
    if (n < 1 || f < 1 || f > n) fail(errc::domain_error, "need 0 < f <= n");
    double q = double(f) / n;
    if (p_f == q) return 0.0;
    if (p_f > q)
        fail(errc::no_root, "p_f exceeds the freedom level q; the search population shrinks");
    if (f == n) // per-block growth is strictly positive for every realization
        return -std::numeric_limits<double>::infinity();

    auto residual = [&](double c) { return p_f * std::exp2(c) + (1.0 - p_f) - std::exp2(q * c); };

    // residual(0) = 0 with negative slope; the unique positive root is where
    // the p_f*2^c term takes over. Bracket by doubling, then bisect.
    double hi = 1.0;
    while (hi <= 64.0 && residual(hi) <= 0.0) hi *= 2.0;
    if (hi > 64.0) return -std::numeric_limits<double>::infinity();
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (residual(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return -0.5 * (lo + hi);
}

DifficultyProfile difficulty_profile(const GraynessMap& map, const BlockLayout& layout,
                                     const Ordering& ordering) {
    if (map.width != ordering.width || map.height != ordering.height)
        fail(errc::dimension_mismatch, "map and ordering dimensions differ");
    size_t total = map.size();
    if (total % size_t(layout.n) != 0)
        fail(errc::dimension_mismatch, "pixel count not divisible by block size");
    size_t blocks = total / layout.n;

    DifficultyProfile profile;
    profile.rows.reserve(blocks);
    double constraint = 0.0;
    double estimate = 0.0;
    size_t pos = 0;
    for (size_t b = 0; b < blocks; ++b) {
        for (int j = 0; j < layout.n; ++j, ++pos)
            constraint += 1.0 - entropy(map.g[ordering.perm[pos]]);
        ProfileRow row;
        row.block_index = int(b) + 1;
        row.freedom_cum = double(layout.f) * row.block_index;
        row.constraint_cum = constraint;
        row.log2_population = row.freedom_cum - row.constraint_cum;
        estimate += std::exp2(std::max(0.0, row.constraint_cum - row.freedom_cum));
        profile.rows.push_back(row);
    }
    profile.step_estimate = estimate;
    return profile;
}

std::string DifficultyProfile::csv() const {
    std::ostringstream out;
    out.precision(10);
    out << "block_index,freedom_cum,constraint_cum,log2_population\n";
    for (const ProfileRow& row : rows)
        out << row.block_index << ',' << row.freedom_cum << ',' << row.constraint_cum << ','
            << row.log2_population << '\n';
    return out.str();
}

CapacityReport capacity_report(double p_f) {
    if (!(p_f >= 0.0 && p_f <= 1.0))
        fail(errc::domain_error, "p_f must be in [0, 1]");
    CapacityReport rep;
    rep.kt_limit = 1.0 - p_f;
    rep.damaged_ecc_limit = 1.0 - entropy(p_f / 2.0);
    if (rep.damaged_ecc_limit == 0.0)
        rep.ratio = rep.kt_limit == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                        : std::numeric_limits<double>::infinity();
    else
        rep.ratio = rep.kt_limit / rep.damaged_ecc_limit;
    return rep;
}

} // namespace htc
