#include "htc/bitcore.hpp"

#include <cmath>
#include <string>

#include "htc/analysis.hpp"
#include "htc/error.hpp"

namespace htc {

const char* errc_name(errc code) {
    switch (code) {
    case errc::domain_error: return "domain_error";
    case errc::bad_params: return "bad_params";
    case errc::non_permutation: return "non_permutation";
    case errc::length_mismatch: return "length_mismatch";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::bad_contrast: return "bad_contrast";
    case errc::infeasible: return "infeasible";
    case errc::no_root: return "no_root";
    case errc::frame_error: return "frame_error";
    case errc::ensemble_died: return "ensemble_died";
    case errc::step_limit: return "step_limit";
    case errc::parse_error: return "parse_error";
    case errc::unsupported_format: return "unsupported_format";
    }
    return "unknown";
}

BitMatrix::BitMatrix(int width_, int height_) : width(width_), height(height_) {
    if (width <= 0 || height <= 0)
        fail(errc::bad_params, "matrix dimensions must be positive");
    bits.assign(size_t(width) * height, 0);
}

BlockLayout::BlockLayout(int n_, int k_, int f_, int R_) : n(n_), k(k_), f(f_), R(R_) {
    validate();
}

void BlockLayout::validate() const {
    if (n < 1 || n > 16)
        fail(errc::bad_params, "block size n must be in [1, 16], got " + std::to_string(n));
    if (k < 0 || f < 0 || R < 0)
        fail(errc::bad_params, "layout fields must be nonnegative");
    if (k + f + R != n)
        fail(errc::bad_params, "layout requires n = k + f + R");
}

GraynessMap::GraynessMap(int width_, int height_, double fill) : width(width_), height(height_) {
    if (width <= 0 || height <= 0)
        fail(errc::bad_params, "map dimensions must be positive");
    if (fill < 0.0 || fill > 1.0)
        fail(errc::domain_error, "grayness must be in [0, 1]");
    g.assign(size_t(width) * height, fill);
}

Ordering build_ordering(int width, int height, int dx, int dy) {
    if (width <= 0 || height <= 0)
        fail(errc::bad_params, "ordering dimensions must be positive");
    Ordering o;
    o.width = width;
    o.height = height;
    o.dx = dx;
    o.dy = dy;
    const size_t total = size_t(width) * height;
    o.perm.assign(total, 0);
    o.inv.assign(total, UINT32_MAX);

    auto mod = [](int64_t v, int m) { return int(((v % m) + m) % m); };
    int x = 0, y = 0;
    for (size_t i = 0; i < total; ++i) {
        uint32_t pixel = uint32_t(y) * width + uint32_t(x);
        if (o.inv[pixel] != UINT32_MAX)
            fail(errc::non_permutation, "shift (" + std::to_string(dx) + "," + std::to_string(dy) +
                                            ") revisits pixel " + std::to_string(pixel) +
                                            " at step " + std::to_string(i));
        o.perm[i] = pixel;
        o.inv[pixel] = uint32_t(i);
        // advance: x += dx, y += dy, plus one extra row step each time the
        // stream index crosses a multiple of the width
        x = mod(x + dx, width);
        int extra = ((i + 1) % size_t(width) == 0) ? 1 : 0;
        y = mod(y + dy + extra, height);
    }
    return o;
}

std::vector<uint8_t> permute(const std::vector<uint8_t>& bits, const Ordering& ordering,
                             PermuteDir dir) {
    if (bits.size() != ordering.size())
        fail(errc::length_mismatch, "expected " + std::to_string(ordering.size()) +
                                        " bits, got " + std::to_string(bits.size()));
    std::vector<uint8_t> out(bits.size());
    if (dir == PermuteDir::forward) {
        for (size_t i = 0; i < bits.size(); ++i) out[ordering.perm[i]] = bits[i];
    } else {
        for (size_t i = 0; i < bits.size(); ++i) out[i] = bits[ordering.perm[i]];
    }
    return out;
}

namespace {

void check_levels(const std::vector<uint16_t>& levels, int width, int height, int maxval) {
    if (maxval < 1 || maxval > 65535)
        fail(errc::bad_params, "maxval must be in [1, 65535]");
    if (width <= 0 || height <= 0)
        fail(errc::bad_params, "image dimensions must be positive");
    if (levels.size() != size_t(width) * height)
        fail(errc::length_mismatch, "level count does not match dimensions");
    for (uint16_t v : levels)
        if (v > maxval) fail(errc::domain_error, "sample exceeds maxval");
}

bool is_dark(uint16_t level, int maxval) { return 2 * int(level) < maxval; }

} // namespace

GraynessMap grayness_general(const std::vector<uint16_t>& levels, int width, int height,
                             int maxval) {
    check_levels(levels, width, height, maxval);
    GraynessMap map(width, height);
    for (size_t i = 0; i < levels.size(); ++i)
        map.g[i] = 1.0 - double(levels[i]) / maxval;
    return map;
}

GraynessMap grayness_homogeneous(const std::vector<uint16_t>& levels, int width, int height,
                                 int maxval, double contrast) {
    check_levels(levels, width, height, maxval);
    if (!(contrast >= 0.5 && contrast <= 1.0))
        fail(errc::bad_contrast, "contrast must be in [1/2, 1]");
    GraynessMap map(width, height);
    for (size_t i = 0; i < levels.size(); ++i)
        map.g[i] = is_dark(levels[i], maxval) ? contrast : 1.0 - contrast;
    return map;
}

GraynessMap grayness_kt(const std::vector<uint16_t>& levels, int width, int height, int maxval,
                        const std::function<KtClass(uint16_t)>& rule) {
    check_levels(levels, width, height, maxval);
    GraynessMap map(width, height);
    for (size_t i = 0; i < levels.size(); ++i) {
        switch (rule(levels[i])) {
        case KtClass::fixed_black: map.g[i] = 1.0; break;
        case KtClass::free_pixel: map.g[i] = 0.5; break;
        case KtClass::fixed_white: map.g[i] = 0.0; break;
        }
    }
    return map;
}

GraynessMap adjust_grayness(const GraynessMap& map, double target_rate, double margin) {
    double target = target_rate + margin;
    if (target < 0.0 || target > 1.0)
        fail(errc::domain_error, "target_rate + margin must be in [0, 1]");

    std::vector<size_t> adjustable;
    adjustable.reserve(map.size());
    for (size_t i = 0; i < map.size(); ++i)
        if (!map.is_fixed(i)) adjustable.push_back(i);
    if (adjustable.empty())
        fail(errc::infeasible, "no adjustable pixels (all grayness fixed to 0 or 1)");

    auto mean_h = [&](double lambda) {
        double sum = 0;
        for (size_t i : adjustable) {
            double g = map.g[i];
            sum += entropy(g + lambda * (0.5 - g));
        }
        return sum / double(adjustable.size());
    };

    double lambda = 0.0;
    if (mean_h(0.0) < target) {
        double lo = 0.0, hi = 1.0; // mean_h(1) = 1 >= target
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mean_h(mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        lambda = 0.5 * (lo + hi);
    }

    GraynessMap out = map;
    if (lambda > 0.0)
        for (size_t i : adjustable) out.g[i] = map.g[i] + lambda * (0.5 - map.g[i]);
    return out;
}

} // namespace htc
