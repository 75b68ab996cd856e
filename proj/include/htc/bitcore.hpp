#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace htc {

/// 2D black/white code. Row-major bits, 1 = black.
struct BitMatrix {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    BitMatrix() = default;
    BitMatrix(int width, int height);

    size_t size() const { return bits.size(); }
    uint8_t at(int x, int y) const { return bits[size_t(y) * width + x]; }
    void set(int x, int y, uint8_t b) { bits[size_t(y) * width + x] = b; }
};

/// Split of the n bits of each block: n = k + f + R.
/// k payload bits carry the message, f freedom bits are chosen by the
/// encoder and discarded by the decoder, R redundancy bits are fixed to
/// zero and flag wrong decoding paths.
struct BlockLayout {
    int n = 8;
    int k = 7;
    int f = 1;
    int R = 0;

    BlockLayout() = default;
    BlockLayout(int n, int k, int f, int R);

    double freedom_level() const { return double(f) / n; } // q
    double rate() const { return double(k) / n; }
    void validate() const;
};

/// Per-pixel target probability of black. 0 or 1 pins a pixel, 1/2 leaves
/// it free, anything else is a soft preference.
struct GraynessMap {
    int width = 0;
    int height = 0;
    std::vector<double> g;

    GraynessMap() = default;
    GraynessMap(int width, int height, double fill = 0.5);

    size_t size() const { return g.size(); }
    bool is_fixed(size_t pixel) const { return g[pixel] == 0.0 || g[pixel] == 1.0; }
};

/// eps = 1/2 - |1/2 - g|: probability that a pixel may deviate from its
/// preferred color.
inline double epsilon_of(double g) {
    double d = g < 0.5 ? 0.5 - g : g - 0.5;
    return 0.5 - d;
}

/// Stream-order permutation over pixels, generated from a 2D shift pair.
/// perm maps bit-stream index -> pixel index; verified bijective.
struct Ordering {
    int width = 0;
    int height = 0;
    int dx = 1;
    int dy = 0;
    std::vector<uint32_t> perm;
    std::vector<uint32_t> inv;

    size_t size() const { return perm.size(); }
};

enum class PermuteDir { forward, inverse };

/// Visits pixels along p_i = ((i*dx) mod W, (i*dy + floor(i/W)) mod H),
/// starting at (0,0). Throws non_permutation if any pixel repeats.
Ordering build_ordering(int width, int height, int dx, int dy);

/// forward: out[perm[i]] = bits[i]; inverse recovers the stream.
std::vector<uint8_t> permute(const std::vector<uint8_t>& bits, const Ordering& ordering,
                             PermuteDir dir);

/// g = 1 - level/maxval; dark pixels (level 0) get g = 1.
GraynessMap grayness_general(const std::vector<uint16_t>& levels, int width, int height,
                             int maxval);

/// Two-level map: g = contrast where the image is dark, 1 - contrast where
/// light. contrast must lie in [1/2, 1].
GraynessMap grayness_homogeneous(const std::vector<uint16_t>& levels, int width, int height,
                                 int maxval, double contrast);

enum class KtClass { fixed_black, free_pixel, fixed_white };

/// Hard-constraint map: the caller's rule sends each level to
/// fixed-black (g=1), free (g=1/2) or fixed-white (g=0).
GraynessMap grayness_kt(const std::vector<uint16_t>& levels, int width, int height, int maxval,
                        const std::function<KtClass(uint16_t)>& rule);

/// Shrinks every adjustable pixel toward 1/2 with one global lambda,
/// g' = g + lambda*(1/2 - g), chosen by bisection so that the mean of
/// h(g') over adjustable pixels equals target_rate + margin (within 1e-6).
/// Pixels at exactly 0 or 1 stay fixed and are excluded from the mean.
GraynessMap adjust_grayness(const GraynessMap& map, double target_rate, double margin);

} // namespace htc
