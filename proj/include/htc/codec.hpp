#pragma once

#include <cstdint>
#include <vector>

#include "htc/bitcore.hpp"

namespace htc {

/// splitmix64. Fixed constants; every table and initial state derives from
/// this generator so codecs are bit-identical across platforms.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

/// Keyed state-machine coder. The transition table t maps an n-bit block to
/// an N-bit value built from N/n independent keyed bijections of [0, 2^n),
/// so t is a bijection on its low n bits. One step emits
///   y = low n bits of (t(x) XOR s),  s' = rotl_N(s XOR t(x), rotation).
class Codec {
public:
    Codec(uint64_t key, const BlockLayout& layout, int state_bits = 64, int rotation = 13);

    const BlockLayout& layout() const { return layout_; }
    int state_bits() const { return state_bits_; }
    int rotation() const { return rotation_; }
    uint64_t key() const { return key_; }
    uint64_t initial_state() const { return initial_state_; }
    uint64_t state_mask() const { return state_mask_; }

    struct StepResult {
        uint16_t y;
        uint64_t state;
    };

    StepResult encode_step(uint16_t x, uint64_t s) const;

    struct UnstepResult {
        uint16_t x;
        uint64_t state;
        bool redundancy_ok;
    };

    /// Exact inverse of encode_step. redundancy_ok reports whether the
    /// recovered block's redundancy field is all-zero; a failure is a
    /// signal for correction search, not an error.
    UnstepResult decode_step(uint16_t y, uint64_t s) const;

    // Block fields, least-significant first: [payload k | freedom f | redundancy R].
    uint16_t make_block(uint16_t payload, uint16_t freedom) const {
        return uint16_t(payload | (freedom << layout_.k));
    }
    uint16_t payload_of(uint16_t x) const { return uint16_t(x & ((1u << layout_.k) - 1)); }
    uint16_t freedom_of(uint16_t x) const {
        return uint16_t((x >> layout_.k) & ((1u << layout_.f) - 1));
    }
    uint16_t redundancy_of(uint16_t x) const { return uint16_t(x >> (layout_.k + layout_.f)); }

    uint64_t table_value(uint16_t x) const { return full_table_[x]; }

private:
    BlockLayout layout_;
    int state_bits_;
    int rotation_;
    uint64_t key_;
    uint64_t state_mask_;
    uint16_t block_mask_;
    uint64_t initial_state_;
    std::vector<uint64_t> full_table_; // t(x), 2^n entries
    std::vector<uint16_t> inv_low_;    // inverse of x -> low n bits of t(x)

    uint64_t rotl_state(uint64_t v) const;
};

} // namespace htc
