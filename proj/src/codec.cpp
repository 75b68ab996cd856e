#include "htc/codec.hpp"

#include <numeric>
#include <string>

#include "htc/error.hpp"

namespace htc {

Codec::Codec(uint64_t key, const BlockLayout& layout, int state_bits, int rotation)
    : layout_(layout), state_bits_(state_bits), rotation_(rotation), key_(key) {
    layout_.validate();
    const int n = layout_.n;
    if (state_bits < n || state_bits > 64)
        fail(errc::bad_params, "state_bits must be in [n, 64]");
    if (state_bits % n != 0)
        fail(errc::bad_params, "block size must divide state_bits");
    if (rotation < n || rotation >= state_bits)
        fail(errc::bad_params, "rotation must be in [n, state_bits)");
    if (state_bits % rotation == 0)
        fail(errc::bad_params, "rotation must not divide state_bits");

    state_mask_ = state_bits == 64 ? ~0ull : ((1ull << state_bits) - 1);
    block_mask_ = uint16_t((1u << n) - 1);

    // t = concatenation of state_bits/n keyed bijections of [0, 2^n),
    // each a Fisher-Yates shuffle driven by splitmix64(key).
    const uint32_t table_size = 1u << n;
    const int sub_tables = state_bits / n;
    SplitMix64 rng(key);
    full_table_.assign(table_size, 0);
    inv_low_.assign(table_size, 0);
    std::vector<uint16_t> perm(table_size);
    for (int j = 0; j < sub_tables; ++j) {
        std::iota(perm.begin(), perm.end(), uint16_t(0));
        for (uint32_t i = table_size - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.next() % (i + 1)]);
        for (uint32_t v = 0; v < table_size; ++v)
            full_table_[v] |= uint64_t(perm[v]) << (j * n);
        if (j == 0)
            for (uint32_t v = 0; v < table_size; ++v) inv_low_[perm[v]] = uint16_t(v);
    }
    initial_state_ = rng.next() & state_mask_;
}

uint64_t Codec::rotl_state(uint64_t v) const {
    if (state_bits_ == 64) return (v << rotation_) | (v >> (64 - rotation_));
    return ((v << rotation_) | (v >> (state_bits_ - rotation_))) & state_mask_;
}

Codec::StepResult Codec::encode_step(uint16_t x, uint64_t s) const {
    uint64_t t = full_table_[x];
    StepResult r;
    r.y = uint16_t((t ^ s) & block_mask_);
    r.state = rotl_state(s ^ t);
    return r;
}

Codec::UnstepResult Codec::decode_step(uint16_t y, uint64_t s) const {
    UnstepResult r;
    uint16_t v = uint16_t((uint64_t(y) ^ s) & block_mask_);
    r.x = inv_low_[v];
    uint64_t t = full_table_[r.x];
    r.state = rotl_state(s ^ t);
    r.redundancy_ok = redundancy_of(r.x) == 0;
    return r;
}

} // namespace htc
