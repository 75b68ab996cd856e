#pragma once

#include <cstdint>
#include <string>

#include "htc/bitcore.hpp"
#include "htc/codec.hpp"

namespace htc {

/// The parameters both ends must share out-of-band. Serializes to one line:
///   key=<16 hex digits> n=8 k=7 f=1 R=0 N=64 rot=13 shift=1,0
struct RunConfig {
    uint64_t key = 0;
    BlockLayout layout;
    int state_bits = 64;
    int rotation = 13;
    int shift_dx = 1;
    int shift_dy = 0;

    std::string to_line() const;
    static RunConfig from_line(const std::string& line);

    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;

    Codec make_codec() const;
    Ordering make_ordering(int width, int height) const;
};

} // namespace htc
