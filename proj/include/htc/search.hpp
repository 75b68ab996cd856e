#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htc/bitcore.hpp"
#include "htc/codec.hpp"

namespace htc {

struct SearchParams {
    int base_ensemble = 30;          // M0
    int max_ensemble = 4096;         // cap on the live path count
    bool adaptive = false;           // scale M by the local population deficit
    int max_restarts = 4;            // ensemble-death restarts, M0 doubling each time
    uint64_t step_limit = 1'000'000; // backtracking budget (hard-constraint mode)

    void validate() const;
};

struct SearchStats {
    /// Ensemble mode: surviving paths after each block.
    /// Backtracking mode: freedom-value trials per block position.
    std::vector<uint32_t> population;
    double final_weight = 0.0;
    int restarts = 0;
    uint64_t visited_nodes = 0;

    std::string csv() const;
};

struct EncodeResult {
    BitMatrix matrix;
    SearchStats stats;
};

/// Payload framing: 32-bit big-endian byte count, payload bytes, zero
/// padding. Returned as frame_bits bits (MSB-first within each byte).
/// Throws frame_error when the payload cannot fit.
std::vector<uint8_t> frame_payload(const std::vector<uint8_t>& payload, size_t frame_bits);

/// Inverse of frame_payload; throws frame_error on an inconsistent prefix.
std::vector<uint8_t> unframe_payload(const std::vector<uint8_t>& frame_bits);

/// Evolving-ensemble encoder for arbitrary grayness maps. Keeps the M
/// lowest-weight partial codes per block, weighting each emitted bit by
/// -lg(1-eps) when it lands on its preferred color and -lg(eps) otherwise.
/// Restarts with doubled M0 if every path dies; after max_restarts throws
/// ensemble_died. Requires mean h(g) over adjustable pixels >= rate.
EncodeResult encode_constrained(const Codec& codec, const std::vector<uint8_t>& payload,
                                const GraynessMap& map, const Ordering& ordering,
                                const SearchParams& params);

/// Depth-first backtracking encoder for maps with g in {0, 1/2, 1} only.
/// Tries freedom values in ascending order; a branch survives iff every
/// emitted bit lands on a free pixel or matches its fixed color.
EncodeResult encode_kt(const Codec& codec, const std::vector<uint8_t>& payload,
                       const GraynessMap& map, const Ordering& ordering,
                       const SearchParams& params);

struct CompressResult {
    std::vector<uint8_t> freedom_bits; // f * #blocks bits, block by block, LSB of each field first
    BitMatrix matrix;                  // the halftone code those bits reproduce
    SearchStats stats;
};

/// Rate-distortion mode: no payload (layout.k must be 0); the winning
/// path's freedom bits are kept as the stored description of the picture.
CompressResult halftone_compress(const Codec& codec, const GraynessMap& map,
                                 const Ordering& ordering, const SearchParams& params);

/// Deterministic forward pass reproducing the compressor's matrix from the
/// stored freedom bits: zero payload, zero redundancy per block.
BitMatrix halftone_decompress(const Codec& codec, const std::vector<uint8_t>& freedom_bits,
                              int width, int height, const Ordering& ordering);

} // namespace htc
