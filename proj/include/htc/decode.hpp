#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "htc/bitcore.hpp"
#include "htc/codec.hpp"

namespace htc {

struct DecodeReport {
    std::vector<uint8_t> payload;
    uint64_t redundancy_failures = 0;
    int64_t first_failure_block = -1; // -1: all redundancy checks passed
};

/// Straight decode: inverse-permute, run the step chain from the initial
/// state, concatenate payload fields, strip framing. Redundancy failures
/// are reported, not raised.
DecodeReport decode_plain(const Codec& codec, const BitMatrix& matrix, const Ordering& ordering);

struct CorrectionParams {
    double p_b = 0.01;           // assumed independent bit-flip probability
    uint64_t node_limit = 20000; // max tree expansions before giving up
    std::optional<double> bias;  // per-bit Fano bias; default derived from p_b

    void validate() const;
    /// Midpoint between the expected per-bit cost on the correct path,
    /// h(p_b), and on a random path, -(lg p_b + lg(1-p_b))/2.
    static double default_bias(double p_b);
};

struct CorrectionResult {
    std::vector<uint8_t> payload;
    std::vector<uint32_t> flips; // pixel indices where the input disagreed with the corrected code
    uint64_t nodes_visited = 0;
    double final_weight = 0.0;
    bool recovered = false; // false: node_limit exhausted, payload empty

    std::string csv() const;
};

/// Error-correcting decode: best-first search over per-block hypotheses.
/// Candidates at each block are the x values with a zero redundancy field;
/// a candidate emitting y at Hamming distance d from the received block
/// adds d(-lg p_b) + (n-d)(-lg(1-p_b)) - n*bias to the node weight.
/// Requires layout.R >= 1.
CorrectionResult decode_correct(const Codec& codec, const BitMatrix& matrix,
                                const Ordering& ordering, const CorrectionParams& params);

} // namespace htc
