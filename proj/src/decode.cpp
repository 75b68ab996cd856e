#include "htc/decode.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <sstream>
#include <string>

#include "htc/analysis.hpp"
#include "htc/error.hpp"
#include "htc/search.hpp"

namespace htc {

namespace {

void check_geometry(const Codec& codec, const BitMatrix& matrix, const Ordering& ordering) {
    if (matrix.width != ordering.width || matrix.height != ordering.height)
        fail(errc::dimension_mismatch, "matrix and ordering dimensions differ");
    if (matrix.size() % size_t(codec.layout().n) != 0)
        fail(errc::dimension_mismatch, "pixel count not divisible by block size");
}

std::vector<uint16_t> received_blocks(const Codec& codec, const BitMatrix& matrix,
                                      const Ordering& ordering) {
    std::vector<uint8_t> stream = permute(matrix.bits, ordering, PermuteDir::inverse);
    const int n = codec.layout().n;
    std::vector<uint16_t> ys(stream.size() / n, 0);
    for (size_t b = 0; b < ys.size(); ++b) {
        uint16_t y = 0;
        for (int j = 0; j < n; ++j) y |= uint16_t(stream[b * n + j] & 1) << j;
        ys[b] = y;
    }
    return ys;
}

std::vector<uint8_t> frame_bits_from_blocks(const Codec& codec,
                                            const std::vector<uint16_t>& xs) {
    const int k = codec.layout().k;
    std::vector<uint8_t> frame(xs.size() * k);
    for (size_t b = 0; b < xs.size(); ++b) {
        uint16_t payload = codec.payload_of(xs[b]);
        for (int j = 0; j < k; ++j) frame[b * k + j] = (payload >> j) & 1;
    }
    return frame;
}

} // namespace

DecodeReport decode_plain(const Codec& codec, const BitMatrix& matrix, const Ordering& ordering) {
    check_geometry(codec, matrix, ordering);
    std::vector<uint16_t> ys = received_blocks(codec, matrix, ordering);

    DecodeReport report;
    std::vector<uint16_t> xs(ys.size());
    uint64_t s = codec.initial_state();
    for (size_t b = 0; b < ys.size(); ++b) {
        auto step = codec.decode_step(ys[b], s);
        s = step.state;
        xs[b] = step.x;
        if (!step.redundancy_ok) {
            ++report.redundancy_failures;
            if (report.first_failure_block < 0) report.first_failure_block = int64_t(b);
        }
    }
    report.payload = unframe_payload(frame_bits_from_blocks(codec, xs));
    return report;
}

void CorrectionParams::validate() const {
    if (!(p_b > 0.0 && p_b < 0.5)) fail(errc::bad_params, "p_b must be in (0, 1/2)");
    if (node_limit < 1) fail(errc::bad_params, "node_limit must be >= 1");
}

double CorrectionParams::default_bias(double p_b) {
    double correct = entropy(p_b);
    double random = -(std::log2(p_b) + std::log2(1.0 - p_b)) / 2.0;
    return 0.5 * (correct + random);
}

std::string CorrectionResult::csv() const {
    std::ostringstream out;
    out << "key,value\n";
    out << "recovered," << (recovered ? 1 : 0) << '\n';
    out << "nodes_visited," << nodes_visited << '\n';
    out << "final_weight," << final_weight << '\n';
    for (uint32_t p : flips) out << "flip," << p << '\n';
    return out.str();
}

CorrectionResult decode_correct(const Codec& codec, const BitMatrix& matrix,
                                const Ordering& ordering, const CorrectionParams& params) {
    params.validate();
    check_geometry(codec, matrix, ordering);
    const BlockLayout& layout = codec.layout();
    if (layout.R < 1) fail(errc::bad_params, "correction needs at least one redundancy bit");

    const int n = layout.n;
    const int candidates = 1 << (layout.k + layout.f);
    const std::vector<uint16_t> ys = received_blocks(codec, matrix, ordering);
    const size_t blocks = ys.size();

    const double bias = params.bias ? *params.bias : CorrectionParams::default_bias(params.p_b);
    const double flip_cost = -std::log2(params.p_b);
    const double keep_cost = -std::log2(1.0 - params.p_b);

    struct Node {
        double weight;
        uint64_t state;
        uint32_t parent;
        uint32_t depth;
        uint16_t x;
    };
    std::vector<Node> arena;
    arena.reserve(4096);

    // min-weight first; deeper first among equals, then insertion order
    struct Entry {
        double weight;
        uint32_t depth;
        uint32_t index;
    };
    auto later = [](const Entry& a, const Entry& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.index > b.index;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(later)> frontier(later);

    arena.push_back({0.0, codec.initial_state(), UINT32_MAX, 0, 0});
    frontier.push({0.0, 0, 0});

    CorrectionResult result;
    while (!frontier.empty()) {
        Entry top = frontier.top();
        frontier.pop();
        const Node node = arena[top.index];
        if (node.depth == blocks) {
            // reconstruct the accepted hypothesis
            std::vector<uint16_t> xs(blocks);
            uint32_t idx = top.index;
            for (size_t b = blocks; b-- > 0;) {
                xs[b] = arena[idx].x;
                idx = arena[idx].parent;
            }
            result.payload = unframe_payload(frame_bits_from_blocks(codec, xs));
            result.recovered = true;
            result.final_weight = node.weight;
            // flips: where the corrected emission disagrees with the input
            uint64_t s = codec.initial_state();
            for (size_t b = 0; b < blocks; ++b) {
                auto step = codec.encode_step(xs[b], s);
                s = step.state;
                uint16_t diff = uint16_t(step.y ^ ys[b]);
                for (int j = 0; j < n; ++j)
                    if ((diff >> j) & 1)
                        result.flips.push_back(ordering.perm[b * n + size_t(j)]);
            }
            std::sort(result.flips.begin(), result.flips.end());
            return result;
        }
        if (result.nodes_visited >= params.node_limit) break;
        ++result.nodes_visited;
        for (int c = 0; c < candidates; ++c) {
            uint16_t x = uint16_t(c); // redundancy field zero by construction
            auto step = codec.encode_step(x, node.state);
            int d = std::popcount(uint16_t(step.y ^ ys[node.depth]));
            double w = node.weight + d * flip_cost + (n - d) * keep_cost - n * bias;
            uint32_t idx = uint32_t(arena.size());
            arena.push_back({w, step.state, top.index, node.depth + 1, x});
            frontier.push({w, node.depth + 1, idx});
        }
    }

    result.recovered = false; // node budget exhausted
    return result;
}

} // namespace htc
