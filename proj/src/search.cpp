#include "htc/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "htc/analysis.hpp"
#include "htc/error.hpp"

namespace htc {

void SearchParams::validate() const {
    if (base_ensemble < 1 || base_ensemble > max_ensemble)
        fail(errc::bad_params, "need 1 <= base_ensemble <= max_ensemble");
    if (max_restarts < 0) fail(errc::bad_params, "max_restarts must be >= 0");
    if (step_limit < 1) fail(errc::bad_params, "step_limit must be >= 1");
}

std::string SearchStats::csv() const {
    std::ostringstream out;
    out << "block_index,population\n";
    for (size_t i = 0; i < population.size(); ++i) out << i + 1 << ',' << population[i] << '\n';
    out << "final_weight," << final_weight << '\n';
    out << "restarts," << restarts << '\n';
    out << "visited_nodes," << visited_nodes << '\n';
    return out.str();
}

std::vector<uint8_t> frame_payload(const std::vector<uint8_t>& payload, size_t frame_bits) {
    if (payload.size() > 0xFFFFFFFFull)
        fail(errc::frame_error, "payload too large for a 32-bit length prefix");
    size_t needed = 32 + 8 * payload.size();
    if (needed > frame_bits)
        fail(errc::frame_error, "payload needs " + std::to_string(needed) + " bits but only " +
                                    std::to_string(frame_bits) + " are available");
    std::vector<uint8_t> bits;
    bits.reserve(frame_bits);
    auto push_byte = [&](uint8_t byte) {
        for (int j = 7; j >= 0; --j) bits.push_back((byte >> j) & 1);
    };
    uint32_t len = uint32_t(payload.size());
    push_byte(uint8_t(len >> 24));
    push_byte(uint8_t(len >> 16));
    push_byte(uint8_t(len >> 8));
    push_byte(uint8_t(len));
    for (uint8_t byte : payload) push_byte(byte);
    bits.resize(frame_bits, 0);
    return bits;
}

std::vector<uint8_t> unframe_payload(const std::vector<uint8_t>& frame_bits) {
    if (frame_bits.size() < 32) fail(errc::frame_error, "frame shorter than the length prefix");
    uint32_t len = 0;
    for (int i = 0; i < 32; ++i) len = (len << 1) | frame_bits[i];
    if (32 + 8ull * len > frame_bits.size())
        fail(errc::frame_error, "length prefix " + std::to_string(len) +
                                    " exceeds frame capacity of " +
                                    std::to_string(frame_bits.size()) + " bits");
    std::vector<uint8_t> payload(len, 0);
    size_t pos = 32;
    for (uint32_t i = 0; i < len; ++i) {
        uint8_t byte = 0;
        for (int j = 0; j < 8; ++j) byte = uint8_t((byte << 1) | frame_bits[pos++]);
        payload[i] = byte;
    }
    return payload;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per stream position: the preferred color and the Fano cost of each color.
struct BitCosts {
    std::vector<uint8_t> expected;
    std::vector<double> match_cost;
    std::vector<double> miss_cost; // +inf on fixed pixels
};

BitCosts build_costs(const GraynessMap& map, const Ordering& ordering) {
    BitCosts c;
    size_t total = map.size();
    c.expected.resize(total);
    c.match_cost.resize(total);
    c.miss_cost.resize(total);
    for (size_t i = 0; i < total; ++i) {
        double g = map.g[ordering.perm[i]];
        double eps = epsilon_of(g);
        c.expected[i] = g >= 0.5 ? 1 : 0;
        c.match_cost[i] = -std::log2(1.0 - eps);
        c.miss_cost[i] = eps > 0.0 ? -std::log2(eps) : kInf;
    }
    return c;
}

void check_geometry(const Codec& codec, const GraynessMap& map, const Ordering& ordering) {
    if (map.width != ordering.width || map.height != ordering.height)
        fail(errc::dimension_mismatch, "map and ordering dimensions differ");
    if (map.size() % size_t(codec.layout().n) != 0)
        fail(errc::dimension_mismatch, "pixel count not divisible by block size");
}

std::vector<uint16_t> payload_values(const std::vector<uint8_t>& frame_bits, size_t blocks,
                                     int k) {
    std::vector<uint16_t> vals(blocks, 0);
    for (size_t b = 0; b < blocks; ++b) {
        uint16_t v = 0;
        for (int j = 0; j < k; ++j) v |= uint16_t(frame_bits[b * k + j]) << j;
        vals[b] = v;
    }
    return vals;
}

// Deterministic replay of a freedom-value sequence into the emitted stream.
std::vector<uint8_t> emit_stream(const Codec& codec, const std::vector<uint16_t>& payload_vals,
                                 const std::vector<uint16_t>& freedom_vals) {
    const int n = codec.layout().n;
    std::vector<uint8_t> stream(payload_vals.size() * n);
    uint64_t s = codec.initial_state();
    for (size_t b = 0; b < payload_vals.size(); ++b) {
        auto step = codec.encode_step(codec.make_block(payload_vals[b], freedom_vals[b]), s);
        s = step.state;
        for (int j = 0; j < n; ++j) stream[b * n + j] = (step.y >> j) & 1;
    }
    return stream;
}

BitMatrix stream_to_matrix(const std::vector<uint8_t>& stream, const Ordering& ordering) {
    BitMatrix m(ordering.width, ordering.height);
    m.bits = permute(stream, ordering, PermuteDir::forward);
    return m;
}

struct PathNode {
    uint64_t state;
    double weight;
    uint32_t parent;
    uint16_t freedom;
};

struct EnsembleOutcome {
    bool survived = false;
    size_t died_at_block = 0;
    std::vector<uint16_t> freedom_vals;
    SearchStats stats;
};

EnsembleOutcome run_ensemble(const Codec& codec, const std::vector<uint16_t>& payload_vals,
                             const BitCosts& costs, int m0, int max_ensemble,
                             const std::vector<double>* adaptive_deficit) {
    const int n = codec.layout().n;
    const int branches = 1 << codec.layout().f;
    const size_t blocks = payload_vals.size();

    EnsembleOutcome out;
    out.stats.population.reserve(blocks);

    std::vector<std::vector<PathNode>> generations(blocks);
    std::vector<PathNode> current{{codec.initial_state(), 0.0, UINT32_MAX, 0}};
    std::vector<PathNode> children;

    for (size_t b = 0; b < blocks; ++b) {
        size_t keep = size_t(m0);
        if (adaptive_deficit) {
            double deficit = (*adaptive_deficit)[b];
            if (deficit > 0.0)
                keep = size_t(std::min<double>(max_ensemble, std::ceil(m0 * std::exp2(deficit))));
        }
        keep = std::min<size_t>(keep, size_t(max_ensemble));

        children.clear();
        children.reserve(current.size() * branches);
        for (uint32_t p = 0; p < current.size(); ++p) {
            const PathNode& parent = current[p];
            for (uint16_t v = 0; v < branches; ++v) {
                auto step =
                    codec.encode_step(codec.make_block(payload_vals[b], v), parent.state);
                double w = parent.weight;
                for (int j = 0; j < n; ++j) {
                    size_t pos = b * n + j;
                    if (((step.y >> j) & 1) == costs.expected[pos]) {
                        w += costs.match_cost[pos];
                    } else {
                        double miss = costs.miss_cost[pos];
                        if (miss == kInf) {
                            w = kInf;
                            break;
                        }
                        w += miss;
                    }
                }
                if (w < kInf) children.push_back({step.state, w, p, v});
            }
        }
        out.stats.visited_nodes += current.size() * branches;
        if (children.empty()) {
            out.survived = false;
            out.died_at_block = b;
            return out;
        }
        // stable: ties resolve by creation order (parent rank, then freedom value)
        std::stable_sort(children.begin(), children.end(),
                         [](const PathNode& a, const PathNode& c) { return a.weight < c.weight; });
        if (children.size() > keep) children.resize(keep);
        generations[b] = children;
        current = children;
        out.stats.population.push_back(uint32_t(children.size()));
    }

    // winner = lowest weight, earliest creation among ties: front after sorting
    out.survived = true;
    out.stats.final_weight = current.front().weight;
    out.freedom_vals.resize(blocks);
    uint32_t idx = 0;
    for (size_t b = blocks; b-- > 0;) {
        const PathNode& node = generations[b][idx];
        out.freedom_vals[b] = node.freedom;
        idx = node.parent;
    }
    return out;
}

double adjustable_mean_entropy(const GraynessMap& map) {
    double sum = 0;
    size_t count = 0;
    for (size_t i = 0; i < map.size(); ++i) {
        if (!map.is_fixed(i)) {
            sum += entropy(map.g[i]);
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / double(count);
}

EncodeResult encode_with_ensemble(const Codec& codec, const std::vector<uint16_t>& payload_vals,
                                  const GraynessMap& map, const Ordering& ordering,
                                  const SearchParams& params,
                                  std::vector<uint16_t>* freedom_out) {
    BitCosts costs = build_costs(map, ordering);

    std::vector<double> deficits;
    const std::vector<double>* adaptive = nullptr;
    if (params.adaptive) {
        DifficultyProfile profile = difficulty_profile(map, codec.layout(), ordering);
        deficits.reserve(profile.rows.size());
        for (const ProfileRow& row : profile.rows)
            deficits.push_back(row.constraint_cum - row.freedom_cum);
        adaptive = &deficits;
    }

    int m0 = params.base_ensemble;
    for (int attempt = 0;; ++attempt) {
        EnsembleOutcome outcome =
            run_ensemble(codec, payload_vals, costs, m0, params.max_ensemble, adaptive);
        if (outcome.survived) {
            outcome.stats.restarts = attempt;
            EncodeResult result;
            result.stats = std::move(outcome.stats);
            std::vector<uint8_t> stream = emit_stream(codec, payload_vals, outcome.freedom_vals);
            result.matrix = stream_to_matrix(stream, ordering);
            if (freedom_out) *freedom_out = std::move(outcome.freedom_vals);
            return result;
        }
        if (attempt >= params.max_restarts) {
            DifficultyProfile profile = difficulty_profile(map, codec.layout(), ordering);
            double worst = 0;
            for (const ProfileRow& row : profile.rows)
                worst = std::max(worst, row.constraint_cum - row.freedom_cum);
            fail(errc::ensemble_died,
                 "all paths pruned at block " + std::to_string(outcome.died_at_block) + " after " +
                     std::to_string(attempt + 1) + " attempts (peak constraint deficit " +
                     std::to_string(worst) + " bits, step estimate " +
                     std::to_string(profile.step_estimate) + ")");
        }
        m0 = std::min(m0 * 2, params.max_ensemble);
    }
}

} // namespace

EncodeResult encode_constrained(const Codec& codec, const std::vector<uint8_t>& payload,
                                const GraynessMap& map, const Ordering& ordering,
                                const SearchParams& params) {
    params.validate();
    check_geometry(codec, map, ordering);
    const BlockLayout& layout = codec.layout();
    double mean_h = adjustable_mean_entropy(map);
    if (mean_h < layout.rate() - 1e-9)
        fail(errc::infeasible, "mean h(g) over adjustable pixels is " + std::to_string(mean_h) +
                                   ", below the code rate " + std::to_string(layout.rate()) +
                                   "; adjust the grayness map first");
    size_t blocks = map.size() / layout.n;
    std::vector<uint8_t> frame = frame_payload(payload, blocks * layout.k);
    std::vector<uint16_t> payload_vals = payload_values(frame, blocks, layout.k);
    return encode_with_ensemble(codec, payload_vals, map, ordering, params, nullptr);
}

EncodeResult encode_kt(const Codec& codec, const std::vector<uint8_t>& payload,
                       const GraynessMap& map, const Ordering& ordering,
                       const SearchParams& params) {
    params.validate();
    check_geometry(codec, map, ordering);
    for (double g : map.g)
        if (g != 0.0 && g != 0.5 && g != 1.0)
            fail(errc::bad_params, "backtracking mode needs grayness in {0, 1/2, 1}");

    const BlockLayout& layout = codec.layout();
    const int n = layout.n;
    const int branches = 1 << layout.f;
    size_t blocks = map.size() / n;
    std::vector<uint8_t> frame = frame_payload(payload, blocks * layout.k);
    std::vector<uint16_t> payload_vals = payload_values(frame, blocks, layout.k);

    // -1 = free pixel, else the required bit, in stream order
    std::vector<int8_t> required(map.size());
    for (size_t i = 0; i < map.size(); ++i) {
        double g = map.g[ordering.perm[i]];
        required[i] = g == 0.5 ? int8_t(-1) : int8_t(g == 1.0 ? 1 : 0);
    }

    struct Level {
        uint64_t state;
        uint16_t next_value;
    };
    std::vector<Level> stack;
    stack.reserve(blocks + 1);
    stack.push_back({codec.initial_state(), 0});
    std::vector<uint16_t> chosen(blocks, 0);

    SearchStats stats;
    stats.population.assign(blocks, 0);
    uint64_t steps = 0;

    while (stack.size() <= blocks) {
        Level& top = stack.back();
        size_t depth = stack.size() - 1;
        if (top.next_value == branches) {
            stack.pop_back();
            if (stack.empty())
                fail(errc::infeasible, "no code satisfies the fixed pixels (search exhausted)");
            continue;
        }
        uint16_t v = top.next_value++;
        if (++steps > params.step_limit) {
            DifficultyProfile profile = difficulty_profile(map, layout, ordering);
            fail(errc::step_limit, "backtracking exceeded " + std::to_string(params.step_limit) +
                                       " steps (step estimate " +
                                       std::to_string(profile.step_estimate) + ")");
        }
        stats.population[depth] += 1;
        auto step = codec.encode_step(codec.make_block(payload_vals[depth], v), top.state);
        bool ok = true;
        for (int j = 0; j < n; ++j) {
            int8_t want = required[depth * n + j];
            if (want >= 0 && ((step.y >> j) & 1) != uint8_t(want)) {
                ok = false;
                break;
            }
        }
        if (ok) {
            chosen[depth] = v;
            stack.push_back({step.state, 0});
        }
    }

    stats.visited_nodes = steps;
    EncodeResult result;
    std::vector<uint8_t> stream = emit_stream(codec, payload_vals, chosen);
    // weight under the usual metric: free pixels cost 1 bit, matched fixed pixels 0
    BitCosts costs = build_costs(map, ordering);
    double weight = 0;
    for (size_t i = 0; i < stream.size(); ++i)
        weight += stream[i] == costs.expected[i] ? costs.match_cost[i] : costs.miss_cost[i];
    stats.final_weight = weight;
    result.matrix = stream_to_matrix(stream, ordering);
    result.stats = std::move(stats);
    return result;
}

CompressResult halftone_compress(const Codec& codec, const GraynessMap& map,
                                 const Ordering& ordering, const SearchParams& params) {
    params.validate();
    check_geometry(codec, map, ordering);
    const BlockLayout& layout = codec.layout();
    if (layout.k != 0) fail(errc::bad_params, "compression needs a layout with k = 0");

    size_t blocks = map.size() / layout.n;
    std::vector<uint16_t> payload_vals(blocks, 0);
    std::vector<uint16_t> freedom_vals;
    EncodeResult enc =
        encode_with_ensemble(codec, payload_vals, map, ordering, params, &freedom_vals);

    CompressResult result;
    result.matrix = std::move(enc.matrix);
    result.stats = std::move(enc.stats);
    result.freedom_bits.reserve(blocks * layout.f);
    for (uint16_t v : freedom_vals)
        for (int j = 0; j < layout.f; ++j) result.freedom_bits.push_back((v >> j) & 1);
    return result;
}

BitMatrix halftone_decompress(const Codec& codec, const std::vector<uint8_t>& freedom_bits,
                              int width, int height, const Ordering& ordering) {
    const BlockLayout& layout = codec.layout();
    if (ordering.width != width || ordering.height != height)
        fail(errc::dimension_mismatch, "ordering does not match the requested dimensions");
    size_t total = size_t(width) * height;
    if (total % size_t(layout.n) != 0)
        fail(errc::dimension_mismatch, "pixel count not divisible by block size");
    size_t blocks = total / layout.n;
    if (freedom_bits.size() != blocks * layout.f)
        fail(errc::length_mismatch, "expected " + std::to_string(blocks * layout.f) +
                                        " freedom bits, got " +
                                        std::to_string(freedom_bits.size()));

    std::vector<uint16_t> payload_vals(blocks, 0);
    std::vector<uint16_t> freedom_vals(blocks, 0);
    for (size_t b = 0; b < blocks; ++b) {
        uint16_t v = 0;
        for (int j = 0; j < layout.f; ++j) v |= uint16_t(freedom_bits[b * layout.f + j] & 1) << j;
        freedom_vals[b] = v;
    }
    return stream_to_matrix(emit_stream(codec, payload_vals, freedom_vals), ordering);
}

} // namespace htc
