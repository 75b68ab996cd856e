#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "htc/bitcore.hpp"

namespace htc {

/// Netpbm raster: grayscale (channels=1) or RGB (channels=3), samples
/// row-major and channel-interleaved, level 0 = black.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    int maxval = 255;
    std::vector<uint16_t> samples;

    size_t pixel_count() const { return size_t(width) * height; }
};

/// Parses P1..P6 with netpbm whitespace/comment rules. P1/P4 load as
/// maxval 1 with bit 1 (black) -> sample 0. Two-byte big-endian samples
/// when maxval > 255. Throws parse_error (with byte offset) or
/// unsupported_format.
RasterImage read_image(const std::vector<uint8_t>& bytes);
RasterImage read_image_file(const std::string& path);

enum class PbmFormat { P1, P4 };

/// Serializes a bit matrix as PBM; bit 1 (black) -> PBM 1. P4 rows are
/// padded to byte boundaries with zero bits.
std::vector<uint8_t> write_matrix(const BitMatrix& matrix, PbmFormat format);

/// Emits a 1- or 3-channel image with maxval 1 from bit planes
/// (bit 1 = black = level 0): PBM for one plane, PPM (P6) for three.
std::vector<uint8_t> write_planes(const std::vector<BitMatrix>& planes);

std::vector<RasterImage> split_planes(const RasterImage& image);
RasterImage merge_planes(const std::vector<RasterImage>& planes);

/// Thresholds a single-channel image to bits: dark (2*level < maxval) -> 1.
BitMatrix matrix_from_image(const RasterImage& image);

struct GraynessBucket {
    double target_mean = 0;    // mean map grayness of the bucket's pixels
    double observed_black = 0; // fraction of black pixels among them
    uint64_t pixels = 0;
};

/// Buckets pixels by target grayness (bucket_width wide) and measures the
/// realized black fraction per bucket.
std::vector<GraynessBucket> empirical_grayness(const BitMatrix& matrix, const GraynessMap& map,
                                               double bucket_width);

// small file helpers shared by the CLI and tests
std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);

} // namespace htc
