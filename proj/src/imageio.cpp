#include "htc/imageio.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "htc/error.hpp"

namespace htc {

namespace {

struct Cursor {
    const std::vector<uint8_t>& bytes;
    size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    uint8_t peek() const { return bytes[pos]; }
    uint8_t take() { return bytes[pos++]; }

    [[noreturn]] void error(const std::string& what) const {
        fail(errc::parse_error, what + " at byte " + std::to_string(pos));
    }
};

bool is_space(uint8_t c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

void skip_space_and_comments(Cursor& cur) {
    while (!cur.eof()) {
        if (is_space(cur.peek())) {
            cur.take();
        } else if (cur.peek() == '#') {
            while (!cur.eof() && cur.take() != '\n') {}
        } else {
            break;
        }
    }
}

int next_int(Cursor& cur, const char* what) {
    skip_space_and_comments(cur);
    if (cur.eof() || cur.peek() < '0' || cur.peek() > '9')
        cur.error(std::string("expected ") + what);
    long v = 0;
    while (!cur.eof() && cur.peek() >= '0' && cur.peek() <= '9') {
        v = v * 10 + (cur.take() - '0');
        if (v > 1'000'000'000) cur.error(std::string(what) + " out of range");
    }
    return int(v);
}

// exactly one whitespace byte separates the header from binary raster data
void expect_raster_separator(Cursor& cur) {
    if (cur.eof() || !is_space(cur.peek())) cur.error("expected whitespace before raster");
    cur.take();
}

} // namespace

RasterImage read_image(const std::vector<uint8_t>& bytes) {
    Cursor cur{bytes};
    if (bytes.size() < 2 || bytes[0] != 'P') fail(errc::unsupported_format, "not a netpbm file");
    char kind = char(bytes[1]);
    if (kind < '1' || kind > '6') fail(errc::unsupported_format, "unknown netpbm variant");
    cur.pos = 2;

    RasterImage img;
    img.width = next_int(cur, "width");
    img.height = next_int(cur, "height");
    if (img.width <= 0 || img.height <= 0) cur.error("dimensions must be positive");
    img.channels = (kind == '3' || kind == '6') ? 3 : 1;
    bool bitmap = kind == '1' || kind == '4';
    img.maxval = 1;
    if (!bitmap) {
        img.maxval = next_int(cur, "maxval");
        if (img.maxval < 1 || img.maxval > 65535) cur.error("maxval out of range");
    }

    size_t count = img.pixel_count() * img.channels;
    img.samples.assign(count, 0);

    if (kind == '1') {
        for (size_t i = 0; i < count; ++i) {
            skip_space_and_comments(cur);
            if (cur.eof()) cur.error("truncated raster");
            uint8_t c = cur.take();
            if (c != '0' && c != '1') cur.error("expected 0 or 1");
            img.samples[i] = c == '1' ? 0 : 1; // 1 = black = level 0
        }
    } else if (kind == '2' || kind == '3') {
        for (size_t i = 0; i < count; ++i) {
            int v = next_int(cur, "sample");
            if (v > img.maxval) cur.error("sample exceeds maxval");
            img.samples[i] = uint16_t(v);
        }
    } else if (kind == '4') {
        expect_raster_separator(cur);
        size_t row_bytes = (size_t(img.width) + 7) / 8;
        for (int y = 0; y < img.height; ++y) {
            if (cur.pos + row_bytes > bytes.size()) cur.error("truncated raster");
            for (int x = 0; x < img.width; ++x) {
                uint8_t byte = bytes[cur.pos + size_t(x) / 8];
                int bit = (byte >> (7 - (x % 8))) & 1;
                img.samples[size_t(y) * img.width + x] = bit ? 0 : 1;
            }
            cur.pos += row_bytes;
        }
    } else { // P5 / P6
        expect_raster_separator(cur);
        int per_sample = img.maxval > 255 ? 2 : 1;
        if (cur.pos + count * per_sample > bytes.size()) cur.error("truncated raster");
        for (size_t i = 0; i < count; ++i) {
            int v;
            if (per_sample == 2) {
                v = (int(bytes[cur.pos]) << 8) | bytes[cur.pos + 1];
                cur.pos += 2;
            } else {
                v = bytes[cur.pos++];
            }
            if (v > img.maxval) cur.error("sample exceeds maxval");
            img.samples[i] = uint16_t(v);
        }
    }
    return img;
}

std::vector<uint8_t> write_matrix(const BitMatrix& matrix, PbmFormat format) {
    std::string header = (format == PbmFormat::P1 ? "P1\n" : "P4\n") +
                         std::to_string(matrix.width) + ' ' + std::to_string(matrix.height) +
                         '\n';
    std::vector<uint8_t> out(header.begin(), header.end());
    if (format == PbmFormat::P1) {
        for (int y = 0; y < matrix.height; ++y) {
            int line = 0;
            for (int x = 0; x < matrix.width; ++x) {
                out.push_back(matrix.at(x, y) ? '1' : '0');
                if (++line == 64 && x + 1 < matrix.width) { // keep plain lines short
                    out.push_back('\n');
                    line = 0;
                }
            }
            out.push_back('\n');
        }
    } else {
        size_t row_bytes = (size_t(matrix.width) + 7) / 8;
        for (int y = 0; y < matrix.height; ++y) {
            size_t base = out.size();
            out.resize(base + row_bytes, 0);
            for (int x = 0; x < matrix.width; ++x)
                if (matrix.at(x, y)) out[base + size_t(x) / 8] |= uint8_t(0x80 >> (x % 8));
        }
    }
    return out;
}

std::vector<uint8_t> write_planes(const std::vector<BitMatrix>& planes) {
    if (planes.size() == 1) return write_matrix(planes[0], PbmFormat::P4);
    if (planes.size() != 3) fail(errc::bad_params, "expected 1 or 3 planes");
    int w = planes[0].width, h = planes[0].height;
    for (const BitMatrix& p : planes)
        if (p.width != w || p.height != h)
            fail(errc::dimension_mismatch, "plane dimensions differ");
    std::string header = "P6\n" + std::to_string(w) + ' ' + std::to_string(h) + "\n1\n";
    std::vector<uint8_t> out(header.begin(), header.end());
    for (size_t i = 0; i < size_t(w) * h; ++i)
        for (int c = 0; c < 3; ++c) out.push_back(planes[c].bits[i] ? 0 : 1);
    return out;
}

std::vector<RasterImage> split_planes(const RasterImage& image) {
    std::vector<RasterImage> planes(image.channels);
    for (int c = 0; c < image.channels; ++c) {
        planes[c].width = image.width;
        planes[c].height = image.height;
        planes[c].channels = 1;
        planes[c].maxval = image.maxval;
        planes[c].samples.resize(image.pixel_count());
        for (size_t i = 0; i < image.pixel_count(); ++i)
            planes[c].samples[i] = image.samples[i * image.channels + c];
    }
    return planes;
}

RasterImage merge_planes(const std::vector<RasterImage>& planes) {
    if (planes.empty() || (planes.size() != 1 && planes.size() != 3))
        fail(errc::bad_params, "expected 1 or 3 planes");
    RasterImage out = planes[0];
    if (planes.size() == 1) return out;
    out.channels = 3;
    out.samples.assign(out.pixel_count() * 3, 0);
    for (size_t c = 0; c < 3; ++c) {
        const RasterImage& p = planes[c];
        if (p.width != out.width || p.height != out.height || p.channels != 1 ||
            p.maxval != out.maxval)
            fail(errc::dimension_mismatch, "planes disagree on geometry or maxval");
        for (size_t i = 0; i < out.pixel_count(); ++i) out.samples[i * 3 + c] = p.samples[i];
    }
    return out;
}

BitMatrix matrix_from_image(const RasterImage& image) {
    if (image.channels != 1) fail(errc::bad_params, "expected a single-channel image");
    BitMatrix m(image.width, image.height);
    for (size_t i = 0; i < image.pixel_count(); ++i)
        m.bits[i] = 2 * int(image.samples[i]) < image.maxval ? 1 : 0;
    return m;
}

std::vector<GraynessBucket> empirical_grayness(const BitMatrix& matrix, const GraynessMap& map,
                                               double bucket_width) {
    if (matrix.width != map.width || matrix.height != map.height)
        fail(errc::dimension_mismatch, "matrix and map dimensions differ");
    if (!(bucket_width > 0.0 && bucket_width <= 1.0))
        fail(errc::domain_error, "bucket_width must be in (0, 1]");
    int buckets = std::max(1, int(std::llround(1.0 / bucket_width)));
    std::vector<GraynessBucket> rows(buckets);
    std::vector<double> g_sum(buckets, 0.0);
    std::vector<uint64_t> black(buckets, 0);
    for (size_t i = 0; i < map.size(); ++i) {
        int b = std::min(int(map.g[i] * buckets), buckets - 1);
        rows[b].pixels += 1;
        g_sum[b] += map.g[i];
        black[b] += matrix.bits[i];
    }
    for (int b = 0; b < buckets; ++b) {
        if (rows[b].pixels > 0) {
            rows[b].target_mean = g_sum[b] / double(rows[b].pixels);
            rows[b].observed_black = double(black[b]) / double(rows[b].pixels);
        }
    }
    return rows;
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) fail(errc::parse_error, "cannot open " + path);
    std::fseek(fp, 0, SEEK_END);
    long size = std::ftell(fp);
    std::fseek(fp, 0, SEEK_SET);
    std::vector<uint8_t> bytes(size > 0 ? size_t(size) : 0);
    size_t got = bytes.empty() ? 0 : std::fread(bytes.data(), 1, bytes.size(), fp);
    std::fclose(fp);
    if (got != bytes.size()) fail(errc::parse_error, "short read on " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) fail(errc::parse_error, "cannot open " + path + " for writing");
    size_t put = bytes.empty() ? 0 : std::fwrite(bytes.data(), 1, bytes.size(), fp);
    std::fclose(fp);
    if (put != bytes.size()) fail(errc::parse_error, "short write on " + path);
}

RasterImage read_image_file(const std::string& path) { return read_image(read_file(path)); }

} // namespace htc
