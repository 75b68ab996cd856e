// htc: encode payloads as halftone black/white codes, decode them back,
// compress pictures into freedom bits, and reproduce the analysis tables.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "htc/analysis.hpp"
#include "htc/bitcore.hpp"
#include "htc/codec.hpp"
#include "htc/config.hpp"
#include "htc/decode.hpp"
#include "htc/error.hpp"
#include "htc/imageio.hpp"
#include "htc/search.hpp"

using namespace htc;

namespace {

int exit_code_for(errc code) {
    switch (code) {
    case errc::infeasible:
    case errc::bad_contrast: return 2;
    case errc::ensemble_died:
    case errc::step_limit: return 3;
    case errc::parse_error:
    case errc::unsupported_format:
    case errc::frame_error: return 4;
    default: return 1;
    }
}

struct MapOptions {
    std::string mode = "general";
    double contrast = 0.75;
    int kt_black = 0;
    int kt_white = -1; // -1: use maxval
};

GraynessMap build_map(const RasterImage& plane, const MapOptions& opt) {
    if (opt.mode == "general")
        return grayness_general(plane.samples, plane.width, plane.height, plane.maxval);
    if (opt.mode == "homogeneous")
        return grayness_homogeneous(plane.samples, plane.width, plane.height, plane.maxval,
                                    opt.contrast);
    if (opt.mode == "kt") {
        int white = opt.kt_white < 0 ? plane.maxval : opt.kt_white;
        return grayness_kt(plane.samples, plane.width, plane.height, plane.maxval,
                           [&](uint16_t level) {
                               if (level <= opt.kt_black) return KtClass::fixed_black;
                               if (level >= white) return KtClass::fixed_white;
                               return KtClass::free_pixel;
                           });
    }
    fail(errc::bad_params, "unknown mode '" + opt.mode + "'");
}

void write_text(const std::string& path, const std::string& text) {
    write_file(path, std::vector<uint8_t>(text.begin(), text.end()));
}

void emit_csv(const std::string& csv, const std::string& path) {
    std::fputs(csv.c_str(), stdout);
    if (!path.empty()) write_text(path, csv);
}

std::string format_row(std::initializer_list<double> values) {
    std::ostringstream out;
    out.precision(10);
    bool first = true;
    for (double v : values) {
        if (!first) out << ',';
        out << v;
        first = false;
    }
    out << '\n';
    return out.str();
}

// payload bytes assigned to each color plane, in plane order
std::vector<std::vector<uint8_t>> split_payload(const std::vector<uint8_t>& payload,
                                                size_t planes, size_t bytes_per_plane) {
    if (payload.size() > planes * bytes_per_plane)
        fail(errc::frame_error, "payload of " + std::to_string(payload.size()) +
                                    " bytes exceeds capacity of " +
                                    std::to_string(planes * bytes_per_plane) + " bytes");
    std::vector<std::vector<uint8_t>> parts(planes);
    size_t off = 0;
    for (size_t p = 0; p < planes; ++p) {
        size_t take = std::min(bytes_per_plane, payload.size() - off);
        parts[p].assign(payload.begin() + off, payload.begin() + off + take);
        off += take;
    }
    return parts;
}

int cmd_encode(const std::string& image_path, const std::string& payload_path,
               const std::string& config_path, const std::string& out_path,
               const MapOptions& map_opt, bool adjust, double margin, const SearchParams& params,
               const std::string& stats_path, const std::string& out_format) {
    RunConfig cfg = RunConfig::load(config_path);
    RasterImage image = read_image_file(image_path);
    std::vector<uint8_t> payload = read_file(payload_path);

    Codec codec = cfg.make_codec();
    Ordering ordering = cfg.make_ordering(image.width, image.height);
    size_t blocks = size_t(image.width) * image.height / codec.layout().n;
    size_t capacity = (blocks * codec.layout().k - 32) / 8;

    std::vector<RasterImage> planes = split_planes(image);
    auto parts = split_payload(payload, planes.size(), capacity);

    std::vector<BitMatrix> codes;
    std::string stats_csv;
    for (size_t p = 0; p < planes.size(); ++p) {
        GraynessMap map = build_map(planes[p], map_opt);
        if (adjust) map = adjust_grayness(map, codec.layout().rate(), margin);
        EncodeResult res = map_opt.mode == "kt"
                               ? encode_kt(codec, parts[p], map, ordering, params)
                               : encode_constrained(codec, parts[p], map, ordering, params);
        stats_csv += res.stats.csv();
        codes.push_back(std::move(res.matrix));
    }

    std::vector<uint8_t> bytes;
    if (codes.size() == 1)
        bytes = write_matrix(codes[0], out_format == "P1" ? PbmFormat::P1 : PbmFormat::P4);
    else
        bytes = write_planes(codes);
    write_file(out_path, bytes);
    if (!stats_path.empty()) write_text(stats_path, stats_csv);
    return 0;
}

int cmd_decode(const std::string& code_path, const std::string& config_path,
               const std::string& out_path, bool correct, double p_b, uint64_t node_limit,
               const std::string& report_path) {
    RunConfig cfg = RunConfig::load(config_path);
    RasterImage image = read_image_file(code_path);
    Codec codec = cfg.make_codec();
    Ordering ordering = cfg.make_ordering(image.width, image.height);

    std::vector<uint8_t> payload;
    std::string report_csv;
    bool all_recovered = true;
    for (const RasterImage& plane : split_planes(image)) {
        BitMatrix matrix = matrix_from_image(plane);
        if (correct) {
            CorrectionParams params;
            params.p_b = p_b;
            params.node_limit = node_limit;
            CorrectionResult res = decode_correct(codec, matrix, ordering, params);
            report_csv += res.csv();
            all_recovered = all_recovered && res.recovered;
            payload.insert(payload.end(), res.payload.begin(), res.payload.end());
        } else {
            DecodeReport rep = decode_plain(codec, matrix, ordering);
            if (rep.redundancy_failures > 0)
                std::fprintf(stderr,
                             "warning: %llu redundancy failures (first at block %lld); "
                             "consider --correct\n",
                             (unsigned long long)rep.redundancy_failures,
                             (long long)rep.first_failure_block);
            payload.insert(payload.end(), rep.payload.begin(), rep.payload.end());
        }
    }
    if (!report_path.empty()) write_text(report_path, report_csv);
    if (!all_recovered) {
        std::fprintf(stderr, "error: step_limit: correction abandoned (node limit reached)\n");
        return 3;
    }
    write_file(out_path, payload);
    return 0;
}

int cmd_compress(const std::string& image_path, const std::string& config_path,
                 const std::string& out_path, double contrast, const SearchParams& params,
                 const std::string& stats_path) {
    RunConfig cfg = RunConfig::load(config_path);
    RasterImage image = read_image_file(image_path);
    if (image.channels != 1) fail(errc::unsupported_format, "compress expects one channel");
    Codec codec = cfg.make_codec();
    Ordering ordering = cfg.make_ordering(image.width, image.height);

    if (contrast <= 0) // default: the best contrast reachable at this freedom level
        contrast = contrast_limits(1.0 - codec.layout().freedom_level()).optimal_contrast;
    GraynessMap map = grayness_homogeneous(image.samples, image.width, image.height,
                                           image.maxval, contrast);
    CompressResult res = halftone_compress(codec, map, ordering, params);

    std::vector<uint8_t> packed((res.freedom_bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < res.freedom_bits.size(); ++i)
        if (res.freedom_bits[i]) packed[i / 8] |= uint8_t(0x80 >> (i % 8));
    write_file(out_path, packed);
    if (!stats_path.empty()) write_text(stats_path, res.stats.csv());
    return 0;
}

int cmd_decompress(const std::string& bits_path, const std::string& config_path, int width,
                   int height, const std::string& out_path, const std::string& out_format) {
    RunConfig cfg = RunConfig::load(config_path);
    Codec codec = cfg.make_codec();
    Ordering ordering = cfg.make_ordering(width, height);
    size_t blocks = size_t(width) * height / codec.layout().n;
    size_t nbits = blocks * codec.layout().f;

    std::vector<uint8_t> packed = read_file(bits_path);
    if (packed.size() < (nbits + 7) / 8)
        fail(errc::length_mismatch, "bit file too short for these dimensions");
    std::vector<uint8_t> bits(nbits);
    for (size_t i = 0; i < nbits; ++i) bits[i] = (packed[i / 8] >> (7 - (i % 8))) & 1;

    BitMatrix matrix = halftone_decompress(codec, bits, width, height, ordering);
    write_file(out_path, write_matrix(matrix, out_format == "P1" ? PbmFormat::P1 : PbmFormat::P4));
    return 0;
}

int run_selftest();

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"halftone constrained-coding codec"};
    app.require_subcommand(1);

    // encode
    auto* enc = app.add_subcommand("encode", "encode a payload as a halftone code");
    std::string image_path, payload_path, config_path, out_path, stats_path;
    std::string out_format = "P4";
    MapOptions map_opt;
    bool adjust = false;
    double margin = 0.05;
    SearchParams params;
    enc->add_option("--image", image_path, "target picture (PBM/PGM/PPM)")->required();
    enc->add_option("--payload", payload_path, "payload file")->required();
    enc->add_option("--config", config_path, "shared config file")->required();
    enc->add_option("--out", out_path, "output code (PBM, or PPM for color input)")->required();
    enc->add_option("--mode", map_opt.mode, "general | homogeneous | kt")
        ->check(CLI::IsMember({"general", "homogeneous", "kt"}));
    enc->add_option("--contrast", map_opt.contrast, "homogeneous contrast in [1/2, 1]");
    enc->add_option("--kt-black", map_opt.kt_black, "kt: levels <= this are fixed black");
    enc->add_option("--kt-white", map_opt.kt_white, "kt: levels >= this are fixed white");
    enc->add_flag("--adjust", adjust, "pre-shrink grayness toward 1/2 to fit the rate");
    enc->add_option("--margin", margin, "entropy margin for --adjust");
    enc->add_option("--m0", params.base_ensemble, "base ensemble size M0");
    enc->add_option("--max-ensemble", params.max_ensemble, "ensemble size cap");
    enc->add_flag("--adaptive", params.adaptive, "grow M with the local constraint deficit");
    enc->add_option("--max-restarts", params.max_restarts, "restarts with doubled M0");
    enc->add_option("--step-limit", params.step_limit, "backtracking budget (kt mode)");
    enc->add_option("--stats", stats_path, "write search stats CSV");
    enc->add_option("--out-format", out_format, "P1 | P4")
        ->check(CLI::IsMember({"P1", "P4"}));

    // decode
    auto* dec = app.add_subcommand("decode", "recover the payload from a code");
    std::string code_path, dec_out, report_path;
    bool correct = false;
    double p_b = 0.01;
    uint64_t node_limit = 20000;
    dec->add_option("--code", code_path, "code picture (PBM/PPM)")->required();
    dec->add_option("--config", config_path, "shared config file")->required();
    dec->add_option("--out", dec_out, "output payload file")->required();
    dec->add_flag("--correct", correct, "run error-correcting decode");
    dec->add_option("--pb", p_b, "assumed bit-flip probability");
    dec->add_option("--node-limit", node_limit, "correction search budget");
    dec->add_option("--report", report_path, "write correction report CSV");

    // compress / decompress
    auto* cmp = app.add_subcommand("compress", "store a black/white picture as freedom bits");
    std::string bits_path;
    double cmp_contrast = -1;
    SearchParams cmp_params;
    cmp_params.base_ensemble = 300;
    cmp->add_option("--image", image_path, "black/white picture (PBM)")->required();
    cmp->add_option("--config", config_path, "shared config file (k must be 0)")->required();
    cmp->add_option("--out", bits_path, "output bit file")->required();
    cmp->add_option("--contrast", cmp_contrast, "target contrast (default: rate optimum)");
    cmp->add_option("--m0", cmp_params.base_ensemble, "base ensemble size M0");
    cmp->add_option("--max-ensemble", cmp_params.max_ensemble, "ensemble size cap");
    cmp->add_option("--stats", stats_path, "write search stats CSV");

    auto* dcm = app.add_subcommand("decompress", "reproduce the halftone code from stored bits");
    int width = 0, height = 0;
    dcm->add_option("--bits", bits_path, "stored bit file")->required();
    dcm->add_option("--config", config_path, "shared config file")->required();
    dcm->add_option("--width", width, "code width")->required();
    dcm->add_option("--height", height, "code height")->required();
    dcm->add_option("--out", out_path, "output code (PBM)")->required();
    dcm->add_option("--out-format", out_format, "P1 | P4")
        ->check(CLI::IsMember({"P1", "P4"}));

    // analyze
    auto* ana = app.add_subcommand("analyze", "closed-form limits and difficulty reports");
    ana->require_subcommand(1);
    std::string csv_path;
    auto* lim = ana->add_subcommand("limits", "contrast limits per strategy over a rate grid");
    double from = 0.0, to = 1.0, step = 0.025;
    lim->add_option("--from", from, "first rate");
    lim->add_option("--to", to, "last rate");
    lim->add_option("--step", step, "rate step");
    lim->add_option("--csv", csv_path, "also write CSV here");

    auto* par = ana->add_subcommand("pareto", "tail exponent of per-step search effort");
    double pf = 0.5;
    int opt_f = 1, opt_n = 2;
    par->add_option("--pf", pf, "probability that a bit is fixed")->required();
    par->add_option("--f", opt_f, "freedom bits per block")->required();
    par->add_option("--n", opt_n, "block size")->required();
    par->add_option("--csv", csv_path, "also write CSV here");

    auto* cap = ana->add_subcommand("capacity", "fixed-bit capacity vs damaged-ECC embedding");
    cap->add_option("--pf", pf, "probability that a bit is fixed")->required();
    cap->add_option("--csv", csv_path, "also write CSV here");

    auto* pro = ana->add_subcommand("profile", "freedom/constraint profile of a picture");
    MapOptions pro_map;
    pro->add_option("--image", image_path, "target picture")->required();
    pro->add_option("--config", config_path, "shared config file")->required();
    pro->add_option("--mode", pro_map.mode, "general | homogeneous | kt")
        ->check(CLI::IsMember({"general", "homogeneous", "kt"}));
    pro->add_option("--contrast", pro_map.contrast, "homogeneous contrast");
    pro->add_option("--kt-black", pro_map.kt_black, "kt: levels <= this are fixed black");
    pro->add_option("--kt-white", pro_map.kt_white, "kt: levels >= this are fixed white");
    pro->add_option("--csv", csv_path, "also write CSV here");

    app.add_subcommand("selftest", "run the built-in oracle checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc->parsed())
            return cmd_encode(image_path, payload_path, config_path, out_path, map_opt, adjust,
                              margin, params, stats_path, out_format);
        if (dec->parsed())
            return cmd_decode(code_path, config_path, dec_out, correct, p_b, node_limit,
                              report_path);
        if (cmp->parsed())
            return cmd_compress(image_path, config_path, bits_path, cmp_contrast, cmp_params,
                                stats_path);
        if (dcm->parsed())
            return cmd_decompress(bits_path, config_path, width, height, out_path, out_format);
        if (ana->parsed()) {
            if (lim->parsed()) {
                std::string csv = "rate,optimal_contrast,systematic_contrast,damaged_ecc_contrast\n";
                for (double r = from; r <= to + 1e-12; r += step) {
                    LimitsRow row = contrast_limits(std::min(r, 1.0));
                    csv += format_row({row.rate, row.optimal_contrast, row.systematic_contrast,
                                       row.damaged_ecc_contrast});
                }
                emit_csv(csv, csv_path);
            } else if (par->parsed()) {
                std::string csv = "p_f,f,n,c\n";
                csv += format_row({pf, double(opt_f), double(opt_n),
                                   pareto_exponent(pf, opt_f, opt_n)});
                emit_csv(csv, csv_path);
            } else if (cap->parsed()) {
                CapacityReport rep = capacity_report(pf);
                std::string csv = "kt_limit,damaged_ecc_limit,ratio\n";
                csv += format_row({rep.kt_limit, rep.damaged_ecc_limit, rep.ratio});
                emit_csv(csv, csv_path);
            } else if (pro->parsed()) {
                RunConfig cfg = RunConfig::load(config_path);
                RasterImage image = read_image_file(image_path);
                if (image.channels != 1)
                    fail(errc::unsupported_format, "profile expects one channel");
                GraynessMap map = build_map(image, pro_map);
                Ordering ordering = cfg.make_ordering(image.width, image.height);
                DifficultyProfile profile = difficulty_profile(map, cfg.layout, ordering);
                std::string csv = profile.csv();
                char buf[64];
                std::snprintf(buf, sizeof buf, "step_estimate,%.10g\n", profile.step_estimate);
                emit_csv(csv + buf, csv_path);
            }
            return 0;
        }
        return run_selftest();
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
}

namespace {

int run_selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%s %s\n", ok ? "ok  " : "FAIL", name);
        if (!ok) ++failures;
    };
    auto near = [](double a, double b, double tol) { return std::fabs(a - b) <= tol; };

    check("entropy peak", entropy(0.5) == 1.0 && entropy(0.0) == 0.0);
    check("entropy quarter", near(entropy(0.25), 0.8112781245, 1e-9));
    check("entropy_inv inverse", [&] {
        for (double r : {0.1, 0.5, 0.875, 0.99}) {
            if (!near(entropy(entropy_inv(r, Branch::upper)), r, 1e-9)) return false;
            if (!near(entropy(entropy_inv(r, Branch::lower)), r, 1e-9)) return false;
        }
        return true;
    }());

    CapacityReport cap = capacity_report(0.5);
    check("capacity p_f=1/2", near(cap.kt_limit, 0.5, 0) &&
                                  near(cap.damaged_ecc_limit, 0.1887218755, 1e-9) &&
                                  near(cap.ratio, 2.6494013933, 1e-8));

    check("pareto anchors", near(pareto_exponent(0.5, 1, 2), 0.0, 1e-6) &&
                                near(pareto_exponent(0.46, 1, 2), -0.4626510922, 1e-6) &&
                                near(pareto_exponent(0.48, 1, 2), -0.2309544348, 1e-6));

    check("expected_min_ones", expected_min_ones(4, 1) == 2.0 &&
                                   expected_min_ones(4, 2) == 1.453125 &&
                                   expected_min_ones(4, 1 << 20) < 0.01);

    bool codec_ok = true;
    {
        Codec codec(0x1234, BlockLayout(8, 7, 1, 0), 64, 13);
        std::vector<bool> seen(256, false);
        for (int x = 0; x < 256; ++x) {
            uint16_t y = codec.encode_step(uint16_t(x), 0).y;
            if (seen[y]) codec_ok = false;
            seen[y] = true;
        }
        std::mt19937_64 rng(7);
        for (int t = 0; t < 1000 && codec_ok; ++t) {
            uint16_t x = uint16_t(rng() & 0xFF);
            uint64_t s = rng();
            auto e = codec.encode_step(x, s);
            auto d = codec.decode_step(e.y, s);
            codec_ok = d.x == x && d.state == e.state;
        }
    }
    check("codec bijection + inversion", codec_ok);

    bool roundtrip_ok = true;
    try {
        RunConfig cfg = RunConfig::from_line(
            "key=00000000000000ab n=8 k=7 f=1 R=0 N=64 rot=13 shift=3,2");
        Codec codec = cfg.make_codec();
        Ordering ordering = cfg.make_ordering(16, 16);
        GraynessMap map(16, 16, 0.5);
        std::vector<uint8_t> payload = {'s', 'e', 'l', 'f'};
        SearchParams sp;
        sp.base_ensemble = 4;
        EncodeResult enc = encode_constrained(codec, payload, map, ordering, sp);
        roundtrip_ok = decode_plain(codec, enc.matrix, ordering).payload == payload;
    } catch (const Error&) {
        roundtrip_ok = false;
    }
    check("encode/decode round-trip", roundtrip_ok);

    bool pbm_ok = true;
    try {
        BitMatrix m(10, 3);
        std::mt19937_64 rng(9);
        for (auto& b : m.bits) b = rng() & 1;
        for (PbmFormat fmt : {PbmFormat::P1, PbmFormat::P4}) {
            RasterImage img = read_image(write_matrix(m, fmt));
            BitMatrix back = matrix_from_image(img);
            if (back.bits != m.bits) pbm_ok = false;
        }
    } catch (const Error&) {
        pbm_ok = false;
    }
    check("pbm round-trip", pbm_ok);

    std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
    return failures == 0 ? 0 : 1;
}

} // namespace
