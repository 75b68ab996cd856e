#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "htc/analysis.hpp"
#include "htc/bitcore.hpp"
#include "htc/codec.hpp"
#include "htc/config.hpp"
#include "htc/decode.hpp"
#include "htc/error.hpp"
#include "htc/imageio.hpp"
#include "htc/search.hpp"

namespace py = pybind11;
using namespace htc;

namespace {

py::bytes to_bytes(const std::vector<uint8_t>& v) {
    return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<uint8_t> from_bytes(const py::bytes& b) {
    std::string s = b;
    return std::vector<uint8_t>(s.begin(), s.end());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Constrained coding of payloads as halftone black/white bit matrices";

    static py::exception<Error> exc(m, "CodecError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            exc(e.what());
        }
    });

    py::class_<BlockLayout>(m, "BlockLayout")
        .def(py::init<int, int, int, int>(), py::arg("n"), py::arg("k"), py::arg("f"),
             py::arg("R"))
        .def_readonly("n", &BlockLayout::n)
        .def_readonly("k", &BlockLayout::k)
        .def_readonly("f", &BlockLayout::f)
        .def_readonly("R", &BlockLayout::R)
        .def("freedom_level", &BlockLayout::freedom_level)
        .def("rate", &BlockLayout::rate);

    py::class_<BitMatrix>(m, "BitMatrix")
        .def_readonly("width", &BitMatrix::width)
        .def_readonly("height", &BitMatrix::height)
        .def_property_readonly("bits", [](const BitMatrix& mt) { return mt.bits; });

    py::class_<GraynessMap>(m, "GraynessMap")
        .def(py::init<int, int, double>(), py::arg("width"), py::arg("height"),
             py::arg("fill") = 0.5)
        .def_readonly("width", &GraynessMap::width)
        .def_readonly("height", &GraynessMap::height)
        .def_property(
            "g", [](const GraynessMap& mp) { return mp.g; },
            [](GraynessMap& mp, const std::vector<double>& g) {
                if (g.size() != mp.g.size()) fail(errc::length_mismatch, "wrong g length");
                mp.g = g;
            });

    py::class_<Ordering>(m, "Ordering")
        .def_readonly("width", &Ordering::width)
        .def_readonly("height", &Ordering::height)
        .def_property_readonly("perm", [](const Ordering& o) { return o.perm; });

    py::class_<Codec>(m, "Codec")
        .def(py::init<uint64_t, const BlockLayout&, int, int>(), py::arg("key"),
             py::arg("layout"), py::arg("state_bits") = 64, py::arg("rotation") = 13)
        .def_property_readonly("layout", &Codec::layout)
        .def_property_readonly("initial_state", &Codec::initial_state)
        .def("encode_step",
             [](const Codec& c, uint16_t x, uint64_t s) {
                 auto r = c.encode_step(x, s);
                 return py::make_tuple(r.y, r.state);
             })
        .def("decode_step", [](const Codec& c, uint16_t y, uint64_t s) {
            auto r = c.decode_step(y, s);
            return py::make_tuple(r.x, r.state, r.redundancy_ok);
        });

    py::class_<SearchParams>(m, "SearchParams")
        .def(py::init<>())
        .def_readwrite("base_ensemble", &SearchParams::base_ensemble)
        .def_readwrite("max_ensemble", &SearchParams::max_ensemble)
        .def_readwrite("adaptive", &SearchParams::adaptive)
        .def_readwrite("max_restarts", &SearchParams::max_restarts)
        .def_readwrite("step_limit", &SearchParams::step_limit);

    py::class_<SearchStats>(m, "SearchStats")
        .def_readonly("population", &SearchStats::population)
        .def_readonly("final_weight", &SearchStats::final_weight)
        .def_readonly("restarts", &SearchStats::restarts)
        .def_readonly("visited_nodes", &SearchStats::visited_nodes)
        .def("csv", &SearchStats::csv);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("key", &RunConfig::key)
        .def_readwrite("layout", &RunConfig::layout)
        .def_readwrite("state_bits", &RunConfig::state_bits)
        .def_readwrite("rotation", &RunConfig::rotation)
        .def_readwrite("shift_dx", &RunConfig::shift_dx)
        .def_readwrite("shift_dy", &RunConfig::shift_dy)
        .def("to_line", &RunConfig::to_line)
        .def_static("from_line", &RunConfig::from_line)
        .def("make_codec", &RunConfig::make_codec)
        .def("make_ordering", &RunConfig::make_ordering);

    // analysis
    m.def("entropy", &entropy, py::arg("p"));
    py::enum_<Branch>(m, "Branch").value("lower", Branch::lower).value("upper", Branch::upper);
    m.def("entropy_inv", &entropy_inv, py::arg("r"), py::arg("branch") = Branch::upper);
    m.def("contrast_limits", [](double rate) {
        LimitsRow row = contrast_limits(rate);
        return py::make_tuple(row.optimal_contrast, row.systematic_contrast,
                              row.damaged_ecc_contrast);
    });
    m.def("expected_min_ones", &expected_min_ones, py::arg("n"), py::arg("m"));
    m.def("pareto_exponent", &pareto_exponent, py::arg("p_f"), py::arg("f"), py::arg("n"));
    m.def("capacity_report", [](double p_f) {
        CapacityReport rep = capacity_report(p_f);
        return py::make_tuple(rep.kt_limit, rep.damaged_ecc_limit, rep.ratio);
    });
    m.def("difficulty_profile",
          [](const GraynessMap& map, const BlockLayout& layout, const Ordering& ordering) {
              DifficultyProfile p = difficulty_profile(map, layout, ordering);
              std::vector<py::tuple> rows;
              rows.reserve(p.rows.size());
              for (const ProfileRow& r : p.rows)
                  rows.push_back(py::make_tuple(r.block_index, r.freedom_cum, r.constraint_cum,
                                                r.log2_population));
              return py::make_tuple(rows, p.step_estimate);
          });

    // bitcore
    m.def("build_ordering", &build_ordering, py::arg("width"), py::arg("height"), py::arg("dx"),
          py::arg("dy"));
    m.def("grayness_general", &grayness_general);
    m.def("grayness_homogeneous", &grayness_homogeneous);
    m.def("adjust_grayness", &adjust_grayness, py::arg("map"), py::arg("target_rate"),
          py::arg("margin") = 0.0);

    // search + decode
    m.def("encode_constrained",
          [](const Codec& codec, const py::bytes& payload, const GraynessMap& map,
             const Ordering& ordering, const SearchParams& params) {
              EncodeResult r = encode_constrained(codec, from_bytes(payload), map, ordering,
                                                  params);
              return py::make_tuple(r.matrix, r.stats);
          },
          py::arg("codec"), py::arg("payload"), py::arg("map"), py::arg("ordering"),
          py::arg("params") = SearchParams());
    m.def("encode_kt",
          [](const Codec& codec, const py::bytes& payload, const GraynessMap& map,
             const Ordering& ordering, const SearchParams& params) {
              EncodeResult r = encode_kt(codec, from_bytes(payload), map, ordering, params);
              return py::make_tuple(r.matrix, r.stats);
          },
          py::arg("codec"), py::arg("payload"), py::arg("map"), py::arg("ordering"),
          py::arg("params") = SearchParams());
    m.def("decode_plain", [](const Codec& codec, const BitMatrix& matrix,
                             const Ordering& ordering) {
        DecodeReport rep = decode_plain(codec, matrix, ordering);
        return py::make_tuple(to_bytes(rep.payload), rep.redundancy_failures);
    });
    m.def("decode_correct",
          [](const Codec& codec, const BitMatrix& matrix, const Ordering& ordering, double p_b,
             uint64_t node_limit) {
              CorrectionParams params;
              params.p_b = p_b;
              params.node_limit = node_limit;
              CorrectionResult r = decode_correct(codec, matrix, ordering, params);
              py::dict d;
              d["payload"] = to_bytes(r.payload);
              d["flips"] = r.flips;
              d["nodes_visited"] = r.nodes_visited;
              d["final_weight"] = r.final_weight;
              d["recovered"] = r.recovered;
              return d;
          },
          py::arg("codec"), py::arg("matrix"), py::arg("ordering"), py::arg("p_b") = 0.01,
          py::arg("node_limit") = 20000);
    m.def("halftone_compress",
          [](const Codec& codec, const GraynessMap& map, const Ordering& ordering,
             const SearchParams& params) {
              CompressResult r = halftone_compress(codec, map, ordering, params);
              return py::make_tuple(r.freedom_bits, r.matrix, r.stats);
          },
          py::arg("codec"), py::arg("map"), py::arg("ordering"),
          py::arg("params") = SearchParams());
    m.def("halftone_decompress", &halftone_decompress, py::arg("codec"),
          py::arg("freedom_bits"), py::arg("width"), py::arg("height"), py::arg("ordering"));

    // imageio
    m.def("read_image", [](const py::bytes& data) {
        RasterImage img = read_image(from_bytes(data));
        py::dict d;
        d["width"] = img.width;
        d["height"] = img.height;
        d["channels"] = img.channels;
        d["maxval"] = img.maxval;
        d["samples"] = img.samples;
        return d;
    });
    m.def("write_matrix", [](const BitMatrix& matrix, bool plain) {
        return to_bytes(write_matrix(matrix, plain ? PbmFormat::P1 : PbmFormat::P4));
    }, py::arg("matrix"), py::arg("plain") = false);
    m.def("empirical_grayness",
          [](const BitMatrix& matrix, const GraynessMap& map, double bucket_width) {
              std::vector<py::tuple> rows;
              for (const GraynessBucket& b : empirical_grayness(matrix, map, bucket_width))
                  rows.push_back(py::make_tuple(b.target_mean, b.observed_black, b.pixels));
              return rows;
          },
          py::arg("matrix"), py::arg("map"), py::arg("bucket_width") = 0.1);

    m.attr("__version__") = "0.1.0";
}
