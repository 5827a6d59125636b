#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "vinfo/cli.hpp"
#include "vinfo/error.hpp"
#include "vinfo/families.hpp"
#include "vinfo/io.hpp"
#include "vinfo/slices.hpp"
#include "vinfo/synthetic.hpp"
#include "vinfo/transforms.hpp"

namespace py = pybind11;
using namespace vinfo;

namespace {

FamilySpec family(const std::string& kind, std::uint64_t seed) {
    auto spec = FamilySpec::defaults(parse_family_kind(kind));
    spec.seed = seed;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_vinfo, m) {
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<EmptyInputError>(m, "EmptyInputError", PyExc_ValueError);
    py::register_exception<UndefinedError>(m, "UndefinedError", PyExc_ArithmeticError);

    py::class_<Instance>(m, "Instance")
        .def(py::init<>())
        .def_readwrite("id", &Instance::id)
        .def_readwrite("fields", &Instance::fields)
        .def_readwrite("gold", &Instance::gold);

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("schema", &Dataset::schema)
        .def_readonly("instances", &Dataset::instances)
        .def_property_readonly("labels", [](const Dataset& d) { return d.label_space.labels(); })
        .def("__len__", &Dataset::size);

    py::class_<PviRecord>(m, "PviRecord")
        .def_readonly("id", &PviRecord::id)
        .def_readonly("gold", &PviRecord::gold)
        .def_readonly("pvi_bits", &PviRecord::pvi_bits)
        .def_readonly("logp_x_bits", &PviRecord::logp_x_bits)
        .def_readonly("logp_null_bits", &PviRecord::logp_null_bits)
        .def_readonly("predicted", &PviRecord::predicted)
        .def_readonly("correct", &PviRecord::correct);

    py::class_<PviSummary>(m, "PviSummary")
        .def_readonly("n", &PviSummary::n)
        .def_readonly("v_information_bits", &PviSummary::v_information_bits)
        .def_readonly("std_err", &PviSummary::std_err)
        .def_property_readonly("label_entropy_bits", [](const PviSummary& s) { return s.label_entropy.bits; })
        .def_property_readonly("conditional_entropy_bits",
                               [](const PviSummary& s) { return s.conditional_entropy.bits; });

    py::class_<PviAnalysis>(m, "PviAnalysis")
        .def_readonly("records", &PviAnalysis::records)
        .def_readonly("summary", &PviAnalysis::summary);

    py::class_<PlantedData>(m, "PlantedData")
        .def_readonly("train", &PlantedData::train)
        .def_readonly("dev", &PlantedData::dev)
        .def_readonly("test", &PlantedData::test)
        .def_readonly("true_info_bits", &PlantedData::true_info_bits)
        .def_readonly("triggers", &PlantedData::triggers);

    m.def("read_dataset", py::overload_cast<const std::filesystem::path&>(&read_dataset), py::arg("path"));
    m.def("write_dataset", py::overload_cast<const Dataset&, const std::filesystem::path&>(&write_dataset),
          py::arg("data"), py::arg("path"));

    m.def("planted_information_bits", &planted_information_bits, py::arg("n_classes"), py::arg("flip_rate"));
    m.def(
        "generate_planted",
        [](std::size_t n, double flip_rate, std::size_t n_classes, std::size_t vocab_size, std::uint64_t seed,
           const std::string& layout) {
            PlantedSpec s;
            if (layout == "nli") s.layout = PlantedLayout::nli;
            else if (layout != "single") throw ConfigError("unknown planted layout '" + layout + "'");
            s.n = n;
            s.flip_rate = flip_rate;
            s.n_classes = n_classes;
            s.vocab_size = vocab_size;
            s.seed = seed;
            return generate_planted(s);
        },
        py::arg("n") = 10000, py::arg("flip_rate") = 0.1, py::arg("n_classes") = 2, py::arg("vocab_size") = 2000,
        py::arg("seed") = 0, py::arg("layout") = "single");
    m.def(
        "generate_independent",
        [](std::size_t n, std::size_t n_classes, std::uint64_t seed, const std::string& split) {
            return generate_independent(n, n_classes, seed, parse_split(split));
        },
        py::arg("n"), py::arg("n_classes") = 2, py::arg("seed") = 0, py::arg("split") = "train");

    m.def(
        "pvi",
        [](const Dataset& train, const Dataset& dev, const Dataset& eval, const std::string& kind,
           std::uint64_t seed) {
            py::gil_scoped_release release;
            return compute_all(train_pair(family(kind, seed), train, dev), eval);
        },
        py::arg("train"), py::arg("dev"), py::arg("eval"), py::arg("family") = "bow_linear", py::arg("seed") = 0,
        "Trains g' and g on train (selected on dev) and returns per-instance PVI on eval.");

    m.def(
        "apply_transform",
        [](const Dataset& data, const std::string& kind, std::optional<std::uint64_t> seed,
           std::vector<std::string> fields) {
            TransformSpec t;
            t.kind = parse_transform_kind(kind);
            t.seed = seed;
            t.fields = std::move(fields);
            return apply(t, data);
        },
        py::arg("data"), py::arg("kind"), py::arg("seed") = std::nullopt,
        py::arg("fields") = std::vector<std::string>{});

    m.def(
        "pvi_correlation",
        [](const std::vector<PviRecord>& a, const std::vector<PviRecord>& b) { return pvi_correlation(a, b); },
        py::arg("a"), py::arg("b"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}
