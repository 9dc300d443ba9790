#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kmsspec/exprational.hpp"
#include "kmsspec/growth.hpp"
#include "kmsspec/padic.hpp"
#include "kmsspec/pipeline.hpp"
#include "kmsspec/realizable.hpp"
#include "kmsspec/spectra.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

kms::spectra::ClosedSetSpec closed_set(const std::vector<std::pair<double, double>>& intervals,
                                       const std::vector<double>& points) {
    return kms::spectra::ClosedSetSpec(intervals, points);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "KMS spectrum construction: native core";

    py::register_exception<kms::Error>(m, "KmsError");

    py::class_<kms::spectra::ClosedSetSpec>(m, "ClosedSet")
        .def(py::init(&closed_set), py::arg("intervals") = std::vector<std::pair<double, double>>{},
             py::arg("points") = std::vector<double>{})
        .def("distance", &kms::spectra::ClosedSetSpec::distance)
        .def("contains", &kms::spectra::ClosedSetSpec::contains);

    m.def("target_phi", [](const kms::spectra::ClosedSetSpec& K, double t, double beta) {
        return kms::spectra::target_phi_from_set(K, t)(beta);
    }, py::arg("K"), py::arg("t"), py::arg("beta"));

    m.def("solve_spectrum", [](const std::function<double(double)>& phi, double R, double tol, std::size_t n) {
        return kms::spectra::to_json(kms::spectra::solve_spectrum(phi, R, tol, n)).dump();
    }, py::arg("phi"), py::arg("R"), py::arg("tol"), py::arg("grid_n"),
       "Zero set of phi - 1 on [-R, R]; JSON text.");

    py::class_<kms::realizable::FractionPair>(m, "FractionPair")
        .def_readonly("k", &kms::realizable::FractionPair::k)
        .def_readonly("delta", &kms::realizable::FractionPair::delta)
        .def("phi1", &kms::realizable::FractionPair::phi1)
        .def("phi2", &kms::realizable::FractionPair::phi2);
    m.def("fraction_pair", &kms::realizable::fraction_pair, py::arg("K"), py::arg("k"), py::arg("lambda0_order"));

    m.def("approximate_unit_D", [](int n) { return kms::exprat::approximate_unit(n).D(); });
    m.def("mobius", &kms::realizable::mobius_eval);

    m.def("classify_spectrum", [](bool nonpos_limsup, bool nonneg_liminf) {
        return kms::growth::to_string(kms::growth::classify_spectrum(nonpos_limsup, nonneg_liminf));
    });
    m.def("classify_preset", [](const std::string& preset, double amp, double c, int M) {
        return kms::growth::to_string(kms::growth::classify_model(kms::growth::model_from_preset(preset, amp, c, M)).shape);
    }, py::arg("preset"), py::arg("amp") = 1.0, py::arg("c") = 1.0, py::arg("M") = 10007);
    m.def("sphere_sizes", [](int d, int n) { return kms::growth::ball_census(kms::growth::WordMetricGroup::lattice(d), n).sphere_sizes; });

    m.def("sl2_order", &kms::padic::sl2_order);
    m.def("closure_order", [](std::uint64_t p, int N) {
        return kms::padic::subgroup_closure_mod(p, N, {kms::padic::generator("g1"), kms::padic::generator("g2")}).order;
    });

    m.def("run", [](const std::string& config_json) {
        const auto cfg = kms::pipeline::parse_config(json::parse(config_json));
        const auto r = kms::pipeline::run(cfg);
        return r.files.at("report.json");
    }, py::arg("config_json"), "Run a pipeline config; returns report.json text.");
    m.def("run_to_dir", [](const std::string& config_json, const std::string& dir) {
        const auto cfg = kms::pipeline::parse_config(json::parse(config_json));
        const auto r = kms::pipeline::run(cfg);
        kms::pipeline::write_run(cfg, r, dir);
        return r.pass;
    });
    m.def("verify", [](const std::string& dir) {
        const auto v = kms::pipeline::verify(dir);
        return py::make_tuple(v.pass, v.first_failure);
    });
}
