// Python bindings for the core operations: closed-form frequency-domain
// physics, eigen-analysis, time-domain evolution, forward sweeps, and
// extraction.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "magcav/acceptance.hpp"
#include "magcav/eigen_modes.hpp"
#include "magcav/extraction.hpp"
#include "magcav/lindblad.hpp"
#include "magcav/model.hpp"
#include "magcav/sweep.hpp"

namespace py = pybind11;
using namespace magcav;

PYBIND11_MODULE(_core, m) {
    m.doc() = "cavity-magnet hybrid-system toolkit";

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("omega_c", &SystemParams::omega_c)
        .def_readwrite("kappa_c", &SystemParams::kappa_c)
        .def_readwrite("kappa_m", &SystemParams::kappa_m)
        .def_readwrite("g", &SystemParams::g)
        .def_readwrite("kappa_1_ex", &SystemParams::kappa_1_ex)
        .def_readwrite("kappa_2_ex", &SystemParams::kappa_2_ex)
        .def_readwrite("gamma_over_2pi", &SystemParams::gamma_over_2pi)
        .def_readwrite("mu0_ms", &SystemParams::mu0_ms)
        .def("validate", &SystemParams::validate)
        .def("to_json", [](const SystemParams& p) { return params_to_json(p); })
        .def_static("from_json", [](const std::string& s) { return params_from_json(s); });

    py::class_<FieldPoint>(m, "FieldPoint")
        .def(py::init<>())
        .def_readwrite("b0", &FieldPoint::b0)
        .def_readwrite("omega_m", &FieldPoint::omega_m)
        .def_readwrite("delta", &FieldPoint::delta)
        .def_static("from_field", &FieldPoint::from_field)
        .def_static("from_detuning", &FieldPoint::from_detuning);

    m.def("kittel_frequency", &kittel_frequency, py::arg("b0"), py::arg("params"));
    m.def("kittel_field", &kittel_field, py::arg("omega_m"), py::arg("params"));
    m.def("s21", &s21, py::arg("omega"), py::arg("field"), py::arg("params"));
    m.def("s22", &s22, py::arg("omega"), py::arg("field"), py::arg("params"));
    m.def("purcell_shift", &purcell_shift);
    m.def("purcell_broadening", &purcell_broadening);
    m.def("cooperativity", &cooperativity);
    m.def("purcell_factor", &purcell_factor);
    m.def("regime_classify",
          [](const SystemParams& p, double dominance) {
              return to_string(regime_classify(p, dominance));
          },
          py::arg("params"), py::arg("dominance") = 5.0);
    m.def("dos_lorentzian", &dos_lorentzian);
    m.def("spins_from_magnet", &spins_from_magnet);
    m.def("coupling_estimate_magnetic", &coupling_estimate_magnetic);
    m.def("coupling_estimate_electric", &coupling_estimate_electric, py::arg("length"),
          py::arg("radius"), py::arg("e_zpf"), py::arg("params"),
          py::arg("spin_line_density") = 0.0);

    py::class_<ComplexMode>(m, "ComplexMode")
        .def_readonly("omega", &ComplexMode::omega)
        .def_readonly("gamma_half", &ComplexMode::gamma_half)
        .def("as_complex", &ComplexMode::as_complex);

    m.def("exact_eigenfrequencies", &exact_eigenfrequencies);
    m.def("purcell_expansion", &purcell_expansion);
    m.def("exact_cavity_branch", &exact_cavity_branch);
    m.def("branch_sweep",
          [](const std::vector<double>& b_grid, const SystemParams& p) {
              const EigenBranch br = branch_sweep(b_grid, p);
              py::dict out;
              std::vector<std::complex<double>> upper, lower;
              for (const auto& mode : br.modes_upper) upper.push_back(mode.as_complex());
              for (const auto& mode : br.modes_lower) lower.push_back(mode.as_complex());
              out["fields"] = br.fields;
              out["detunings"] = br.detunings;
              out["upper"] = upper;
              out["lower"] = lower;
              out["omega_m"] = br.omega_m;
              out["min_real_separation"] = br.min_real_separation;
              return out;
          });

    py::class_<RingdownTrace>(m, "RingdownTrace")
        .def_readonly("times", &RingdownTrace::times)
        .def_readonly("power", &RingdownTrace::power);

    py::class_<LifetimeFit>(m, "LifetimeFit")
        .def_readonly("tau", &LifetimeFit::tau)
        .def_readonly("stderr_tau", &LifetimeFit::stderr_tau)
        .def_readonly("non_monotone", &LifetimeFit::non_monotone);

    py::class_<LifetimeFitOptions>(m, "LifetimeFitOptions")
        .def(py::init<>())
        .def_readwrite("t_start", &LifetimeFitOptions::t_start)
        .def_readwrite("t_end", &LifetimeFitOptions::t_end)
        .def_readwrite("floor", &LifetimeFitOptions::floor)
        .def_readwrite("floor_multiple", &LifetimeFitOptions::floor_multiple);

    m.def("uniform_times", &uniform_times);
    m.def("synthesize_ringdown", &synthesize_ringdown);
    m.def("fit_lifetime", &fit_lifetime, py::arg("trace"),
          py::arg("options") = LifetimeFitOptions{});

    py::class_<LorentzianFit>(m, "LorentzianFit")
        .def_readonly("center", &LorentzianFit::center)
        .def_readonly("fwhm", &LorentzianFit::fwhm)
        .def_readonly("amplitude", &LorentzianFit::amplitude)
        .def_readonly("background", &LorentzianFit::background)
        .def_readonly("converged", &LorentzianFit::converged);

    m.def("fit_lorentzian_power",
          [](const std::vector<double>& f, const std::vector<double>& p) {
              return fit_lorentzian_power(f, p);
          });

    py::class_<ExtractedParams>(m, "ExtractedParams")
        .def_readonly("omega_c", &ExtractedParams::omega_c)
        .def_readonly("kappa_c", &ExtractedParams::kappa_c)
        .def_readonly("kappa_m_mean", &ExtractedParams::kappa_m_mean)
        .def_readonly("g_mean", &ExtractedParams::g_mean)
        .def_readonly("cooperativity", &ExtractedParams::cooperativity)
        .def_readonly("b_res", &ExtractedParams::b_res)
        .def_readonly("mu0_ms_fit", &ExtractedParams::mu0_ms_fit)
        .def("to_json", [](const ExtractedParams& e) { return extracted_to_json(e); })
        .def("summary", [](const ExtractedParams& e) { return summarize_configuration(e); });

    m.def("extract_from_csv",
          [](const std::string& path, const SystemParams& hint) {
              return extract_height_waist(reduce_sweep(read_sweep_csv(path)), hint);
          },
          py::arg("path"), py::arg("hint") = SystemParams{.omega_c = 1.0});

    m.def("generate_sweep_csv",
          [](const std::string& config_json) {
              const RunConfig cfg = config_from_json(config_json);
              return sweep_to_csv(generate_sweep(cfg));
          },
          "forward sweep from a JSON config, returned as CSV text");

    m.def("run_acceptance", []() {
        py::list out;
        for (const auto& r : run_acceptance()) {
            py::dict d;
            d["name"] = r.name;
            d["passed"] = r.passed;
            d["detail"] = r.detail;
            out.append(d);
        }
        return out;
    });

    m.attr("__version__") = toolkit_version;
}
