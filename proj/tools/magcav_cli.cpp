// Command-line front end: forward spectra and sweeps, eigenbranches, ringdown
// synthesis/fitting, parameter extraction, coupling estimates, and the
// verification battery. Exit codes: 0 ok, 1 usage, 2 data/convergence, 3 I/O.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "magcav/acceptance.hpp"
#include "magcav/constants.hpp"
#include "magcav/eigen_modes.hpp"
#include "magcav/extraction.hpp"
#include "magcav/lindblad.hpp"
#include "magcav/model.hpp"
#include "magcav/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
    auto* c = cmd->add_option("--config", o.config_path, "JSON configuration file");
    if (config_required) c->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "override the noise seed");
}

magcav::RunConfig load_config(const CommonOpts& o) {
    std::ifstream in(o.config_path);
    if (!in) throw IoError("cannot open " + o.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    magcav::RunConfig cfg = magcav::config_from_json(buf.str());
    if (o.seed) {
        cfg.noise.seed = *o.seed;
        cfg.noise.seed_set = true;
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

void write_envelope(const CommonOpts& o, const magcav::RunConfig& cfg,
                    const std::string& task, const json& payload,
                    const std::vector<std::string>& files) {
    const auto env = magcav::make_envelope(task, cfg, payload.dump(), files);
    write_file(fs::path(o.out_dir) / (task + ".json"), magcav::envelope_to_json(env) + "\n");
}

std::vector<double> field_grid(const magcav::SweepConfig& sc) {
    std::vector<double> grid;
    for (int i = 0; i < sc.b_points; ++i)
        grid.push_back(sc.b_min + (sc.b_max - sc.b_min) * i / (sc.b_points - 1));
    return grid;
}

int run_spectra(const CommonOpts& o, double b0_mt) {
    const magcav::RunConfig cfg = load_config(o);
    const magcav::SystemParams& p = cfg.params;
    const magcav::FieldPoint fp = magcav::FieldPoint::from_field(b0_mt * 1e-3, p);

    double span = 200e6, center = p.omega_c;
    int points = 2001;
    if (cfg.sweep) {
        span = cfg.sweep->freq_span;
        points = cfg.sweep->freq_points;
        if (cfg.sweep->freq_center > 0.0) center = cfg.sweep->freq_center;
    }
    std::ostringstream cols;
    cols << "# freq_GHz re_S21 im_S21 abs2_S21 re_S22 im_S22\n" << std::setprecision(12);
    std::vector<double> freqs, power;
    for (int i = 0; i < points; ++i) {
        const double f = center - span / 2.0 + span * i / (points - 1);
        const auto v21 = magcav::s21(f, fp, p);
        const auto v22 = magcav::s22(f, fp, p);
        freqs.push_back(f);
        power.push_back(std::norm(v21));
        cols << f / 1e9 << ' ' << v21.real() << ' ' << v21.imag() << ' ' << std::norm(v21)
             << ' ' << v22.real() << ' ' << v22.imag() << '\n';
    }
    const fs::path txt = fs::path(o.out_dir) / "spectra.txt";
    write_file(txt, cols.str());

    const auto fit = magcav::fit_lorentzian_power(freqs, power);
    json payload;
    payload["b0_mt"] = b0_mt;
    payload["delta_mhz"] = fp.delta / 1e6;
    payload["fit_center_ghz"] = fit.center / 1e9;
    payload["fit_fwhm_mhz"] = fit.fwhm / 1e6;
    payload["fit_converged"] = fit.converged;
    payload["regime"] = magcav::to_string(magcav::regime_classify(p));
    write_envelope(o, cfg, "spectra", payload, {txt.string()});
    std::cout << "center " << fit.center / 1e9 << " GHz, FWHM " << fit.fwhm / 1e6
              << " MHz\n";
    return kExitOk;
}

int run_sweep(const CommonOpts& o) {
    const magcav::RunConfig cfg = load_config(o);
    if (!cfg.sweep) throw std::invalid_argument("config: sweep block required");
    const magcav::GeneratedSweep sweep = magcav::generate_sweep(cfg);
    const fs::path csv = fs::path(o.out_dir) / "sweep.csv";
    write_file(csv, magcav::sweep_to_csv(sweep));
    json payload;
    payload["b_points"] = sweep.fields.size();
    payload["freq_points"] = sweep.power.front().frequencies.size();
    payload["noise_relative_amplitude"] = cfg.noise.relative_amplitude;
    write_envelope(o, cfg, "sweep", payload, {csv.string()});
    std::cout << "wrote " << csv.string() << " (" << sweep.fields.size() << " fields)\n";
    return kExitOk;
}

int run_eigen(const CommonOpts& o) {
    const magcav::RunConfig cfg = load_config(o);
    magcav::SystemParams p = cfg.params;
    std::vector<double> km_list = cfg.eigen.kappa_m_list;
    if (km_list.empty()) km_list.push_back(p.kappa_m);

    json payload = json::array();
    std::vector<std::string> files;
    for (std::size_t k = 0; k < km_list.size(); ++k) {
        p.kappa_m = km_list[k];
        const double span = 3.0 * std::max(p.kappa_m, 10.0 * p.g);
        magcav::SweepConfig sc;
        sc.b_min = magcav::kittel_field(p.omega_c - span, p);
        sc.b_max = magcav::kittel_field(p.omega_c + span, p);
        sc.b_points = cfg.eigen.b_points;
        const auto branch = magcav::branch_sweep(field_grid(sc), p);

        std::ostringstream cols;
        cols << "# B_mT w1_GHz G1_MHz w2_GHz G2_MHz wc_GHz wm_GHz\n" << std::setprecision(12);
        for (std::size_t i = 0; i < branch.fields.size(); ++i)
            cols << branch.fields[i] * 1e3 << ' ' << branch.modes_upper[i].omega / 1e9 << ' '
                 << branch.modes_upper[i].gamma_half / 1e6 << ' '
                 << branch.modes_lower[i].omega / 1e9 << ' '
                 << branch.modes_lower[i].gamma_half / 1e6 << ' ' << branch.omega_c / 1e9
                 << ' ' << branch.omega_m[i] / 1e9 << '\n';
        std::ostringstream name;
        name << "eigen_km" << km_list[k] / 1e6 << "MHz.txt";
        const fs::path txt = fs::path(o.out_dir) / name.str();
        write_file(txt, cols.str());
        files.push_back(txt.string());

        json entry;
        entry["kappa_m_mhz"] = km_list[k] / 1e6;
        entry["min_real_separation_mhz"] = branch.min_real_separation / 1e6;
        entry["min_separation_over_g"] =
            p.g > 0.0 ? branch.min_real_separation / p.g : 0.0;
        payload.push_back(entry);
        std::cout << "kappa_m " << km_list[k] / 1e6 << " MHz: min separation "
                  << branch.min_real_separation / 1e6 << " MHz\n";
    }
    write_envelope(o, cfg, "eigen", payload, files);
    return kExitOk;
}

int run_ringdown(const CommonOpts& o) {
    const magcav::RunConfig cfg = load_config(o);
    if (!cfg.ringdown) throw std::invalid_argument("config: ringdown block required");
    const magcav::RingdownConfig& rc = *cfg.ringdown;
    const magcav::SystemParams& p = cfg.params;
    const magcav::FieldPoint fp = magcav::FieldPoint::from_field(rc.b0, p);

    const auto times = magcav::uniform_times(rc.t_max, rc.dt);
    const auto trace = magcav::synthesize_ringdown(fp, p, rc.scale, rc.offset, times);

    std::ostringstream cols;
    cols << "# t_ns power\n" << std::setprecision(12);
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        cols << trace.times[i] * 1e9 << ' ' << trace.power[i] << '\n';
    const fs::path txt = fs::path(o.out_dir) / "ringdown.txt";
    write_file(txt, cols.str());

    magcav::LifetimeFitOptions fopts;
    const double ksys = p.g > 0.0 ? magcav::purcell_broadening(fp, p) : p.kappa_c;
    fopts.t_end = std::min(rc.t_max, 3.0 / (magcav::constants::two_pi * ksys));
    const auto fit = magcav::fit_lifetime(trace, fopts);

    json payload;
    payload["b0_mt"] = rc.b0 * 1e3;
    payload["tau_ns"] = fit.tau * 1e9;
    payload["stderr_tau_ns"] = fit.stderr_tau * 1e9;
    payload["inv_kappa_sys_ns"] = 1e9 / (magcav::constants::two_pi * ksys);
    payload["scale"] = rc.scale;
    payload["offset"] = rc.offset;
    payload["fit_window_ns"] = {fopts.t_start * 1e9, fopts.t_end * 1e9};
    write_envelope(o, cfg, "ringdown", payload, {txt.string()});
    std::cout << "tau = " << fit.tau * 1e9 << " ns (1/2pi*kappa_sys = "
              << 1e9 / (magcav::constants::two_pi * ksys) << " ns)\n";
    return kExitOk;
}

int run_lifetime_sweep(const CommonOpts& o) {
    const magcav::RunConfig cfg = load_config(o);
    if (!cfg.sweep) throw std::invalid_argument("config: sweep block required");
    magcav::RingdownSettings settings;
    if (cfg.ringdown) {
        settings.t_max = cfg.ringdown->t_max;
        settings.dt = cfg.ringdown->dt;
        settings.scale = cfg.ringdown->scale;
        settings.offset = cfg.ringdown->offset;
    }
    const auto points =
        magcav::lifetime_vs_field(field_grid(*cfg.sweep), cfg.params, settings);

    std::ostringstream cols;
    cols << "# B_mT tau_ns inv_kappa_ns flagged\n" << std::setprecision(12);
    std::size_t flagged = 0;
    for (const auto& pt : points) {
        cols << pt.b0 * 1e3 << ' ' << pt.tau * 1e9 << ' ' << pt.inv_kappa * 1e9 << ' '
             << (pt.flagged ? 1 : 0) << '\n';
        if (pt.flagged) ++flagged;
    }
    const fs::path txt = fs::path(o.out_dir) / "lifetime_sweep.txt";
    write_file(txt, cols.str());

    json payload;
    payload["points"] = points.size();
    payload["flagged"] = flagged;
    write_envelope(o, cfg, "lifetime-sweep", payload, {txt.string()});
    std::cout << "wrote " << txt.string() << " (" << flagged << " flagged)\n";
    return flagged == points.size() && !points.empty() ? kExitData : kExitOk;
}

int run_extract(const CommonOpts& o, const std::string& input_csv) {
    const magcav::RunConfig cfg = load_config(o);
    std::vector<magcav::PowerSpectrum> spectra;
    try {
        spectra = magcav::read_sweep_csv(input_csv);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    magcav::LorentzianFitOptions fopts;
    fopts.residual_cap = cfg.extraction.residual_cap;
    const auto reduced = magcav::reduce_sweep(spectra, fopts);
    magcav::ExtractionOptions xopts;
    xopts.bias_correction = cfg.extraction.bias_correction;
    xopts.asymptote_window = cfg.extraction.asymptote_window;
    const auto extracted = magcav::extract_height_waist(reduced, cfg.params, xopts);

    const fs::path out_json = fs::path(o.out_dir) / "extracted.json";
    write_file(out_json, magcav::extracted_to_json(extracted) + "\n");
    write_envelope(o, cfg, "extract", json::parse(magcav::extracted_to_json(extracted)),
                   {out_json.string()});
    std::cout << magcav::summarize_configuration(extracted) << '\n';
    return kExitOk;
}

int run_estimate_g(const CommonOpts& o, const std::string& mode, double wire_length_mm,
                   double wire_radius_um, double cavity_volume_mm3, double e_zpf) {
    const magcav::RunConfig cfg = load_config(o);
    const magcav::SystemParams& p = cfg.params;
    json payload;
    double g = 0.0;
    if (mode == "magnetic") {
        const double n_spins =
            magcav::spins_from_magnet(p.mu0_ms, wire_radius_um * 1e-6, wire_length_mm * 1e-3);
        g = magcav::coupling_estimate_magnetic(n_spins, cavity_volume_mm3 * 1e-9, p);
        payload["spin_count"] = n_spins;
    } else if (mode == "electric") {
        g = magcav::coupling_estimate_electric(wire_length_mm * 1e-3, wire_radius_um * 1e-6,
                                               e_zpf, p);
    } else {
        throw std::invalid_argument("estimate-g: mode must be magnetic or electric");
    }
    payload["mode"] = mode;
    payload["g_mhz"] = g / 1e6;
    write_envelope(o, cfg, "estimate-g", payload, {});
    std::cout << "g = " << g / 1e6 << " MHz (" << mode << " estimate)\n";
    return kExitOk;
}

int run_verify() {
    const auto results = magcav::run_acceptance();
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail
                  << "]\n";
        all_ok = all_ok && r.passed;
    }
    std::cout << (all_ok ? "all criteria passed\n" : "some criteria FAILED\n");
    return all_ok ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavity-magnet hybrid-system toolkit"};
    app.require_subcommand(1);

    CommonOpts spectra_o, sweep_o, eigen_o, ringdown_o, lifetime_o, extract_o, estimate_o;
    double b0_mt = 0.0;
    auto* c_spectra = app.add_subcommand("spectra", "single-field S21/S22 spectra");
    add_common(c_spectra, spectra_o);
    c_spectra->add_option("--b0-mt", b0_mt, "static field (mT)")->required();

    auto* c_sweep = app.add_subcommand("sweep", "forward field-swept spectra to CSV");
    add_common(c_sweep, sweep_o);

    auto* c_eigen = app.add_subcommand("eigen", "polariton branch sweeps per kappa_m");
    add_common(c_eigen, eigen_o);

    auto* c_ringdown = app.add_subcommand("ringdown", "time-domain decay trace and fit");
    add_common(c_ringdown, ringdown_o);

    auto* c_lifetime = app.add_subcommand("lifetime-sweep", "ringdown lifetime vs field");
    add_common(c_lifetime, lifetime_o);

    std::string input_csv;
    auto* c_extract = app.add_subcommand("extract", "parameter extraction from a sweep CSV");
    add_common(c_extract, extract_o);
    c_extract->add_option("--input", input_csv, "sweep CSV file")->required();

    std::string mode = "magnetic";
    double wire_length_mm = 4.0, wire_radius_um = 4.0, cavity_volume_mm3 = 26.0 * 8.0 * 36.0;
    double e_zpf = 1.0;
    auto* c_estimate = app.add_subcommand("estimate-g", "coupling-strength estimators");
    add_common(c_estimate, estimate_o);
    c_estimate->add_option("--mode", mode, "magnetic or electric");
    c_estimate->add_option("--wire-length-mm", wire_length_mm, "wire length (mm)");
    c_estimate->add_option("--wire-radius-um", wire_radius_um, "wire core radius (um)");
    c_estimate->add_option("--cavity-volume-mm3", cavity_volume_mm3, "cavity volume (mm^3)");
    c_estimate->add_option("--e-zpf", e_zpf, "zero-point E field in the wire (V/m)");

    auto* c_verify = app.add_subcommand("verify", "run the verification battery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_spectra->parsed()) return run_spectra(spectra_o, b0_mt);
        if (c_sweep->parsed()) return run_sweep(sweep_o);
        if (c_eigen->parsed()) return run_eigen(eigen_o);
        if (c_ringdown->parsed()) return run_ringdown(ringdown_o);
        if (c_lifetime->parsed()) return run_lifetime_sweep(lifetime_o);
        if (c_extract->parsed()) return run_extract(extract_o, input_csv);
        if (c_estimate->parsed())
            return run_estimate_g(estimate_o, mode, wire_length_mm, wire_radius_um,
                                  cavity_volume_mm3, e_zpf);
        if (c_verify->parsed()) return run_verify();
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
