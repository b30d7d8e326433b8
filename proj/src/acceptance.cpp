#include "magcav/acceptance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "magcav/constants.hpp"
#include "magcav/eigen_modes.hpp"
#include "magcav/extraction.hpp"
#include "magcav/lindblad.hpp"
#include "magcav/model.hpp"
#include "magcav/sweep.hpp"

namespace magcav {

namespace {

using constants::two_pi;
using std::complex;

struct TableRow {
    double wc_ghz, g_mhz, km_mhz, kc_mhz, c_printed, mu0_ms;
};

// The nine measured configurations (room temperature rows use mu0Ms = 0.84 T,
// millikelvin rows 1.19 T).
constexpr std::array<TableRow, 9> kRows = {{
    {7.401, 37.0, 660.0, 5.6, 1.5, 0.84},
    {7.410, 31.0, 670.0, 4.2, 1.4, 0.84},
    {7.425, 19.0, 680.0, 2.9, 0.7, 0.84},
    {7.415, 21.0, 680.0, 6.1, 0.42, 0.84},
    {7.403, 35.0, 660.0, 7.6, 0.98, 0.84},
    {7.392, 56.0, 730.0, 9.6, 1.8, 0.84},
    {7.206, 17.0, 660.0, 2.9, 0.60, 1.19},
    {7.178, 25.0, 660.0, 4.1, 0.92, 1.19},
    {7.210, 32.0, 680.0, 3.7, 1.6, 1.19},
}};

SystemParams row_params(const TableRow& r) {
    SystemParams p;
    p.omega_c = r.wc_ghz * 1e9;
    p.g = r.g_mhz * 1e6;
    p.kappa_m = r.km_mhz * 1e6;
    p.kappa_c = r.kc_mhz * 1e6;
    p.kappa_1_ex = 5.8e3;
    p.kappa_2_ex = 540e3;
    p.mu0_ms = r.mu0_ms;
    return p;
}

double round_sig(double v, int sig) {
    if (v == 0.0) return 0.0;
    const double mag =
        std::pow(10.0, sig - 1 - static_cast<int>(std::floor(std::log10(std::abs(v)))));
    return std::round(v * mag) / mag;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

double fit_tau_at(const FieldPoint& fp, const SystemParams& p) {
    const double ksys = p.kappa_m > 0.0 && p.g > 0.0 ? purcell_broadening(fp, p) : p.kappa_c;
    const auto times = uniform_times(1000e-9, 1e-9);
    const auto trace = synthesize_ringdown(fp, p, 1.0, 0.0, times);
    LifetimeFitOptions opts;
    opts.t_end = 3.0 / (two_pi * ksys);
    return fit_lifetime(trace, opts).tau;
}

// Worst pairwise relative disagreement between two unordered eigenvalue pairs.
double pair_error(complex<double> a1, complex<double> a2, complex<double> b1,
                  complex<double> b2, double scale) {
    const double keep = std::max(std::abs(a1 - b1), std::abs(a2 - b2));
    const double swap = std::max(std::abs(a1 - b2), std::abs(a2 - b1));
    return std::min(keep, swap) / scale;
}

CriterionResult table_cooperativities() {
    CriterionResult r{"table-cooperativity", true, ""};
    double worst = 0.0;
    for (const auto& row : kRows) {
        const double c = cooperativity(row_params(row));
        const double dev = std::abs(round_sig(c, 2) - row.c_printed);
        worst = std::max(worst, dev);
        if (dev > 0.05 + 1e-12) r.passed = false;
    }
    r.detail = "max |rounded C - printed C| = " + fmt(worst) + " (cap 0.05)";
    return r;
}

CriterionResult purcell_factor_ringdown() {
    const SystemParams p = row_params(kRows[8]);
    const double fp_model = purcell_factor(p);
    const double tau_res = fit_tau_at(FieldPoint::from_detuning(0.0, p), p);
    const double tau_far = fit_tau_at(FieldPoint::from_field(0.0, p), p);
    const double ratio = tau_far / tau_res;
    const double measured = 2.4;
    CriterionResult r{"purcell-factor-ringdown", true, ""};
    r.passed = std::abs(ratio / fp_model - 1.0) <= 0.05 &&
               std::abs(ratio / measured - 1.0) <= 0.15 &&
               std::abs(fp_model / measured - 1.0) <= 0.15;
    r.detail = "1+C = " + fmt(fp_model) + ", tau(far)/tau(0) = " + fmt(ratio) +
               ", measured reference 2.4";
    return r;
}

CriterionResult kittel_resonance_fields() {
    SystemParams a;
    a.omega_c = 7.401e9;
    a.mu0_ms = 0.84;
    SystemParams b;
    b.omega_c = 7.210e9;
    b.mu0_ms = 1.19;
    const double b1 = kittel_field(a.omega_c, a);
    const double b2 = kittel_field(b.omega_c, b);
    CriterionResult r{"kittel-resonance-fields", true, ""};
    r.passed = std::abs(b1 - 76e-3) <= 2e-3 && std::abs(b2 - 53e-3) <= 2e-3;
    r.detail = "B_res = " + fmt(b1 * 1e3) + " mT (76 +- 2), " + fmt(b2 * 1e3) +
               " mT (53 +- 2)";
    return r;
}

double split_vs_numeric(const FieldPoint& fp, const SystemParams& p) {
    const SplitEigenResult split = split_eigen_real_imag(fp, p);
    Eigen::Matrix2cd m;
    m << complex<double>(fp.omega_m, -p.kappa_m / 2.0), complex<double>(p.g, 0.0),
        complex<double>(p.g, 0.0), complex<double>(p.omega_c, -p.kappa_c / 2.0);
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> solver(m, false);
    return pair_error(split.plus.as_complex(), split.minus.as_complex(),
                      solver.eigenvalues()(0), solver.eigenvalues()(1), p.omega_c);
}

CriterionResult eigenvalue_oracle() {
    CriterionResult r{"eigenvalue-oracle", true, ""};
    double worst = 0.0;
    const SystemParams base = row_params(kRows[0]);
    for (int i = 0; i < 101; ++i) {
        for (int j = 0; j < 101; ++j) {
            SystemParams p = base;
            p.g = (base.kappa_m / 2.0) * j / 100.0;
            const double delta = -2.0 * base.kappa_m + 4.0 * base.kappa_m * i / 100.0;
            worst = std::max(worst, split_vs_numeric(FieldPoint::from_detuning(delta, p), p));
        }
    }
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        SystemParams p;
        p.omega_c = 1e9 + 9e9 * u(rng);
        p.kappa_c = p.omega_c / 10.0 * u(rng);
        p.kappa_m = p.omega_c / 10.0 * u(rng);
        p.g = p.omega_c / 20.0 * u(rng);
        const double delta = (2.0 * u(rng) - 1.0) * 5.0 * std::max(p.kappa_m, p.g + 1.0);
        worst = std::max(worst, split_vs_numeric(FieldPoint::from_detuning(delta, p), p));
    }
    r.passed = worst <= 1e-10;
    r.detail = "max relative eigenvalue disagreement = " + fmt(worst) + " (cap 1e-10)";
    return r;
}

CriterionResult expansion_error_scaling() {
    SystemParams p;
    p.omega_c = 7.4e9;
    p.kappa_m = 500e6;
    p.kappa_c = 5e6;  // kappa_m / kappa_c = 100
    std::vector<double> log_g, log_err;
    for (int k = 0; k < 9; ++k) {
        p.g = p.kappa_m / 100.0 * std::pow(10.0, k / 8.0);  // km/100 .. km/10
        double max_err = 0.0;
        for (int i = 0; i <= 800; ++i) {
            const double delta = -2.0 * p.kappa_m + 4.0 * p.kappa_m * i / 800.0;
            const FieldPoint fp = FieldPoint::from_detuning(delta, p);
            auto [ep, em] = purcell_expansion(fp, p);
            auto [xp, xm] = exact_eigenfrequencies(fp, p);
            max_err = std::max(max_err,
                               pair_error(ep.as_complex(), em.as_complex(), xp.as_complex(),
                                          xm.as_complex(), 1.0));
        }
        log_g.push_back(std::log(p.g));
        log_err.push_back(std::log(max_err));
    }
    const double n = static_cast<double>(log_g.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_g.size(); ++i) {
        sx += log_g[i];
        sy += log_err[i];
        sxx += log_g[i] * log_g[i];
        sxy += log_g[i] * log_err[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CriterionResult r{"expansion-error-scaling", true, ""};
    r.passed = std::abs(slope - 4.0) <= 0.3;
    r.detail = "log-log error slope vs g = " + fmt(slope) + " (target 4.0 +- 0.3)";
    return r;
}

CriterionResult ringdown_rate_consistency() {
    CriterionResult r{"ringdown-rate-consistency", true, ""};
    double worst = 0.0;
    for (const auto& row : kRows) {
        const SystemParams p = row_params(row);
        const FieldPoint fp = FieldPoint::from_detuning(0.0, p);
        const double tau = fit_tau_at(fp, p);
        const double rate = 1.0 / (two_pi * tau);
        const double rel = std::abs(rate / purcell_broadening(fp, p) - 1.0);
        worst = std::max(worst, rel);
        if (rel > 0.03) r.passed = false;
    }
    SystemParams p0 = row_params(kRows[0]);
    p0.g = 0.0;
    const double tau0 = fit_tau_at(FieldPoint::from_detuning(0.0, p0), p0);
    const double rel0 = std::abs(tau0 * two_pi * p0.kappa_c - 1.0);
    if (rel0 > 1e-3) r.passed = false;
    r.detail = "max rate deviation = " + fmt(100.0 * worst) + "% (cap 3%), g=0 tau deviation = " +
               fmt(100.0 * rel0) + "% (cap 0.1%)";
    return r;
}

RunConfig round_trip_config(const SystemParams& p, int b_points, int freq_points) {
    RunConfig cfg;
    cfg.params = p;
    SweepConfig sc;
    sc.b_min = kittel_field(p.omega_c - 5.0 * p.kappa_m, p);
    sc.b_max = kittel_field(p.omega_c + 5.0 * p.kappa_m, p);
    sc.b_points = b_points;
    sc.freq_span = 200e6;
    sc.freq_points = freq_points;
    cfg.sweep = sc;
    return cfg;
}

SystemParams extraction_hint() {
    // Only the gyromagnetic ratio is consumed by the extractor; everything
    // else is inferred from the data.
    SystemParams hint;
    hint.omega_c = 1.0;
    return hint;
}

CriterionResult round_trip_extraction() {
    CriterionResult r{"round-trip-extraction", true, ""};
    double worst_g = 0.0, worst_km = 0.0, worst_kc = 0.0, worst_wc = 0.0;
    for (const auto& row : kRows) {
        const SystemParams p = row_params(row);
        const GeneratedSweep fwd = generate_sweep(round_trip_config(p, 161, 2001));
        const FieldSweepResult reduced = reduce_sweep(fwd.power);
        const ExtractedParams e = extract_height_waist(reduced, extraction_hint());
        worst_g = std::max(worst_g, std::abs(e.g_mean / p.g - 1.0));
        worst_km = std::max(worst_km, std::abs(e.kappa_m_mean / p.kappa_m - 1.0));
        worst_kc = std::max(worst_kc, std::abs(e.kappa_c / p.kappa_c - 1.0));
        worst_wc = std::max(worst_wc, std::abs(e.omega_c - p.omega_c) / p.kappa_c);
    }
    if (worst_g > 0.02 || worst_km > 0.03 || worst_kc > 0.02 || worst_wc > 0.1)
        r.passed = false;

    // Monte Carlo leg: 1% multiplicative noise, 100 fixed seeds, first row.
    const SystemParams p1 = row_params(kRows[0]);
    RunConfig noisy = round_trip_config(p1, 121, 1001);
    noisy.noise.relative_amplitude = 0.01;
    noisy.noise.seed_set = true;
    std::vector<double> g_estimates;
    for (int k = 0; k < 100; ++k) {
        noisy.noise.seed = 1000 + static_cast<std::uint64_t>(k);
        const GeneratedSweep fwd = generate_sweep(noisy);
        const FieldSweepResult reduced = reduce_sweep(fwd.power);
        g_estimates.push_back(extract_height_waist(reduced, extraction_hint()).g_mean);
    }
    double mean = 0.0;
    for (double g : g_estimates) mean += g;
    mean /= static_cast<double>(g_estimates.size());
    double var = 0.0;
    for (double g : g_estimates) var += (g - mean) * (g - mean);
    var /= static_cast<double>(g_estimates.size() - 1);
    const double bias = std::abs(mean / p1.g - 1.0);
    const double scatter = std::sqrt(var) / p1.g;
    if (bias > 0.05 || scatter > 0.10) r.passed = false;

    r.detail = "noiseless worst: g " + fmt(100 * worst_g) + "%, km " + fmt(100 * worst_km) +
               "%, kc " + fmt(100 * worst_kc) + "%, wc " + fmt(worst_wc) +
               " kc; noisy g bias " + fmt(100 * bias) + "%, scatter " +
               fmt(100 * scatter) + "%";
    return r;
}

CriterionResult coupling_estimate() {
    SystemParams p;
    p.omega_c = 7.4e9;
    p.mu0_ms = 0.84;
    const double n_spins = spins_from_magnet(p.mu0_ms, 4e-6, 4e-3);
    const double volume = 26e-3 * 8e-3 * 36e-3;
    const double g = coupling_estimate_magnetic(n_spins, volume, p);
    CriterionResult r{"coupling-estimate", true, ""};
    r.passed = std::abs(g / 3e6 - 1.0) <= 0.30;
    r.detail = "g estimate = " + fmt(g / 1e6) + " MHz (target 3 MHz +- 30%)";
    return r;
}

CriterionResult regime_transition() {
    SystemParams p;
    p.omega_c = 7.4e9;
    p.g = 5e6;
    p.kappa_c = 5e6;
    p.mu0_ms = 0.84;

    auto min_sep = [&](double km, double span) {
        SystemParams q = p;
        q.kappa_m = km;
        std::vector<double> grid;
        const double b_lo = kittel_field(q.omega_c - span, q);
        const double b_hi = kittel_field(q.omega_c + span, q);
        for (int i = 0; i <= 2000; ++i)
            grid.push_back(b_lo + (b_hi - b_lo) * i / 2000.0);
        return branch_sweep(grid, q).min_real_separation;
    };

    const double sep_strong = min_sep(5e6, 100e6);
    const double sep_purcell = min_sep(500e6, 1.5e9);
    CriterionResult r{"regime-transition", true, ""};
    r.passed = sep_strong >= 1.9 * p.g && sep_purcell <= 0.5 * p.g;
    r.detail = "min separation / g: " + fmt(sep_strong / p.g) +
               " (avoided crossing, >= 1.9), " + fmt(sep_purcell / p.g) +
               " (crossing, <= 0.5)";
    return r;
}

CriterionResult conservation_identities() {
    CriterionResult r{"conservation-identities", true, ""};

    // Trace and determinant of the reduced two-mode problem.
    double worst_tracedet = 0.0;
    for (const auto& row : kRows) {
        const SystemParams p = row_params(row);
        for (double frac : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
            const FieldPoint fp = FieldPoint::from_detuning(frac * p.kappa_m, p);
            auto [m1, m2] = exact_eigenfrequencies(fp, p);
            const complex<double> lc{p.omega_c, -p.kappa_c / 2.0};
            const complex<double> lm{fp.omega_m, -p.kappa_m / 2.0};
            const complex<double> tr = m1.as_complex() + m2.as_complex() - (lc + lm);
            const complex<double> det =
                m1.as_complex() * m2.as_complex() - (lm * lc - p.g * p.g);
            worst_tracedet = std::max(worst_tracedet, std::abs(tr) / std::abs(lc + lm));
            worst_tracedet =
                std::max(worst_tracedet, std::abs(det) / std::abs(lm * lc));
        }
    }
    if (worst_tracedet > 1e-12) r.passed = false;

    // d(n_a + n_m)/dt = -kc n_a - km n_m along evolved traces (angular rates),
    // checked with a five-point stencil.
    const SystemParams p = row_params(kRows[0]);
    const FieldPoint fp = FieldPoint::from_detuning(0.0, p);
    const double h = 1e-12;
    double worst_diss = 0.0;
    for (double t : {10e-9, 50e-9, 100e-9, 200e-9}) {
        const std::vector<double> times = {0.0, t - 2 * h, t - h, t, t + h, t + 2 * h};
        const auto states = evolve(MomentState::cavity_populated(1.0), fp, p, times);
        auto total = [&](std::size_t i) { return states[i].n_a + states[i].n_m; };
        const double lhs =
            (-total(5) + 8.0 * total(4) - 8.0 * total(2) + total(1)) / (12.0 * h);
        const double rhs =
            -two_pi * p.kappa_c * states[3].n_a - two_pi * p.kappa_m * states[3].n_m;
        worst_diss = std::max(worst_diss, std::abs(lhs - rhs) / std::abs(rhs));
    }
    if (worst_diss > 1e-6) r.passed = false;

    // DOS normalization over +-1e4 half-widths via a tangent substitution.
    const double center = constants::hbar * two_pi * fp.omega_m;
    const double hw = constants::hbar * two_pi * p.kappa_m / 2.0;
    const double theta_max = std::atan(1e4);
    const int n_simpson = 20000;
    double integral = 0.0;
    for (int i = 0; i <= n_simpson; ++i) {
        const double theta = -theta_max + 2.0 * theta_max * i / n_simpson;
        const double c = std::cos(theta);
        const double f = dos_lorentzian(center + hw * std::tan(theta), fp, p) * hw / (c * c);
        integral += f * (i == 0 || i == n_simpson ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    integral *= (2.0 * theta_max / n_simpson) / 3.0;
    const double norm_err = std::abs(integral - 1.0);
    if (norm_err > 1e-4) r.passed = false;

    // Golden-rule identity with the broadening excess at Delta = 0.
    const double g_ang = two_pi * p.g;
    const double lhs_gr = g_ang * g_ang * constants::hbar *
                          dos_lorentzian(constants::hbar * two_pi * p.omega_c, fp, p);
    const double rhs_gr = 4.0 * p.g * p.g / p.kappa_m;
    const double gr_err = std::abs(lhs_gr / rhs_gr - 1.0);
    if (gr_err > 1e-12) r.passed = false;

    r.detail = "trace/det " + fmt(worst_tracedet) + " (1e-12), dissipation " +
               fmt(worst_diss) + " (1e-6), dos norm " + fmt(norm_err) +
               " (1e-4), golden rule " + fmt(gr_err) + " (1e-12)";
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
    return {
        table_cooperativities(),
        purcell_factor_ringdown(),
        kittel_resonance_fields(),
        eigenvalue_oracle(),
        expansion_error_scaling(),
        ringdown_rate_consistency(),
        round_trip_extraction(),
        coupling_estimate(),
        regime_transition(),
        conservation_identities(),
    };
}

}  // namespace magcav
