#include "magcav/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "magcav/eigen_modes.hpp"
#include "magcav/model.hpp"

namespace magcav {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) throw std::runtime_error("median of empty range");
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
        m = 0.5 * (m + v[mid - 1]);
    }
    return m;
}

// Parabola through the three samples around index i; returns (x*, y*).
std::pair<double, double> quadratic_extremum(const std::vector<double>& x,
                                             const std::vector<double>& y, std::size_t i) {
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
    const double b =
        (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
    if (a == 0.0) return {x1, y1};
    const double c = y0 - a * x0 * x0 - b * x0;
    const double xe = -b / (2.0 * a);
    return {xe, a * xe * xe + b * xe + c};
}

// Full width at half maximum above `base`, by linear interpolation of the
// crossings on either side of the curve maximum.
double fwhm_above_base(const std::vector<double>& x, const std::vector<double>& y,
                       double base) {
    const auto imax = static_cast<std::size_t>(
        std::distance(y.begin(), std::max_element(y.begin(), y.end())));
    const double half = base + 0.5 * (y[imax] - base);
    std::size_t li = imax;
    while (li > 0 && y[li] >= half) --li;
    std::size_t ri = imax;
    while (ri + 1 < y.size() && y[ri] >= half) ++ri;
    if (y[li] >= half || y[ri] >= half)
        throw std::runtime_error("linewidth half-maximum not bracketed by the sweep");
    const double xl =
        x[li] + (half - y[li]) * (x[li + 1] - x[li]) / (y[li + 1] - y[li]);
    const double xr =
        x[ri - 1] + (half - y[ri - 1]) * (x[ri] - x[ri - 1]) / (y[ri] - y[ri - 1]);
    return xr - xl;
}

struct GeometricEstimates {
    double omega_c = 0.0;
    double kappa_c = 0.0;
    double kappa_m_shift = 0.0;
    double kappa_m_linewidth = 0.0;
    double g_shift = 0.0;
    double g_linewidth = 0.0;
    double delta_res = 0.0;  // kappa_sys argmax in detuning coordinates
};

// The height-waist landmarks applied to (Delta, omega_sys, kappa_sys) curves.
// Baseline is iterated with the Eq.-7 tail subtracted so far-detuned Lorentzian
// tails do not bias kappa_c upward.
GeometricEstimates geometric_estimator(const std::vector<double>& delta,
                                       const std::vector<double>& omega_sys,
                                       const std::vector<double>& kappa_sys,
                                       double asymptote_window) {
    const std::size_t n = delta.size();
    const auto ipk = static_cast<std::size_t>(std::distance(
        kappa_sys.begin(), std::max_element(kappa_sys.begin(), kappa_sys.end())));
    if (ipk == 0 || ipk + 1 >= n)
        throw std::runtime_error("kappa_sys maximum not interior to the sweep");
    auto [d_res, k_peak] = quadratic_extremum(delta, kappa_sys, ipk);

    GeometricEstimates est;
    est.delta_res = d_res;

    // Linewidth curve: baseline -> kappa_c, FWHM -> kappa_m, peak height -> 4g^2/km.
    double kc = *std::min_element(kappa_sys.begin(), kappa_sys.end());
    double km_lw = fwhm_above_base(delta, kappa_sys, kc);
    double g_lw = std::sqrt(std::max(0.0, (k_peak - kc) * km_lw)) / 2.0;
    for (int it = 0; it < 4; ++it) {
        std::vector<double> corrected;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = delta[i] - d_res;
            if (std::abs(d) <= asymptote_window * km_lw) continue;
            corrected.push_back(kappa_sys[i] -
                                g_lw * g_lw * km_lw / (d * d + 0.25 * km_lw * km_lw));
        }
        if (corrected.size() < 4)
            throw std::runtime_error("sweep too narrow to estimate the kappa_c baseline");
        kc = median(corrected);
        km_lw = fwhm_above_base(delta, kappa_sys, kc);
        g_lw = std::sqrt(std::max(0.0, (k_peak - kc) * km_lw)) / 2.0;
    }
    if (!((k_peak - kc) > 0.0))
        throw std::runtime_error("negative inferred g^2: data inconsistent with the model");
    est.kappa_c = kc;
    est.kappa_m_linewidth = km_lw;
    est.g_linewidth = g_lw;

    // Shift curve: waist -> kappa_m, height -> 2g^2/km.
    const auto imax = static_cast<std::size_t>(std::distance(
        omega_sys.begin(), std::max_element(omega_sys.begin(), omega_sys.end())));
    const auto imin = static_cast<std::size_t>(std::distance(
        omega_sys.begin(), std::min_element(omega_sys.begin(), omega_sys.end())));
    if (imax == 0 || imax + 1 >= n || imin == 0 || imin + 1 >= n)
        throw std::runtime_error("shift-curve extrema not bracketed by the sweep");
    auto [d_hi, w_hi] = quadratic_extremum(delta, omega_sys, imax);
    auto [d_lo, w_lo] = quadratic_extremum(delta, omega_sys, imin);
    est.kappa_m_shift = std::abs(d_lo - d_hi);
    const double height = w_hi - w_lo;
    if (!(height > 0.0) || !(est.kappa_m_shift > 0.0))
        throw std::runtime_error("negative inferred g^2: data inconsistent with the model");
    est.g_shift = std::sqrt(height * est.kappa_m_shift / 2.0);

    // Bare cavity frequency from the 1/Delta asymptote of the shift curve.
    double s_n = 0, s_x = 0, s_y = 0, s_xx = 0, s_xy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = delta[i] - d_res;
        if (std::abs(d) <= asymptote_window * km_lw) continue;
        const double x = 1.0 / d;
        s_n += 1.0;
        s_x += x;
        s_y += omega_sys[i];
        s_xx += x * x;
        s_xy += x * omega_sys[i];
    }
    est.omega_c = (s_y * s_xx - s_x * s_xy) / (s_n * s_xx - s_x * s_x);
    return est;
}

}  // namespace

LorentzianFit fit_lorentzian_power(const std::vector<double>& frequencies,
                                   const std::vector<double>& power,
                                   const LorentzianFitOptions& opts) {
    const std::size_t n = frequencies.size();
    if (n != power.size()) throw std::invalid_argument("fit_lorentzian_power: size mismatch");
    if (n < 7) throw std::invalid_argument("fit_lorentzian_power: need at least 7 points");

    const auto ipk = static_cast<std::size_t>(
        std::distance(power.begin(), std::max_element(power.begin(), power.end())));
    if (ipk == 0 || ipk + 1 >= n)
        throw std::runtime_error("fit_lorentzian_power: peak at grid edge (truncated "
                                 "resonance)");

    // Initial guesses: argmax center, half-max width, edge-median background.
    const std::size_t edge = std::max<std::size_t>(1, n / 20);
    std::vector<double> edges(power.begin(), power.begin() + edge);
    edges.insert(edges.end(), power.end() - edge, power.end());
    const double b0 = median(edges);
    const double peak = power[ipk];
    const double half = b0 + 0.5 * (peak - b0);
    std::size_t li = ipk, ri = ipk;
    while (li > 0 && power[li] > half) --li;
    while (ri + 1 < n && power[ri] > half) ++ri;
    double fw0 = frequencies[ri] - frequencies[li];
    if (!(fw0 > 0.0)) fw0 = 3.0 * (frequencies[1] - frequencies[0]);

    // Nondimensionalize: x = (f - c0)/s, q = p/peak. Keeps the normal
    // equations well conditioned regardless of the absolute frequency scale.
    const double c0 = frequencies[ipk];
    const double s = fw0 / 2.0;
    Eigen::Vector4d th(1.0 - b0 / peak, 0.0, 1.0, b0 / peak);  // a, x0, w, b

    Eigen::MatrixXd jac(n, 4);
    Eigen::VectorXd resid(n);
    double q_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) q_norm += (power[i] / peak) * (power[i] / peak);
    q_norm = std::sqrt(q_norm);

    bool converged = false;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double a = th(0), x0 = th(1), w = th(2), b = th(3);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = (frequencies[i] - c0) / s;
            const double d = (x - x0) * (x - x0) + w * w;
            resid(static_cast<long>(i)) = power[i] / peak - (a / d + b);
            jac(static_cast<long>(i), 0) = 1.0 / d;
            jac(static_cast<long>(i), 1) = a * 2.0 * (x - x0) / (d * d);
            jac(static_cast<long>(i), 2) = -a * 2.0 * w / (d * d);
            jac(static_cast<long>(i), 3) = 1.0;
        }
        const Eigen::Vector4d step = jac.colPivHouseholderQr().solve(resid);
        th += step;
        if (step.cwiseAbs().maxCoeff() < 1e-12) {
            converged = true;
            break;
        }
    }

    LorentzianFit fit;
    fit.amplitude = peak * th(0) * s * s;
    fit.center = c0 + th(1) * s;
    fit.fwhm = 2.0 * std::abs(th(2)) * s;
    fit.background = peak * th(3);
    fit.residual_norm = resid.norm() / q_norm;
    fit.converged = converged && std::isfinite(fit.residual_norm) &&
                    fit.residual_norm <= opts.residual_cap && fit.fwhm > 0.0;
    return fit;
}

LorentzianFit fit_lorentzian_power(const ComplexSpectrum& spectrum,
                                   const LorentzianFitOptions& opts) {
    spectrum.validate();
    std::vector<double> power;
    power.reserve(spectrum.values.size());
    for (const auto& v : spectrum.values) power.push_back(std::norm(v));
    return fit_lorentzian_power(spectrum.frequencies, power, opts);
}

FieldSweepResult reduce_sweep(const std::vector<PowerSpectrum>& spectra,
                              const LorentzianFitOptions& opts) {
    if (spectra.size() < 10)
        throw std::invalid_argument("reduce_sweep: need at least 10 field points");
    FieldSweepResult result;
    std::size_t flagged = 0;
    for (const auto& spec : spectra) {
        if (!result.fields.empty() && !(spec.b0 > result.fields.back()))
            throw std::invalid_argument("reduce_sweep: fields must be strictly increasing");
        LorentzianFit fit = fit_lorentzian_power(spec.frequencies, spec.power, opts);
        if (!fit.converged) ++flagged;
        result.fields.push_back(spec.b0);
        result.omega_sys.push_back(fit.center);
        result.kappa_sys.push_back(fit.fwhm);
        result.fits.push_back(fit);
    }
    if (5 * flagged > spectra.size())
        throw std::runtime_error("reduce_sweep: more than 20% of spectra failed to fit");
    return result;
}

ExtractedParams extract_height_waist(const FieldSweepResult& sweep,
                                     const SystemParams& params_hint,
                                     const ExtractionOptions& opts) {
    const std::size_t n = sweep.fields.size();
    if (n < 10 || sweep.omega_sys.size() != n || sweep.kappa_sys.size() != n)
        throw std::invalid_argument("extract_height_waist: malformed sweep");

    // Resonance field from the kappa_sys argmax, then the Kittel inversion
    // pins mu0_Ms so field maps to detuning.
    const auto ipk = static_cast<std::size_t>(std::distance(
        sweep.kappa_sys.begin(),
        std::max_element(sweep.kappa_sys.begin(), sweep.kappa_sys.end())));
    if (ipk == 0 || ipk + 1 >= n)
        throw std::runtime_error("extract_height_waist: resonance not bracketed");
    auto [b_res, k_pk] = quadratic_extremum(sweep.fields, sweep.kappa_sys, ipk);
    (void)k_pk;

    const std::size_t wing = std::max<std::size_t>(2, n / 10);
    std::vector<double> far_centers(sweep.omega_sys.begin(), sweep.omega_sys.begin() + wing);
    far_centers.insert(far_centers.end(), sweep.omega_sys.end() - wing,
                       sweep.omega_sys.end());
    const double wc0 = median(far_centers);
    const double gamma = params_hint.gamma_over_2pi;
    const double mu0_ms_fit = (wc0 / gamma) * (wc0 / gamma) / b_res - b_res;

    SystemParams map = params_hint;
    map.mu0_ms = std::max(0.0, mu0_ms_fit);
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i)
        delta[i] = kittel_frequency(sweep.fields[i], map) - wc0;

    const GeometricEstimates measured =
        geometric_estimator(delta, sweep.omega_sys, sweep.kappa_sys, opts.asymptote_window);

    double g = 0.5 * (measured.g_shift + measured.g_linewidth);
    double km = 0.5 * (measured.kappa_m_shift + measured.kappa_m_linewidth);
    double kc = measured.kappa_c;
    double wc = measured.omega_c;
    double ratio_g_sh = measured.g_shift / g;
    double ratio_km_sh = measured.kappa_m_shift / km;

    if (opts.bias_correction) {
        // The landmarks above are exact for the perturbative curves but carry
        // an O(g^2/km^2) bias against the exact two-mode response. Solve the
        // fixed point: find parameters whose exact-model curves reproduce the
        // measured landmarks under the same estimator.
        for (int it = 0; it < opts.bias_iterations; ++it) {
            SystemParams trial = params_hint;
            trial.omega_c = wc;
            trial.kappa_c = kc;
            trial.kappa_m = km;
            trial.g = g;
            trial.kappa_1_ex = trial.kappa_2_ex = 0.0;
            std::vector<double> w_model(n), k_model(n);
            for (std::size_t i = 0; i < n; ++i) {
                FieldPoint fp;
                fp.delta = delta[i];
                fp.omega_m = wc + delta[i];
                const ComplexMode cav = exact_cavity_branch(fp, trial);
                w_model[i] = cav.omega;
                k_model[i] = 2.0 * cav.gamma_half;
            }
            const GeometricEstimates model = geometric_estimator(
                delta, w_model, k_model, opts.asymptote_window);
            const double model_g = 0.5 * (model.g_shift + model.g_linewidth);
            const double model_km = 0.5 * (model.kappa_m_shift + model.kappa_m_linewidth);
            const double meas_g = 0.5 * (measured.g_shift + measured.g_linewidth);
            const double meas_km =
                0.5 * (measured.kappa_m_shift + measured.kappa_m_linewidth);
            g *= meas_g / model_g;
            km *= meas_km / model_km;
            kc *= measured.kappa_c / model.kappa_c;
            wc += measured.omega_c - model.omega_c;
        }
    }

    ExtractedParams out;
    out.omega_c = wc;
    out.kappa_c = kc;
    out.g_shift = g * ratio_g_sh;
    out.g_linewidth = g * (2.0 - ratio_g_sh);
    out.kappa_m_shift = km * ratio_km_sh;
    out.kappa_m_linewidth = km * (2.0 - ratio_km_sh);
    out.g_mean = g;
    out.kappa_m_mean = km;
    out.cooperativity = 4.0 * g * g / (km * kc);
    out.b_res = b_res;
    out.mu0_ms_fit = mu0_ms_fit;
    return out;
}

ExtractedParams extract_least_squares(const FieldSweepResult& sweep,
                                      const SystemParams& params_hint) {
    // Cross-check estimator: direct least squares of the linewidth curve
    // against its Lorentzian closed form, and of the shift curve against the
    // dispersive form. Tail samples dominate the loss, which tends to
    // overestimate kappa_m on data with slowly decaying wings.
    ExtractedParams base = extract_height_waist(sweep, params_hint, {.bias_correction = false});
    const std::size_t n = sweep.fields.size();

    SystemParams map = params_hint;
    map.mu0_ms = std::max(0.0, base.mu0_ms_fit);
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i)
        delta[i] = kittel_frequency(sweep.fields[i], map) - base.omega_c;

    // kappa_sys(Delta) is A/((D)^2+(km/2)^2) + kc with A = g^2 km.
    const LorentzianFit lw = fit_lorentzian_power(delta, sweep.kappa_sys, {.residual_cap = 1.0});
    ExtractedParams out = base;
    out.kappa_m_linewidth = lw.fwhm;
    out.kappa_c = lw.background;
    out.g_linewidth = std::sqrt(std::max(0.0, lw.amplitude / lw.fwhm));

    // omega_sys(Delta) = wc - g^2 D/(D^2+(km/2)^2): Gauss-Newton in (wc, g^2, km).
    Eigen::Vector3d th(base.omega_c, base.g_mean * base.g_mean, base.kappa_m_mean);
    for (int it = 0; it < 100; ++it) {
        Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
        Eigen::Vector3d atb = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const double d = delta[i];
            const double den = d * d + 0.25 * th(2) * th(2);
            const double r = sweep.omega_sys[i] - (th(0) - th(1) * d / den);
            Eigen::Vector3d j;
            j(0) = 1.0;
            j(1) = -d / den;
            j(2) = th(1) * d * 0.5 * th(2) / (den * den);
            ata += j * j.transpose();
            atb += j * r;
        }
        const Eigen::Vector3d step = ata.ldlt().solve(atb);
        th += step;
        if ((step.cwiseAbs().array() / (th.cwiseAbs().array() + 1e-30)).maxCoeff() < 1e-13)
            break;
    }
    out.omega_c = th(0);
    out.g_shift = std::sqrt(std::max(0.0, th(1)));
    out.kappa_m_shift = std::abs(th(2));
    out.g_mean = 0.5 * (out.g_shift + out.g_linewidth);
    out.kappa_m_mean = 0.5 * (out.kappa_m_shift + out.kappa_m_linewidth);
    out.cooperativity = 4.0 * out.g_mean * out.g_mean / (out.kappa_m_mean * out.kappa_c);
    return out;
}

namespace {

double round_sig(double v, int sig) {
    if (v == 0.0) return 0.0;
    const double mag = std::pow(10.0, sig - 1 - static_cast<int>(std::floor(
                                                    std::log10(std::abs(v)))));
    return std::round(v * mag) / mag;
}

std::string format_sig(double v, int sig) {
    const double r = round_sig(v, sig);
    std::ostringstream os;
    const int exp10 = r == 0.0 ? 0 : static_cast<int>(std::floor(std::log10(std::abs(r))));
    const int decimals = std::max(0, sig - 1 - exp10);
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << r;
    return os.str();
}

}  // namespace

std::string summarize_configuration(const ExtractedParams& e) {
    std::ostringstream os;
    os << "omega_c = " << format_sig(e.omega_c / 1e9, 4) << " GHz"
       << "  g = " << format_sig(e.g_mean / 1e6, 2) << " MHz"
       << "  kappa_m = " << format_sig(e.kappa_m_mean / 1e6, 3) << " MHz"
       << "  kappa_c = " << format_sig(e.kappa_c / 1e6, 2) << " MHz"
       << "  C = " << format_sig(e.cooperativity, 2);
    return os.str();
}

std::vector<PowerSpectrum> parse_sweep_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    bool header_seen = false;
    bool power_db = false;
    std::vector<PowerSpectrum> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.find("power_db") != std::string::npos) power_db = true;
            else if (line.find("power_linear") == std::string::npos)
                throw std::runtime_error(
                    "sweep CSV: header must flag power_linear or power_db");
            if (line.find("B_mT") == std::string::npos ||
                line.find("freq_GHz") == std::string::npos)
                throw std::runtime_error("sweep CSV: expected columns B_mT,freq_GHz,power_*");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        double vals[3];
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(row, cell, ','))
                throw std::runtime_error("sweep CSV: malformed row: " + line);
            vals[k] = std::stod(cell);
        }
        const double b = vals[0] * 1e-3;
        const double f = vals[1] * 1e9;
        const double p = power_db ? std::pow(10.0, vals[2] / 10.0) : vals[2];
        if (out.empty() || std::abs(b - out.back().b0) > 1e-15) {
            out.push_back({});
            out.back().b0 = b;
        }
        out.back().frequencies.push_back(f);
        out.back().power.push_back(p);
    }
    if (!header_seen) throw std::runtime_error("sweep CSV: missing header");
    return out;
}

std::vector<PowerSpectrum> read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sweep_csv(buf.str());
}

std::string extracted_to_json(const ExtractedParams& e) {
    nlohmann::json j;
    j["omega_c_ghz"] = e.omega_c / 1e9;
    j["kappa_c_mhz"] = e.kappa_c / 1e6;
    j["kappa_m_shift_mhz"] = e.kappa_m_shift / 1e6;
    j["kappa_m_linewidth_mhz"] = e.kappa_m_linewidth / 1e6;
    j["kappa_m_mean_mhz"] = e.kappa_m_mean / 1e6;
    j["g_shift_mhz"] = e.g_shift / 1e6;
    j["g_linewidth_mhz"] = e.g_linewidth / 1e6;
    j["g_mean_mhz"] = e.g_mean / 1e6;
    j["cooperativity"] = e.cooperativity;
    j["b_res_mt"] = e.b_res * 1e3;
    j["mu0_ms_fit_t"] = e.mu0_ms_fit;
    return j.dump(2);
}

}  // namespace magcav
