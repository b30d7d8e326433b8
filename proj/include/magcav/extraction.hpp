#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magcav/params.hpp"

namespace magcav {

struct LorentzianFit {
    double center = 0.0;     // Hz
    double fwhm = 0.0;       // Hz, > 0
    double amplitude = 0.0;  // A in A/((w-w0)^2+(fwhm/2)^2)
    double background = 0.0;
    double residual_norm = 0.0;  // ||resid|| / ||data||
    bool converged = false;
};

struct LorentzianFitOptions {
    double residual_cap = 0.2;   // relative residual above which the fit is flagged
    int max_iterations = 100;
};

// Least-squares fit of A/((w-w0)^2+(k/2)^2)+b. Initial guesses from grid
// argmax, half-max interpolation, and edge medians. Throws when the peak sits
// at the grid edge (truncated resonance) or fewer than 7 points are given;
// non-convergence is flagged, not thrown.
LorentzianFit fit_lorentzian_power(const std::vector<double>& frequencies,
                                   const std::vector<double>& power,
                                   const LorentzianFitOptions& opts = {});

LorentzianFit fit_lorentzian_power(const ComplexSpectrum& spectrum,
                                   const LorentzianFitOptions& opts = {});

struct PowerSpectrum {
    double b0 = 0.0;                  // T
    std::vector<double> frequencies;  // Hz
    std::vector<double> power;        // linear units
};

struct FieldSweepResult {
    std::vector<double> fields;      // T, strictly increasing
    std::vector<double> omega_sys;   // Hz
    std::vector<double> kappa_sys;   // Hz
    std::vector<LorentzianFit> fits; // per-point diagnostics
};

// Per-field Lorentzian reduction. Throws when more than 20% of points fail.
FieldSweepResult reduce_sweep(const std::vector<PowerSpectrum>& spectra,
                              const LorentzianFitOptions& opts = {});

struct ExtractedParams {
    double omega_c = 0.0;            // Hz
    double kappa_c = 0.0;            // Hz
    double kappa_m_shift = 0.0;      // waist of the shift curve (Hz)
    double kappa_m_linewidth = 0.0;  // FWHM of the linewidth curve (Hz)
    double g_shift = 0.0;            // from shift-curve height (Hz)
    double g_linewidth = 0.0;        // from linewidth-curve height (Hz)
    double kappa_m_mean = 0.0;
    double g_mean = 0.0;
    double cooperativity = 0.0;      // from the mean values
    double b_res = 0.0;              // T, kappa_sys argmax
    double mu0_ms_fit = 0.0;         // T, Kittel inversion at resonance
};

struct ExtractionOptions {
    // Asymptotic omega_c window: |Delta| > asymptote_window * kappa_m.
    double asymptote_window = 3.0;
    // Refine the height-waist geometry against the exact two-mode model
    // (fixed point on the same estimator applied to model curves). Removes the
    // O(g^2/kappa_m^2) bias of the perturbative landmarks.
    bool bias_correction = true;
    int bias_iterations = 3;
};

// Height-waist extraction of {omega_c, kappa_c, kappa_m, g} from the reduced
// sweep (Appendix-style landmarks: extrema separation, heights, baseline,
// FWHM, 1/Delta asymptote), plus means and cooperativity. params_hint supplies
// the gyromagnetic ratio for the Kittel mapping.
ExtractedParams extract_height_waist(const FieldSweepResult& sweep,
                                     const SystemParams& params_hint,
                                     const ExtractionOptions& opts = {});

// Optional cross-check: direct least-squares fits of the shift and linewidth
// curves to their closed forms. Tends to weight tails; kept as a secondary
// estimate only.
ExtractedParams extract_least_squares(const FieldSweepResult& sweep,
                                      const SystemParams& params_hint);

// One Table-style report row: omega_c (GHz, 4 sig figs), g / kappa_m / kappa_c
// (MHz, 2-3 sig figs), C (2 sig figs).
std::string summarize_configuration(const ExtractedParams& extracted);

// CSV ingestion: long-format three columns (B_mT, freq_GHz, power_linear or
// power_db flagged in the header), optionally blocked by blank lines.
std::vector<PowerSpectrum> read_sweep_csv(const std::string& path);
std::vector<PowerSpectrum> parse_sweep_csv(const std::string& content);

std::string extracted_to_json(const ExtractedParams& e);

}  // namespace magcav
