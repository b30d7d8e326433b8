#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "magcav/params.hpp"

namespace magcav {

// One complex eigenfrequency omega - i*Gamma. Gamma is the HALF-linewidth
// (kappa/2); conversions to full linewidths happen at module boundaries.
struct ComplexMode {
    double omega = 0.0;       // real part (Hz)
    double gamma_half = 0.0;  // half-linewidth (Hz), >= 0 for dissipative params

    std::complex<double> as_complex() const { return {omega, -gamma_half}; }
};

// Auxiliary z = 4g^2 + [(omega_c - omega_m) - i(Gamma_c - Gamma_m)]^2 (Hz^2).
struct ZDecomposition {
    std::complex<double> z;
    double abs_z = 0.0;
    double re_z = 0.0;
    double im_z = 0.0;
    int sgn_im = 1;  // sign convention: +1 when Im(z) == 0 exactly
};

struct SplitEigenResult {
    ComplexMode plus;   // the "+sqrt(z)" branch
    ComplexMode minus;  // the "-sqrt(z)" branch
    ZDecomposition zdec;
};

// Both roots of the reduced 2x2 secular problem,
//   0.5 * [ omega_c + omega_m - i(Gc+Gm) +- sqrt(4g^2 + (omega_c-omega_m-i(Gc-Gm))^2) ].
// First element is the "+" root.
std::pair<ComplexMode, ComplexMode> exact_eigenfrequencies(const FieldPoint& field,
                                                           const SystemParams& p);

// Same eigenfrequencies via the explicit real/imaginary split
// omega = 0.5[(wc+wm) +- sqrt((|z|+Re z)/2)],
// Gamma = 0.5[(Gc+Gm) -+ sgn(Im z) sqrt((|z|-Re z)/2)].
SplitEigenResult split_eigen_real_imag(const FieldPoint& field, const SystemParams& p);

// Second-order-in-g expansion of the eigenfrequencies about g = 0, valid for
// Gamma_m > Gamma_c (throws otherwise, directing the caller to
// exact_eigenfrequencies). The branch-switched cavity-like mode reproduces the
// Purcell shift/broadening in the Gamma_m >> Gamma_c limit.
std::pair<ComplexMode, ComplexMode> purcell_expansion(const FieldPoint& field,
                                                      const SystemParams& p);

// Cavity-like mode of the expansion after applying the branch switch at
// Delta = 0 (the observable cavity response changes branch there).
ComplexMode expansion_cavity_branch(const FieldPoint& field, const SystemParams& p);

// Cavity-like mode of the exact eigenfrequencies (the branch that connects to
// the low-loss cavity mode; selected by smaller Gamma when Gamma_m > Gamma_c).
ComplexMode exact_cavity_branch(const FieldPoint& field, const SystemParams& p);

struct BranchSweepOptions {
    double slope_bound = 10.0;  // max |d lambda / d Delta| allowed between grid points
};

struct EigenBranch {
    std::vector<double> fields;     // B (T)
    std::vector<double> detunings;  // Delta (Hz)
    std::vector<ComplexMode> modes_upper;
    std::vector<ComplexMode> modes_lower;
    std::vector<double> omega_m;    // bare Kittel curve (Hz)
    double omega_c = 0.0;           // bare cavity reference (Hz)
    double min_real_separation = 0.0;  // min |omega_upper - omega_lower| (Hz)
};

// Exact eigenfrequencies along a Kittel-mapped field grid, with branches
// assigned by nearest continuation from the low-field end. Throws when the
// grid is too coarse for continuation.
EigenBranch branch_sweep(const std::vector<double>& b_grid, const SystemParams& p,
                         const BranchSweepOptions& opts = {});

// Validation oracle: the two physical roots of the full quartic secular
// equation of the displacement-coupled classical oscillators. Agrees with the
// reduced form to |reduced - quartic| < (g/omega_c)^2 * omega_c outside the
// ultra-strong coupling regime.
std::pair<ComplexMode, ComplexMode> quartic_secular_eigenfrequencies(const FieldPoint& field,
                                                                     const SystemParams& p);

}  // namespace magcav
