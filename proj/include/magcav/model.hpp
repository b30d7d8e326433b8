#pragma once

#include <complex>

#include "magcav/params.hpp"

namespace magcav {

// Kittel resonance of the axially saturated wire: (gamma/2pi)*sqrt(B0*(B0+mu0Ms)).
// Negative B0 is a domain error (only the saturated state is modeled).
double kittel_frequency(double b0_tesla, const SystemParams& p);

// Unique non-negative inverse of kittel_frequency.
double kittel_field(double omega_m_hz, const SystemParams& p);

// Input-output transmission through the dressed cavity. All rates cyclic; the
// expression is homogeneous so no unit conversion is required.
std::complex<double> s21(double omega_hz, const FieldPoint& field, const SystemParams& p);

// Output-port reflection, 1 + sqrt(k2/k1) * s21.
std::complex<double> s22(double omega_hz, const FieldPoint& field, const SystemParams& p);

// Perturbed cavity frequency omega_sys = omega_c - g^2*Delta/(Delta^2+(km/2)^2).
double purcell_shift(const FieldPoint& field, const SystemParams& p);

// Perturbed cavity linewidth kappa_sys = kappa_c + g^2*km/(Delta^2+(km/2)^2).
double purcell_broadening(const FieldPoint& field, const SystemParams& p);

// C = 4 g^2 / (kappa_m * kappa_c).
double cooperativity(const SystemParams& p);

// 1 + C; equals kappa_sys(0)/kappa_c analytically.
double purcell_factor(const SystemParams& p);

// Classifies by rate dominance. Purcell: km >= d*g and g >= d*kc. The mirror
// regime (kc and km swapped) is magnetically induced transparency.
RegimeLabel regime_classify(const SystemParams& p, double dominance = 5.0);

// Normalized Lorentzian density of states of the magnon mode, as a function of
// energy in joules; returns 1/J.
double dos_lorentzian(double energy_joule, const FieldPoint& field, const SystemParams& p);

// Magnetic-antinode coupling estimate (gamma/2pi)*sqrt(mu0*hbar*omega_c_ang*N/V),
// returned in Hz. Calibrated so the 4 mm wire in a 26x8x36 mm cavity at
// 7.4 GHz gives ~3 MHz.
double coupling_estimate_magnetic(double spin_count, double cavity_volume_m3,
                                  const SystemParams& p);

// Number of Bohr-magneton spins in a wire of core radius R and length L.
double spins_from_magnet(double mu0_ms_tesla, double radius_m, double length_m);

// Antenna-like (electric antinode) scaling estimate,
// g ~ gamma * mu0 * omega_c * E_zpf * L^2 * sqrt(N) / (2*pi*R) with N folded in
// as proportional to L, so g scales as L^(5/2) at fixed R and as 1/R at fixed
// L. Order-of-magnitude only; spin_line_density defaults to the 4 um-core
// CoFeSiB wire implied by params.mu0_ms.
double coupling_estimate_electric(double length_m, double radius_m, double e_zpf_v_per_m,
                                  const SystemParams& p, double spin_line_density = 0.0);

}  // namespace magcav
