#include "magcav/model.hpp"

#include <cmath>

#include "magcav/constants.hpp"

namespace magcav {

using constants::two_pi;
using std::complex;

double kittel_frequency(double b0_tesla, const SystemParams& p) {
    if (b0_tesla < 0.0)
        throw std::domain_error("kittel_frequency: B0 < 0 (only the saturated, axially "
                                "magnetized state is modeled)");
    return p.gamma_over_2pi * std::sqrt(b0_tesla * (b0_tesla + p.mu0_ms));
}

double kittel_field(double omega_m_hz, const SystemParams& p) {
    if (omega_m_hz < 0.0) throw std::domain_error("kittel_field: omega_m < 0");
    const double half = p.mu0_ms / 2.0;
    const double ratio = omega_m_hz / p.gamma_over_2pi;
    return -half + std::sqrt(half * half + ratio * ratio);
}

std::complex<double> s21(double omega_hz, const FieldPoint& field, const SystemParams& p) {
    if (p.g > 0.0 && p.kappa_m <= 0.0)
        throw std::domain_error("s21: kappa_m must be > 0 when g > 0");
    complex<double> denom{-p.kappa_c / 2.0, omega_hz - p.omega_c};
    if (p.g > 0.0) {
        const complex<double> magnon{-p.kappa_m / 2.0, omega_hz - field.omega_m};
        denom += p.g * p.g / magnon;
    }
    if (denom == complex<double>{0.0, 0.0})
        throw std::domain_error("s21: singular denominator (zero dissipation on resonance)");
    return std::sqrt(p.kappa_1_ex * p.kappa_2_ex) / denom;
}

std::complex<double> s22(double omega_hz, const FieldPoint& field, const SystemParams& p) {
    if (p.kappa_1_ex <= 0.0)
        throw std::domain_error("s22: kappa_1_ex must be > 0");
    return 1.0 + std::sqrt(p.kappa_2_ex / p.kappa_1_ex) * s21(omega_hz, field, p);
}

double purcell_shift(const FieldPoint& field, const SystemParams& p) {
    if (p.kappa_m <= 0.0) throw std::domain_error("purcell_shift: kappa_m must be > 0");
    const double d = field.delta;
    return p.omega_c - p.g * p.g * d / (d * d + 0.25 * p.kappa_m * p.kappa_m);
}

double purcell_broadening(const FieldPoint& field, const SystemParams& p) {
    if (p.kappa_m <= 0.0) throw std::domain_error("purcell_broadening: kappa_m must be > 0");
    const double d = field.delta;
    return p.kappa_c + p.g * p.g * p.kappa_m / (d * d + 0.25 * p.kappa_m * p.kappa_m);
}

double cooperativity(const SystemParams& p) {
    if (p.kappa_m <= 0.0 || p.kappa_c <= 0.0)
        throw std::domain_error("cooperativity: kappa_m and kappa_c must be > 0");
    return 4.0 * p.g * p.g / (p.kappa_m * p.kappa_c);
}

double purcell_factor(const SystemParams& p) { return 1.0 + cooperativity(p); }

RegimeLabel regime_classify(const SystemParams& p, double dominance) {
    if (!(dominance > 1.0))
        throw std::invalid_argument("regime_classify: dominance must be > 1");
    const double g = p.g, kc = p.kappa_c, km = p.kappa_m;
    if (km >= dominance * g && g >= dominance * kc) return RegimeLabel::Purcell;
    if (kc >= dominance * g && g >= dominance * km)
        return RegimeLabel::MagneticallyInducedTransparency;
    if (g >= dominance * kc && g >= dominance * km) return RegimeLabel::StrongCoupling;
    return RegimeLabel::Intermediate;
}

double dos_lorentzian(double energy_joule, const FieldPoint& field, const SystemParams& p) {
    if (p.kappa_m <= 0.0) throw std::domain_error("dos_lorentzian: kappa_m must be > 0");
    const double omega_m = two_pi * field.omega_m;       // rad/s
    const double gamma = two_pi * p.kappa_m / 2.0;       // rad/s half-width
    const double u = omega_m - energy_joule / constants::hbar;
    return (1.0 / (M_PI * constants::hbar)) * gamma / (u * u + gamma * gamma);
}

double spins_from_magnet(double mu0_ms_tesla, double radius_m, double length_m) {
    const double ms = mu0_ms_tesla / constants::mu0;  // A/m
    const double volume = M_PI * radius_m * radius_m * length_m;
    return ms * volume / constants::mu_bohr;
}

double coupling_estimate_magnetic(double spin_count, double cavity_volume_m3,
                                  const SystemParams& p) {
    if (spin_count < 0.0) throw std::domain_error("coupling_estimate_magnetic: N < 0");
    if (cavity_volume_m3 <= 0.0)
        throw std::domain_error("coupling_estimate_magnetic: cavity volume must be > 0");
    // B_zpf uses the angular cavity frequency; the prefactor is the cyclic
    // gyromagnetic ratio so the result is in Hz. This convention reproduces
    // the ~3 MHz magnetic-antinode estimate for the 4 mm wire.
    const double omega_ang = two_pi * p.omega_c;
    const double b_zpf = std::sqrt(constants::mu0 * constants::hbar * omega_ang /
                                   cavity_volume_m3);
    return p.gamma_over_2pi * b_zpf * std::sqrt(spin_count);
}

double coupling_estimate_electric(double length_m, double radius_m, double e_zpf_v_per_m,
                                  const SystemParams& p, double spin_line_density) {
    if (length_m <= 0.0 || radius_m <= 0.0 || e_zpf_v_per_m <= 0.0)
        throw std::domain_error("coupling_estimate_electric: L, R, E_zpf must be > 0");
    if (spin_line_density <= 0.0) {
        // Default: spins per meter of the reference 4 um-core wire.
        const double r_core = 4e-6;
        spin_line_density = spins_from_magnet(p.mu0_ms, r_core, 1.0);
    }
    const double n_spins = spin_line_density * length_m;
    const double omega_ang = two_pi * p.omega_c;
    return p.gamma_over_2pi * constants::mu0 * omega_ang * e_zpf_v_per_m * length_m *
           length_m * std::sqrt(n_spins) / (two_pi * radius_m);
}

}  // namespace magcav
