#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace magcav {

/// All frequencies and rates in this API are cyclic (Hz), i.e. the
/// "per 2*pi" values usually quoted for microwave hardware. Conversion to
/// angular units happens only inside the time-domain module.
struct SystemParams {
    double omega_c = 0.0;      // cavity resonance (Hz)
    double kappa_c = 0.0;      // total cavity decay rate (Hz)
    double kappa_m = 0.0;      // magnon decay rate (Hz)
    double g = 0.0;            // coupling strength (Hz)
    double kappa_1_ex = 0.0;   // input port external coupling (Hz)
    double kappa_2_ex = 0.0;   // output port external coupling (Hz)
    double gamma_over_2pi = 28.0e9;  // gyromagnetic ratio (Hz/T)
    double mu0_ms = 0.0;       // saturation magnetization as mu0*Ms (T)

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

// Static bias point. omega_m and delta are derived from B0 through the
// Kittel relation when B0 is the source of truth.
struct FieldPoint {
    double b0 = 0.0;       // static bias field (T)
    double omega_m = 0.0;  // magnon frequency (Hz)
    double delta = 0.0;    // detuning omega_m - omega_c (Hz)

    static FieldPoint from_field(double b0, const SystemParams& p);
    static FieldPoint from_detuning(double delta, const SystemParams& p);
};

enum class SpectrumKind { S21, S22 };

struct ComplexSpectrum {
    std::vector<double> frequencies;           // strictly increasing (Hz)
    std::vector<std::complex<double>> values;  // one S value per grid point
    SpectrumKind kind = SpectrumKind::S21;

    void validate() const;
};

enum class RegimeLabel {
    Purcell,
    StrongCoupling,
    MagneticallyInducedTransparency,
    Intermediate,
};

std::string to_string(RegimeLabel label);

// Strict JSON (de)serialization with unit-suffixed keys. Unknown keys are
// rejected by name.
std::string params_to_json(const SystemParams& p);
SystemParams params_from_json(const std::string& text);

}  // namespace magcav
