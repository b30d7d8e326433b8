#pragma once

#include <array>
#include <complex>
#include <vector>

#include "magcav/params.hpp"

namespace magcav {

// Second-moment vector (<a+a>, <m+m>, <a+m>, <am+>).
struct MomentState {
    double n_a = 0.0;
    double n_m = 0.0;
    std::complex<double> coh{0.0, 0.0};
    std::complex<double> coh_conj{0.0, 0.0};

    static MomentState cavity_populated(double n = 1.0) { return {n, 0.0, {}, {}}; }
};

using OmegaMatrix = std::array<std::array<std::complex<double>, 4>, 4>;

// The Eq.-of-motion generator for the moment vector, in angular units (rad/s).
// Diagonal: (-kc, -km, -i*Delta-(kc+km)/2, +i*Delta-(kc+km)/2); couplings +-ig.
OmegaMatrix build_omega_matrix(const FieldPoint& field, const SystemParams& p);

// exp(Omega t) * initial for each time. times must be increasing with
// times[0] == 0.
std::vector<MomentState> evolve(const MomentState& initial, const FieldPoint& field,
                                const SystemParams& p, const std::vector<double>& times_s);

struct RingdownTrace {
    std::vector<double> times;  // seconds, uniform
    std::vector<double> power;  // arbitrary units
    double scale = 1.0;
    double offset = 0.0;
};

// A * [exp(Omega t)]_{11} + offset, the photon-decay envelope with measurement
// scale and noise-floor offset.
RingdownTrace synthesize_ringdown(const FieldPoint& field, const SystemParams& p,
                                  double scale, double offset,
                                  const std::vector<double>& times_s);

struct LifetimeFit {
    double tau = 0.0;     // seconds
    double stderr_tau = 0.0;
    bool non_monotone = false;  // warning flag: trace not monotone in window
};

struct LifetimeFitOptions {
    double t_start = 0.0;
    double t_end = 0.0;          // 0 means end of trace
    double floor = 0.0;          // noise-floor amplitude (power units above offset)
    double floor_multiple = 3.0; // samples must exceed floor_multiple * floor
};

// Log-linear least squares on (power - offset) over samples above threshold.
// Throws when fewer than 10 valid samples remain.
LifetimeFit fit_lifetime(const RingdownTrace& trace, const LifetimeFitOptions& opts = {});

struct LifetimePoint {
    double b0 = 0.0;          // T
    double tau = 0.0;         // fitted ringdown lifetime (s)
    double inv_kappa = 0.0;   // frequency-domain prediction 1/(2*pi*kappa_sys) (s)
    bool flagged = false;     // fit failed for this point; sweep continued
};

struct RingdownSettings {
    double t_max = 1000e-9;   // trace span (s)
    double dt = 1e-9;         // step (s)
    double scale = 1.0;
    double offset = 0.0;
};

// Synthesize + fit per field point, tabulated against the frequency-domain
// prediction. Points whose fit fails are flagged, not fatal.
std::vector<LifetimePoint> lifetime_vs_field(const std::vector<double>& b_grid,
                                             const SystemParams& p,
                                             const RingdownSettings& settings = {});

// Uniform time grid helper (0 .. t_max inclusive-ish in steps of dt).
std::vector<double> uniform_times(double t_max, double dt);

}  // namespace magcav
