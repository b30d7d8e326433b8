#include "magcav/lindblad.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "magcav/constants.hpp"
#include "magcav/model.hpp"

namespace magcav {

using constants::two_pi;
using std::complex;

namespace {

Eigen::Matrix4cd to_eigen(const OmegaMatrix& m) {
    Eigen::Matrix4cd out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) out(r, c) = m[r][c];
    return out;
}

Eigen::Vector4cd to_vector(const MomentState& s) {
    return {complex<double>(s.n_a, 0.0), complex<double>(s.n_m, 0.0), s.coh, s.coh_conj};
}

MomentState from_vector(const Eigen::Vector4cd& v) {
    MomentState s;
    s.n_a = v(0).real();
    s.n_m = v(1).real();
    s.coh = v(2);
    s.coh_conj = v(3);
    if (!std::isfinite(s.n_a) || !std::isfinite(s.n_m))
        throw std::runtime_error("evolve: non-finite moment (overflow)");
    return s;
}

}  // namespace

OmegaMatrix build_omega_matrix(const FieldPoint& field, const SystemParams& p) {
    p.validate();
    // Angular conversion happens exactly once, here.
    const double kc = two_pi * p.kappa_c;
    const double km = two_pi * p.kappa_m;
    const double g = two_pi * p.g;
    const double d = two_pi * field.delta;
    const complex<double> i{0.0, 1.0};
    OmegaMatrix m{};
    m[0] = {complex<double>(-kc), 0.0, -i * g, i * g};
    m[1] = {0.0, complex<double>(-km), i * g, -i * g};
    m[2] = {-i * g, i * g, -i * d - (kc + km) / 2.0, 0.0};
    m[3] = {i * g, -i * g, 0.0, i * d - (kc + km) / 2.0};
    return m;
}

std::vector<MomentState> evolve(const MomentState& initial, const FieldPoint& field,
                                const SystemParams& p, const std::vector<double>& times_s) {
    if (times_s.empty()) return {};
    if (times_s.front() != 0.0)
        throw std::invalid_argument("evolve: times must start at 0");
    for (std::size_t i = 1; i < times_s.size(); ++i)
        if (!(times_s[i] > times_s[i - 1]))
            throw std::invalid_argument("evolve: times must be increasing");

    const Eigen::Matrix4cd omega = to_eigen(build_omega_matrix(field, p));
    const Eigen::Vector4cd v0 = to_vector(initial);

    // Uniform grids propagate with a single exp(Omega*dt); arbitrary grids
    // take one matrix exponential per sample.
    bool uniform = times_s.size() > 2;
    const double dt = times_s.size() > 1 ? times_s[1] - times_s[0] : 0.0;
    for (std::size_t i = 1; uniform && i < times_s.size(); ++i)
        uniform = std::abs((times_s[i] - times_s[i - 1]) - dt) <= 1e-9 * dt;

    std::vector<MomentState> out;
    out.reserve(times_s.size());
    if (uniform) {
        const Eigen::Matrix4cd step = (omega * dt).exp();
        Eigen::Vector4cd v = v0;
        out.push_back(from_vector(v));
        for (std::size_t i = 1; i < times_s.size(); ++i) {
            v = step * v;
            out.push_back(from_vector(v));
        }
    } else {
        for (double t : times_s)
            out.push_back(from_vector(((omega * t).exp() * v0).eval()));
    }
    return out;
}

std::vector<double> uniform_times(double t_max, double dt) {
    if (!(dt > 0.0) || !(t_max >= 0.0))
        throw std::invalid_argument("uniform_times: need dt > 0, t_max >= 0");
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 0.5)) + 1;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back(static_cast<double>(i) * dt);
    return t;
}

RingdownTrace synthesize_ringdown(const FieldPoint& field, const SystemParams& p,
                                  double scale, double offset,
                                  const std::vector<double>& times_s) {
    if (!(scale > 0.0)) throw std::invalid_argument("synthesize_ringdown: scale must be > 0");
    const auto states = evolve(MomentState::cavity_populated(1.0), field, p, times_s);
    RingdownTrace trace;
    trace.times = times_s;
    trace.scale = scale;
    trace.offset = offset;
    trace.power.reserve(states.size());
    for (const auto& s : states) trace.power.push_back(scale * s.n_a + offset);
    return trace;
}

LifetimeFit fit_lifetime(const RingdownTrace& trace, const LifetimeFitOptions& opts) {
    if (trace.times.size() != trace.power.size() || trace.times.size() < 2)
        throw std::invalid_argument("fit_lifetime: malformed trace");
    const double t_end = opts.t_end > 0.0 ? opts.t_end : trace.times.back();
    const double threshold = opts.floor_multiple * opts.floor;

    std::vector<double> ts, ys;
    bool non_monotone = false;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < opts.t_start || t > t_end) continue;
        const double v = trace.power[i] - trace.offset;
        if (v <= threshold || v <= 0.0) continue;
        if (v > prev * (1.0 + 1e-12)) non_monotone = true;
        prev = v;
        ts.push_back(t);
        ys.push_back(std::log(v));
    }
    if (ts.size() < 10)
        throw std::runtime_error("fit_lifetime: fewer than 10 samples above threshold");

    const double n = static_cast<double>(ts.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sy += ys[i];
        stt += ts[i] * ts[i];
        sty += ts[i] * ys[i];
    }
    const double denom = n * stt - st * st;
    const double slope = (n * sty - st * sy) / denom;
    const double icept = (sy - slope * st) / n;
    if (!(slope < 0.0))
        throw std::runtime_error("fit_lifetime: non-decaying trace in window");

    double ss_res = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = ys[i] - (icept + slope * ts[i]);
        ss_res += r * r;
    }
    const double var_slope = ts.size() > 2 ? ss_res / (n - 2.0) * n / denom : 0.0;

    LifetimeFit fit;
    fit.tau = -1.0 / slope;
    fit.stderr_tau = std::sqrt(std::max(0.0, var_slope)) * fit.tau * fit.tau;
    fit.non_monotone = non_monotone;
    return fit;
}

std::vector<LifetimePoint> lifetime_vs_field(const std::vector<double>& b_grid,
                                             const SystemParams& p,
                                             const RingdownSettings& settings) {
    for (std::size_t i = 1; i < b_grid.size(); ++i)
        if (!(b_grid[i] > b_grid[i - 1]))
            throw std::invalid_argument("lifetime_vs_field: B grid must be increasing");

    const auto times = uniform_times(settings.t_max, settings.dt);
    std::vector<LifetimePoint> out;
    out.reserve(b_grid.size());
    for (double b : b_grid) {
        const FieldPoint fp = FieldPoint::from_field(b, p);
        LifetimePoint pt;
        pt.b0 = b;
        const double ksys = p.kappa_m > 0.0 ? purcell_broadening(fp, p) : p.kappa_c;
        pt.inv_kappa = 1.0 / (two_pi * ksys);
        try {
            auto trace = synthesize_ringdown(fp, p, settings.scale, settings.offset, times);
            LifetimeFitOptions fopts;
            fopts.t_end = 3.0 / (two_pi * ksys);  // dominant-exponential window
            pt.tau = fit_lifetime(trace, fopts).tau;
        } catch (const std::exception&) {
            pt.flagged = true;
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace magcav
