#include "magcav/eigen_modes.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "magcav/model.hpp"

namespace magcav {

using std::complex;

namespace {

complex<double> z_value(const FieldPoint& field, const SystemParams& p) {
    const double gc = p.kappa_c / 2.0;
    const double gm = p.kappa_m / 2.0;
    const complex<double> w{p.omega_c - field.omega_m, -(gc - gm)};
    return 4.0 * p.g * p.g + w * w;
}

ComplexMode mode_from(complex<double> lambda) {
    return {lambda.real(), -lambda.imag()};
}

}  // namespace

std::pair<ComplexMode, ComplexMode> exact_eigenfrequencies(const FieldPoint& field,
                                                           const SystemParams& p) {
    const double gc = p.kappa_c / 2.0;
    const double gm = p.kappa_m / 2.0;
    const complex<double> mean{0.5 * (p.omega_c + field.omega_m), -0.5 * (gc + gm)};
    const complex<double> root = std::sqrt(z_value(field, p));
    return {mode_from(mean + 0.5 * root), mode_from(mean - 0.5 * root)};
}

SplitEigenResult split_eigen_real_imag(const FieldPoint& field, const SystemParams& p) {
    const double gc = p.kappa_c / 2.0;
    const double gm = p.kappa_m / 2.0;
    const complex<double> z = z_value(field, p);
    ZDecomposition dec;
    dec.z = z;
    dec.abs_z = std::abs(z);
    dec.re_z = z.real();
    dec.im_z = z.imag();
    dec.sgn_im = dec.im_z > 0.0 ? 1 : (dec.im_z < 0.0 ? -1 : 1);  // +1 tie-break at Im z = 0

    const double a = std::sqrt(std::max(0.0, 0.5 * (dec.abs_z + dec.re_z)));
    const double b = std::sqrt(std::max(0.0, 0.5 * (dec.abs_z - dec.re_z)));
    const double mean_w = 0.5 * (p.omega_c + field.omega_m);
    const double mean_g = 0.5 * (gc + gm);

    SplitEigenResult r;
    r.plus = {mean_w + 0.5 * a, mean_g - 0.5 * dec.sgn_im * b};
    r.minus = {mean_w - 0.5 * a, mean_g + 0.5 * dec.sgn_im * b};
    r.zdec = dec;
    return r;
}

std::pair<ComplexMode, ComplexMode> purcell_expansion(const FieldPoint& field,
                                                      const SystemParams& p) {
    const double gc = p.kappa_c / 2.0;
    const double gm = p.kappa_m / 2.0;
    if (!(gm > gc))
        throw std::domain_error(
            "purcell_expansion requires Gamma_m > Gamma_c; use exact_eigenfrequencies");
    const double d = field.delta;
    const double gd = gm - gc;  // dissipation contrast sets the expansion scale
    const double den = d * d + gd * gd;
    const double g2 = p.g * p.g;
    const double mean_w = 0.5 * (p.omega_c + field.omega_m);
    const double mean_g = 0.5 * (gc + gm);
    const double sgn = d >= 0.0 ? 1.0 : -1.0;

    const double w_split = std::abs(d) * (0.5 + g2 / den);
    const double g_split = sgn * (0.5 * gd - gd * g2 / den);
    return {{mean_w + w_split, mean_g + g_split}, {mean_w - w_split, mean_g - g_split}};
}

ComplexMode expansion_cavity_branch(const FieldPoint& field, const SystemParams& p) {
    auto [plus, minus] = purcell_expansion(field, p);
    // The branch carrying the cavity response switches at Delta = 0: lower
    // branch for omega_m above the cavity, upper branch below.
    return field.delta >= 0.0 ? minus : plus;
}

ComplexMode exact_cavity_branch(const FieldPoint& field, const SystemParams& p) {
    auto [plus, minus] = exact_eigenfrequencies(field, p);
    if (p.kappa_m == p.kappa_c)
        return field.delta >= 0.0 ? minus : plus;
    // With dissipation contrast the cavity-like mode is the low-loss one.
    const bool cavity_is_low_loss = p.kappa_m > p.kappa_c;
    const bool plus_lower = plus.gamma_half < minus.gamma_half;
    return (plus_lower == cavity_is_low_loss) ? plus : minus;
}

EigenBranch branch_sweep(const std::vector<double>& b_grid, const SystemParams& p,
                         const BranchSweepOptions& opts) {
    if (b_grid.size() < 2)
        throw std::invalid_argument("branch_sweep: need at least two field points");
    for (std::size_t i = 1; i < b_grid.size(); ++i)
        if (!(b_grid[i] > b_grid[i - 1]))
            throw std::invalid_argument("branch_sweep: B grid must be strictly increasing");

    EigenBranch out;
    out.omega_c = p.omega_c;
    out.fields = b_grid;
    out.detunings.reserve(b_grid.size());
    out.omega_m.reserve(b_grid.size());
    out.modes_upper.reserve(b_grid.size());
    out.modes_lower.reserve(b_grid.size());

    complex<double> prev_upper, prev_lower;
    double prev_delta = 0.0;
    for (std::size_t i = 0; i < b_grid.size(); ++i) {
        const FieldPoint fp = FieldPoint::from_field(b_grid[i], p);
        auto [a, b] = exact_eigenfrequencies(fp, p);
        complex<double> la = a.as_complex(), lb = b.as_complex();
        complex<double> upper, lower;
        if (i == 0) {
            // Continuity seed at the low-field end: label by real part.
            if (la.real() >= lb.real()) { upper = la; lower = lb; }
            else { upper = lb; lower = la; }
        } else {
            const double keep = std::abs(la - prev_upper) + std::abs(lb - prev_lower);
            const double swap = std::abs(lb - prev_upper) + std::abs(la - prev_lower);
            if (keep <= swap) { upper = la; lower = lb; }
            else { upper = lb; lower = la; }
            const double d_delta = std::abs(fp.delta - prev_delta);
            const double jump = std::max(std::abs(upper - prev_upper),
                                         std::abs(lower - prev_lower));
            if (jump > opts.slope_bound * d_delta)
                throw std::runtime_error(
                    "branch_sweep: grid too coarse for branch continuation; refine the "
                    "field grid");
        }
        prev_upper = upper;
        prev_lower = lower;
        prev_delta = fp.delta;
        out.detunings.push_back(fp.delta);
        out.omega_m.push_back(fp.omega_m);
        out.modes_upper.push_back(mode_from(upper));
        out.modes_lower.push_back(mode_from(lower));
    }

    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.modes_upper.size(); ++i)
        min_sep = std::min(min_sep,
                           std::abs(out.modes_upper[i].omega - out.modes_lower[i].omega));
    out.min_real_separation = min_sep;
    return out;
}

std::pair<ComplexMode, ComplexMode> quartic_secular_eigenfrequencies(const FieldPoint& field,
                                                                     const SystemParams& p) {
    // det [[w^2 - wm^2 + i w km, 2 g wm], [2 g wc, w^2 - wc^2 + i w kc]] = 0
    // expanded as a quartic in w, solved via its companion matrix.
    const double wc = p.omega_c, wm = field.omega_m;
    const double kc = p.kappa_c, km = p.kappa_m;
    const complex<double> i{0.0, 1.0};
    // (w^2 - wm^2 + i w km)(w^2 - wc^2 + i w kc) - 4 g^2 wm wc
    // = w^4 + i(kc+km) w^3 + (-wc^2 - wm^2 - kc km) w^2
    //   + (-i km wc^2 - i kc wm^2) w + (wm^2 wc^2 - 4 g^2 wm wc)
    // Substitute w = s*u with s = omega_c so all coefficients are O(1);
    // without this the companion eigenproblem loses ~5 digits.
    const double s = wc;
    const complex<double> c3 = i * (kc + km) / s;
    const complex<double> c2 = -(wc * wc + wm * wm + kc * km) / (s * s);
    const complex<double> c1 = -i * (km * wc * wc + kc * wm * wm) / (s * s * s);
    const complex<double> c0 =
        (wm * wm * wc * wc - 4.0 * p.g * p.g * wm * wc) / (s * s * s * s);

    Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
    companion(0, 3) = -c0;
    companion(1, 3) = -c1;
    companion(2, 3) = -c2;
    companion(3, 3) = -c3;
    companion(1, 0) = companion(2, 1) = companion(3, 2) = 1.0;

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(companion, false);
    std::vector<complex<double>> roots;
    for (int k = 0; k < 4; ++k) roots.push_back(s * solver.eigenvalues()(k));
    // Physical pair: positive real part (the quartic roots come in +-w pairs
    // up to dissipative corrections).
    std::sort(roots.begin(), roots.end(),
              [](auto a, auto b) { return a.real() > b.real(); });
    ComplexMode m0 = mode_from(roots[0]);
    ComplexMode m1 = mode_from(roots[1]);
    if (m0.omega < m1.omega) std::swap(m0, m1);
    return {m0, m1};
}

}  // namespace magcav
