#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "magcav/extraction.hpp"
#include "magcav/model.hpp"
#include "magcav/sweep.hpp"

using namespace magcav;

namespace {

SystemParams row1() {
    SystemParams p;
    p.omega_c = 7.401e9;
    p.g = 37e6;
    p.kappa_m = 660e6;
    p.kappa_c = 5.6e6;
    p.kappa_1_ex = 5.8e3;
    p.kappa_2_ex = 540e3;
    p.mu0_ms = 0.84;
    return p;
}

RunConfig forward_config(const SystemParams& p, int b_points = 161, int f_points = 2001) {
    RunConfig cfg;
    cfg.params = p;
    SweepConfig sc;
    sc.b_min = kittel_field(p.omega_c - 5.0 * p.kappa_m, p);
    sc.b_max = kittel_field(p.omega_c + 5.0 * p.kappa_m, p);
    sc.b_points = b_points;
    sc.freq_span = 200e6;
    sc.freq_points = f_points;
    cfg.sweep = sc;
    return cfg;
}

SystemParams gamma_only_hint() {
    SystemParams hint;
    hint.omega_c = 1.0;
    return hint;
}

}  // namespace

TEST_CASE("lorentzian fit: exact model class closure") {
    const double c0 = 7.4e9, fwhm = 6e6, amp = 3.2e12, bg = 0.02;
    std::vector<double> f, pw;
    for (int i = 0; i < 801; ++i) {
        const double x = c0 - 60e6 + 120e6 * i / 800.0;
        f.push_back(x);
        pw.push_back(amp / ((x - c0) * (x - c0) + fwhm * fwhm / 4.0) + bg);
    }
    const LorentzianFit fit = fit_lorentzian_power(f, pw);
    CHECK(fit.converged);
    CHECK(fit.center == doctest::Approx(c0).epsilon(1e-9));
    CHECK(fit.fwhm == doctest::Approx(fwhm).epsilon(1e-6));
    CHECK(fit.amplitude == doctest::Approx(amp).epsilon(1e-5));
    CHECK(fit.background == doctest::Approx(bg).epsilon(1e-5));
}

TEST_CASE("lorentzian fit on a model spectrum tracks the perturbative curves") {
    SystemParams p = row1();
    const FieldPoint fp = FieldPoint::from_detuning(3.0 * p.kappa_m, p);
    std::vector<double> f, pw;
    for (int i = 0; i < 2001; ++i) {
        const double x = p.omega_c - 60e6 + 120e6 * i / 2000.0;
        f.push_back(x);
        pw.push_back(std::norm(s21(x, fp, p)));
    }
    const LorentzianFit fit = fit_lorentzian_power(f, pw);
    const double ksys = purcell_broadening(fp, p);
    CHECK(std::abs(fit.center - purcell_shift(fp, p)) < ksys / 100.0);
    CHECK(fit.fwhm == doctest::Approx(ksys).epsilon(0.02));
}

TEST_CASE("lorentzian fit preconditions and noise robustness") {
    std::vector<double> f, pw;
    for (int i = 0; i < 6; ++i) {
        f.push_back(i);
        pw.push_back(1.0 / (1.0 + (i - 3.0) * (i - 3.0)));
    }
    CHECK_THROWS_AS(fit_lorentzian_power(f, pw), std::invalid_argument);

    // peak at the edge
    std::vector<double> f2, pw2;
    for (int i = 0; i < 50; ++i) {
        f2.push_back(i);
        pw2.push_back(1.0 / (1.0 + i * i));
    }
    CHECK_THROWS_AS(fit_lorentzian_power(f2, pw2), std::runtime_error);

    // 1% additive noise, center error < fwhm/50 across seeded trials
    const double c0 = 0.0, fwhm = 10.0;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 0.01);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> xf, xp;
        for (int i = 0; i < 1001; ++i) {
            const double x = -50.0 + 100.0 * i / 1000.0;  // 10 FWHM span
            xf.push_back(x);
            xp.push_back(1.0 / (x * x / (fwhm * fwhm / 4.0) + 1.0) + gauss(rng));
        }
        const LorentzianFit fit = fit_lorentzian_power(xf, xp);
        CHECK(std::abs(fit.center - c0) < fwhm / 50.0);
    }
}

TEST_CASE("reduce_sweep shape checks") {
    SystemParams p = row1();
    RunConfig cfg = forward_config(p, 81, 1001);
    const GeneratedSweep fwd = generate_sweep(cfg);
    const FieldSweepResult r = reduce_sweep(fwd.power);

    std::size_t imax = 0;
    for (std::size_t i = 1; i < r.kappa_sys.size(); ++i)
        if (r.kappa_sys[i] > r.kappa_sys[imax]) imax = i;
    CHECK(imax > 0);
    CHECK(imax + 1 < r.kappa_sys.size());
    // single interior maximum: monotone up then down
    for (std::size_t i = 1; i <= imax; ++i) CHECK(r.kappa_sys[i] >= r.kappa_sys[i - 1] - 1.0);
    for (std::size_t i = imax + 1; i < r.kappa_sys.size(); ++i)
        CHECK(r.kappa_sys[i] <= r.kappa_sys[i - 1] + 1.0);

    // omega_sys crosses omega_c descending at the kappa_sys maximum (the
    // asymptotic tails also hug omega_c, so look for the steep sign change)
    std::size_t icross = 0;
    double steepest = 0.0;
    for (std::size_t i = 0; i + 1 < r.omega_sys.size(); ++i) {
        if (r.omega_sys[i] >= p.omega_c && r.omega_sys[i + 1] < p.omega_c) {
            const double slope = r.omega_sys[i] - r.omega_sys[i + 1];
            if (slope > steepest) {
                steepest = slope;
                icross = i;
            }
        }
    }
    CHECK(std::abs(static_cast<double>(icross) - static_cast<double>(imax)) <= 1.0);

    CHECK_THROWS_AS(reduce_sweep(std::vector<PowerSpectrum>(fwd.power.begin(),
                                                            fwd.power.begin() + 5)),
                    std::invalid_argument);
}

TEST_CASE("g = 0 sweep reduces to constant curves") {
    SystemParams p = row1();
    p.g = 0.0;
    const GeneratedSweep fwd = generate_sweep(forward_config(p, 21, 801));
    const FieldSweepResult r = reduce_sweep(fwd.power);
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
        CHECK(r.omega_sys[i] == doctest::Approx(p.omega_c).epsilon(1e-9));
        CHECK(r.kappa_sys[i] == doctest::Approx(p.kappa_c).epsilon(1e-6));
    }
}

TEST_CASE("round-trip extraction, noiseless") {
    SystemParams p = row1();
    const GeneratedSweep fwd = generate_sweep(forward_config(p));
    const FieldSweepResult r = reduce_sweep(fwd.power);
    const ExtractedParams e = extract_height_waist(r, gamma_only_hint());
    CHECK(e.g_mean == doctest::Approx(p.g).epsilon(0.02));
    CHECK(e.kappa_m_mean == doctest::Approx(p.kappa_m).epsilon(0.03));
    CHECK(e.kappa_c == doctest::Approx(p.kappa_c).epsilon(0.02));
    CHECK(std::abs(e.omega_c - p.omega_c) < p.kappa_c / 10.0);
    CHECK(e.mu0_ms_fit == doctest::Approx(p.mu0_ms).epsilon(0.02));
    CHECK(e.b_res == doctest::Approx(kittel_field(p.omega_c, p)).epsilon(0.01));
    CHECK(e.cooperativity == doctest::Approx(cooperativity(p)).epsilon(0.06));
}

TEST_CASE("scale equivariance of the extraction") {
    SystemParams p = row1();
    for (double s : {0.5, 2.0}) {
        SystemParams q = p;
        q.g *= s;
        q.kappa_m *= s;
        q.kappa_c *= s;
        q.kappa_1_ex *= s;
        q.kappa_2_ex *= s;
        RunConfig cfg = forward_config(q);
        cfg.sweep->freq_span = 200e6 * s;
        const ExtractedParams e =
            extract_height_waist(reduce_sweep(generate_sweep(cfg).power), gamma_only_hint());
        CHECK(e.g_mean == doctest::Approx(s * p.g).epsilon(0.02));
        CHECK(e.kappa_m_mean == doctest::Approx(s * p.kappa_m).epsilon(0.03));
        CHECK(e.kappa_c == doctest::Approx(s * p.kappa_c).epsilon(0.02));
    }
}

TEST_CASE("linewidth estimate exceeds shift estimate on tail-heavy data") {
    // Perturb the reduced curves with a slowly decaying symmetric tail; the
    // FWHM-based kappa_m should react more than the waist-based one.
    SystemParams p = row1();
    const GeneratedSweep fwd = generate_sweep(forward_config(p));
    FieldSweepResult r = reduce_sweep(fwd.power);
    const double b_res = kittel_field(p.omega_c, p);
    for (std::size_t i = 0; i < r.fields.size(); ++i) {
        const double d = kittel_frequency(r.fields[i], p) - p.omega_c;
        r.kappa_sys[i] += 0.3e6 / (1.0 + std::abs(d) / (3.0 * p.kappa_m));
        (void)b_res;
    }
    ExtractionOptions opts;
    opts.bias_correction = false;
    const ExtractedParams e = extract_height_waist(r, gamma_only_hint(), opts);
    CHECK(e.kappa_m_linewidth > e.kappa_m_shift);
}

TEST_CASE("least-squares cross-check lands near the truth") {
    SystemParams p = row1();
    const GeneratedSweep fwd = generate_sweep(forward_config(p));
    const ExtractedParams e = extract_least_squares(reduce_sweep(fwd.power), gamma_only_hint());
    CHECK(e.g_mean == doctest::Approx(p.g).epsilon(0.05));
    CHECK(e.kappa_m_mean == doctest::Approx(p.kappa_m).epsilon(0.08));
    CHECK(e.kappa_c == doctest::Approx(p.kappa_c).epsilon(0.05));
}

TEST_CASE("summary row formatting") {
    ExtractedParams e;
    e.omega_c = 7.4012e9;
    e.g_mean = 37.2e6;
    e.kappa_m_mean = 661.4e6;
    e.kappa_c = 5.62e6;
    e.cooperativity = 1.4921;
    const std::string row = summarize_configuration(e);
    CHECK(row.find("7.401") != std::string::npos);
    CHECK(row.find("C = 1.5") != std::string::npos);

    ExtractedParams zero;
    zero.omega_c = 7.4e9;
    CHECK(summarize_configuration(zero).find("C = 0") != std::string::npos);
}

TEST_CASE("CSV parse round trip, both power conventions") {
    const std::string linear =
        "B_mT,freq_GHz,power_linear\n"
        "70,7.40,0.5\n70,7.41,0.9\n70,7.42,0.4\n"
        "71,7.40,0.6\n71,7.41,1.0\n71,7.42,0.3\n";
    const auto blocks = parse_sweep_csv(linear);
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].b0 == doctest::Approx(70e-3));
    CHECK(blocks[0].frequencies[1] == doctest::Approx(7.41e9));
    CHECK(blocks[1].power[1] == doctest::Approx(1.0));

    const std::string db =
        "B_mT,freq_GHz,power_db\n"
        "70,7.40,-3.0\n70,7.41,0.0\n";
    const auto b2 = parse_sweep_csv(db);
    CHECK(b2[0].power[0] == doctest::Approx(std::pow(10.0, -0.3)));
    CHECK(b2[0].power[1] == doctest::Approx(1.0));

    CHECK_THROWS(parse_sweep_csv("B_mT,freq_GHz,wattage\n1,2,3\n"));
}

TEST_CASE("extraction JSON payload carries both estimates") {
    SystemParams p = row1();
    const GeneratedSweep fwd = generate_sweep(forward_config(p, 81, 1001));
    const ExtractedParams e = extract_height_waist(reduce_sweep(fwd.power), gamma_only_hint());
    const std::string j = extracted_to_json(e);
    CHECK(j.find("g_shift_mhz") != std::string::npos);
    CHECK(j.find("g_linewidth_mhz") != std::string::npos);
    CHECK(j.find("cooperativity") != std::string::npos);
}
