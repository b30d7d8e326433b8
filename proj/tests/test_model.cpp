#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "magcav/constants.hpp"
#include "magcav/model.hpp"
#include "magcav/params.hpp"

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

}  // namespace

TEST_CASE("kittel relation and its inverse") {
    SystemParams p = row1();
    CHECK(kittel_frequency(0.0, p) == 0.0);
    CHECK(kittel_frequency(76e-3, p) == doctest::Approx(7.39e9).epsilon(0.01));

    SystemParams q = p;
    q.mu0_ms = 1.19;
    CHECK(kittel_frequency(53e-3, q) == doctest::Approx(7.19e9).epsilon(0.01));

    for (double b : {1e-3, 76e-3, 1.0}) {
        CHECK(kittel_field(kittel_frequency(b, p), p) == doctest::Approx(b).epsilon(1e-12));
    }
    CHECK(kittel_field(0.0, p) == 0.0);
    // strictly increasing on [0, 10 T]
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double w = kittel_frequency(i * 0.1, p);
        CHECK(w > prev);
        prev = w;
    }
    CHECK_THROWS_AS(kittel_frequency(-1e-3, p), std::domain_error);
}

TEST_CASE("s21 reduces to a bare Lorentzian at g = 0") {
    SystemParams p = row1();
    p.g = 0.0;
    const FieldPoint fp = FieldPoint::from_detuning(0.0, p);
    const double peak = std::norm(s21(p.omega_c, fp, p));
    CHECK(peak == doctest::Approx(p.kappa_1_ex * p.kappa_2_ex / (p.kappa_c * p.kappa_c / 4.0))
                      .epsilon(1e-12));
    // half maximum at +- kappa_c/2
    CHECK(std::norm(s21(p.omega_c + p.kappa_c / 2.0, fp, p)) ==
          doctest::Approx(peak / 2.0).epsilon(1e-12));
}

TEST_CASE("s21 on resonance and far-detuned limits") {
    SystemParams p = row1();
    const FieldPoint res = FieldPoint::from_detuning(0.0, p);
    const double expected =
        std::sqrt(p.kappa_1_ex * p.kappa_2_ex) / (p.kappa_c / 2.0 + 2.0 * p.g * p.g / p.kappa_m);
    CHECK(std::abs(s21(p.omega_c, res, p)) == doctest::Approx(expected).epsilon(1e-12));

    // magnon term decays as g^2/Delta relative to kappa_c/2
    SystemParams p0 = p;
    p0.g = 0.0;
    const double w = p.omega_c + 2e6;
    const FieldPoint far4 = FieldPoint::from_detuning(1e4 * p.kappa_m * 1.01, p);
    CHECK(std::abs(s21(w, far4, p) - s21(w, far4, p0)) / std::abs(s21(w, far4, p0)) < 1e-4);
    const FieldPoint far6 = FieldPoint::from_detuning(1e6 * p.kappa_m * 1.01, p);
    CHECK(std::abs(s21(w, far6, p) - s21(w, far6, p0)) / std::abs(s21(w, far6, p0)) < 1e-6);

    SystemParams bad = p;
    bad.kappa_m = 0.0;
    CHECK_THROWS_AS(s21(p.omega_c, res, bad), std::domain_error);
}

TEST_CASE("s22 relation to s21") {
    SystemParams p = row1();
    const FieldPoint fp = FieldPoint::from_detuning(0.3 * p.kappa_m, p);
    const double ratio = std::sqrt(p.kappa_2_ex / p.kappa_1_ex);
    for (int i = 0; i < 20; ++i) {
        const double w = p.omega_c - 100e6 + 10e6 * i;
        CHECK(std::abs((s22(w, fp, p) - 1.0) - ratio * s21(w, fp, p)) < 1e-12);
    }
    SystemParams bad = p;
    bad.kappa_1_ex = 0.0;
    CHECK_THROWS_AS(s22(p.omega_c, fp, bad), std::domain_error);
}

TEST_CASE("purcell shift and broadening landmarks") {
    SystemParams p = row1();
    CHECK(purcell_shift(FieldPoint::from_detuning(0.0, p), p) == p.omega_c);
    CHECK(purcell_shift(FieldPoint::from_detuning(p.kappa_m / 2.0, p), p) ==
          doctest::Approx(p.omega_c - p.g * p.g / p.kappa_m).epsilon(1e-12));
    // peak-to-peak shift 2g^2/km ~ 4.15 MHz for these rates
    const double pp = purcell_shift(FieldPoint::from_detuning(-p.kappa_m / 2.0, p), p) -
                      purcell_shift(FieldPoint::from_detuning(p.kappa_m / 2.0, p), p);
    CHECK(pp == doctest::Approx(2.0 * p.g * p.g / p.kappa_m).epsilon(1e-12));
    CHECK(pp / 1e6 == doctest::Approx(4.15).epsilon(0.01));

    SystemParams p9 = row1();
    p9.g = 32e6;
    p9.kappa_m = 680e6;
    p9.kappa_c = 3.7e6;
    const double ks0 = purcell_broadening(FieldPoint::from_detuning(0.0, p9), p9);
    CHECK(ks0 / 1e6 == doctest::Approx(9.7).epsilon(0.01));
    const double excess_half =
        purcell_broadening(FieldPoint::from_detuning(p9.kappa_m / 2.0, p9), p9) - p9.kappa_c;
    CHECK(excess_half == doctest::Approx((ks0 - p9.kappa_c) / 2.0).epsilon(1e-12));

    SystemParams g0 = row1();
    g0.g = 0.0;
    for (double d : {-1e9, 0.0, 1e9})
        CHECK(purcell_broadening(FieldPoint::from_detuning(d, g0), g0) == g0.kappa_c);
}

TEST_CASE("cooperativity and purcell factor") {
    SystemParams p = row1();
    CHECK(cooperativity(p) == doctest::Approx(1.5).epsilon(0.02));
    SystemParams p4 = p;
    p4.g = 21e6;
    p4.kappa_m = 680e6;
    p4.kappa_c = 6.1e6;
    CHECK(cooperativity(p4) == doctest::Approx(0.42).epsilon(0.02));
    SystemParams g0 = p;
    g0.g = 0.0;
    CHECK(cooperativity(g0) == 0.0);
    CHECK(purcell_factor(g0) == 1.0);
    CHECK(purcell_factor(p) ==
          doctest::Approx(purcell_broadening(FieldPoint::from_detuning(0.0, p), p) / p.kappa_c)
              .epsilon(1e-12));
}

TEST_CASE("regime classification") {
    SystemParams p = row1();
    CHECK(regime_classify(p) == RegimeLabel::Purcell);
    SystemParams sc;
    sc.omega_c = 7.4e9;
    sc.g = 100e6;
    sc.kappa_c = 1e6;
    sc.kappa_m = 1e6;
    CHECK(regime_classify(sc) == RegimeLabel::StrongCoupling);
    SystemParams mit;
    mit.omega_c = 7.4e9;
    mit.g = 10e6;
    mit.kappa_c = 660e6;
    mit.kappa_m = 1e6;
    CHECK(regime_classify(mit) == RegimeLabel::MagneticallyInducedTransparency);
    CHECK_THROWS_AS(regime_classify(p, 1.0), std::invalid_argument);
}

TEST_CASE("dos peak value") {
    SystemParams p = row1();
    const FieldPoint fp = FieldPoint::from_detuning(0.0, p);
    const double km_ang = constants::two_pi * p.kappa_m;
    const double peak = dos_lorentzian(constants::hbar * constants::two_pi * fp.omega_m, fp, p);
    CHECK(peak == doctest::Approx(2.0 / (M_PI * constants::hbar * km_ang)).epsilon(1e-12));
}

TEST_CASE("coupling estimators") {
    SystemParams p;
    p.omega_c = 7.4e9;
    p.mu0_ms = 0.84;
    CHECK(coupling_estimate_magnetic(0.0, 1e-6, p) == 0.0);
    const double n = spins_from_magnet(0.84, 4e-6, 4e-3);
    CHECK(n == doctest::Approx(1.45e16).epsilon(0.03));
    const double v = 26e-3 * 8e-3 * 36e-3;
    const double g1 = coupling_estimate_magnetic(n, v, p);
    CHECK(g1 == doctest::Approx(3e6).epsilon(0.3));
    CHECK(coupling_estimate_magnetic(4.0 * n, v, p) == doctest::Approx(2.0 * g1).epsilon(1e-12));

    const double ge = coupling_estimate_electric(4e-3, 4e-6, 1.0, p);
    CHECK(coupling_estimate_electric(8e-3, 4e-6, 1.0, p) / ge ==
          doctest::Approx(std::pow(2.0, 2.5)).epsilon(1e-9));
    CHECK(coupling_estimate_electric(4e-3, 2e-6, 1.0, p) / ge ==
          doctest::Approx(2.0).epsilon(1e-9));
    // implied absorbed-power exponent: g^2 ~ L^5
    const double lo = coupling_estimate_electric(1e-3, 4e-6, 1.0, p);
    const double hi = coupling_estimate_electric(5e-3, 4e-6, 1.0, p);
    const double slope = std::log(hi * hi / (lo * lo)) / std::log(5.0);
    CHECK(slope == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("params JSON round trip and strictness") {
    SystemParams p = row1();
    const SystemParams q = params_from_json(params_to_json(p));
    CHECK(q.omega_c == doctest::Approx(p.omega_c));
    CHECK(q.kappa_1_ex == doctest::Approx(p.kappa_1_ex));
    CHECK(q.mu0_ms == doctest::Approx(p.mu0_ms));
    CHECK_THROWS_WITH_AS(
        params_from_json(R"({"omega_c_ghz":7.4,"kappa_c_mhz":5,"kappa_m_mhz":660,"g_mhz":37,"bogus":1})"),
        "unknown key: params.bogus", std::invalid_argument);
    SystemParams bad = p;
    bad.kappa_1_ex = 2.0 * p.kappa_c;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("homogeneity of the closed forms") {
    SystemParams p = row1();
    const double s = 3.0;
    SystemParams ps = p;
    ps.g *= s;
    ps.kappa_c *= s;
    ps.kappa_m *= s;
    const double d = 0.7 * p.kappa_m;
    const double dev = purcell_shift(FieldPoint::from_detuning(d, p), p) - p.omega_c;
    const double dev_s = purcell_shift(FieldPoint::from_detuning(s * d, ps), ps) - ps.omega_c;
    CHECK(dev_s == doctest::Approx(s * dev).epsilon(1e-12));
    CHECK(purcell_broadening(FieldPoint::from_detuning(s * d, ps), ps) ==
          doctest::Approx(s * purcell_broadening(FieldPoint::from_detuning(d, p), p))
              .epsilon(1e-12));
}
