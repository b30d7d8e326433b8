import json
import math

import pytest

import magcav


def row1():
    p = magcav.SystemParams()
    p.omega_c = 7.401e9
    p.g = 37e6
    p.kappa_m = 660e6
    p.kappa_c = 5.6e6
    p.kappa_1_ex = 5.8e3
    p.kappa_2_ex = 540e3
    p.mu0_ms = 0.84
    return p


def test_kittel_round_trip():
    p = row1()
    w = magcav.kittel_frequency(76e-3, p)
    assert w == pytest.approx(7.39e9, rel=0.01)
    assert magcav.kittel_field(w, p) == pytest.approx(76e-3, rel=1e-12)
    with pytest.raises(Exception):
        magcav.kittel_frequency(-1.0, p)


def test_spectra_and_rates():
    p = row1()
    fp = magcav.FieldPoint.from_detuning(0.0, p)
    peak = abs(magcav.s21(p.omega_c, fp, p))
    expected = math.sqrt(p.kappa_1_ex * p.kappa_2_ex) / (
        p.kappa_c / 2 + 2 * p.g**2 / p.kappa_m
    )
    assert peak == pytest.approx(expected, rel=1e-12)
    assert magcav.purcell_broadening(fp, p) == pytest.approx(
        p.kappa_c + 4 * p.g**2 / p.kappa_m, rel=1e-12
    )
    assert magcav.cooperativity(p) == pytest.approx(1.5, rel=0.02)
    assert magcav.regime_classify(p) == "Purcell"


def test_params_json_round_trip():
    p = row1()
    q = magcav.SystemParams.from_json(p.to_json())
    assert q.omega_c == pytest.approx(p.omega_c)
    assert q.mu0_ms == pytest.approx(p.mu0_ms)


def test_eigen_and_ringdown():
    p = row1()
    fp = magcav.FieldPoint.from_detuning(0.0, p)
    m1, m2 = magcav.exact_eigenfrequencies(fp, p)
    trace_sum = m1.as_complex() + m2.as_complex()
    bare = complex(p.omega_c, -p.kappa_c / 2) + complex(fp.omega_m, -p.kappa_m / 2)
    assert abs(trace_sum - bare) / abs(bare) < 1e-12

    times = magcav.uniform_times(500e-9, 1e-9)
    trace = magcav.synthesize_ringdown(fp, p, 1.0, 0.0, times)
    opts = magcav.LifetimeFitOptions()
    opts.t_end = 3.0 / (2 * math.pi * magcav.purcell_broadening(fp, p))
    fit = magcav.fit_lifetime(trace, opts)
    rate = 1.0 / (2 * math.pi * fit.tau)
    assert rate == pytest.approx(magcav.purcell_broadening(fp, p), rel=0.03)


def test_forward_sweep_round_trip(tmp_path):
    config = {
        "params": {
            "omega_c_ghz": 7.401,
            "kappa_c_mhz": 5.6,
            "kappa_m_mhz": 660,
            "g_mhz": 37,
            "kappa_1_ex_khz": 5.8,
            "kappa_2_ex_khz": 540,
            "mu0_ms_t": 0.84,
        },
        "sweep": {
            "b_min_mt": 25.0,
            "b_max_mt": 148.0,
            "b_points": 121,
            "freq_span_mhz": 200,
            "freq_points": 1001,
        },
    }
    csv_text = magcav.generate_sweep_csv(json.dumps(config))
    path = tmp_path / "sweep.csv"
    path.write_text(csv_text)
    extracted = magcav.extract_from_csv(str(path))
    assert extracted.g_mean == pytest.approx(37e6, rel=0.02)
    assert extracted.kappa_m_mean == pytest.approx(660e6, rel=0.03)
    assert extracted.kappa_c == pytest.approx(5.6e6, rel=0.02)
    assert "C = " in extracted.summary()


def test_strict_config_rejected():
    with pytest.raises(Exception, match="unknown key"):
        magcav.generate_sweep_csv(json.dumps({"params": {"bogus": 1}}))
