import math

import numpy as np
import pytest

import upconv


def test_cascade_reference_point():
    r = upconv.run_cascade()
    assert abs(r["g2_sfg"] - 11.3) < 0.1
    assert abs(r["nbar_sfg"] - 1e-5) < 1e-7
    assert abs(r["purity_sfg"] - 0.999997) < 2e-6
    assert abs(np.sum(r["pn_sfg"]) - 1.0) < 1e-9


def test_calibration():
    assert abs(upconv.calibrate_kappa(0.1, 1e-5) - 8.7715e-3) < 1e-6


def test_reference_statistics():
    assert abs(upconv.coherence_order(upconv.thermal_photon_numbers(1e-5, 50), 2) - 2.0) < 1e-6
    assert abs(upconv.coherence_order(upconv.coherent_photon_numbers(math.sqrt(1e-5), 50), 2) - 1.0) < 1e-9
    assert abs(upconv.coherence_order(upconv.squeezed_photon_numbers(0.1, 50), 2) - 13.0) < 1e-9


def test_rescale_keeps_g2():
    law = upconv.squeezed_photon_numbers(1 / 5.5, 80)
    thin = upconv.rescale_photon_law(law, 1e-5)
    assert abs(upconv.coherence_order(thin, 2) - 8.5) < 1e-6


def test_interference():
    assert abs(upconv.visibility_from_rates(344.4, 568.8, 202.9) - 0.897) < 1e-3
    assert abs(upconv.indistinguishability(0.738, 344.4, 568.8, 202.9) - 0.823) < 2e-3
    sigma = 2.0 / 50e-15
    g = upconv.g_amplitude(beta=1.0 / sigma**2)
    assert abs(abs(g) - 2 ** -0.25) < 1e-6
    phi = np.arange(28) * np.pi / 9
    scan = upconv.simulate_fringe_scan(phi, 344.4, 568.8, 202.9, 0.1, seed=3)
    assert abs(scan["free_frequency"] - 0.5) < 3 * scan["free_frequency_error"]


def test_hbt_round_trip():
    a, b = upconv.simulate_hbt("thermal", rate=2000.0, duration=600.0, seed=5, coherence_time=10e-9, dead_time=0.0)
    assert a.dtype == np.int64 and np.all(np.diff(a) > 0)
    h = upconv.cross_correlate(a, b)
    assert len(h["g2"]) == 111
    assert abs(h["g2_zero"] - 2.0) < 4 * h["g2_zero_error"]


def test_errors_carry_codes():
    with pytest.raises(upconv.UpconvError, match="invalid_rate"):
        upconv.visibility_from_rates(100.0, 568.8, 202.9)
    with pytest.raises(upconv.UpconvError, match="invalid_dimension"):
        upconv.run_cascade(dim_a=1)
