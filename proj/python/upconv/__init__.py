"""Sequential down-conversion / up-conversion simulator (C++ core)."""

from ._core import (
    UpconvError,
    calibrate_kappa,
    coherence_order,
    coherent_photon_numbers,
    cross_correlate,
    fit_fringe_frequency,
    g_amplitude,
    indistinguishability,
    rescale_photon_law,
    run_cascade,
    sfg_mean_photons,
    simulate_fringe_scan,
    simulate_hbt,
    squeezed_photon_numbers,
    thermal_photon_numbers,
    visibility_from_rates,
)

__all__ = [
    "UpconvError",
    "calibrate_kappa",
    "coherence_order",
    "coherent_photon_numbers",
    "cross_correlate",
    "fit_fringe_frequency",
    "g_amplitude",
    "indistinguishability",
    "rescale_photon_law",
    "run_cascade",
    "sfg_mean_photons",
    "simulate_fringe_scan",
    "simulate_hbt",
    "squeezed_photon_numbers",
    "thermal_photon_numbers",
    "visibility_from_rates",
]
