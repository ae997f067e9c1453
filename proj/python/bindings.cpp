#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "upconv/cascade.hpp"
#include "upconv/error.hpp"
#include "upconv/hbt.hpp"
#include "upconv/interference.hpp"
#include "upconv/photostream.hpp"
#include "upconv/states.hpp"

namespace py = pybind11;
using namespace upconv;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

PhotonNumberDistribution law_from(const std::vector<double>& probs) {
  PhotonNumberDistribution pn;
  pn.probs = probs;
  return pn;
}

TimeTagStream stream_from(const std::vector<std::int64_t>& timestamps, double resolution, std::int64_t duration_ps) {
  TimeTagStream s;
  s.timestamps = timestamps;
  s.duration_ps = duration_ps;
  s.detector.resolution = resolution;
  return s;
}

py::dict cascade_report(double nbar_spdc, double kappa, int dim_a, int dim_b, double zeta_phase) {
  CascadeConfig cfg{nbar_spdc, kappa, dim_a, dim_b, zeta_phase};
  const CascadeReport r = run_cascade(cfg);
  py::dict d;
  d["pn_sfg"] = to_array(r.pn_sfg.probs);
  d["g2_sfg"] = r.g2_sfg;
  d["purity_sfg"] = r.purity_sfg;
  d["fidelity_coherent"] = r.fidelity_coherent;
  d["nbar_sfg"] = r.nbar_sfg;
  d["nbar_spdc_out"] = r.nbar_spdc_out;
  d["g2_spdc"] = r.g2_spdc;
  d["g4_spdc"] = r.g4_spdc;
  d["g2_ratio_law"] = r.g2_ratio_law;
  return d;
}

EffectiveJSA gaussian_jsa(double coherence_time, double wavelength, int nodes) {
  return EffectiveJSA::gaussian(angular_frequency(wavelength), EffectiveJSA::sigma_for_coherence_time(coherence_time),
                                nodes);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the up-conversion simulator";

  static py::exception<Error> error_type(m, "UpconvError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = std::string(error_code_name(e.code())) + ": " + e.what();
      PyErr_SetString(error_type.ptr(), message.c_str());
    }
  });

  // cascade
  m.def("run_cascade", &cascade_report, py::arg("nbar_spdc") = 0.1, py::arg("kappa") = 8.7715e-3,
        py::arg("dim_a") = default_spdc_dim, py::arg("dim_b") = default_sfg_dim, py::arg("zeta_phase") = 0.0,
        "Squeezed vacuum through the SFG unitary; statistics of the traced SFG mode.");
  m.def(
      "calibrate_kappa",
      [](double nbar_spdc, double target, int dim_a, int dim_b, double phase) {
        return calibrate_kappa(nbar_spdc, target, FockDim(dim_a), FockDim(dim_b), phase);
      },
      py::arg("nbar_spdc"), py::arg("target_nbar_sfg"), py::arg("dim_a") = default_spdc_dim,
      py::arg("dim_b") = default_sfg_dim, py::arg("zeta_phase") = 0.0);
  m.def(
      "sfg_mean_photons",
      [](double nbar_spdc, double kappa, int dim_a, int dim_b, double phase) {
        return sfg_mean_photons(nbar_spdc, kappa, FockDim(dim_a), FockDim(dim_b), phase);
      },
      py::arg("nbar_spdc"), py::arg("kappa"), py::arg("dim_a") = default_spdc_dim, py::arg("dim_b") = default_sfg_dim,
      py::arg("zeta_phase") = 0.0);

  // states
  m.def(
      "squeezed_photon_numbers",
      [](double nbar, int dim, double phase) {
        return to_array(
            photon_number_distribution(squeezed_vacuum(SqueezeParam::from_mean_photons(nbar, phase), FockDim(dim)))
                .probs);
      },
      py::arg("nbar"), py::arg("dim"), py::arg("phase") = 0.0);
  m.def(
      "thermal_photon_numbers",
      [](double nbar, int dim) { return to_array(photon_number_distribution(thermal_density(nbar, FockDim(dim))).probs); },
      py::arg("nbar"), py::arg("dim"));
  m.def(
      "coherent_photon_numbers",
      [](std::complex<double> alpha, int dim) {
        return to_array(photon_number_distribution(coherent_state(CoherentAmplitude{alpha}, FockDim(dim))).probs);
      },
      py::arg("alpha"), py::arg("dim"));
  m.def(
      "coherence_order", [](const std::vector<double>& probs, int k) { return coherence_order(law_from(probs), k); },
      py::arg("probs"), py::arg("k") = 2);
  m.def(
      "rescale_photon_law",
      [](const std::vector<double>& probs, double target_mean) {
        return to_array(rescale_photon_law(law_from(probs), target_mean).probs);
      },
      py::arg("probs"), py::arg("target_mean"));

  // interference
  m.def(
      "g_amplitude",
      [](double coherence_time, double beta, double alpha, double gamma, double phi0, double z, double wavelength,
         int nodes) {
        SpectralPhase p{phi0, alpha, beta, gamma, z};
        return g_amplitude(gaussian_jsa(coherence_time, wavelength, nodes), p);
      },
      py::arg("coherence_time") = default_biphoton_coherence_time, py::arg("beta") = 0.0, py::arg("alpha") = 0.0,
      py::arg("gamma") = 0.0, py::arg("phi0") = 0.0, py::arg("z") = 0.0,
      py::arg("wavelength") = default_center_wavelength, py::arg("nodes") = default_jsa_nodes,
      "Up-converted amplitude for a Gaussian effective JSA.");
  m.def("visibility_from_rates", &visibility_from_rates, py::arg("raw_a"), py::arg("raw_b"), py::arg("dark"));
  m.def("indistinguishability", &indistinguishability, py::arg("visibility"), py::arg("raw_a"), py::arg("raw_b"),
        py::arg("dark"));
  m.def(
      "fit_fringe_frequency",
      [](const std::vector<double>& phi, const std::vector<double>& counts, double lo, double hi) {
        const FrequencyEstimate f = fit_fringe_frequency(phi, counts, lo, hi);
        return py::make_tuple(f.frequency, f.error);
      },
      py::arg("phi"), py::arg("counts"), py::arg("lo") = 0.3, py::arg("hi") = 1.2);
  m.def(
      "simulate_fringe_scan",
      [](const std::vector<double>& phi, double raw_a, double raw_b, double dark, double dwell, std::uint64_t seed,
         double coherence_time, double beta) {
        visibility_from_rates(raw_a, raw_b, dark);
        SpectralPhase p;
        p.beta = beta;
        const FringeScan s = simulate_fringe_scan(gaussian_jsa(coherence_time, default_center_wavelength,
                                                               default_jsa_nodes),
                                                  p, phi, FringeRates{raw_a - dark, raw_b - dark, dark}, dwell, seed);
        py::dict d;
        d["phi"] = to_array(s.phase_values);
        d["counts"] = to_array(s.counts);
        d["rates"] = to_array(s.rates);
        d["errors"] = to_array(s.errors);
        d["fit"] = to_array(s.fit);
        d["visibility"] = s.visibility;
        d["visibility_raw"] = s.visibility_raw;
        d["free_frequency"] = s.free_frequency.frequency;
        d["free_frequency_error"] = s.free_frequency.error;
        return d;
      },
      py::arg("phi"), py::arg("raw_a"), py::arg("raw_b"), py::arg("dark"), py::arg("dwell"), py::arg("seed"),
      py::arg("coherence_time") = default_biphoton_coherence_time, py::arg("beta") = 0.0);

  // photostream + hbt
  m.def(
      "simulate_hbt",
      [](const std::string& source, double rate, double duration, std::uint64_t seed, double coherence_time,
         std::optional<std::vector<double>> pn, double efficiency, double dark1, double dark2, double dead_time,
         double resolution) {
        SourceModel s;
        if (source == "coherent") {
          s.kind = SourceKind::coherent;
        } else if (source == "thermal") {
          s.kind = SourceKind::thermal;
        } else if (source == "bunched") {
          s.kind = SourceKind::bunched;
          if (!pn) throw Error(ErrorCode::config, "bunched source needs pn");
          s.pn = law_from(*pn);
        } else {
          throw Error(ErrorCode::config, "source must be coherent, thermal or bunched");
        }
        s.mean_rate = rate;
        s.coherence_time = coherence_time;
        const DetectorModel d1{efficiency, dark1, dead_time, resolution};
        const DetectorModel d2{efficiency, dark2, dead_time, resolution};
        std::pair<TimeTagStream, TimeTagStream> streams;
        {
          py::gil_scoped_release release;
          streams = split_stream(s, d1, d2, duration, seed);
        }
        return py::make_tuple(to_array(streams.first.timestamps), to_array(streams.second.timestamps));
      },
      py::arg("source") = "coherent", py::arg("rate") = 55.0, py::arg("duration") = 60.0, py::arg("seed") = 0,
      py::arg("coherence_time") = 1e-6, py::arg("pn") = py::none(), py::arg("efficiency") = 1.0,
      py::arg("dark1") = 0.0, py::arg("dark2") = 0.0, py::arg("dead_time") = 45e-9, py::arg("resolution") = 10e-9,
      "Two detector time-tag arrays (int64 ps) behind a 50/50 splitter.");
  m.def(
      "cross_correlate",
      [](const std::vector<std::int64_t>& t1, const std::vector<std::int64_t>& t2, double resolution,
         double bin_width, double tau_max, double bg_lo, double bg_hi) {
        CorrelationHistogram h;
        {
          py::gil_scoped_release release;
          h = normalize_g2(cross_correlate(stream_from(t1, resolution, 0), stream_from(t2, resolution, 0), bin_width,
                                           tau_max),
                           BackgroundWindow{bg_lo, bg_hi});
        }
        std::vector<double> tau(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) tau[i] = h.tau(i);
        const PeakStatistics peak = peak_statistics(h);
        py::dict d;
        d["tau"] = to_array(tau);
        d["counts"] = to_array(h.counts);
        d["errors"] = to_array(h.errors);
        d["g2"] = to_array(h.g2);
        d["g2_errors"] = to_array(h.g2_errors);
        d["background"] = h.background;
        d["background_error"] = h.background_error;
        d["g2_zero"] = h.g2[h.zero_bin()];
        d["g2_zero_error"] = h.g2_errors[h.zero_bin()];
        d["peak_tau"] = peak.tau;
        d["peak_significance"] = peak.significance;
        return d;
      },
      py::arg("t1"), py::arg("t2"), py::arg("resolution") = 10e-9, py::arg("bin_width") = default_bin_width,
      py::arg("tau_max") = default_tau_max, py::arg("bg_lo") = default_background_lo,
      py::arg("bg_hi") = default_background_hi);
}
