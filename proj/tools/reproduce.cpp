#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "upconv/cascade.hpp"
#include "upconv/error.hpp"
#include "upconv/hbt.hpp"
#include "upconv/interference.hpp"
#include "upconv/photostream.hpp"
#include "upconv/rng.hpp"
#include "upconv/states.hpp"

namespace upconv::cli {

namespace {

constexpr double reference_kappa = 8.7715e-3;

struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

class Table {
 public:
  void add(const std::string& group, const std::string& name, double value, double expected, double tolerance) {
    const bool pass = std::isfinite(value) && std::abs(value - expected) <= tolerance;
    checks_.push_back({group, name, value, expected, tolerance, pass});
  }

  void fail(const std::string& group, const std::string& name, const std::string& reason) {
    checks_.push_back({group, name + " (" + reason + ")", std::nan(""), 0.0, 0.0, false});
  }

  bool all_pass() const {
    for (const auto& c : checks_) {
      if (!c.pass) return false;
    }
    return true;
  }

  void print(std::ostream& out) const {
    out << std::left << std::setw(8) << "group" << std::setw(48) << "check" << std::setw(16) << "value"
        << std::setw(16) << "expected" << std::setw(12) << "tolerance" << "result\n";
    for (const auto& c : checks_) {
      out << std::left << std::setw(8) << c.group << std::setw(48) << c.name << std::setw(16) << fmt(c.value)
          << std::setw(16) << fmt(c.expected) << std::setw(12) << fmt(c.tolerance) << (c.pass ? "PASS" : "FAIL")
          << '\n';
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : checks_) {
      rows.push_back({{"group", c.group},
                      {"check", c.name},
                      {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr)},
                      {"expected", c.expected},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
    }
    return rows;
  }

 private:
  static std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(8) << x;
    return s.str();
  }

  std::vector<Check> checks_;
};

template <typename F>
void guarded(Table& table, const std::string& group, const std::string& name, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    table.fail(group, name, std::string(error_code_name(e.code())) + ": " + e.what());
  }
}

void cascade_checks(Table& table, double kappa_scale, CascadeReport& report) {
  guarded(table, "cascade", "cascade run", [&] {
    CascadeConfig config;
    config.kappa = reference_kappa * kappa_scale;
    report = run_cascade(config);
    table.add("cascade", "nbar_sfg", report.nbar_sfg, 1.0e-5, 1e-7);
    table.add("cascade", "g2_sfg", report.g2_sfg, 11.3, 0.1);
    table.add("cascade", "purity_sfg", report.purity_sfg, 0.999997, 2e-6);
    table.add("cascade", "fidelity_coherent", report.fidelity_coherent, 0.99998, 2e-5);
    table.add("cascade", "ratio law g4/(g2)^2 vs g2_sfg (rel)", report.g2_ratio_law / report.g2_sfg - 1.0, 0.0,
              0.01);
    table.add("cascade", "g2_spdc - (3 + 1/nbar)", report.g2_spdc - (3.0 + 1.0 / 0.1), 0.0, 1e-9);
  });
  guarded(table, "cascade", "calibrate_kappa", [&] {
    table.add("cascade", "calibrate_kappa(0.1, 1e-5)", calibrate_kappa(0.1, 1e-5), reference_kappa, 1e-6);
  });
  guarded(table, "cascade", "reference states", [&] {
    const FockDim dim(50);
    const auto thermal = thermal_density(1e-5, dim);
    const auto coherent = coherent_state(CoherentAmplitude{std::sqrt(1e-5)}, dim);
    table.add("cascade", "g2 thermal (nbar 1e-5)", coherence_order(thermal.rho, 2), 2.0, 1e-6);
    table.add("cascade", "g2 coherent (nbar 1e-5)", coherence_order(coherent.amplitudes, 2), 1.0, 1e-9);
  });
}

void fringe_checks(Table& table, std::uint64_t seed) {
  constexpr double raw_a = 344.4;
  constexpr double raw_b = 568.8;
  constexpr double dark = 202.9;
  constexpr double dwell = 0.1;
  guarded(table, "fringes", "visibility arithmetic", [&] {
    table.add("fringes", "V_max from raw rates", visibility_from_rates(raw_a, raw_b, dark), 0.897, 0.001);
    table.add("fringes", "indistinguishability for V = 0.738", indistinguishability(0.738, raw_a, raw_b, dark), 0.823,
              0.002);
  });
  guarded(table, "fringes", "fringe frequency", [&] {
    std::vector<double> phi;
    for (int i = 0; i < 28; ++i) phi.push_back(i * std::numbers::pi / 9.0);
    const auto jsa = EffectiveJSA::gaussian(angular_frequency(default_center_wavelength),
                                            EffectiveJSA::sigma_for_coherence_time(default_biphoton_coherence_time));
    const FringeRates rates{raw_a - dark, raw_b - dark, dark};
    const auto expected = expected_fringe_counts(jsa, SpectralPhase{}, phi, rates, dwell);
    const auto noiseless = fit_fringe_frequency(phi, expected);
    table.add("fringes", "noiseless fitted frequency", noiseless.frequency, 0.5, 0.0005);

    const FringeScan scan = simulate_fringe_scan(jsa, SpectralPhase{}, phi, rates, dwell, seed);
    table.add("fringes", "noisy fitted frequency (3 sigma)", scan.free_frequency.frequency, 0.5,
              3.0 * scan.free_frequency.error);
  });
}

void hbt_checks(Table& table, const CascadeReport& report, std::uint64_t seed) {
  guarded(table, "hbt", "peak arithmetic", [&] {
    // Peak of 38 counts; the 100 bins with |tau| in [60, 550] ns hold 446
    // counts, i.e. a background of 4.46 per bin.
    std::vector<std::int64_t> counts(111, 0);
    int filled = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const int k = static_cast<int>(i) - 55;
      if (std::abs(k) >= 6) counts[i] = (filled++ < 46) ? 5 : 4;
    }
    counts[55] = 38;
    const CorrelationHistogram hist = normalize_g2(histogram_from_counts(counts), BackgroundWindow{60e-9, 550e-9});
    table.add("hbt", "background for 38-count peak", hist.background, 4.46, 1e-12);
    const PeakStatistics peak = peak_statistics(hist);
    table.add("hbt", "g2(0) for 38 on 4.46", peak.g2, 8.5, 0.05);
    table.add("hbt", "g2(0) error for 38 on 4.46", peak.g2_error, 1.4, 0.05);
    table.add("hbt", "accidentals 60.9 Hz x 50.3 Hz x 40 h x 10 ns", accidental_counts_per_bin(60.9, 50.3, 144000.0, 10e-9),
              4.46, 0.14);
  });
  guarded(table, "hbt", "desk-scale bunched run", [&] {
    // Slots aligned with the 10 ns bins so that the zero bin holds exactly the
    // intra-slot pairs and g2(0) equals the slot law's g2.
    SourceModel source;
    source.kind = SourceKind::bunched;
    source.pn = report.pn_sfg;
    source.mean_rate = 1000.0;
    source.coherence_time = 10e-9;
    const DetectorModel detector{1.0, 0.0, 0.0, 10e-9};
    const double g2_law = coherence_order(slot_photon_law(source), 2);
    const auto [s1, s2] = split_stream(source, detector, detector, 7200.0, derive_seed(seed, 0x686274, 0));
    const auto hist = normalize_g2(cross_correlate(s1, s2));
    const auto zero = hist.zero_bin();
    table.add("hbt", "desk-scale g2(0) vs slot-law g2 (3 sigma)", hist.g2[zero], g2_law, 3.0 * hist.g2_errors[zero]);
  });
}

}  // namespace

bool reproduce_reference(const ReproduceOptions& options, std::ostream& out) {
  Table table;
  CascadeReport report;
  cascade_checks(table, options.kappa_scale, report);
  fringe_checks(table, options.seed);
  if (!report.pn_sfg.probs.empty()) {
    hbt_checks(table, report, options.seed);
  } else {
    table.fail("hbt", "desk-scale bunched run", "no cascade photon-number law");
  }
  table.print(out);
  const bool ok = table.all_pass();
  out << "reproduce: " << (ok ? "all checks passed" : "FAILED") << " (seed " << options.seed << ", kappa scale "
      << options.kappa_scale << ")\n";

  if (!options.out.empty()) {
    const nlohmann::json doc = {
        {"config", {{"command", "reproduce"}, {"seed", options.seed}, {"kappa_scale", options.kappa_scale}}},
        {"checks", table.to_json()},
        {"pass", ok}};
    const auto path = resolve_output(options.out);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io, "cannot write " + path.string());
    f << doc.dump(2) << '\n';
  }
  return ok;
}

}  // namespace upconv::cli
