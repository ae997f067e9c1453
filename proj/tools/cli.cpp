#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "upconv/cascade.hpp"
#include "upconv/error.hpp"
#include "upconv/hbt.hpp"
#include "upconv/interference.hpp"
#include "upconv/photostream.hpp"
#include "upconv/ttag_io.hpp"

namespace upconv::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::io, "cannot write " + path.string());
  f << content;
  if (!f) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::pair<int, int> parse_dims(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--dims expects A,B (e.g. 50,10)");
  try {
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("--dims expects two integers, got '" + text + "'");
  }
}

BackgroundWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--bg-window expects LO:HI in seconds");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError("--bg-window expects two numbers, got '" + text + "'");
  }
}

std::filesystem::path sibling_with_suffix(const std::filesystem::path& path, const std::string& suffix) {
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + suffix);
  return out;
}

// ---------------------------------------------------------------- cascade

struct CascadeArgs {
  double nbar_spdc = 0.1;
  double target_nbar_sfg = 1e-5;
  std::optional<double> kappa;
  std::string dims = "50,10";
  double zeta_phase = 0.0;
  std::string out = "cascade.json";
  std::string pn_out;
};

int cmd_cascade(const CascadeArgs& args, std::ostream& out) {
  const auto [dimA, dimB] = parse_dims(args.dims);
  const FockDim fa(dimA);
  const FockDim fb(dimB);

  CascadeConfig config;
  config.nbar_spdc = args.nbar_spdc;
  config.dimA = dimA;
  config.dimB = dimB;
  config.zeta_phase = args.zeta_phase;
  config.kappa = args.kappa ? *args.kappa : calibrate_kappa(args.nbar_spdc, args.target_nbar_sfg, fa, fb, args.zeta_phase);
  const CascadeReport report = run_cascade(config);

  json resolved = {{"command", "cascade"},
                   {"nbar_spdc", args.nbar_spdc},
                   {"target_nbar_sfg", args.target_nbar_sfg},
                   {"kappa", args.kappa ? json(*args.kappa) : json(nullptr)},
                   {"dims", {dimA, dimB}},
                   {"zeta_phase", args.zeta_phase}};

  json doc = {{"config", resolved},
              {"kappa", config.kappa},
              {"kappa_source", args.kappa ? "given" : "calibrated"},
              {"g2_sfg", report.g2_sfg},
              {"purity_sfg", report.purity_sfg},
              {"fidelity_coherent", report.fidelity_coherent},
              {"nbar_sfg", report.nbar_sfg},
              {"nbar_spdc_out", report.nbar_spdc_out},
              {"g2_spdc", report.g2_spdc},
              {"g4_spdc", report.g4_spdc},
              {"g2_ratio_law", report.g2_ratio_law},
              {"pn_sfg", report.pn_sfg.probs},
              {"pn_tail_tol", report.pn_sfg.tail_tol}};

  const auto report_path = resolve_output(args.out);
  const auto pn_path = args.pn_out.empty() ? sibling_with_suffix(report_path, "_pn.csv") : resolve_output(args.pn_out);
  write_file(report_path, doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "# config: " << resolved.dump() << "\n";
  csv << "# kappa: " << num(config.kappa) << "\n";
  csv << "n,p_n\n";
  for (std::size_t n = 0; n < report.pn_sfg.probs.size(); ++n) csv << n << ',' << num(report.pn_sfg.probs[n]) << '\n';
  write_file(pn_path, csv.str());

  out << "cascade: kappa=" << num(config.kappa) << " nbar_sfg=" << num(report.nbar_sfg)
      << " g2_sfg=" << num(report.g2_sfg) << " purity=" << num(report.purity_sfg)
      << " fidelity=" << num(report.fidelity_coherent) << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------- fringes

struct FringesArgs {
  double phi_start = 0.0;
  double phi_stop = 3.0 * std::numbers::pi;
  double phi_step = std::numbers::pi / 9.0;
  double rate_a = 344.4;
  double rate_b = 568.8;
  double dark = 202.9;
  double dwell = 0.1;
  double coherence_time = default_biphoton_coherence_time;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::string out = "scan.csv";
};

int cmd_fringes(const FringesArgs& args, std::ostream& out) {
  if (!(args.phi_step > 0.0) || !(args.phi_stop >= args.phi_start)) {
    throw UsageError("phase range needs --phi-step > 0 and --phi-stop >= --phi-start");
  }
  std::vector<double> phi;
  for (int i = 0;; ++i) {
    const double value = args.phi_start + i * args.phi_step;
    if (value > args.phi_stop + 1e-9 * args.phi_step) break;
    phi.push_back(value);
  }
  const double v_max = visibility_from_rates(args.rate_a, args.rate_b, args.dark);
  const FringeRates rates{args.rate_a - args.dark, args.rate_b - args.dark, args.dark};
  const auto jsa = EffectiveJSA::gaussian(angular_frequency(default_center_wavelength),
                                          EffectiveJSA::sigma_for_coherence_time(args.coherence_time));
  SpectralPhase phase;
  phase.beta = args.beta;
  const FringeScan scan = simulate_fringe_scan(jsa, phase, phi, rates, args.dwell, args.seed);

  const json resolved = {{"command", "fringes"},   {"phi_start", args.phi_start}, {"phi_stop", args.phi_stop},
                         {"phi_step", args.phi_step}, {"rate_a", args.rate_a},       {"rate_b", args.rate_b},
                         {"dark", args.dark},         {"dwell", args.dwell},         {"coherence_time", args.coherence_time},
                         {"beta", args.beta},         {"seed", args.seed}};

  std::ostringstream csv;
  csv << "# config: " << resolved.dump() << "\n";
  csv << "# fit_frequency: " << num(scan.fit_frequency) << "\n";
  csv << "# free_frequency: " << num(scan.free_frequency.frequency) << "\n";
  csv << "# free_frequency_error: " << num(scan.free_frequency.error) << "\n";
  csv << "# visibility: " << num(scan.visibility) << "\n";
  csv << "# visibility_raw: " << num(scan.visibility_raw) << "\n";
  csv << "# v_max: " << num(v_max) << "\n";
  csv << "# indistinguishability: " << num(scan.visibility / v_max) << "\n";
  csv << "phi,counts,error,fit\n";
  for (std::size_t i = 0; i < phi.size(); ++i) {
    csv << num(phi[i]) << ',' << num(scan.counts[i]) << ',' << num(scan.errors[i] * args.dwell) << ','
        << num(scan.fit[i] * args.dwell) << '\n';
  }
  write_file(resolve_output(args.out), csv.str());

  out << "fringes: points=" << phi.size() << " visibility=" << num(scan.visibility) << " v_max=" << num(v_max)
      << " free_frequency=" << num(scan.free_frequency.frequency) << "+-" << num(scan.free_frequency.error) << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------- hbt-sim

struct HbtSimArgs {
  std::string source = "coherent";
  std::string pn;
  double rate = 55.0;
  double coherence_time = 1e-6;
  double duration = 3600.0;
  double efficiency = 1.0;
  double dark1 = 0.0;
  double dark2 = 0.0;
  double dead_time = 45e-9;
  double resolution = 10e-9;
  std::string format = "binary";
  std::uint64_t seed = 0;
  std::vector<std::string> out;
};

PhotonNumberDistribution load_photon_law(const std::string& path) {
  const std::string text = read_file(path);
  PhotonNumberDistribution pn;
  if (std::filesystem::path(path).extension() == ".csv") {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::format, "bad photon-number CSV line: " + line);
      pn.probs.push_back(std::stod(line.substr(comma + 1)));
    }
    return pn;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("cannot parse ") + path + ": " + e.what());
  }
  const json& probs = doc.is_object() ? doc.at("pn_sfg") : doc;
  pn.probs = probs.get<std::vector<double>>();
  if (doc.is_object() && doc.contains("pn_tail_tol")) pn.tail_tol = doc["pn_tail_tol"].get<double>();
  return pn;
}

int cmd_hbt_sim(const HbtSimArgs& args, std::ostream& out) {
  if (args.out.size() != 2) throw UsageError("--out expects two paths (one per detector)");
  SourceModel source;
  if (args.source == "coherent") {
    source.kind = SourceKind::coherent;
  } else if (args.source == "thermal") {
    source.kind = SourceKind::thermal;
  } else if (args.source == "bunched") {
    source.kind = SourceKind::bunched;
    if (args.pn.empty()) throw UsageError("--source bunched needs --pn");
    source.pn = load_photon_law(args.pn);
  } else {
    throw UsageError("--source must be coherent, thermal or bunched");
  }
  source.mean_rate = args.rate;
  source.coherence_time = args.coherence_time;

  DetectorModel d1{args.efficiency, args.dark1, args.dead_time, args.resolution};
  DetectorModel d2{args.efficiency, args.dark2, args.dead_time, args.resolution};
  const auto [s1, s2] = split_stream(source, d1, d2, args.duration, args.seed);

  const json resolved = {{"command", "hbt-sim"},     {"source", args.source},
                         {"pn", args.pn},            {"rate", args.rate},
                         {"coherence_time", args.coherence_time},
                         {"duration", args.duration}, {"efficiency", args.efficiency},
                         {"dark", {args.dark1, args.dark2}},
                         {"dead_time", args.dead_time}, {"resolution", args.resolution},
                         {"format", args.format},    {"seed", args.seed}};

  const TimeTagStream* streams[2] = {&s1, &s2};
  for (int ch = 0; ch < 2; ++ch) {
    const auto path = resolve_output(args.out[ch]);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    json meta = {{"config", resolved}, {"channel", ch + 1}, {"events", streams[ch]->timestamps.size()}};
    if (args.format == "binary") {
      write_ttag(path, *streams[ch]);
    } else if (args.format == "text") {
      write_ttag_text(path, *streams[ch], {"config: " + meta.dump()});
    } else {
      throw UsageError("--format must be binary or text");
    }
    write_file(path.string() + ".json", meta.dump(2) + "\n");
  }
  out << "hbt-sim: events=" << s1.timestamps.size() << "," << s2.timestamps.size() << " rates=" << num(s1.rate())
      << "," << num(s2.rate()) << " Hz\n";
  return exit_ok;
}

// ---------------------------------------------------------------- hbt-analyze

struct HbtAnalyzeArgs {
  std::string ch1;
  std::string ch2;
  double bin = default_bin_width;
  double tau_max = default_tau_max;
  std::string bg_window = "2e-7:5e-7";
  std::string out = "g2.csv";
};

int cmd_hbt_analyze(const HbtAnalyzeArgs& args, std::ostream& out) {
  const BackgroundWindow window = parse_window(args.bg_window);
  const TimeTagStream s1 = read_time_tags(args.ch1);
  const TimeTagStream s2 = read_time_tags(args.ch2);
  const CorrelationHistogram hist = normalize_g2(cross_correlate(s1, s2, args.bin, args.tau_max), window);
  const PeakStatistics peak = peak_statistics(hist);
  const std::size_t zero = hist.zero_bin();

  const json resolved = {{"command", "hbt-analyze"}, {"ch1", args.ch1}, {"ch2", args.ch2}, {"bin", args.bin},
                         {"tau_max", args.tau_max}, {"bg_window", {window.lo, window.hi}}};
  std::ostringstream csv;
  csv << "# config: " << resolved.dump() << "\n";
  csv << "# events: " << s1.timestamps.size() << "," << s2.timestamps.size() << "\n";
  csv << "# background: " << num(hist.background) << "\n";
  csv << "# background_error: " << num(hist.background_error) << "\n";
  csv << "# g2_zero: " << num(hist.g2[zero]) << "\n";
  csv << "# g2_zero_error: " << num(hist.g2_errors[zero]) << "\n";
  csv << "# peak_tau_ns: " << num(peak.tau * 1e9) << "\n";
  csv << "# peak_significance: " << num(peak.significance) << "\n";
  csv << "tau_ns,counts,error,g2,g2_error\n";
  for (std::size_t i = 0; i < hist.size(); ++i) {
    csv << num(hist.tau(i) * 1e9) << ',' << hist.counts[i] << ',' << num(hist.errors[i]) << ',' << num(hist.g2[i])
        << ',' << num(hist.g2_errors[i]) << '\n';
  }
  write_file(resolve_output(args.out), csv.str());

  out << "hbt-analyze: g2(0)=" << num(hist.g2[zero]) << "+-" << num(hist.g2_errors[zero])
      << " background=" << num(hist.background) << " peak_tau_ns=" << num(peak.tau * 1e9)
      << " significance=" << num(peak.significance) << '\n';
  return exit_ok;
}

}  // namespace

std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(output_dir_env); dir != nullptr && *dir != '\0') {
      return std::filesystem::path(dir) / p;
    }
  }
  return p;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and analysis of up-converted down-converted light"};
  app.require_subcommand(1);

  CascadeArgs cascade;
  auto* c = app.add_subcommand("cascade", "squeezed vacuum -> SFG -> reduced SFG state statistics");
  c->add_option("--nbar-spdc", cascade.nbar_spdc, "mean photon number of the SPDC mode")->check(CLI::NonNegativeNumber);
  c->add_option("--target-nbar-sfg", cascade.target_nbar_sfg, "calibrate kappa to this SFG occupation")
      ->check(CLI::NonNegativeNumber);
  c->add_option("--kappa", cascade.kappa, "use this kappa instead of calibrating")->check(CLI::NonNegativeNumber);
  c->add_option("--dims", cascade.dims, "Fock dimensions SPDC,SFG");
  c->add_option("--zeta-phase", cascade.zeta_phase, "squeezing phase (rad)");
  c->add_option("--out", cascade.out, "report JSON path");
  c->add_option("--pn-out", cascade.pn_out, "p(n) CSV path (default: <out>_pn.csv)");

  FringesArgs fringes;
  auto* f = app.add_subcommand("fringes", "simulate and fit a phase scan of the interferometer");
  f->add_option("--phi-start", fringes.phi_start);
  f->add_option("--phi-stop", fringes.phi_stop);
  f->add_option("--phi-step", fringes.phi_step);
  f->add_option("--rate-a", fringes.rate_a, "raw rate of the up-conversion arm (Hz)");
  f->add_option("--rate-b", fringes.rate_b, "raw rate of the pump arm (Hz)");
  f->add_option("--dark", fringes.dark, "dark count rate (Hz)");
  f->add_option("--dwell", fringes.dwell, "acquisition time per point (s)")->check(CLI::PositiveNumber);
  f->add_option("--coherence-time", fringes.coherence_time, "biphoton coherence time (s)")->check(CLI::PositiveNumber);
  f->add_option("--beta", fringes.beta, "quadratic spectral phase (s^2)");
  f->add_option("--seed", fringes.seed)->required();
  f->add_option("--out", fringes.out, "scan CSV path");

  HbtSimArgs sim;
  auto* s = app.add_subcommand("hbt-sim", "simulate two detector time-tag streams behind a 50/50 splitter");
  s->add_option("--source", sim.source, "coherent | thermal | bunched");
  s->add_option("--pn", sim.pn, "photon-number law (cascade JSON, JSON array or n,p_n CSV)");
  s->add_option("--rate", sim.rate, "total source photon rate before the splitter (Hz)")->check(CLI::NonNegativeNumber);
  s->add_option("--coherence-time", sim.coherence_time, "slot length (s)")->check(CLI::PositiveNumber);
  s->add_option("--duration", sim.duration, "acquisition time (s)")->check(CLI::PositiveNumber);
  s->add_option("--efficiency", sim.efficiency)->check(CLI::Range(0.0, 1.0));
  s->add_option("--dark1", sim.dark1, "dark rate detector 1 (Hz)")->check(CLI::NonNegativeNumber);
  s->add_option("--dark2", sim.dark2, "dark rate detector 2 (Hz)")->check(CLI::NonNegativeNumber);
  s->add_option("--dead-time", sim.dead_time)->check(CLI::NonNegativeNumber);
  s->add_option("--resolution", sim.resolution)->check(CLI::PositiveNumber);
  s->add_option("--format", sim.format, "binary | text");
  s->add_option("--seed", sim.seed)->required();
  s->add_option("--out", sim.out, "two output paths")->expected(2)->required();

  HbtAnalyzeArgs analyze;
  auto* a = app.add_subcommand("hbt-analyze", "cross-correlate two time-tag files into g2(tau)");
  a->add_option("ch1", analyze.ch1)->required();
  a->add_option("ch2", analyze.ch2)->required();
  a->add_option("--bin", analyze.bin)->check(CLI::PositiveNumber);
  a->add_option("--tau-max", analyze.tau_max)->check(CLI::PositiveNumber);
  a->add_option("--bg-window", analyze.bg_window, "background |tau| window LO:HI (s)");
  a->add_option("--out", analyze.out, "g2 CSV path");

  ReproduceOptions repro;
  auto* r = app.add_subcommand("reproduce", "regression run over the reference configurations");
  r->add_option("--seed", repro.seed)->required();
  r->add_option("--kappa-scale", repro.kappa_scale, "multiply the cascade kappa (sensitivity check)")
      ->check(CLI::PositiveNumber);
  r->add_option("--out", repro.out, "optional JSON bundle");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: usage_error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (c->parsed()) return cmd_cascade(cascade, out);
    if (f->parsed()) return cmd_fringes(fringes, out);
    if (s->parsed()) return cmd_hbt_sim(sim, out);
    if (a->parsed()) return cmd_hbt_analyze(analyze, out);
    if (r->parsed()) return reproduce_reference(repro, out) ? exit_ok : exit_failure;
  } catch (const UsageError& e) {
    err << "error: usage_error: " << e.what() << '\n';
    return exit_usage;
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::config:
      case ErrorCode::invalid_dimension:
      case ErrorCode::invalid_rate:
        return exit_usage;
      default:
        return exit_failure;
    }
  } catch (const std::exception& e) {
    err << "error: internal_error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace upconv::cli
