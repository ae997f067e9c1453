#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "upconv");
  std::ostringstream out;
  std::ostringstream err;
  const int status = upconv::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Points the output directory at a fresh temporary folder for one test.
struct OutputDir {
  fs::path path;
  OutputDir() {
    path = fs::temp_directory_path() / ("upconv_cli_" + std::to_string(std::rand()));
    fs::create_directories(path);
    setenv(upconv::cli::output_dir_env, path.c_str(), 1);
  }
  ~OutputDir() {
    unsetenv(upconv::cli::output_dir_env);
    fs::remove_all(path);
  }
};

std::string header_value(const std::string& csv, const std::string& key) {
  std::istringstream in(csv);
  std::string line;
  const std::string prefix = "# " + key + ": ";
  while (std::getline(in, line)) {
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("cascade report") {
    OutputDir dir;
    const auto r = run({"cascade", "--out", "report.json"});
    REQUIRE(r.status == 0);
    CHECK(r.out.find("g2_sfg=") != std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(dir.path / "report.json"));
    CHECK(std::abs(doc["g2_sfg"].get<double>() - 11.3) < 0.1);
    CHECK(doc["config"]["nbar_spdc"].get<double>() == 0.1);
    CHECK(doc["kappa_source"] == "calibrated");
    const auto pn = slurp(dir.path / "report_pn.csv");
    CHECK(pn.rfind("# config: ", 0) == 0);

    const std::string first = slurp(dir.path / "report.json");
    REQUIRE(run({"cascade", "--out", "report.json"}).status == 0);
    CHECK(slurp(dir.path / "report.json") == first);
  }

  TEST_CASE("cascade with given kappa") {
    OutputDir dir;
    REQUIRE(run({"cascade", "--kappa", "8.7715e-3", "--dims", "50,10", "--out", "k.json", "--pn-out", "k.csv"}).status ==
            0);
    const auto doc = nlohmann::json::parse(slurp(dir.path / "k.json"));
    CHECK(doc["kappa"].get<double>() == 8.7715e-3);
    CHECK(fs::exists(dir.path / "k.csv"));
  }

  TEST_CASE("fringe scan") {
    OutputDir dir;
    const std::vector<std::string> args{"fringes", "--phi-start", "0",     "--phi-stop", "9.42", "--phi-step",
                                        "0.349",   "--rate-a",    "344.4", "--rate-b",   "568.8", "--dark",
                                        "202.9",   "--dwell",     "0.1",   "--seed",     "5",     "--out",
                                        "scan.csv"};
    REQUIRE(run(args).status == 0);
    const auto csv = slurp(dir.path / "scan.csv");
    CHECK(std::abs(std::stod(header_value(csv, "v_max")) - 0.897) < 1e-3);
    CHECK(csv.find("phi,counts,error,fit\n") != std::string::npos);
    CHECK(header_value(csv, "config").find("\"seed\":5") != std::string::npos);
    REQUIRE(run(args).status == 0);
    CHECK(slurp(dir.path / "scan.csv") == csv);
  }

  TEST_CASE("hbt round trip on coherent light") {
    OutputDir dir;
    for (const std::string format : {"binary", "text"}) {
      REQUIRE(run({"hbt-sim", "--source", "coherent", "--rate", "4000", "--duration", "200", "--seed", "3",
                   "--format", format, "--out", "a.ttag", "b.ttag"})
                  .status == 0);
      CHECK(fs::exists(dir.path / "a.ttag.json"));
      const auto r = run({"hbt-analyze", (dir.path / "a.ttag").string(), (dir.path / "b.ttag").string(), "--bin",
                          "10e-9", "--tau-max", "5e-7", "--bg-window", "2e-7:5e-7", "--out", "g2.csv"});
      REQUIRE(r.status == 0);
      const auto csv = slurp(dir.path / "g2.csv");
      CHECK(csv.find("tau_ns,counts,error,g2,g2_error\n") != std::string::npos);
      const double g0 = std::stod(header_value(csv, "g2_zero"));
      const double e0 = std::stod(header_value(csv, "g2_zero_error"));
      CHECK(std::abs(g0 - 1.0) < 4.0 * e0);
    }
  }

  TEST_CASE("bunched source from a cascade report") {
    OutputDir dir;
    REQUIRE(run({"cascade", "--out", "c.json"}).status == 0);
    const auto r = run({"hbt-sim", "--source", "bunched", "--pn", (dir.path / "c.json").string(), "--rate", "55",
                        "--coherence-time", "1e-6", "--duration", "60", "--seed", "1", "--out", "x.ttag", "y.ttag"});
    CHECK(r.status == 0);
    const auto bad = run({"hbt-sim", "--source", "bunched", "--pn", (dir.path / "c_pn.csv").string(), "--rate", "5e6",
                          "--coherence-time", "1e-6", "--duration", "1", "--seed", "1", "--out", "x.ttag", "y.ttag"});
    CHECK(bad.status == 2);
    CHECK(bad.err.find("config_error") != std::string::npos);
  }

  TEST_CASE("usage errors exit with status 2") {
    CHECK(run({}).status == 2);
    CHECK(run({"nonsense"}).status == 2);
    CHECK(run({"fringes", "--out", "x.csv"}).status == 2);  // missing --seed
    CHECK(run({"hbt-sim", "--out", "a"}).status == 2);
    CHECK(run({"cascade", "--dims", "50"}).status == 2);
    CHECK(run({"cascade", "--dims", "1,10"}).status == 2);
    const auto r = run({"fringes", "--rate-a", "100", "--seed", "1"});
    CHECK(r.status == 2);
    CHECK(r.err.find("invalid_rate") != std::string::npos);
    CHECK(run({"hbt-analyze", "a", "b", "--bg-window", "oops"}).status == 2);
  }

  TEST_CASE("runtime failures exit with status 1") {
    OutputDir dir;
    const auto r = run({"hbt-analyze", "/nonexistent/a.ttag", "/nonexistent/b.ttag"});
    CHECK(r.status == 1);
    CHECK(r.err.find("io_error") != std::string::npos);
    CHECK(run({"cascade", "--target-nbar-sfg", "0.5"}).status == 1);
  }
}
