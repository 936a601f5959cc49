#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qvcz/commands.hpp"
#include "qvcz/config.hpp"
#include "qvcz/manifest.hpp"

using namespace qvcz;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const char* bin = std::getenv("QVCZ_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("csv writer composes stable rows") {
  CsvWriter csv({"a", "b"});
  csv.add_row({"1", "2"});
  csv.add_row({"x", format_double(0.125)});
  CHECK(csv.text() == "a,b\n1,2\nx,0.125\n");
  CHECK_THROWS_AS(csv.add_row({"only-one"}), std::logic_error);
}

TEST_CASE("manifest round trips through JSON") {
  RunManifest m;
  m.timestamp = "2026-08-08T00:00:00Z";
  m.subcommand = "scan-g2";
  m.argv = {"scan-g2", "{}"};
  m.config = PhysicalConfig{};
  m.derived = derive_params(m.config);
  m.outputs = {"a.csv", "b.csv"};
  const auto parsed = RunManifest::from_json(m.to_json());
  CHECK(parsed.subcommand == "scan-g2");
  CHECK(parsed.outputs == m.outputs);
  CHECK(parsed.config.wavelength_m == m.config.wavelength_m);
  CHECK(parsed.config.seed == m.config.seed);
}

TEST_CASE("scan command writes one csv per selector plus manifests") {
  const auto dir = fresh_dir("qvcz_test_scan");
  ScanOptions o;
  o.config = PhysicalConfig{};
  o.selectors = {"VHHV", "HHVV"};
  o.points = 8;
  o.out_prefix = (dir / "scan").string();
  const auto files = cmd_scan_g2(o);
  REQUIRE(files.size() == 2);
  for (const auto& f : files) {
    const std::string text = read_file(f);
    CHECK(text.rfind("nu,z_m,selector,g2,method,err_estimate\n", 0) == 0);
    CHECK(fs::exists(manifest_path_for(f)));
    // every emitted sub-shot-noise value stays below one
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line); // header
    int rows = 0;
    while (std::getline(lines, line)) {
      const auto first = line.find(',');
      const auto second = line.find(',', first + 1);
      const auto third = line.find(',', second + 1);
      const double g2 = std::stod(line.substr(third + 1));
      CHECK(g2 < 1.0);
      ++rows;
    }
    CHECK(rows == 8);
  }
}

TEST_CASE("single-point scan produces a single row") {
  const auto dir = fresh_dir("qvcz_test_scan1");
  ScanOptions o;
  o.config = PhysicalConfig{};
  o.selectors = {"HHHH"};
  o.nu_min = 0.5;
  o.nu_max = 4.0;
  o.points = 1;
  o.out_prefix = (dir / "one").string();
  const auto files = cmd_scan_g2(o);
  const std::string text = read_file(files.front());
  CHECK(std::count(text.begin(), text.end(), '\n') == 2); // header + 1 row
}

TEST_CASE("photon-dist emits the distribution table with metadata") {
  const auto dir = fresh_dir("qvcz_test_dist");
  PhotonDistOptions o;
  o.config = PhysicalConfig{};
  o.nu = 0.5;
  o.cutoff = 20;
  o.out = (dir / "d.csv").string();
  std::ostringstream log;
  const auto files = cmd_photon_dist(o, log);
  REQUIRE(files.size() == 2);
  const std::string text = read_file(files[0]);
  CHECK(text.rfind("n1,n2,p,g2_tilde\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 21 * 21);
  const std::string meta = read_file(files[1]);
  CHECK(meta.find("\"tail_mass\"") != std::string::npos);
  CHECK(meta.find("\"selector\": \"HHHH\"") != std::string::npos);
  CHECK(log.str().find("tail_mass") != std::string::npos);

  SUBCASE("off-diagonal selector is rejected with the restriction named") {
    o.selector = "VHHV";
    try {
      (void)cmd_photon_dist(o, log);
      FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      CHECK(msg.find("diagonal") != std::string::npos);
      CHECK(msg.find("HVHV") != std::string::npos);
    }
  }
}

TEST_CASE("method=all emits side-by-side columns that agree") {
  const auto dir = fresh_dir("qvcz_test_all");
  ScanOptions o;
  o.config = PhysicalConfig{};
  o.selectors = {"HHHH"};
  o.nu_min = 0.3;
  o.nu_max = 1.2;
  o.points = 3;
  o.method = "all";
  o.realizations = 500;
  o.out_prefix = (dir / "all").string();
  const auto files = cmd_scan_g2(o);
  const std::string text = read_file(files.front());
  CHECK(text.rfind("nu,z_m,selector,g2_closed,g2_quadrature,quadrature_err,"
                   "g2_mc,mc_stderr,n_realizations\n",
                   0) == 0);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    std::vector<std::string> f;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) f.push_back(cell);
    REQUIRE(f.size() == 9);
    const double closed = std::stod(f[3]);
    const double quad = std::stod(f[4]);
    CHECK(std::abs(closed - quad) <= 1e-4 * std::max(1.0, std::abs(closed)));
  }
}

TEST_CASE("library-level replay reproduces outputs bitwise") {
  const auto dir = fresh_dir("qvcz_test_replay");
  PhotonDistOptions o;
  o.config = PhysicalConfig{};
  o.nu = 0.8;
  o.cutoff = 20;
  o.out = (dir / "replay.csv").string();
  std::ostringstream log;
  (void)cmd_photon_dist(o, log);
  const std::string before = read_file(o.out);
  (void)cmd_replay(manifest_path_for(o.out), log);
  CHECK(read_file(o.out) == before);
}

TEST_CASE("cli end to end") {
  const char* bin = std::getenv("QVCZ_BIN");
  if (bin == nullptr) {
    MESSAGE("QVCZ_BIN not set; skipping binary-level checks");
    return;
  }
  const auto dir = fresh_dir("qvcz_test_cli");

  SUBCASE("version exits zero") { CHECK(run_cli("--version") == 0); }

  SUBCASE("scan, photon-dist, and replay") {
    const std::string prefix = (dir / "cli_scan").string();
    CHECK(run_cli("scan-g2 --selector HHHH --points 3 --out " + prefix) == 0);
    const fs::path csv = prefix + "_HHHH.csv";
    REQUIRE(fs::exists(csv));
    const std::string before = read_file(csv);

    CHECK(run_cli("replay " + manifest_path_for(csv.string())) == 0);
    CHECK(read_file(csv) == before);

    const std::string dist_out = (dir / "cli_dist.csv").string();
    CHECK(run_cli("photon-dist --nu 0.5 --cutoff 20 --out " + dist_out) == 0);
    CHECK(fs::exists(dist_out));
    CHECK(fs::exists(dist_out + ".meta.json"));
  }

  SUBCASE("bad config exits with code 2") {
    const fs::path cfg = dir / "bad.json";
    std::ofstream out(cfg);
    // sqrt(sigma) > d violates the coherence-cell invariant
    out << R"({"wavelength_m":7.8e-07,"grating_width_m":0.003,
      "pixel_size_m":1e-05,"coherence_area_m2":4e-10,"alpha_mag":0.775,
      "detector_separation_m":0.002,"propagation_distance_m":64.1,
      "seed":1})";
    out.close();
    CHECK(run_cli("--config " + cfg.string() + " scan-g2 --points 2") == 2);
  }

  SUBCASE("invalid selector exits with code 2") {
    CHECK(run_cli("scan-g2 --selector HXHY --points 2 --out " +
                  (dir / "x").string()) == 2);
  }

  SUBCASE("unwritable output exits with code 4") {
    CHECK(run_cli("photon-dist --nu 0.5 --cutoff 20 --out "
                  "/nonexistent_dir_qvcz/out.csv") == 4);
  }

  SUBCASE("insufficient cutoff exits with code 3") {
    CHECK(run_cli("photon-dist --nu 0.5 --cutoff 1 --out " +
                  (dir / "tail.csv").string()) == 3);
  }
}
