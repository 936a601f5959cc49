#include "qvcz/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <sstream>

#include "qvcz/commands.hpp"
#include "qvcz/correlators.hpp"
#include "qvcz/field.hpp"
#include "qvcz/fresnel.hpp"
#include "qvcz/manifest.hpp"
#include "qvcz/oracle.hpp"
#include "qvcz/photonstats.hpp"
#include "qvcz/rng.hpp"

namespace qvcz {

bool AcceptanceReport::all_passed() const {
  for (const auto& c : criteria) {
    if (!c.passed) return false;
  }
  return true;
}

namespace {

const std::vector<PolSelector> kListed = {kHHHH, kHVHV, kVHHV, kHHVV};
const double kLimits[4] = {26.0 / 16.0, 18.0 / 16.0, 6.0 / 16.0, 2.0 / 16.0};

/// Degenerate thermal/coherent test configuration: no grating, single
/// polarization, coarse coherence cells for fast sampling.
PhysicalConfig degenerate_config(const PhysicalConfig& base) {
  PhysicalConfig c = base;
  c.grating_width_m = 2e-3;
  c.pixel_size_m = 200e-6;
  c.coherence_area_m2 = 1.6e-9;
  c.propagation_distance_m = 10.0;
  return c;
}

struct Check {
  std::ostringstream detail;
  bool ok = true;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[FAIL " << what << "] ";
    }
  }
  void note(const std::string& what) { detail << what << " "; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

CriterionResult finish(int id, const std::string& name, Check& chk,
                       Clock::time_point t0, double time_limit,
                       std::ostream& log) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (time_limit > 0.0 && r.seconds >= time_limit) {
    chk.require(false, "runtime " + fmt(r.seconds) + "s exceeds " +
                           fmt(time_limit) + "s");
  }
  r.passed = chk.ok;
  r.detail = chk.detail.str();
  log << (r.passed ? "PASS" : "FAIL") << "  criterion " << id << " (" << name
      << ")  [" << fmt(r.seconds) << " s]  " << r.detail << "\n";
  log.flush();
  return r;
}

CriterionResult criterion1(const PhysicalConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  for (int s = 0; s < 4; ++s) {
    const double at_zero = g2_closed_form(kListed[s], 0.0);
    chk.require(std::abs(at_zero - kLimits[s]) <= 1e-9,
                kListed[s].name() + " limit " + fmt(at_zero));
    const double quad = g2_quadrature(config, kListed[s], 0.01);
    chk.require(std::abs(quad - kLimits[s]) <= 1e-3,
                kListed[s].name() + " quadrature(0.01) " + fmt(quad));
  }
  chk.note("limits 26/16, 18/16, 6/16, 2/16 reproduced");
  return finish(1, "closed-form small-nu limits", chk, t0, 10.0, log);
}

CriterionResult criterion2(const PhysicalConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  const auto grid = log_spaced_grid(0.1, 4.0, 20);
  double worst = 0.0;
  for (const auto& sel : kListed) {
    for (double nu : grid) {
      const double closed = g2_closed_form(sel, nu);
      const double quad = g2_quadrature(config, sel, nu);
      const double err = std::abs(closed) < 0.1
                             ? std::abs(quad - closed)
                             : std::abs(quad - closed) / std::abs(closed);
      worst = std::max(worst, err);
      chk.require(err <= 1e-4, sel.name() + "@" + fmt(nu) + " err " + fmt(err));
    }
  }
  chk.note("worst closed-vs-quadrature deviation " + fmt(worst));
  return finish(2, "closed form vs quadrature", chk, t0, 120.0, log);
}

CriterionResult criterion3(const PhysicalConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  const auto grid = log_spaced_grid(0.1, 4.0, 20);
  double worst_q = 0.0;
  for (const auto& sel : {kVHHV, kHHVV}) {
    for (double nu : grid) {
      const double quad = g2_quadrature(config, sel, nu);
      const double closed = g2_closed_form(sel, nu);
      worst_q = std::max(worst_q, std::max(quad, closed));
      chk.require(quad < 1.0, sel.name() + " quadrature " + fmt(quad));
      chk.require(closed < 1.0, sel.name() + " closed " + fmt(closed));
    }
  }
  McRunConfig run;
  run.realization_count = 10000;
  run.seed = config.seed ^ 0xd3a1ULL;
  run.nu_planes = grid;
  run.g2_selectors = {kVHHV, kHHVV};
  const auto res = run_oracle(config, run);
  double worst_margin = 1e9;
  for (const auto& plane : res) {
    for (const auto& est : plane.g2) {
      const double margin = (1.0 - est.value) / est.standard_error;
      worst_margin = std::min(worst_margin, margin);
      chk.require(margin >= 3.0, "mc margin " + fmt(margin) + " at nu " +
                                     fmt(plane.nu));
    }
  }
  chk.note("max value " + fmt(worst_q) + ", min MC margin " +
           fmt(worst_margin) + " SE");
  return finish(3, "sub-shot-noise below one", chk, t0, 0.0, log);
}

CriterionResult criterion4(const PhysicalConfig&, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  const double v[4] = {
      g2_closed_form(kHHHH, 50.0), g2_closed_form(kHVHV, 50.0),
      g2_closed_form(kVHHV, 50.0), g2_closed_form(kHHVV, 50.0)};
  chk.require(std::abs(v[0] - 1.0) <= 1e-3, "HHHH " + fmt(v[0]));
  chk.require(std::abs(v[1] - 1.0) <= 1e-3, "HVHV " + fmt(v[1]));
  chk.require(std::abs(v[2]) <= 1e-3, "VHHV " + fmt(v[2]));
  chk.require(std::abs(v[3]) <= 1e-3, "HHVV " + fmt(v[3]));
  chk.note("nu=50 asymptotics " + fmt(v[0]) + ", " + fmt(v[1]) + ", " +
           fmt(v[2]) + ", " + fmt(v[3]));
  return finish(4, "large-nu asymptotics", chk, t0, 0.0, log);
}

CriterionResult criterion5(const PhysicalConfig& base, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  const PhysicalConfig config = degenerate_config(base);
  const double mean = detector_mean_occupation(config);
  const int cutoff = 20;

  // Analytic path: the no-grating single-polarization marginal.
  const auto analytic = thermal_reference_distribution(mean, 1e-9, cutoff);
  const auto be = bose_einstein_marginal(mean, cutoff);
  const auto marg = analytic.marginal1();
  double tv = 0.0;
  for (int n = 0; n <= cutoff; ++n) tv += 0.5 * std::abs(marg[n] - be[n]);
  tv += 0.5 * analytic.tail_mass;
  chk.require(tv <= 1e-3, "analytic TV " + fmt(tv));
  const double g2_analytic = g2_self_from_distribution(marg);
  chk.require(std::abs(g2_analytic - 2.0) <= 0.01,
              "analytic g2 " + fmt(g2_analytic));

  // Monte Carlo path at 1e5 realizations.
  McRunConfig run;
  run.realization_count = 100000;
  run.seed = config.seed ^ 0xbe5ULL;
  run.nu_planes = {derive_params(config).nu};
  run.grating_enabled = false;
  run.single_polarization = true;
  run.detector1_x = 0.0;
  run.detector2_x = 0.0;
  run.g2_selectors = {kHHHH};
  run.dist_selectors = {kHHHH};
  run.cutoff = cutoff;
  const auto res = run_oracle(config, run);
  const auto& md = res[0].dists[0];
  const auto mc_marg = md.dist.marginal1();
  double worst_z = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    double se = 0.0;
    for (int m = 0; m <= cutoff; ++m) se += md.entry_stderr(n, m);
    if (se < 1e-12) se = 1e-12;
    const double zscore = std::abs(mc_marg[n] - be[n]) / se;
    worst_z = std::max(worst_z, zscore);
    chk.require(zscore <= 3.0, "marginal entry " + std::to_string(n) +
                                   " z " + fmt(zscore));
  }
  const auto& g2mc = res[0].g2[0];
  chk.require(std::abs(g2mc.value - 2.0) <= 0.01,
              "mc g2 " + fmt(g2mc.value) + " +- " + fmt(g2mc.standard_error));
  chk.note("TV " + fmt(tv) + ", analytic g2 " + fmt(g2_analytic) + ", mc g2 " +
           fmt(g2mc.value) + ", worst entry z " + fmt(worst_z));
  return finish(5, "thermal limit", chk, t0, 120.0, log);
}

CriterionResult criterion6(const PhysicalConfig& base, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  const PhysicalConfig config = degenerate_config(base);
  const double mean = detector_mean_occupation(config);
  const int cutoff = 20;

  const auto analytic = coherent_reference_distribution(mean, mean, cutoff);
  const auto po = poisson_marginal(mean, cutoff);
  const auto marg = analytic.marginal1();
  double worst = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    worst = std::max(worst, std::abs(marg[n] - po[n]));
  }
  chk.require(worst <= 1e-9, "analytic Poisson dev " + fmt(worst));
  const double g2_analytic = g2_self_from_distribution(marg);
  chk.require(std::abs(g2_analytic - 1.0) <= 1e-6,
              "analytic g2 " + fmt(g2_analytic));

  McRunConfig run;
  run.realization_count = 200;
  run.seed = config.seed ^ 0xc0fULL;
  run.nu_planes = {derive_params(config).nu};
  run.grating_enabled = false;
  run.single_polarization = true;
  run.frozen_field = true;
  run.g2_selectors = {kHHHH};
  run.dist_selectors = {kHHHH};
  run.cutoff = cutoff;
  const auto res = run_oracle(config, run);
  const auto& est = res[0].g2[0];
  chk.require(std::abs(est.value - 1.0) <=
                  3.0 * est.standard_error + 1e-9,
              "mc g2 " + fmt(est.value));
  const auto mc_marg = res[0].dists[0].dist.marginal1();
  double worst_mc = 0.0;
  for (int n = 0; n <= cutoff; ++n) {
    worst_mc = std::max(worst_mc, std::abs(mc_marg[n] - po[n]));
  }
  chk.require(worst_mc <= 1e-9, "mc Poisson dev " + fmt(worst_mc));
  chk.note("analytic g2 " + fmt(g2_analytic) + ", mc g2 " + fmt(est.value) +
           " (SE " + fmt(est.standard_error) + ")");
  return finish(6, "coherent limit", chk, t0, 0.0, log);
}

CriterionResult criterion7(const PhysicalConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  const int cutoff = 20;
  const std::vector<double> planes = {0.3, 1.0, 3.0};

  McRunConfig run;
  run.realization_count = 100000;
  run.seed = config.seed ^ 0x7e7ULL;
  run.nu_planes = planes;
  run.dist_selectors = {kHHHH, kHVHV};
  run.cutoff = cutoff;
  const auto res = run_oracle(config, run);

  double worst_tv = 0.0, worst_mom = 0.0;
  for (std::size_t pi = 0; pi < planes.size(); ++pi) {
    for (std::size_t si = 0; si < run.dist_selectors.size(); ++si) {
      const PolSelector& sel = run.dist_selectors[si];
      const auto analytic =
          joint_photon_distribution(config, sel, planes[pi], cutoff);
      const double tv =
          total_variation_distance(res[pi].dists[si].dist, analytic);
      worst_tv = std::max(worst_tv, tv);
      chk.require(tv <= 0.02, sel.name() + "@" + fmt(planes[pi]) + " TV " +
                                  fmt(tv));
      const double mom = g2_mutual_from_distribution(analytic);
      const double quad = g2_quadrature(config, sel, planes[pi]);
      const double dev = std::abs(mom - quad);
      worst_mom = std::max(worst_mom, dev);
      chk.require(dev <= 1e-3, sel.name() + "@" + fmt(planes[pi]) +
                                   " moment dev " + fmt(dev));
    }
  }
  chk.note("worst TV " + fmt(worst_tv) + ", worst moment dev " +
           fmt(worst_mom));
  return finish(7, "cross-module equivalence", chk, t0, 600.0, log);
}

CriterionResult criterion8(const PhysicalConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  Xoshiro256pp rng(config.seed ^ 0x8e8ULL);
  double worst_norm = 0.0;
  const double L = config.grating_width_m;
  for (int i = 0; i < 1000000; ++i) {
    const double x = (rng.next_unit() - 0.5) * 20.0 * L;
    const auto m = grating_matrix(x, L);
    for (Pol b : {Pol::H, Pol::V}) {
      const double norm = m(Port::H, b) * m(Port::H, b) +
                          m(Port::V, b) * m(Port::V, b) +
                          m(Port::Loss, b) * m(Port::Loss, b);
      worst_norm = std::max(worst_norm, std::abs(norm - 1.0));
    }
  }
  chk.require(worst_norm <= 1e-12, "column norm defect " + fmt(worst_norm));

  // Discrete Fresnel propagation energy conservation on both FFT paths.
  TransverseField field;
  field.n = 128;
  field.spacing = 2e-3 / field.n;
  field.half_width = 1e-3;
  field.samples.resize(static_cast<std::size_t>(field.n) * field.n);
  Xoshiro256pp frng(1234);
  for (auto& v : field.samples) {
    double a, b;
    frng.next_cnormal(a, b);
    v = {a, b};
  }
  const double e_in = field.total_energy();
  const double z_near = 0.03; // within N drho^2 / lambda = 0.04 m
  const auto near =
      propagate(field, z_near, config.wavelength_m, {},
                PropagationMethod::TransferFunction);
  const double near_dev = std::abs(near.total_energy() - e_in) / e_in;
  chk.require(near_dev <= 1e-6, "transfer energy dev " + fmt(near_dev));
  const auto far = propagate(field, 100.0, config.wavelength_m, {},
                             PropagationMethod::ScaledTransform);
  const double far_dev = std::abs(far.total_energy() - e_in) / e_in;
  chk.require(far_dev <= 1e-6, "scaled energy dev " + fmt(far_dev));
  chk.note("norm defect " + fmt(worst_norm) + ", energy devs " +
           fmt(near_dev) + " / " + fmt(far_dev));
  return finish(8, "energy conservation", chk, t0, 0.0, log);
}

CriterionResult criterion9(const PhysicalConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  const auto grid = log_spaced_grid(0.12, 2.0, 6);
  std::vector<JointPhotonDistribution> dists;
  std::vector<double> g2s;
  for (double nu : grid) {
    dists.push_back(joint_photon_distribution(config, kHHHH, nu, 20));
    g2s.push_back(g2_mutual_from_distribution(dists.back()));
  }
  for (std::size_t i = 1; i < g2s.size(); ++i) {
    chk.require(g2s[i] < g2s[i - 1], "monotonicity at plane " +
                                         std::to_string(i) + ": " +
                                         fmt(g2s[i - 1]) + " -> " +
                                         fmt(g2s[i]));
  }
  chk.require(g2s.back() >= 1.0 && g2s.back() <= 1.7,
              "largest-nu g2 " + fmt(g2s.back()));

  // Multiphoton wavepacket families: equal occupations relax downward,
  // strongly unequal ones upward.
  bool equal_down = true, unequal_up = true;
  for (const auto& [a, b] :
       std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {3, 3}}) {
    equal_down = equal_down && (multiphoton_g2_tilde(dists.front(), a, b) >
                                multiphoton_g2_tilde(dists.back(), a, b));
  }
  for (const auto& [a, b] :
       std::vector<std::pair<int, int>>{{0, 2}, {0, 3}, {0, 4}}) {
    unequal_up = unequal_up && (multiphoton_g2_tilde(dists.front(), a, b) <
                                multiphoton_g2_tilde(dists.back(), a, b));
  }
  chk.require(equal_down, "(n,n) family not decreasing");
  chk.require(unequal_up, "(n1!=n2) family not increasing");
  chk.note("g2 sequence " + fmt(g2s.front()) + " ... " + fmt(g2s.back()) +
           ", wavepacket slopes differ");
  return finish(9, "trend reproduction", chk, t0, 0.0, log);
}

CriterionResult criterion10(const PhysicalConfig& config, std::ostream& log) {
  const auto t0 = Clock::now();
  Check chk;
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / "qvcz_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  PhysicalConfig cfg = config;
  std::ostringstream devnull;

  ScanOptions scan;
  scan.config = cfg;
  scan.selectors = {"HHHH", "VHHV"};
  scan.points = 5;
  scan.method = "closed";
  scan.out_prefix = (dir / "scan").string();
  const auto scan_files = cmd_scan_g2(scan);

  PhotonDistOptions pd;
  pd.config = cfg;
  pd.nu = 0.5;
  pd.cutoff = 20;
  pd.out = (dir / "dist.csv").string();
  const auto pd_files = cmd_photon_dist(pd, devnull);

  OracleOptions orc;
  orc.config = cfg;
  orc.config.grating_width_m = 2e-3;
  orc.config.pixel_size_m = 200e-6;
  orc.config.coherence_area_m2 = 1.6e-9;
  orc.selectors = {"HHHH"};
  orc.nu_values = {0.5};
  orc.realizations = 500;
  orc.out = (dir / "oracle.csv").string();
  const auto orc_files = cmd_oracle(orc, devnull);

  // Snapshot, replay from manifests, compare bytes.
  std::vector<std::string> data_files;
  for (const auto& f : scan_files) data_files.push_back(f);
  for (const auto& f : pd_files) data_files.push_back(f);
  for (const auto& f : orc_files) data_files.push_back(f);

  std::vector<std::string> before;
  for (const auto& f : data_files) before.push_back(read_file(f));

  (void)cmd_replay(manifest_path_for(scan_files.front()), devnull);
  (void)cmd_replay(manifest_path_for(pd.out), devnull);
  (void)cmd_replay(manifest_path_for(orc.out), devnull);

  bool identical = true;
  for (std::size_t i = 0; i < data_files.size(); ++i) {
    if (read_file(data_files[i]) != before[i]) {
      identical = false;
      chk.require(false, "output differs after replay: " + data_files[i]);
    }
  }
  if (identical) {
    chk.note(std::to_string(data_files.size()) +
             " outputs reproduced bitwise from manifests");
  }
  fs::remove_all(dir);
  return finish(10, "manifest determinism", chk, t0, 0.0, log);
}

} // namespace

AcceptanceReport run_acceptance(const PhysicalConfig& config,
                                std::ostream& log,
                                const std::vector<int>& only) {
  using Criterion = CriterionResult (*)(const PhysicalConfig&, std::ostream&);
  const Criterion criteria[] = {criterion1, criterion2, criterion3,
                                criterion4, criterion5, criterion6,
                                criterion7, criterion8, criterion9,
                                criterion10};
  AcceptanceReport report;
  log << "acceptance: running criteria\n";
  for (int id = 1; id <= 10; ++id) {
    if (!only.empty() &&
        std::find(only.begin(), only.end(), id) == only.end()) {
      continue;
    }
    report.criteria.push_back(criteria[id - 1](config, log));
  }
  int passed = 0;
  for (const auto& c : report.criteria) passed += c.passed ? 1 : 0;
  log << "acceptance: " << passed << "/" << report.criteria.size()
      << " criteria passed\n";
  return report;
}

} // namespace qvcz
