#include "qvcz/commands.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qvcz/acceptance.hpp"
#include "qvcz/correlators.hpp"
#include "qvcz/field.hpp"
#include "qvcz/manifest.hpp"
#include "qvcz/oracle.hpp"
#include "qvcz/photonstats.hpp"
#include "qvcz/version.hpp"

namespace qvcz {

namespace {

std::string fd(double v) { return format_double(v); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

RunManifest begin_manifest(const PhysicalConfig& config,
                           const std::string& subcommand,
                           const nlohmann::json& options) {
  RunManifest m;
  m.tool_version = kVersion;
  m.timestamp = iso_timestamp_utc();
  m.subcommand = subcommand;
  m.config = config;
  m.derived = derive_params(config);
  m.argv = {subcommand, options.dump()};
  return m;
}

nlohmann::json scan_options_json(const ScanOptions& o) {
  nlohmann::json j;
  j["selectors"] = o.selectors;
  j["nu_min"] = o.nu_min;
  j["nu_max"] = o.nu_max;
  j["points"] = o.points;
  j["method"] = o.method;
  j["realizations"] = o.realizations;
  j["out_prefix"] = o.out_prefix;
  return j;
}

nlohmann::json photon_options_json(const PhotonDistOptions& o) {
  nlohmann::json j;
  j["selector"] = o.selector;
  j["nu"] = o.nu;
  j["cutoff"] = o.cutoff;
  j["method"] = o.method;
  j["realizations"] = o.realizations;
  j["out"] = o.out;
  return j;
}

nlohmann::json oracle_options_json(const OracleOptions& o) {
  nlohmann::json j;
  j["selectors"] = o.selectors;
  j["nu_values"] = o.nu_values;
  j["realizations"] = o.realizations;
  j["out"] = o.out;
  j["dump_field_path"] = o.dump_field_path;
  return j;
}

} // namespace

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

std::vector<std::string> cmd_scan_g2(const ScanOptions& options) {
  const PhysicalConfig& config = options.config;
  config.validate();
  if (options.method != "closed" && options.method != "quadrature" &&
      options.method != "mc" && options.method != "all") {
    throw std::invalid_argument("scan-g2: unknown method '" + options.method +
                                "'");
  }
  std::vector<PolSelector> selectors;
  for (const auto& name : options.selectors) {
    selectors.push_back(PolSelector::parse(name));
  }
  const auto grid = log_spaced_grid(options.nu_min, options.nu_max,
                                    options.points);

  // Monte Carlo planes are shared across selectors in one pass.
  std::vector<McPlaneResult> mc_results;
  if (options.method == "mc" || options.method == "all") {
    McRunConfig run;
    run.realization_count = options.realizations;
    run.seed = config.seed;
    run.nu_planes = grid;
    run.g2_selectors = selectors;
    run.threads = options.threads;
    mc_results = run_oracle(config, run);
  }

  std::vector<std::string> written;
  for (std::size_t si = 0; si < selectors.size(); ++si) {
    const PolSelector& sel = selectors[si];
    std::unique_ptr<CsvWriter> csv;
    if (options.method == "all") {
      csv = std::make_unique<CsvWriter>(std::vector<std::string>{
          "nu", "z_m", "selector", "g2_closed", "g2_quadrature",
          "quadrature_err", "g2_mc", "mc_stderr", "n_realizations"});
    } else if (options.method == "mc") {
      csv = std::make_unique<CsvWriter>(std::vector<std::string>{
          "nu", "z_m", "selector", "g2", "method", "err_estimate", "stderr",
          "n_realizations"});
    } else {
      csv = std::make_unique<CsvWriter>(std::vector<std::string>{
          "nu", "z_m", "selector", "g2", "method", "err_estimate"});
    }

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const double nu = grid[gi];
      const double z = z_from_nu(config, nu);
      if (options.method == "all") {
        const double closed =
            has_closed_form(sel) ? g2_closed_form(sel, nu)
                                 : std::numeric_limits<double>::quiet_NaN();
        double qerr = 0.0;
        const double quad = g2_quadrature(config, sel, nu, &qerr);
        const auto& est = mc_results[gi].g2[si];
        csv->add_row({fd(nu), fd(z), sel.name(), fd(closed), fd(quad),
                      fd(qerr), fd(est.value), fd(est.standard_error),
                      std::to_string(est.realization_count)});
      } else if (options.method == "mc") {
        const auto& est = mc_results[gi].g2[si];
        csv->add_row({fd(nu), fd(z), sel.name(), fd(est.value), "mc",
                      fd(est.standard_error), fd(est.standard_error),
                      std::to_string(est.realization_count)});
      } else if (options.method == "quadrature") {
        double qerr = 0.0;
        const double quad = g2_quadrature(config, sel, nu, &qerr);
        csv->add_row(
            {fd(nu), fd(z), sel.name(), fd(quad), "quadrature", fd(qerr)});
      } else {
        // closed where supported, quadrature otherwise (scan_curve policy)
        const auto curve = scan_curve(config, sel, {nu});
        const auto& pt = curve.points.front();
        if (pt.error) {
          throw std::runtime_error("scan-g2: " + *pt.error);
        }
        csv->add_row({fd(nu), fd(z), sel.name(), fd(pt.g2), pt.method,
                      fd(pt.err_estimate)});
      }
    }
    const std::string path = options.out_prefix + "_" + sel.name() + ".csv";
    csv->write(path);
    written.push_back(path);
  }

  RunManifest manifest =
      begin_manifest(config, "scan-g2", scan_options_json(options));
  manifest.outputs = written;
  for (const auto& path : written) {
    write_manifest(manifest_path_for(path), manifest);
  }
  return written;
}

std::vector<std::string> cmd_photon_dist(const PhotonDistOptions& options,
                                         std::ostream& log) {
  const PhysicalConfig& config = options.config;
  config.validate();
  const PolSelector sel = PolSelector::parse(options.selector);
  if (!sel.is_diagonal()) {
    throw std::invalid_argument(
        "photon-dist: selector " + sel.name() +
        " is off-diagonal; joint photon-number distributions are evaluated "
        "for diagonal selectors only (the photon-number dynamics of the "
        "multiphoton wavepackets are reported for HHHH and HVHV)");
  }
  if (options.method != "analytic" && options.method != "mc") {
    throw std::invalid_argument("photon-dist: unknown method '" +
                                options.method + "'");
  }

  const auto analytic = joint_photon_distribution(config, sel, options.nu,
                                                  options.cutoff);

  nlohmann::json meta;
  meta["selector"] = sel.name();
  meta["nu"] = options.nu;
  meta["z_m"] = z_from_nu(config, options.nu);
  meta["cutoff"] = options.cutoff;
  meta["method"] = options.method;

  std::vector<std::string> written;
  const JointPhotonDistribution* dist = &analytic;
  McDistribution mc;
  if (options.method == "mc") {
    McRunConfig run;
    run.realization_count = options.realizations;
    run.seed = config.seed;
    run.nu_planes = {options.nu};
    run.threads = options.threads;
    mc = mc_photon_distribution(run, config, sel, options.cutoff);
    dist = &mc.dist;
    const double tv = total_variation_distance(mc.dist, analytic);
    meta["n_realizations"] = options.realizations;
    meta["tv_distance_to_analytic"] = tv;
    log << "photon-dist: TV distance to analytic = " << tv << "\n";
  }
  meta["tail_mass"] = dist->tail_mass;
  log << "photon-dist: tail_mass = " << dist->tail_mass << "\n";

  std::vector<std::string> header = {"n1", "n2", "p", "g2_tilde"};
  if (options.method == "mc") header.push_back("p_stderr");
  CsvWriter csv(header);
  const double total = dist->p.sum();
  const auto m1 = dist->marginal1();
  const auto m2 = dist->marginal2();
  for (int n = 0; n <= options.cutoff; ++n) {
    for (int m = 0; m <= options.cutoff; ++m) {
      std::string tilde;
      if (m1[n] > 0.0 && m2[m] > 0.0) {
        tilde = fd((dist->p(n, m) / total) / ((m1[n] / total) * (m2[m] / total)));
      }
      std::vector<std::string> row = {std::to_string(n), std::to_string(m),
                                      fd(dist->p(n, m)), tilde};
      if (options.method == "mc") row.push_back(fd(mc.entry_stderr(n, m)));
      csv.add_row(row);
    }
  }
  csv.write(options.out);
  written.push_back(options.out);

  const std::string meta_path = options.out + ".meta.json";
  write_text_file(meta_path, meta.dump(2) + "\n");
  written.push_back(meta_path);

  RunManifest manifest =
      begin_manifest(config, "photon-dist", photon_options_json(options));
  manifest.outputs = written;
  write_manifest(manifest_path_for(options.out), manifest);
  return written;
}

std::vector<std::string> cmd_oracle(const OracleOptions& options,
                                    std::ostream& log) {
  const PhysicalConfig& config = options.config;
  config.validate();
  std::vector<PolSelector> selectors;
  for (const auto& name : options.selectors) {
    selectors.push_back(PolSelector::parse(name));
  }
  const auto entries =
      run_validation_matrix(config, selectors, options.nu_values,
                            options.realizations, config.seed);

  CsvWriter csv({"selector", "nu", "z_m", "g2_analytic", "g2_mc", "stderr",
                 "n_realizations", "z_score"});
  for (const auto& e : entries) {
    csv.add_row({e.selector, fd(e.nu), fd(z_from_nu(config, e.nu)),
                 fd(e.analytic), fd(e.mc_value), fd(e.mc_stderr),
                 std::to_string(options.realizations), fd(e.z_score)});
    log << "oracle: " << e.selector << " nu=" << e.nu << " z=" << e.z_score
        << "\n";
  }
  csv.write(options.out);
  std::vector<std::string> written = {options.out};

  if (!options.dump_field_path.empty()) {
    const auto field = sample_thermal_field(config, Pol::H, config.seed);
    write_field_binary(options.dump_field_path, field);
    written.push_back(options.dump_field_path);
    written.push_back(options.dump_field_path + ".json");
  }

  RunManifest manifest =
      begin_manifest(config, "oracle", oracle_options_json(options));
  manifest.outputs = written;
  write_manifest(manifest_path_for(options.out), manifest);
  return written;
}

std::vector<std::string> cmd_replay(const std::string& manifest_path,
                                    std::ostream& log) {
  const RunManifest manifest = load_manifest(manifest_path);
  if (manifest.argv.size() < 2) {
    throw std::invalid_argument("replay: manifest carries no options");
  }
  const nlohmann::json options = nlohmann::json::parse(manifest.argv[1]);
  const std::string& sub = manifest.subcommand;
  if (sub == "scan-g2") {
    ScanOptions o;
    o.config = manifest.config;
    o.selectors = options.at("selectors").get<std::vector<std::string>>();
    o.nu_min = options.at("nu_min").get<double>();
    o.nu_max = options.at("nu_max").get<double>();
    o.points = options.at("points").get<int>();
    o.method = options.at("method").get<std::string>();
    o.realizations = options.at("realizations").get<std::uint64_t>();
    o.out_prefix = options.at("out_prefix").get<std::string>();
    return cmd_scan_g2(o);
  }
  if (sub == "photon-dist") {
    PhotonDistOptions o;
    o.config = manifest.config;
    o.selector = options.at("selector").get<std::string>();
    o.nu = options.at("nu").get<double>();
    o.cutoff = options.at("cutoff").get<int>();
    o.method = options.at("method").get<std::string>();
    o.realizations = options.at("realizations").get<std::uint64_t>();
    o.out = options.at("out").get<std::string>();
    return cmd_photon_dist(o, log);
  }
  if (sub == "oracle") {
    OracleOptions o;
    o.config = manifest.config;
    o.selectors = options.at("selectors").get<std::vector<std::string>>();
    o.nu_values = options.at("nu_values").get<std::vector<double>>();
    o.realizations = options.at("realizations").get<std::uint64_t>();
    o.out = options.at("out").get<std::string>();
    o.dump_field_path = options.at("dump_field_path").get<std::string>();
    return cmd_oracle(o, log);
  }
  throw std::invalid_argument("replay: unknown subcommand '" + sub + "'");
}

int cmd_validate(const PhysicalConfig& config, std::ostream& log) {
  const AcceptanceReport report = run_acceptance(config, log);
  return report.all_passed() ? 0 : 3;
}

} // namespace qvcz
