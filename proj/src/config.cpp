#include "qvcz/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qvcz/errors.hpp"

namespace qvcz {

void PhysicalConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("config: ") + name +
                                  " must be strictly positive and finite");
    }
  };
  positive(wavelength_m, "wavelength_m");
  positive(grating_width_m, "grating_width_m");
  positive(pixel_size_m, "pixel_size_m");
  positive(coherence_area_m2, "coherence_area_m2");
  positive(alpha_mag, "alpha_mag");
  positive(detector_separation_m, "detector_separation_m");
  positive(propagation_distance_m, "propagation_distance_m");

  const double coherence_length = std::sqrt(coherence_area_m2);
  if (coherence_length > pixel_size_m) {
    throw std::invalid_argument(
        "config: sqrt(coherence_area_m2) must not exceed pixel_size_m");
  }
  if (pixel_size_m > grating_width_m) {
    throw std::invalid_argument(
        "config: pixel_size_m must not exceed grating_width_m");
  }
  if (propagation_distance_m / wavelength_m < 1e3) {
    throw std::invalid_argument(
        "config: propagation_distance_m/wavelength_m below 1e3, paraxial "
        "model invalid");
  }
}

bool PhysicalConfig::paraxial_marginal() const {
  return propagation_distance_m / wavelength_m < 1e5;
}

DerivedParams derive_params(const PhysicalConfig& config) {
  config.validate();
  DerivedParams out;
  out.n_bar = std::numbers::pi * config.coherence_area_m2 /
              (config.pixel_size_m * config.pixel_size_m);
  out.wavenumber = 2.0 * std::numbers::pi / config.wavelength_m;
  const double a2 = config.alpha_mag * config.alpha_mag;
  const double l2 = config.grating_width_m * config.grating_width_m;
  out.intensity_i0 = std::numbers::pi * std::numbers::pi *
                     config.coherence_area_m2 * config.coherence_area_m2 *
                     a2 * a2 / (l2 * l2);
  out.nu = config.grating_width_m * config.detector_separation_m /
           (config.wavelength_m * config.propagation_distance_m);
  return out;
}

double z_from_nu(const PhysicalConfig& config, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw std::invalid_argument("z_from_nu: nu must be strictly positive");
  }
  return config.grating_width_m * config.detector_separation_m /
         (config.wavelength_m * nu);
}

double g1_closed_form(const PhysicalConfig& config, double z) {
  const double a2 = config.alpha_mag * config.alpha_mag;
  const double sqrt_i0 = std::numbers::pi * config.coherence_area_m2 * a2 /
                         (config.grating_width_m * config.grating_width_m);
  return sqrt_i0 * config.grating_width_m /
         (2.0 * z * z * config.wavelength_m * config.wavelength_m);
}

namespace {

const std::set<std::string> kConfigKeys = {
    "wavelength_m",          "grating_width_m",
    "pixel_size_m",          "coherence_area_m2",
    "alpha_mag",             "detector_separation_m",
    "propagation_distance_m", "seed"};

} // namespace

PhysicalConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config: top level must be a JSON object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kConfigKeys.count(it.key())) {
      throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    }
  }
  for (const auto& key : kConfigKeys) {
    if (!j.contains(key)) {
      throw std::invalid_argument("config: missing key '" + key + "'");
    }
  }
  PhysicalConfig c;
  c.wavelength_m = j.at("wavelength_m").get<double>();
  c.grating_width_m = j.at("grating_width_m").get<double>();
  c.pixel_size_m = j.at("pixel_size_m").get<double>();
  c.coherence_area_m2 = j.at("coherence_area_m2").get<double>();
  c.alpha_mag = j.at("alpha_mag").get<double>();
  c.detector_separation_m = j.at("detector_separation_m").get<double>();
  c.propagation_distance_m = j.at("propagation_distance_m").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.validate();
  return c;
}

PhysicalConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("config: cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

std::string config_to_json(const PhysicalConfig& config) {
  nlohmann::json j;
  j["wavelength_m"] = config.wavelength_m;
  j["grating_width_m"] = config.grating_width_m;
  j["pixel_size_m"] = config.pixel_size_m;
  j["coherence_area_m2"] = config.coherence_area_m2;
  j["alpha_mag"] = config.alpha_mag;
  j["detector_separation_m"] = config.detector_separation_m;
  j["propagation_distance_m"] = config.propagation_distance_m;
  j["seed"] = config.seed;
  return j.dump(2);
}

} // namespace qvcz
