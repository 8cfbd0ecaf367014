#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include <ddlti/ddlti.hpp>

namespace ddctl {

// Raised for anything the user can fix in the config or on the command line.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NRange {
  int lo = 6;
  int hi = 6;
  bool single() const { return lo == hi; }
};

NRange parse_n_range(const std::string& text, const std::string& field);

struct SimulationConfig {
  int steps = 200;
  ddlti::Vector x0;            // plant initial state; zero when empty
  std::string init = "true";   // true | zero | constant
  ddlti::Vector init_level;    // output level for the constant initialization
  ddlti::Vector y_ref;         // zero when empty
  ddlti::NoiseSpec noise;      // online measurement noise
};

struct DobConfig {
  double command = 1.0;
  double amplitude = 0.5;
  double frequency = 0.02;
  bool exact_init = false;
};

struct RunConfig {
  std::string plant_name;                    // empty when the plant is given as matrices or absent
  std::optional<ddlti::StateSpace> plant;    // discrete-time
  ddlti::DataSetup data;
  std::optional<std::string> data_file;
  NRange N;
  int L = 2;
  std::optional<double> tol;                 // default tolerance when empty
  std::string method = "pinv";               // pinv | ginverse
  std::uint64_t ginverse_seed = 1;
  bool drop_feedthrough = false;             // zero the fitted b_N before use
  ddlti::LQRWeights weights;                 // empty means identity; 1 x 1 means a multiple of identity
  SimulationConfig sim;
  DobConfig dob;

  const ddlti::StateSpace& require_plant(const std::string& why) const;
  int inputs() const;
  int outputs() const;
  ddlti::LQRWeights resolve_weights(int m, int p) const;
};

// Parses a JSON document (comments allowed); unknown keys are rejected.
RunConfig load_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Effective configuration in canonical form, used for the manifest and its hash.
nlohmann::ordered_json to_json(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace ddctl
