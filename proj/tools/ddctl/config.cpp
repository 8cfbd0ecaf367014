#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ddctl {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError("unknown field '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <typename T>
T get(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + field + "' has the wrong type");
  }
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError("field '" + field + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ConfigError("field '" + field + "' must be an integer");
  return j.get<int>();
}

ddlti::Vector vector(const json& j, const std::string& field) {
  const auto v = get<std::vector<double>>(j, field);
  return Eigen::Map<const ddlti::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ddlti::Matrix matrix(const json& j, const std::string& field) {
  const auto rows = get<std::vector<std::vector<double>>>(j, field);
  if (rows.empty()) return {};
  ddlti::Matrix M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("field '" + field + "' is a ragged matrix");
    for (std::size_t k = 0; k < rows[i].size(); ++k) M(i, k) = rows[i][k];
  }
  return M;
}

ddlti::Matrix weight(const json& j, const std::string& field) {
  if (j.is_number()) return ddlti::Matrix::Constant(1, 1, j.get<double>());
  return matrix(j, field);
}

ddlti::Matrix expand(const ddlti::Matrix& W, int size) {
  if (W.size() == 0) return ddlti::Matrix::Identity(size, size);
  if (W.size() == 1 && size != 1) return W(0, 0) * ddlti::Matrix::Identity(size, size);
  return W;
}

ordered_json vector_json(const ddlti::Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

ordered_json matrix_json(const ddlti::Matrix& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index k = 0; k < M.cols(); ++k) r[static_cast<std::size_t>(k)] = M(i, k);
    rows.push_back(r);
  }
  return rows;
}

void load_plant(const json& j, RunConfig& cfg) {
  if (j.is_string()) {
    cfg.plant_name = j.get<std::string>();
    try {
      cfg.plant = ddlti::plant_by_name(cfg.plant_name).discrete();
    } catch (const ddlti::Error&) {
      throw ConfigError("field 'plant' names an unknown plant '" + cfg.plant_name + "'");
    }
    return;
  }
  check_keys(j, "plant", {"A", "B", "C", "D", "Ts", "continuous"});
  for (const char* k : {"A", "B", "C"})
    if (!j.contains(k)) throw ConfigError(std::string("missing field 'plant.") + k + "'");
  ddlti::StateSpace ss{matrix(j["A"], "plant.A"), matrix(j["B"], "plant.B"), matrix(j["C"], "plant.C"), {}};
  ss.D = j.contains("D") ? matrix(j["D"], "plant.D") : ddlti::Matrix::Zero(ss.C.rows(), ss.B.cols());
  try {
    ss.validate();
  } catch (const ddlti::Error& e) {
    throw ConfigError(std::string("field 'plant': ") + e.what());
  }
  const bool continuous = j.contains("continuous") && get<bool>(j["continuous"], "plant.continuous");
  if (continuous) {
    if (!j.contains("Ts")) throw ConfigError("missing field 'plant.Ts' for a continuous-time plant");
    const double Ts = number(j["Ts"], "plant.Ts");
    if (!(Ts > 0.0)) throw ConfigError("field 'plant.Ts' must be positive");
    cfg.plant = ddlti::Plant{"custom", ss, Ts}.discrete();
  } else {
    cfg.plant = ss;
  }
  cfg.plant_name.clear();
}

}  // namespace

NRange parse_n_range(const std::string& text, const std::string& field) {
  NRange r;
  const auto colon = text.find(':');
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      r.lo = r.hi = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing");
    } else {
      const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
      r.lo = std::stoi(a, &used);
      if (used != a.size()) throw std::invalid_argument("trailing");
      r.hi = std::stoi(b, &used);
      if (used != b.size()) throw std::invalid_argument("trailing");
    }
  } catch (const std::exception&) {
    throw ConfigError("field '" + field + "' must be INT or A:B, got '" + text + "'");
  }
  if (r.lo < 1 || r.hi < r.lo) throw ConfigError("field '" + field + "' must satisfy 1 <= A <= B");
  return r;
}

const ddlti::StateSpace& RunConfig::require_plant(const std::string& why) const {
  if (!plant) throw ConfigError("field 'plant' is required for " + why);
  return *plant;
}

int RunConfig::inputs() const { return plant ? plant->inputs() : 1; }
int RunConfig::outputs() const { return plant ? plant->outputs() : 1; }

ddlti::LQRWeights RunConfig::resolve_weights(int m, int p) const {
  const ddlti::LQRWeights w{expand(weights.Q, p), expand(weights.R, m)};
  if (w.Q.rows() != p || w.Q.cols() != p) throw ConfigError("field 'weights.Q' must be " + std::to_string(p) + " x " + std::to_string(p));
  if (w.R.rows() != m || w.R.cols() != m) throw ConfigError("field 'weights.R' must be " + std::to_string(m) + " x " + std::to_string(m));
  try {
    w.validate();
  } catch (const ddlti::Error& e) {
    throw ConfigError(std::string("field 'weights': ") + e.what());
  }
  return w;
}

RunConfig load_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.empty()) throw ConfigError("config must be a non-empty object");
  check_keys(j, "", {"plant", "data", "N", "L", "tol", "method", "ginverse_seed", "drop_feedthrough", "weights", "simulation", "dob"});
  RunConfig cfg;
  if (j.contains("plant")) load_plant(j["plant"], cfg);

  if (j.contains("data")) {
    const json& d = j["data"];
    check_keys(d, "data", {"length", "seed", "trajectories", "amplitude", "noise_sigma", "noise_seed", "file"});
    if (d.contains("length")) cfg.data.length = integer(d["length"], "data.length");
    if (d.contains("seed")) cfg.data.seed = get<std::uint64_t>(d["seed"], "data.seed");
    if (d.contains("trajectories")) cfg.data.trajectories = integer(d["trajectories"], "data.trajectories");
    if (d.contains("amplitude")) cfg.data.amplitude = number(d["amplitude"], "data.amplitude");
    if (d.contains("noise_sigma")) cfg.data.noise.sigma = number(d["noise_sigma"], "data.noise_sigma");
    if (d.contains("noise_seed")) cfg.data.noise.seed = get<std::uint64_t>(d["noise_seed"], "data.noise_seed");
    if (d.contains("file")) cfg.data_file = get<std::string>(d["file"], "data.file");
    if (cfg.data.length < 2) throw ConfigError("field 'data.length' must be at least 2");
    if (cfg.data.trajectories < 1) throw ConfigError("field 'data.trajectories' must be positive");
    if (!(cfg.data.amplitude > 0.0)) throw ConfigError("field 'data.amplitude' must be positive");
    if (cfg.data.noise.sigma < 0.0) throw ConfigError("field 'data.noise_sigma' must be non-negative");
  }
  if (j.contains("N")) {
    if (j["N"].is_number_integer())
      cfg.N = parse_n_range(std::to_string(j["N"].get<int>()), "N");
    else
      cfg.N = parse_n_range(get<std::string>(j["N"], "N"), "N");
  }
  if (j.contains("L")) {
    cfg.L = integer(j["L"], "L");
    if (cfg.L < 0) throw ConfigError("field 'L' must be non-negative");
  }
  if (j.contains("tol")) {
    if (j["tol"].is_string()) {
      if (j["tol"].get<std::string>() != "auto") throw ConfigError("field 'tol' must be \"auto\" or a number");
    } else {
      cfg.tol = number(j["tol"], "tol");
      if (!(*cfg.tol >= 0.0)) throw ConfigError("field 'tol' must be non-negative");
    }
  }
  if (j.contains("method")) {
    cfg.method = get<std::string>(j["method"], "method");
    if (cfg.method != "pinv" && cfg.method != "ginverse") throw ConfigError("field 'method' must be pinv or ginverse");
  }
  if (j.contains("ginverse_seed")) cfg.ginverse_seed = get<std::uint64_t>(j["ginverse_seed"], "ginverse_seed");
  if (j.contains("drop_feedthrough")) cfg.drop_feedthrough = get<bool>(j["drop_feedthrough"], "drop_feedthrough");

  if (j.contains("weights")) {
    const json& w = j["weights"];
    check_keys(w, "weights", {"Q", "R"});
    if (w.contains("Q")) cfg.weights.Q = weight(w["Q"], "weights.Q");
    if (w.contains("R")) cfg.weights.R = weight(w["R"], "weights.R");
  }
  if (cfg.plant) cfg.weights = cfg.resolve_weights(cfg.inputs(), cfg.outputs());

  if (j.contains("simulation")) {
    const json& s = j["simulation"];
    check_keys(s, "simulation", {"steps", "x0", "init", "init_level", "y_ref", "noise_sigma", "noise_seed"});
    if (s.contains("steps")) cfg.sim.steps = integer(s["steps"], "simulation.steps");
    if (s.contains("x0")) cfg.sim.x0 = vector(s["x0"], "simulation.x0");
    if (s.contains("init")) cfg.sim.init = get<std::string>(s["init"], "simulation.init");
    if (s.contains("init_level")) cfg.sim.init_level = vector(s["init_level"], "simulation.init_level");
    if (s.contains("y_ref")) cfg.sim.y_ref = vector(s["y_ref"], "simulation.y_ref");
    if (s.contains("noise_sigma")) cfg.sim.noise.sigma = number(s["noise_sigma"], "simulation.noise_sigma");
    if (s.contains("noise_seed")) cfg.sim.noise.seed = get<std::uint64_t>(s["noise_seed"], "simulation.noise_seed");
    if (cfg.sim.steps < 1) throw ConfigError("field 'simulation.steps' must be positive");
    if (cfg.sim.init != "true" && cfg.sim.init != "zero" && cfg.sim.init != "constant")
      throw ConfigError("field 'simulation.init' must be true, zero or constant");
    if (cfg.sim.noise.sigma < 0.0) throw ConfigError("field 'simulation.noise_sigma' must be non-negative");
  }
  if (cfg.plant && cfg.sim.x0.size() && cfg.sim.x0.size() != cfg.plant->states())
    throw ConfigError("field 'simulation.x0' must have one entry per plant state");
  if (cfg.sim.y_ref.size() && cfg.sim.y_ref.size() != cfg.outputs())
    throw ConfigError("field 'simulation.y_ref' must have one entry per output");
  if (cfg.sim.init_level.size() && cfg.sim.init_level.size() != cfg.outputs())
    throw ConfigError("field 'simulation.init_level' must have one entry per output");

  if (j.contains("dob")) {
    const json& d = j["dob"];
    check_keys(d, "dob", {"command", "amplitude", "frequency", "exact_init"});
    if (d.contains("command")) cfg.dob.command = number(d["command"], "dob.command");
    if (d.contains("amplitude")) cfg.dob.amplitude = number(d["amplitude"], "dob.amplitude");
    if (d.contains("frequency")) cfg.dob.frequency = number(d["frequency"], "dob.frequency");
    if (d.contains("exact_init")) cfg.dob.exact_init = get<bool>(d["exact_init"], "dob.exact_init");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  if (!cfg.plant_name.empty()) {
    j["plant"] = cfg.plant_name;
  } else if (cfg.plant) {
    j["plant"] = {{"A", matrix_json(cfg.plant->A)},
                  {"B", matrix_json(cfg.plant->B)},
                  {"C", matrix_json(cfg.plant->C)},
                  {"D", matrix_json(cfg.plant->D)}};
  }
  ordered_json d = {{"length", cfg.data.length},
                    {"seed", cfg.data.seed},
                    {"trajectories", cfg.data.trajectories},
                    {"amplitude", cfg.data.amplitude},
                    {"noise_sigma", cfg.data.noise.sigma},
                    {"noise_seed", cfg.data.noise.seed}};
  if (cfg.data_file) d["file"] = *cfg.data_file;
  j["data"] = d;
  j["N"] = cfg.N.single() ? std::to_string(cfg.N.lo) : std::to_string(cfg.N.lo) + ":" + std::to_string(cfg.N.hi);
  j["L"] = cfg.L;
  if (cfg.tol)
    j["tol"] = *cfg.tol;
  else
    j["tol"] = "auto";
  j["method"] = cfg.method;
  j["ginverse_seed"] = cfg.ginverse_seed;
  j["drop_feedthrough"] = cfg.drop_feedthrough;
  j["weights"] = {{"Q", matrix_json(cfg.weights.Q)}, {"R", matrix_json(cfg.weights.R)}};
  j["simulation"] = {{"steps", cfg.sim.steps},
                     {"x0", vector_json(cfg.sim.x0)},
                     {"init", cfg.sim.init},
                     {"init_level", vector_json(cfg.sim.init_level)},
                     {"y_ref", vector_json(cfg.sim.y_ref)},
                     {"noise_sigma", cfg.sim.noise.sigma},
                     {"noise_seed", cfg.sim.noise.seed}};
  j["dob"] = {{"command", cfg.dob.command},
              {"amplitude", cfg.dob.amplitude},
              {"frequency", cfg.dob.frequency},
              {"exact_init", cfg.dob.exact_init}};
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

}  // namespace ddctl
