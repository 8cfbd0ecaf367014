#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <ddlti/ddlti.hpp>

#include "commands.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ddctl::ConfigError(field + ": cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw ddctl::ConfigError("--out: cannot write '" + path.string() + "'");
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ", ") + i;
  return s;
}

int run(int argc, char** argv) {
  CLI::App app{"Data-driven analysis and control of linear time-invariant systems from input-output data"};
  app.set_version_flag("--version", std::string("ddctl ") + DDCTL_VERSION);
  std::string command, demo, config_path, data_path, n_text, sweep_text, tol_text, out_dir;
  int L = 0;
  std::uint64_t seed = 0;
  app.add_option("command", command, "One of: " + join(ddctl::command_names()))->required();
  app.add_option("name", demo, "Demo name for the demo command: " + join(ddctl::demo_names()));
  app.add_option("--config", config_path, "JSON configuration file (comments allowed)");
  auto* data_opt = app.add_option("--data", data_path, "Trajectory CSV with columns u..., y...");
  auto* n_opt = app.add_option("--N", n_text, "Window length INT or range A:B");
  auto* sweep_opt = app.add_option("--sweep", sweep_text, "Window range A:B for sweeps and demos");
  auto* l_opt = app.add_option("--L", L, "Inversion delay");
  auto* tol_opt = app.add_option("--tol", tol_text, "Singular value cutoff: auto or a number");
  auto* seed_opt = app.add_option("--seed", seed, "Data seed");
  app.add_option("--out", out_dir, "Output directory; the primary table goes to stdout when omitted");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  ddctl::Invocation inv;
  inv.command = command;
  inv.demo = demo;
  std::vector<ddctl::Output> inputs;
  if (command == "demo") {
    if (demo.empty()) throw ddctl::ConfigError("demo requires a name: " + join(ddctl::demo_names()));
    if (!config_path.empty()) throw ddctl::ConfigError("--config is not used by demos");
  } else if (!demo.empty()) {
    throw ddctl::ConfigError("unexpected argument '" + demo + "'");
  }
  if (!config_path.empty()) {
    const std::string text = read_file(config_path, "--config");
    inv.cfg = ddctl::load_config(text);
    inputs.push_back({config_path, text});
  }
  if (*n_opt) inv.overrides.N = ddctl::parse_n_range(n_text, "--N");
  if (*sweep_opt) inv.overrides.N = ddctl::parse_n_range(sweep_text, "--sweep");
  if (*l_opt) {
    if (L < 0) throw ddctl::ConfigError("--L must be non-negative");
    inv.overrides.L = L;
  }
  if (*tol_opt) {
    if (tol_text == "auto") {
      inv.overrides.tol_auto = true;
    } else {
      try {
        inv.overrides.tol = ddlti::parse_double(tol_text, "--tol");
      } catch (const ddlti::Error& e) {
        throw ddctl::ConfigError(e.what());
      }
      if (!(*inv.overrides.tol >= 0.0)) throw ddctl::ConfigError("--tol must be non-negative");
    }
  }
  if (*seed_opt) inv.overrides.seed = seed;
  if (*data_opt) {
    inputs.push_back({data_path, read_file(data_path, "--data")});
    inv.overrides.data = data_path;
  } else if (inv.cfg.data_file) {
    inputs.push_back({*inv.cfg.data_file, read_file(*inv.cfg.data_file, "field 'data.file'")});
  }

  const ddctl::CommandResult result = ddctl::run_command(inv);
  if (out_dir.empty()) {
    std::cout << result.outputs.front().content;
    return 0;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ddctl::ConfigError("--out: cannot create '" + out_dir + "': " + ec.message());
  for (const ddctl::Output& o : result.outputs) write_file(std::filesystem::path(out_dir) / o.name, o.content);
  write_file(std::filesystem::path(out_dir) / "manifest.json", ddctl::manifest(inv, result, inputs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ddctl::ConfigError& e) {
    std::cerr << "ddctl: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ddlti::Error& e) {
    std::cerr << "ddctl: " << e.what() << "\n";
    return ddlti::is_numerical(e.code()) ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "ddctl: internal error: " << e.what() << "\n";
    return 1;
  }
}
