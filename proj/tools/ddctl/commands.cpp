#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include <ddlti/ddlti.hpp>

#ifndef DDCTL_VERSION
#define DDCTL_VERSION "0.0.0"
#endif

namespace ddctl {

using namespace ddlti;
using nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) { return format_double(v); }

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::vector<std::string> channel_names(const std::string& prefix, int count) {
  if (count == 1) return {prefix};
  std::vector<std::string> out;
  for (int k = 1; k <= count; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

void append(std::vector<std::string>& a, const std::vector<std::string>& b) { a.insert(a.end(), b.begin(), b.end()); }

std::vector<std::string> column_cells(const Matrix& M, Eigen::Index col) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) out.push_back(num(M(i, col)));
  return out;
}

ordered_json matrix_json(const Matrix& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) r.push_back(M(i, k));
    rows.push_back(r);
  }
  return rows;
}

// ---- data and fitting ----

int single_n(const RunConfig& cfg, const std::string& command) {
  if (!cfg.N.single()) throw ConfigError("field 'N' must be a single value for " + command);
  return cfg.N.lo;
}

std::vector<Trajectory> acquire(const RunConfig& cfg) {
  if (cfg.data_file) {
    Trajectory tr;
    try {
      tr = load_trajectory(*cfg.data_file);
    } catch (const Error& e) {
      throw ConfigError(std::string("field 'data.file': ") + e.what());
    }
    if (cfg.plant && (tr.inputs() != cfg.plant->inputs() || tr.outputs() != cfg.plant->outputs()))
      throw ConfigError("field 'data.file': channel counts do not match the plant");
    return {tr};
  }
  return generate_data(cfg.require_plant("generating data"), cfg.data);
}

Representation fit_rep(const RunConfig& cfg, const std::vector<Trajectory>& data, int N) {
  Representation rep;
  if (cfg.method == "ginverse") {
    if (data.size() != 1) throw ConfigError("field 'method': ginverse fits a single trajectory");
    rep = fit_with_ginverse(build_blocks(data.front(), N), cfg.ginverse_seed);
  } else {
    rep = fit_trajectories(data, N, cfg.tol);
  }
  return cfg.drop_feedthrough ? without_feedthrough(rep) : rep;
}

std::vector<std::pair<std::string, std::uint64_t>> data_seeds(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::uint64_t>> s;
  if (cfg.data_file) return s;
  s.emplace_back("data", cfg.data.seed);
  if (cfg.data.noise.sigma > 0.0) s.emplace_back("data_noise", cfg.data.noise.seed);
  return s;
}

Vector initial_state(const RunConfig& cfg, const StateSpace& plant) {
  return cfg.sim.x0.size() ? cfg.sim.x0 : Vector::Zero(plant.states());
}

// Fresh excitation for validation runs, drawn from the first seed the data set did not use.
Matrix validation_input(const RunConfig& cfg, int m, int length) {
  return pe_input(m, length, cfg.data.amplitude, cfg.data.seed + static_cast<std::uint64_t>(cfg.data.trajectories));
}

// ---- pole tables ----

struct PoleRow {
  Complex z;
  bool system = false;
};

std::vector<PoleRow> labelled_poles(const Representation& rep, int i, const RootSet* system_roots, double tol) {
  RootSet all = poles(rep, i);
  std::sort(all.begin(), all.end(), [](const Complex& a, const Complex& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() > b.real();
  });
  std::vector<PoleRow> out;
  for (const Complex& z : all) out.push_back({z, false});
  if (system_roots) {
    for (const auto& pr : match_roots(*system_roots, all, tol).pairs) out[static_cast<std::size_t>(pr.second)].system = true;
  }
  return out;
}

std::vector<RootSet> system_roots(const StateSpace& plant) {
  std::vector<RootSet> out;
  for (const TransferRow& row : tf_rows(plant)) out.push_back(poly_roots(row.den));
  return out;
}

void pole_rows(Csv& csv, const std::vector<std::string>& prefix, const Representation& rep,
               const std::vector<RootSet>* sys, double tol) {
  for (int i = 0; i < rep.p; ++i) {
    const RootSet* s = sys ? &(*sys)[static_cast<std::size_t>(i)] : nullptr;
    for (const PoleRow& r : labelled_poles(rep, i, s, tol)) {
      std::vector<std::string> cells = prefix;
      append(cells, {std::to_string(rep.N), std::to_string(i), num(r.z.real()), num(r.z.imag()), num(std::abs(r.z)),
                     s ? (r.system ? "system" : "latent") : "unknown"});
      csv.row(cells);
    }
  }
}

// ---- closed loop ----

struct LoopStart {
  Vector x;
  Vector chi;
};

LoopStart loop_start(const RunConfig& cfg, const StateSpace& plant, int N) {
  const int m = plant.inputs(), p = plant.outputs();
  const Vector x0 = initial_state(cfg, plant);
  if (cfg.sim.init == "zero") return {x0, Vector::Zero(p * N * (m + 1))};
  if (cfg.sim.init == "constant") {
    const Vector level = cfg.sim.init_level.size() ? cfg.sim.init_level : Vector(plant.C * x0);
    return {x0, constant_chi(N, m, level)};
  }
  // The plant runs N excitation steps from x0 so the controller starts from its true window.
  const Matrix u = validation_input(cfg, m, N);
  Vector xN;
  const Trajectory pre = collect(plant, x0, u);
  simulate(plant, x0, u, &xN);
  return {xN, build_chi(Window{pre.u, pre.y})};
}

Vector reference(const RunConfig& cfg, int p) { return cfg.sim.y_ref.size() ? cfg.sim.y_ref : Vector::Zero(p); }

std::vector<std::string> trace_header(int m, int p) {
  std::vector<std::string> h{"t"};
  append(h, channel_names("u", m));
  append(h, channel_names("y", p));
  return h;
}

void trace_rows(Csv& csv, const std::vector<std::string>& prefix, const ClosedLoopTrace& tr) {
  for (Eigen::Index t = 0; t < tr.u.cols(); ++t) {
    std::vector<std::string> cells = prefix;
    cells.push_back(std::to_string(t));
    append(cells, column_cells(tr.u, t));
    append(cells, column_cells(tr.y, t));
    csv.row(cells);
  }
}

// ---- H2 sweep ----

struct SweepRow {
  int N = 0;
  double h2 = kInf;
  double controller_radius = std::nan("");
  double closed_loop_radius = std::nan("");
  std::string status = "ok";
};

SweepRow sweep_point(const StateSpace& plant, const RunConfig& cfg, const std::vector<Trajectory>& data, int N) {
  SweepRow row;
  row.N = N;
  try {
    const Representation rep = fit_rep(cfg, data, N);
    const LQRWeights w = cfg.resolve_weights(rep.m, rep.p);
    const ControllerDesign d = design_controller(rep, w);
    const ClosedLoop cl = closed_loop(plant, d.controller, w);
    row.controller_radius = spectral_radius(d.realization.A - d.realization.B * d.riccati.K);
    row.closed_loop_radius = spectral_radius(cl.A);
    if (row.closed_loop_radius < 1.0)
      row.h2 = h2_norm(cl);
    else
      row.status = "unstable";
  } catch (const Error& e) {
    if (!is_numerical(e.code())) throw;
    row.status = to_string(e.code());
  }
  return row;
}

// Evaluates f(0..count-1) on worker threads; results keep index order.
template <typename T>
std::vector<T> parallel_map(int count, const std::function<T(int)>& f) {
  std::vector<T> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  const int workers = std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          out[static_cast<std::size_t>(k)] = f(k);
        } catch (...) {
          errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<SweepRow> sweep(const StateSpace& plant, const RunConfig& cfg, const std::vector<Trajectory>& data,
                            const std::vector<int>& Ns) {
  return parallel_map<SweepRow>(static_cast<int>(Ns.size()),
                                [&](int k) { return sweep_point(plant, cfg, data, Ns[static_cast<std::size_t>(k)]); });
}

std::vector<std::string> sweep_cells(const SweepRow& r) {
  return {std::to_string(r.N),           num(r.h2),
          num(std::log10(r.h2)),         num(r.controller_radius),
          num(r.closed_loop_radius),     r.status};
}

const std::vector<std::string> kSweepHeader{"N", "h2", "log10_h2", "controller_radius", "closed_loop_radius", "status"};

std::vector<int> n_values(const NRange& r) {
  std::vector<int> out;
  for (int N = r.lo; N <= r.hi; ++N) out.push_back(N);
  return out;
}

// ---- inversion ----

InverseRepresentation fit_inverse_rep(const RunConfig& cfg, const std::vector<Trajectory>& data, int N) {
  if (data.size() != 1) throw ConfigError("field 'data.trajectories': inversion fits a single trajectory");
  return fit_inverse(build_inversion_blocks(data.front(), N, cfg.L), cfg.tol);
}

DobTrace run_dob(const RunConfig& cfg, const StateSpace& plant, const InverseRepresentation& ir) {
  const int steps = cfg.sim.steps;
  DOBConfig d;
  d.uhat_init = Vector::Zero(ir.N);
  d.exact_init = cfg.dob.exact_init;
  d.u0 = Vector::Constant(steps, cfg.dob.command);
  d.d = Vector(steps);
  for (int t = 0; t < steps; ++t) d.d(t) = cfg.dob.amplitude * std::sin(cfg.dob.frequency * t);
  d.x0 = cfg.sim.x0;
  return dob_simulate(plant, ir, d, steps);
}

// ---- commands ----

using Handler = std::function<CommandResult(const RunConfig&)>;

CommandResult base_result(const RunConfig& cfg) {
  CommandResult r;
  r.effective = cfg;
  r.seeds = data_seeds(cfg);
  if (cfg.method == "ginverse") r.seeds.emplace_back("ginverse", cfg.ginverse_seed);
  return r;
}

CommandResult cmd_datagen(const RunConfig& cfg) {
  if (cfg.data_file) throw ConfigError("field 'data.file': datagen writes data and does not read it");
  const auto data = acquire(cfg);
  CommandResult r = base_result(cfg);
  for (std::size_t k = 0; k < data.size(); ++k) {
    std::ostringstream out;
    write_trajectory_csv(out, data[k]);
    r.outputs.push_back({data.size() == 1 ? "data.csv" : "data_" + std::to_string(k) + ".csv", out.str()});
  }
  return r;
}

CommandResult cmd_repr(const RunConfig& cfg) {
  const int N = single_n(cfg, "repr");
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"representation.json", to_json(fit_rep(cfg, acquire(cfg), N)) + "\n"});
  return r;
}

CommandResult cmd_poles(const RunConfig& cfg) {
  const auto data = acquire(cfg);
  std::vector<RootSet> sys;
  if (cfg.plant) sys = system_roots(*cfg.plant);
  Csv csv({"N", "output", "re", "im", "modulus", "kind"});
  for (int N : n_values(cfg.N)) pole_rows(csv, {}, fit_rep(cfg, data, N), cfg.plant ? &sys : nullptr, 1e-3);
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"poles.csv", csv.str()});
  return r;
}

CommandResult cmd_predict(const RunConfig& cfg) {
  const int N = single_n(cfg, "predict");
  const auto data = acquire(cfg);
  const Representation rep = fit_rep(cfg, data, N);
  CommandResult r = base_result(cfg);
  Trajectory tr;
  if (cfg.plant) {
    tr = collect(*cfg.plant, initial_state(cfg, *cfg.plant), validation_input(cfg, rep.m, N + cfg.sim.steps));
    r.seeds.emplace_back("validation", cfg.data.seed + static_cast<std::uint64_t>(cfg.data.trajectories));
  } else {
    tr = data.front();
  }
  const int T = tr.length() - N;
  if (T < 1) throw ConfigError("field 'data.length' must exceed N for prediction");
  Window init{tr.u.leftCols(N), tr.y.leftCols(N)};
  if (cfg.sim.init == "zero") init.y.setZero();
  if (cfg.sim.init == "constant") {
    if (cfg.sim.init_level.size() != rep.p) throw ConfigError("field 'simulation.init_level' is required for constant init");
    init.y = cfg.sim.init_level.replicate(1, N);
  }
  const Matrix yhat = predict_recursive(rep, tr.u.rightCols(T), init);
  std::vector<std::string> header{"t"};
  append(header, channel_names("y_true", rep.p));
  append(header, channel_names("y_pred", rep.p));
  Csv csv(header);
  for (int t = 0; t < T; ++t) {
    std::vector<std::string> cells{std::to_string(N + t)};
    append(cells, column_cells(tr.y, N + t));
    append(cells, column_cells(yhat, t));
    csv.row(cells);
  }
  r.outputs.push_back({"prediction.csv", csv.str()});
  return r;
}

CommandResult cmd_realize(const RunConfig& cfg) {
  const int N = single_n(cfg, "realize");
  const Representation rep = fit_rep(cfg, acquire(cfg), N);
  const NonMinimalRealization nr = build(rep);
  ordered_json j;
  j["N"] = nr.N;
  j["m"] = nr.m;
  j["p"] = nr.p;
  j["A"] = matrix_json(nr.A);
  j["B"] = matrix_json(nr.B);
  j["C"] = matrix_json(nr.C);
  j["D"] = matrix_json(nr.D);
  j["G"] = matrix_json(injection(nr.N, nr.m, nr.p));
  j["spectral_radius"] = spectral_radius(nr.A);
  j["detectable"] = is_detectable(nr);
  j["stabilizable_pbh"] = is_stabilizable_pbh(nr);
  if (cfg.plant) j["stabilizable_shared_roots"] = prop3_condition(rep, tf_rows(*cfg.plant)).verdict;
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"realization.json", j.dump(2) + "\n"});
  return r;
}

CommandResult cmd_lqr(const RunConfig& cfg) {
  const int N = single_n(cfg, "lqr");
  const Representation rep = fit_rep(cfg, acquire(cfg), N);
  const LQRWeights w = cfg.resolve_weights(rep.m, rep.p);
  const ControllerDesign d = design_controller(rep, w);
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"controller.json", to_json(ControllerDocument{rep, w, d.riccati.K}) + "\n"});
  if (cfg.plant) {
    const LoopStart s = loop_start(cfg, *cfg.plant, N);
    const ClosedLoopTrace tr =
        simulate_closed_loop(*cfg.plant, d.controller, s.x, s.chi, cfg.sim.noise, reference(cfg, rep.p), cfg.sim.steps);
    Csv csv(trace_header(rep.m, rep.p));
    trace_rows(csv, {}, tr);
    r.outputs.push_back({"trace.csv", csv.str()});
    if (cfg.sim.init == "true")
      r.seeds.emplace_back("validation", cfg.data.seed + static_cast<std::uint64_t>(cfg.data.trajectories));
    if (cfg.sim.noise.sigma > 0.0) r.seeds.emplace_back("online_noise", cfg.sim.noise.seed);
  }
  return r;
}

CommandResult cmd_h2sweep(const RunConfig& cfg) {
  const StateSpace& plant = cfg.require_plant("h2sweep");
  const auto data = acquire(cfg);
  Csv csv(kSweepHeader);
  for (const SweepRow& row : sweep(plant, cfg, data, n_values(cfg.N))) csv.row(sweep_cells(row));
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"h2sweep.csv", csv.str()});
  return r;
}

CommandResult cmd_invert(const RunConfig& cfg) {
  const int N = single_n(cfg, "invert");
  const auto data = acquire(cfg);
  const InverseRepresentation ir = fit_inverse_rep(cfg, data, N);
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"inverse.json", to_json(ir) + "\n"});
  Trajectory tr;
  if (cfg.plant) {
    tr = collect(*cfg.plant, initial_state(cfg, *cfg.plant), validation_input(cfg, 1, cfg.sim.steps + N + cfg.L));
    r.seeds.emplace_back("validation", cfg.data.seed + static_cast<std::uint64_t>(cfg.data.trajectories));
  } else {
    tr = data.front();
  }
  const Vector u = tr.u.row(0).transpose();
  const Vector init = cfg.sim.init == "true" ? Vector(u.head(N)) : Vector(Vector::Zero(N));
  const Vector uhat = estimate_recursive(ir, tr.y.row(0).transpose(), init);
  Csv csv({"t", "u", "uhat"});
  for (Eigen::Index t = 0; t < uhat.size(); ++t) csv.row({std::to_string(t), num(u(t)), num(uhat(t))});
  r.outputs.push_back({"estimate.csv", csv.str()});
  return r;
}

CommandResult cmd_dob(const RunConfig& cfg) {
  const StateSpace& plant = cfg.require_plant("dob");
  const int N = single_n(cfg, "dob");
  const InverseRepresentation ir = fit_inverse_rep(cfg, acquire(cfg), N);
  std::ostringstream out;
  write_dob_csv(out, run_dob(cfg, plant, ir));
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"dob.csv", out.str()});
  return r;
}

// ---- demos ----

RunConfig demo_base(const std::string& plant, int length, std::uint64_t seed, int trajectories, double sigma) {
  RunConfig c;
  c.plant_name = plant;
  c.plant = plant_by_name(plant).discrete();
  c.data = DataSetup{length, seed, trajectories, 1.0, NoiseSpec{sigma, seed}};
  return c;
}

RunConfig clean(RunConfig c) {
  c.data.noise.sigma = 0.0;
  return c;
}

CommandResult demo_msd_poles(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.N.hi = c.N.lo;
  return cmd_poles(c);
}

CommandResult demo_pendulum_h2(const RunConfig& cfg) {
  CommandResult r = cmd_h2sweep(cfg);
  r.outputs.front().name = "pendulum_h2.csv";
  return r;
}

// Prediction from the true window with the truncated pseudoinverse and a random generalized inverse.
CommandResult demo_msd_prediction(const RunConfig& cfg) {
  const StateSpace& plant = *cfg.plant;
  const int N = single_n(cfg, "msd-prediction");
  const auto data = acquire(cfg);
  RunConfig g = cfg;
  g.method = "ginverse";
  const Representation a = fit_rep(cfg, data, N), b = fit_rep(g, data, N);
  const int T = cfg.sim.steps;
  Matrix u(1, N + T);
  for (int t = 0; t < N + T; ++t) u(0, t) = 2.0 * std::sin(0.05 * t);
  const Trajectory tr = collect(plant, initial_state(cfg, plant), u);
  const Window init{tr.u.leftCols(N), tr.y.leftCols(N)};
  const Matrix ya = predict_recursive(a, tr.u.rightCols(T), init), yb = predict_recursive(b, tr.u.rightCols(T), init);
  Csv csv({"t", "u", "y_true", "y_pinv", "y_ginverse"});
  for (int t = 0; t < T; ++t)
    csv.row({std::to_string(N + t), num(u(0, N + t)), num(tr.y(0, N + t)), num(ya(0, t)), num(yb(0, t))});
  Csv pc({"method", "N", "output", "re", "im", "modulus", "kind"});
  const auto sys = system_roots(plant);
  pole_rows(pc, {"pinv"}, a, &sys, 1e-3);
  pole_rows(pc, {"ginverse"}, b, &sys, 1e-3);
  CommandResult r = base_result(cfg);
  r.seeds.emplace_back("ginverse", cfg.ginverse_seed);
  r.outputs.push_back({"msd_prediction.csv", csv.str()});
  r.outputs.push_back({"msd_prediction_poles.csv", pc.str()});
  return r;
}

std::vector<int> demo_ns(const RunConfig& cfg, bool overridden, std::vector<int> fallback) {
  return overridden ? n_values(cfg.N) : fallback;
}

// Poles from noise-free and noisy averaged data.
CommandResult demo_pendulum_noisy_poles(const RunConfig& cfg, bool overridden) {
  const auto sys = system_roots(*cfg.plant);
  const auto noisy = acquire(cfg), exact = acquire(clean(cfg));
  Csv csv({"data", "N", "output", "re", "im", "modulus", "kind"});
  for (int N : demo_ns(cfg, overridden, {6, 8, 12})) {
    pole_rows(csv, {"noise_free"}, fit_rep(cfg, exact, N), &sys, 1e-3);
    pole_rows(csv, {"noisy"}, fit_rep(cfg, noisy, N), &sys, 0.1);
  }
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"pendulum_noisy_poles.csv", csv.str()});
  return r;
}

// Mean signal-to-noise ratio of the data stacks over the trajectories.
CommandResult demo_pendulum_snr(const RunConfig& cfg) {
  const auto noisy = acquire(cfg), exact = acquire(clean(cfg));
  Csv csv({"N", "snr_db"});
  for (int N : n_values(cfg.N)) {
    double sum = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k) {
      const Trajectory e{Matrix::Zero(exact[k].u.rows(), exact[k].u.cols()), noisy[k].y - exact[k].y};
      sum += snr(build_blocks(exact[k], N), build_blocks(e, N));
    }
    csv.row({std::to_string(N), num(sum / static_cast<double>(exact.size()))});
  }
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"pendulum_snr.csv", csv.str()});
  return r;
}

// Closed-loop traces from noise-free and noisy data; the noisy series also sees measurement noise online.
CommandResult demo_pendulum_closed_loop(const RunConfig& cfg) {
  const StateSpace& plant = *cfg.plant;
  const auto noisy = acquire(cfg), exact = acquire(clean(cfg));
  const LQRWeights w = cfg.resolve_weights(plant.inputs(), plant.outputs());
  std::vector<std::string> header{"data", "N"};
  append(header, trace_header(plant.inputs(), plant.outputs()));
  Csv csv(header);
  CommandResult r = base_result(cfg);
  for (const bool is_noisy : {false, true}) {
    const auto& data = is_noisy ? noisy : exact;
    const NoiseSpec online = is_noisy ? cfg.sim.noise : NoiseSpec{};
    const std::vector<int> Ns = n_values(cfg.N);
    const auto traces = parallel_map<std::optional<ClosedLoopTrace>>(static_cast<int>(Ns.size()), [&](int k) {
      const int N = Ns[static_cast<std::size_t>(k)];
      try {
        const ControllerDesign d = design_controller(fit_rep(cfg, data, N), w);
        const LoopStart s = loop_start(cfg, plant, N);
        return std::optional<ClosedLoopTrace>(
            simulate_closed_loop(plant, d.controller, s.x, s.chi, online, reference(cfg, plant.outputs()), cfg.sim.steps));
      } catch (const Error& e) {
        if (!is_numerical(e.code())) throw;
        return std::optional<ClosedLoopTrace>();
      }
    });
    for (std::size_t k = 0; k < Ns.size(); ++k)
      if (traces[k]) trace_rows(csv, {is_noisy ? "noisy" : "noise_free", std::to_string(Ns[k])}, *traces[k]);
  }
  if (cfg.sim.noise.sigma > 0.0) r.seeds.emplace_back("online_noise", cfg.sim.noise.seed);
  r.outputs.push_back({"pendulum_closed_loop.csv", csv.str()});
  return r;
}

// H2 norms over N for the pendulum (noise-free and noisy data) and the submarine.
CommandResult demo_h2_sweeps(const RunConfig& cfg) {
  std::vector<std::string> header{"plant", "data"};
  append(header, kSweepHeader);
  Csv csv(header);
  const std::vector<int> Ns = n_values(cfg.N);
  const auto emit = [&](const std::string& plant, const std::string& kind, const std::vector<SweepRow>& rows) {
    for (const SweepRow& row : rows) {
      std::vector<std::string> cells{plant, kind};
      append(cells, sweep_cells(row));
      csv.row(cells);
    }
  };
  emit("pendulum", "noise_free", sweep(*cfg.plant, cfg, acquire(clean(cfg)), Ns));
  emit("pendulum", "noisy", sweep(*cfg.plant, cfg, acquire(cfg), Ns));
  RunConfig sub = demo_base("submarine", 100, cfg.data.seed, 1, 0.0);
  sub.weights = {100.0 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  emit("submarine", "noise_free", sweep(*sub.plant, sub, acquire(sub), Ns));
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"h2_sweeps.csv", csv.str()});
  return r;
}

// Submarine reference tracking.
CommandResult demo_submarine_tracking(const RunConfig& cfg, bool overridden) {
  const StateSpace& plant = *cfg.plant;
  const auto data = acquire(cfg);
  const LQRWeights w = cfg.resolve_weights(plant.inputs(), plant.outputs());
  std::vector<std::string> header{"N"};
  append(header, trace_header(plant.inputs(), plant.outputs()));
  Csv csv(header);
  const std::vector<int> Ns = demo_ns(cfg, overridden, {4, 8, 12, 16});
  const auto traces = parallel_map<ClosedLoopTrace>(static_cast<int>(Ns.size()), [&](int k) {
    const int N = Ns[static_cast<std::size_t>(k)];
    const ControllerDesign d = design_controller(fit_rep(cfg, data, N), w);
    const LoopStart s = loop_start(cfg, plant, N);
    return simulate_closed_loop(plant, d.controller, s.x, s.chi, cfg.sim.noise, reference(cfg, plant.outputs()),
                                cfg.sim.steps);
  });
  for (std::size_t k = 0; k < Ns.size(); ++k) trace_rows(csv, {std::to_string(Ns[k])}, traces[k]);
  CommandResult r = base_result(cfg);
  r.outputs.push_back({"submarine_tracking.csv", csv.str()});
  return r;
}

CommandResult demo_msd_dob(const RunConfig& cfg) {
  CommandResult r = cmd_dob(cfg);
  r.outputs.front().name = "msd_dob.csv";
  return r;
}

RunConfig demo_config(const std::string& name) {
  if (name == "msd-poles" || name == "msd-prediction") {
    RunConfig c = demo_base("msd", 100, 1, 1, 0.0);
    c.N = {6, 6};
    if (name == "msd-prediction") {
      c.sim.steps = 100;
      c.sim.x0 = Vector::Zero(4);
      c.sim.x0(1) = 0.1;
    }
    return c;
  }
  if (name == "pendulum-h2") {
    RunConfig c = demo_base("pendulum", 50, 7, 1, 0.0);
    c.N = {4, 16};
    c.weights = {Matrix::Constant(1, 1, 100.0), Matrix::Identity(1, 1)};
    return c;
  }
  if (name == "pendulum-noisy-poles") {
    RunConfig c = demo_base("pendulum", 50, 1, 10, 0.01);
    c.N = {6, 12};
    return c;
  }
  if (name == "pendulum-snr" || name == "pendulum-closed-loop" || name == "h2-sweeps") {
    RunConfig c = demo_base("pendulum", 50, 1, 10, 1e-4);
    c.N = {4, 16};
    c.weights = {Matrix::Constant(1, 1, 100.0), Matrix::Identity(1, 1)};
    c.drop_feedthrough = name != "pendulum-snr";
    if (name == "pendulum-closed-loop") {
      c.sim.steps = 200;
      c.sim.x0 = Vector::Zero(4);
      c.sim.x0(0) = 1.0;
      c.sim.init = "constant";
      c.sim.init_level = Vector::Ones(1);
      c.sim.noise = NoiseSpec{1e-3, 2};
    }
    return c;
  }
  if (name == "submarine-tracking") {
    RunConfig c = demo_base("submarine", 100, 1, 10, 0.0);
    c.N = {4, 16};
    c.weights = {100.0 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    c.sim.steps = 400;
    c.sim.x0 = Vector::Zero(4);
    c.sim.x0(2) = 15.0;
    c.sim.init = "constant";
    c.sim.init_level = Vector::Constant(2, 5.0);
    c.sim.y_ref = Vector(2);
    c.sim.y_ref << 10.0, 0.0;
    return c;
  }
  if (name == "msd-dob") {
    RunConfig c = demo_base("msd", 102, 1, 1, 0.0);
    c.N = {6, 6};
    c.L = 2;
    c.sim.steps = 1500;
    return c;
  }
  throw ConfigError("unknown demo '" + name + "'");
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"datagen", cmd_datagen}, {"repr", cmd_repr},   {"poles", cmd_poles}, {"predict", cmd_predict},
      {"realize", cmd_realize}, {"lqr", cmd_lqr},     {"h2sweep", cmd_h2sweep},
      {"invert", cmd_invert},   {"dob", cmd_dob},
  };
  return h;
}

CommandResult run_demo(const Invocation& inv) {
  RunConfig c = demo_config(inv.demo);
  inv.overrides.apply(c);
  const bool n_set = inv.overrides.N.has_value();
  if (inv.demo == "msd-poles") return demo_msd_poles(c);
  if (inv.demo == "pendulum-h2") return demo_pendulum_h2(c);
  if (inv.demo == "msd-prediction") return demo_msd_prediction(c);
  if (inv.demo == "pendulum-noisy-poles") return demo_pendulum_noisy_poles(c, n_set);
  if (inv.demo == "pendulum-snr") return demo_pendulum_snr(c);
  if (inv.demo == "pendulum-closed-loop") return demo_pendulum_closed_loop(c);
  if (inv.demo == "h2-sweeps") return demo_h2_sweeps(c);
  if (inv.demo == "submarine-tracking") return demo_submarine_tracking(c, n_set);
  return demo_msd_dob(c);
}

}  // namespace

void Overrides::apply(RunConfig& cfg) const {
  if (N) cfg.N = *N;
  if (L) cfg.L = *L;
  if (tol) cfg.tol = *tol;
  if (tol_auto) cfg.tol.reset();
  if (seed) cfg.data.seed = *seed;
  if (data) cfg.data_file = *data;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"datagen", "repr", "poles",  "predict", "realize", "lqr",
                                              "h2sweep", "invert", "dob",     "demo"};
  return names;
}

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names{"msd-poles",    "pendulum-h2",          "msd-prediction",
                                              "pendulum-noisy-poles", "pendulum-snr", "pendulum-closed-loop",
                                              "h2-sweeps",    "submarine-tracking",   "msd-dob"};
  return names;
}

CommandResult run_command(const Invocation& inv) {
  if (inv.command == "demo") return run_demo(inv);
  const auto it = handlers().find(inv.command);
  if (it == handlers().end()) throw ConfigError("unknown command '" + inv.command + "'");
  RunConfig c = inv.cfg;
  inv.overrides.apply(c);
  return it->second(c);
}

std::string manifest(const Invocation& inv, const CommandResult& result, const std::vector<Output>& inputs) {
  const ordered_json cfg = to_json(result.effective);
  ordered_json j;
  j["tool"] = "ddctl";
  j["version"] = DDCTL_VERSION;
  j["command"] = inv.command == "demo" ? "demo " + inv.demo : inv.command;
  j["config_hash"] = hex64(fnv1a64(cfg.dump()));
  ordered_json seeds = ordered_json::object();
  for (const auto& [name, value] : result.seeds) seeds[name] = value;
  j["seeds"] = seeds;
  j["config"] = cfg;
  ordered_json in = ordered_json::array();
  for (const Output& o : inputs) in.push_back({{"file", o.name}, {"fnv1a64", hex64(fnv1a64(o.content))}});
  j["inputs"] = in;
  ordered_json out = ordered_json::array();
  for (const Output& o : result.outputs) out.push_back({{"file", o.name}, {"fnv1a64", hex64(fnv1a64(o.content))}});
  j["outputs"] = out;
  return j.dump(2) + "\n";
}

}  // namespace ddctl
