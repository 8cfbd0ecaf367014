#include "ddlti/experiments.hpp"

#include <cmath>

#include "ddlti/error.hpp"
#include "ddlti/realization.hpp"

namespace ddlti {

std::vector<Trajectory> generate_data(const StateSpace& plant, const DataSetup& setup) {
  plant.validate();
  require(setup.length >= 1 && setup.trajectories >= 1, ErrorCode::InvalidInput,
          "data length and trajectory count must be positive");
  require(setup.noise.sigma >= 0.0 && std::isfinite(setup.noise.sigma), ErrorCode::InvalidInput,
          "noise sigma must be finite and nonnegative");
  std::vector<Trajectory> out;
  for (int k = 0; k < setup.trajectories; ++k) {
    const Matrix u = pe_input(plant.inputs(), setup.length, setup.amplitude, setup.seed + k);
    Trajectory tr = collect(plant, Vector::Zero(plant.states()), u);
    if (setup.noise.sigma > 0.0) tr = add_noise(tr, NoiseSpec{setup.noise.sigma, setup.noise.seed + k});
    out.push_back(std::move(tr));
  }
  return out;
}

Representation fit_trajectories(const std::vector<Trajectory>& data, int N, std::optional<double> tol) {
  require(!data.empty(), ErrorCode::InvalidInput, "at least one trajectory is required");
  if (data.size() == 1) return fit(build_blocks(data.front(), N), tol);
  std::vector<DataBlocks> blocks;
  for (const Trajectory& tr : data) blocks.push_back(build_blocks(tr, N));
  return fit_averaged(blocks, tol);
}

ControllerDesign design_controller(const Representation& rep, const LQRWeights& w, const DareOptions& opts) {
  ControllerDesign d;
  d.realization = build(rep);
  d.riccati = solve_dare(d.realization, w, opts);
  d.controller = Controller(d.realization, d.riccati.K);
  return d;
}

H2Point h2_point(const StateSpace& plant, const Representation& rep, const LQRWeights& w, const DareOptions& opts) {
  const ControllerDesign d = design_controller(rep, w, opts);
  const ClosedLoop cl = closed_loop(plant, d.controller, w);
  H2Point pt;
  pt.N = rep.N;
  pt.controller_radius = spectral_radius(d.realization.A - d.realization.B * d.riccati.K);
  pt.closed_loop_radius = spectral_radius(cl.A);
  pt.h2 = h2_norm(cl);
  pt.log10_h2 = std::log10(pt.h2);
  return pt;
}

}  // namespace ddlti
