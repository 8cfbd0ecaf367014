#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddlti/datagen.hpp"
#include "ddlti/ddrep.hpp"
#include "ddlti/lqr.hpp"
#include "ddlti/lti.hpp"

namespace ddlti {

// Input-output data collection from a known plant.
struct DataSetup {
  int length = 100;
  std::uint64_t seed = 1;
  int trajectories = 1;
  double amplitude = 1.0;
  NoiseSpec noise;  // output noise; trajectory k uses seed noise.seed + k
};

// Trajectory k uses input seed setup.seed + k and starts from rest.
std::vector<Trajectory> generate_data(const StateSpace& plant, const DataSetup& setup);

// Per-output fit on one trajectory, or the averaged predictor over several.
Representation fit_trajectories(const std::vector<Trajectory>& data, int N, std::optional<double> tol = std::nullopt);

struct H2Point {
  int N = 0;
  double h2 = 0.0;
  double log10_h2 = 0.0;
  double controller_radius = 0.0;   // spectral radius of A - B K on the realization
  double closed_loop_radius = 0.0;  // spectral radius of the plant-controller loop
};

struct ControllerDesign {
  NonMinimalRealization realization;
  RiccatiSolution riccati;
  Controller controller;
};

ControllerDesign design_controller(const Representation& rep, const LQRWeights& w, const DareOptions& opts = {});

// Closed-loop H2 norm of the output-feedback controller designed from rep.
H2Point h2_point(const StateSpace& plant, const Representation& rep, const LQRWeights& w,
                 const DareOptions& opts = {});

}  // namespace ddlti
