#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ddlti/ddlti.hpp"

namespace ddlti::testing {

// Random plants with poles in a disk; roots keep a minimum mutual distance so
// no pole-zero pair sits inside the cancellation band.
struct RandomPlantSpec {
  int order = 3;
  int inputs = 1;
  int outputs = 1;
  double radius = 1.5;
  double min_separation = 1e-2;
  int relative_degree = 1;  // SISO only; 0 gives direct feedthrough
};

class PlantSampler {
 public:
  explicit PlantSampler(std::uint64_t seed) : rng_(seed) {}
  RootSet sample_roots(int count, double radius, double min_separation, const RootSet& avoid = {});
  StateSpace siso(const RandomPlantSpec& spec);
  StateSpace mimo(const RandomPlantSpec& spec);
  // Minimum-phase SISO plant: zeros within zero_radius < 1.
  StateSpace minimum_phase(int order, int relative_degree, double zero_radius);
  int uniform_int(int lo, int hi);
  double uniform(double lo, double hi);
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Controllable canonical form of num/den with den monic.
StateSpace canonical_siso(const Polynomial& den, const Polynomial& num);

// Noise-free data long enough for the rank condition at window N.
Trajectory exact_data(const StateSpace& ss, int N, std::uint64_t seed, int extra_columns = 10);

// Representation assembled from the true transfer rows and the optimization
// oracle, without touching data.
Representation oracle_representation(const std::vector<TransferRow>& rows, int N, int m);

// Model-based LQR gain by plain Riccati value iteration on (A, B, C'QC, R).
Matrix model_lqr_gain(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, int max_iter = 2000000);

// exp(M) by an unscaled Taylor series with many terms; only for small ||M||.
Matrix long_series_expm(const Matrix& M, int terms = 200);

// Largest modulus among the roots of p (0 for constants).
double max_root_modulus(const Polynomial& p);

// H2 norm from a frequency grid of the transfer function.
double h2_frequency_grid(const Matrix& A, const Matrix& B, const Matrix& C, int points);

}  // namespace ddlti::testing
