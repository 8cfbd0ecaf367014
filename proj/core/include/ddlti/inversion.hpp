#pragma once

#include <optional>
#include <ostream>

#include "ddlti/datagen.hpp"
#include "ddlti/lti.hpp"
#include "ddlti/polynomial.hpp"

namespace ddlti {

// Column j holds u(j..j+N) and y(j..j+N+L) of a single-input single-output trajectory.
struct InversionBlocks {
  int N = 0;
  int L = 0;
  Matrix Up;   // N x T
  Matrix Uf;   // 1 x T
  Matrix Yp;   // N x T
  Matrix YfL;  // (L+1) x T

  int columns() const { return static_cast<int>(Uf.cols()); }
  Matrix H() const;  // [Up; Yp; YfL]
};

InversionBlocks build_inversion_blocks(const Trajectory& traj, int N, int L);

bool rank_condition_inv(const InversionBlocks& blocks, int n, int nu);

// u(t-L) = sum_k gamma_k u(t-N-L+k) + sum_k delta_k y(t-N-L+k).
struct InverseRepresentation {
  int N = 0;
  int L = 0;
  Vector gamma;  // N
  Vector delta;  // N + L + 1

  Polynomial gamma_polynomial() const;  // z^N - sum gamma_k z^k
  Polynomial delta_polynomial() const;  // sum delta_k z^k
  RowVector packed() const;
};

InverseRepresentation fit_inverse(const InversionBlocks& blocks, std::optional<double> tol = std::nullopt);

double estimate_step(const InverseRepresentation& ir, const Vector& uhat_window, const Vector& y_window);

// Estimates u(k) for k = 0 .. len(y)-L-1; the first N values are init_guess.
Vector estimate_recursive(const InverseRepresentation& ir, const Vector& y, const Vector& init_guess);

struct InverseFactorization {
  Polynomial latent;  // monic, degree N - n + nu
  double numerator_residual = 0.0;    // gamma polynomial against latent * N / rho
  double denominator_residual = 0.0;  // delta polynomial against latent * D / rho
};

InverseFactorization factorize_inverse(const InverseRepresentation& ir, const Polynomial& num, const Polynomial& den,
                                       double tol);

struct DOBConfig {
  Vector uhat_init;         // estimates of u(0..N-1)
  bool exact_init = false;  // use the applied input for the first N estimates instead
  Vector u0;                // command, one sample per step
  Vector d;                 // input disturbance, one sample per step
  Vector x0;                // plant initial state, zero when empty
};

struct DobTrace {
  Vector u0, d, u, y, dhat, uhat;  // uhat(t) holds the estimate of u(t-L), zero for t < L
  bool non_minimum_phase = false;
};

DobTrace dob_simulate(const StateSpace& ss, const InverseRepresentation& ir, const DOBConfig& cfg, int steps);

// Columns t,u0,d,u,y,dhat,uhat.
void write_dob_csv(std::ostream& out, const DobTrace& trace);

}  // namespace ddlti
