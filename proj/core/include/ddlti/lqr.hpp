#pragma once

#include "ddlti/datagen.hpp"
#include "ddlti/lti.hpp"
#include "ddlti/realization.hpp"

namespace ddlti {

struct LQRWeights {
  Matrix Q;  // p x p
  Matrix R;  // m x m
  void validate() const;
};

enum class DareMethod { FixedPoint, Doubling };

struct DareOptions {
  double tol = 1e-12;
  long max_iter = 1000000;
  DareMethod method = DareMethod::Doubling;
};

struct RiccatiSolution {
  Matrix P;
  Matrix K;
  long iterations = 0;
  double residual = 0.0;  // Frobenius norm of the Riccati residual
};

// Stabilizing solution of P = A'PA + Qx - A'PB (B'PB + R)^-1 B'PA.
RiccatiSolution solve_dare(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R,
                           const DareOptions& opts = {});

// Output-weighted LQR on the realization (state weight C'QC). Requires zero
// feedthrough and a stabilizable realization.
RiccatiSolution solve_dare(const NonMinimalRealization& r, const LQRWeights& w, const DareOptions& opts = {});

class Controller {
 public:
  Controller() = default;
  Controller(const NonMinimalRealization& r, const Matrix& K);

  // u = -K chi_hat, then chi_hat <- F chi_hat + G (y_meas - y_ref).
  Vector step(const Vector& y_meas, const Vector& y_ref);
  void reset(const Vector& chi0);

  int N = 0;
  int m = 0;
  int p = 0;
  Matrix F;
  Matrix G;
  Matrix K;
  Vector chi_hat;
};

Controller build_controller(const NonMinimalRealization& r, const Matrix& K);
Vector controller_step(Controller& c, const Vector& y_meas, const Vector& y_ref);

// Window state of a plant resting at constant output y_level with zero input.
Vector constant_chi(int N, int m, const Vector& y_level);

struct ClosedLoop {
  Matrix A;   // [[A, -B K], [G C, F]]
  Matrix B;   // measurement noise input [0; G]
  Matrix Cz;  // performance output [Q^1/2 C, 0; 0, -R^1/2 K]
};

ClosedLoop closed_loop(const StateSpace& plant, const Controller& c, const LQRWeights& w);

double h2_norm(const ClosedLoop& cl);

struct ClosedLoopTrace {
  Matrix u;        // m x steps
  Matrix y;        // p x steps, noise-free plant output
  Matrix chi_hat;  // states x steps, value at the start of each step
};

ClosedLoopTrace simulate_closed_loop(const StateSpace& plant, Controller c, const Vector& x0, const Vector& chi0,
                                     const NoiseSpec& noise, const Vector& y_ref, int steps);

Matrix symmetric_sqrt(const Matrix& S);

}  // namespace ddlti
