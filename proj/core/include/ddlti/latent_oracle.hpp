#pragma once

#include <vector>

#include "ddlti/polynomial.hpp"

namespace ddlti {

// Convolution blocks of p and q against a monic cofactor of degree tau, with
// the lag-0/1/2 autocorrelations used by the closed-form minimizers.
struct ToeplitzStack {
  Matrix P;  // convolution of p, (deg p + tau + 1) x (tau + 1)
  Matrix Q;  // stacked convolutions of every q_j
  double theta0 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
};

ToeplitzStack toeplitz_stack(const Polynomial& p, const std::vector<Polynomial>& q, int tau);

// ||coeffs(r q)||^2 + ||coeffs(r p) without the leading one||^2, for monic r, p.
double cost_f(const Polynomial& r, const Polynomial& p, const std::vector<Polynomial>& q);

double minimize_lambda(const Polynomial& p, const std::vector<Polynomial>& q);

struct PhiPsi {
  double phi = 0.0;  // coefficient of z
  double psi = 0.0;  // constant coefficient
};

PhiPsi minimize_phi_psi(const Polynomial& p, const std::vector<Polynomial>& q);

struct MonicMinimizer {
  Polynomial r;
  double cost = 0.0;
};

MonicMinimizer minimize_Cstar(const Polynomial& p, const std::vector<Polynomial>& q, int tau);

// Inverse-side variant: p = N / rho, q = D / rho.
MonicMinimizer minimize_Cstar_inverse(const Polynomial& N, const Polynomial& D, double rho, int tau);

}  // namespace ddlti
