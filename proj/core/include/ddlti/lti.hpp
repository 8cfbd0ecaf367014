#pragma once

#include <string>
#include <vector>

#include "ddlti/matpoly.hpp"
#include "ddlti/polynomial.hpp"

namespace ddlti {

struct StateSpace {
  Matrix A;  // n' x n'
  Matrix B;  // n' x m
  Matrix C;  // p x n'
  Matrix D;  // p x m

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }
  void validate() const;
};

// Outputs for t = 0..T-1 given inputs u (m x T); optionally returns x(T).
Matrix simulate(const StateSpace& ss, const Vector& x0, const Matrix& u, Vector* x_final = nullptr);

Matrix expm(const Matrix& M);

struct DiscretePair {
  Matrix A;
  Matrix B;
};

DiscretePair zoh_discretize(const Matrix& Ac, const Matrix& Bc, double Ts);

struct Plant {
  std::string name;
  StateSpace continuous;
  double Ts = 0.0;

  StateSpace discrete() const;
};

Plant msd();
Plant inverted_pendulum();
Plant submarine();
Plant plant_by_name(const std::string& name);

// Per-output transfer function row N_i(z) / D_i(z), coprime with D_i monic.
struct TransferRow {
  Polynomial den;
  std::vector<Polynomial> num;

  int order() const { return den.degree(); }
  int inputs() const { return static_cast<int>(num.size()); }
};

std::vector<TransferRow> tf_rows(const StateSpace& ss, double cancel_tol = 1e-6);

// Markov parameters h_0 = D, h_k = C A^{k-1} B for k = 1..count-1.
std::vector<Matrix> markov_parameters(const StateSpace& ss, int count);

// Impulse response of a row by long division; column k holds h_k (m entries).
Matrix impulse_response(const TransferRow& row, int count);

struct SystemStructure {
  int order = 0;                       // minimal order n
  int lag = 0;                         // observability index l
  std::vector<int> output_orders;      // n_i
  std::vector<int> relative_degree;    // nu per output row, -1 for a zero row
};

SystemStructure structure(const StateSpace& ss);

StateSpace similarity_transform(const StateSpace& ss, const Matrix& T);

}  // namespace ddlti
