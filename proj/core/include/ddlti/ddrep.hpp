#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ddlti/datagen.hpp"
#include "ddlti/lti.hpp"
#include "ddlti/polynomial.hpp"

namespace ddlti {

// One output's difference equation
//   y_i(t) = sum_k a_k y_i(t-N+k) + sum_k b_k^T u(t-N+k),  k = 0..N (b) / 0..N-1 (a).
struct CoefficientRow {
  int output = 0;
  Matrix b;  // m x (N+1), column k holds b_k
  Vector a;  // N

  int N() const { return static_cast<int>(a.size()); }
  int m() const { return static_cast<int>(b.rows()); }

  // [b_0^T .. b_N^T, a_0 .. a_{N-1}], the layout of Yf_i * pinv(H_i).
  RowVector packed() const;
  static CoefficientRow unpack(const RowVector& packed, int N, int m, int output);

  Polynomial denominator() const;  // z^N - sum a_k z^k
  Polynomial numerator(int j) const;
  std::vector<Polynomial> numerators() const;
};

struct Representation {
  int N = 0;
  int m = 0;
  int p = 0;
  std::vector<CoefficientRow> rows;
  std::vector<int> ranks;  // rank of H_i at the tolerance used by the fit; empty if unknown

  bool rank_condition_met(int i, int n_i) const;
  void validate() const;
};

Representation fit(const DataBlocks& blocks, std::optional<double> tol = std::nullopt);

// Single-output fit through a seeded random generalized inverse of H.
Representation fit_with_ginverse(const DataBlocks& blocks, std::uint64_t seed);

// Mean of the per-dataset rows.
Representation fit_averaged(const std::vector<DataBlocks>& datasets, std::optional<double> tol = std::nullopt);

// Copy with b_N set to zero, for strictly proper plants fitted from noisy data.
Representation without_feedthrough(Representation rep);

struct RegressorStack {
  Matrix u_past;  // m x N, columns u(t-N) .. u(t-1)
  Vector u_now;   // m
  Vector y_past;  // N, y_i(t-N) .. y_i(t-1)
};

Vector step(const Representation& rep, const std::vector<RegressorStack>& regs);

struct Window {
  Matrix u;  // m x N
  Matrix y;  // p x N
};

// Runs the representation as a simulator, feeding predictions back.
// Returns p x T predictions for the inputs u (m x T) following init.
Matrix predict_recursive(const Representation& rep, const Matrix& u, const Window& init);

RootSet poles(const Representation& rep, int i);

struct LatentFactorization {
  Polynomial system;  // D_i
  Polynomial latent;  // monic cofactor of degree N - n_i
  double denominator_residual = 0.0;
  double numerator_residual = 0.0;
};

LatentFactorization latent_factorize(const Representation& rep, int i, const TransferRow& true_row, double tol);

struct PoleClasses {
  RootSet system;
  RootSet latent;
};

PoleClasses classify_poles(const RootSet& all, const RootSet& system_roots, double tol);

}  // namespace ddlti
