#pragma once

#include <vector>

#include "ddlti/ddrep.hpp"
#include "ddlti/lti.hpp"

namespace ddlti {

// State-space form of a Representation whose state stacks, per output i,
// the past window (y_i(t-N..t-1), u(t-N..t-1)).
struct NonMinimalRealization {
  int N = 0;
  int m = 0;
  int p = 0;
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  int block_size() const { return N * (m + 1); }
  int states() const { return p * block_size(); }
  StateSpace as_state_space() const { return {A, B, C, D}; }
};

NonMinimalRealization build(const Representation& rep);

// I_p (x) col(0_{N-1}, 1, 0_{mN}): injects y_i(t) into the newest output slot.
Matrix injection(int N, int m, int p);

Vector build_chi(const Window& window);

// Same system with input j rescaled so its coefficients peak at the size of
// the output coefficients. Input scaling preserves controllability and
// observability while keeping the PBH pencils well scaled when the data
// units make b much smaller than a. With u = diag(f) u', the result is the
// similarity chi' = T chi where T divides the input-history states of input j
// by f_j.
NonMinimalRealization input_normalized(const NonMinimalRealization& r, Vector* factors = nullptr);

struct PbhMargin {
  Complex lambda;
  double margin = 0.0;  // sigma_min / sigma_max of the PBH pencil of the input-normalized system
};

std::vector<PbhMargin> detectability_margins(const NonMinimalRealization& r, double tol = 1e-7);
std::vector<PbhMargin> stabilizability_margins(const NonMinimalRealization& r, double tol = 1e-7);
bool is_detectable(const NonMinimalRealization& r, double tol = 1e-7);
bool is_stabilizable_pbh(const NonMinimalRealization& r, double tol = 1e-7);

// A root shared by several denominators and the numerator rows evaluated there.
struct RootWitness {
  Complex lambda;
  std::vector<int> outputs;
  ComplexMatrix vectors;  // m x outputs.size(), column k = numerator row of outputs[k] at lambda
  double margin = 0.0;    // smallest singular value of the column-normalized vectors
  bool independent = false;
};

struct StabilizabilityReport {
  bool verdict = false;
  bool pbh_verdict = false;
  std::vector<PbhMargin> pbh;
  std::vector<RootWitness> witnesses;
};

// Shared-unstable-root test on the fitted denominators D*_i and numerators
// N*_i; the PBH verdict on the built realization is reported alongside.
// Candidate roots are snapped to a true denominator root when one lies
// within tol.
StabilizabilityReport prop3_condition(const Representation& rep, const std::vector<TransferRow>& rows,
                                      double tol = 1e-6, double pbh_tol = 1e-7);

StabilizabilityReport cor2_report(const std::vector<TransferRow>& rows, double tol = 1e-6, double indep_tol = 1e-7);
bool cor2_condition2(const std::vector<TransferRow>& rows, double tol = 1e-6);

}  // namespace ddlti
