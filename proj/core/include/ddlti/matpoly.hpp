#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ddlti {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Multiset of complex numbers, typically roots or eigenvalues.
using RootSet = std::vector<Complex>;

struct SvdFactors {
  Matrix U;      // rows x rows, orthonormal
  Vector sigma;  // min(rows, cols), nonincreasing
  Matrix V;      // cols x cols, orthonormal
};

void require_finite(const Matrix& A, const char* what);

SvdFactors svd(const Matrix& A);
Vector singular_values(const Matrix& A);

// Machine epsilon of binary64 (spacing of doubles at 1.0).
double machine_epsilon();

// max(rows, cols) * sigma_max * eps.
double default_tolerance(const Matrix& A);

// Number of singular values strictly above tol; default tolerance when tol < 0.
int numerical_rank(const Matrix& A, double tol = -1.0);

// Pseudoinverse keeping only singular values strictly above tol.
Matrix pinv_truncated(const Matrix& A, double tol);
Matrix pinv(const Matrix& A);

// A G A = A with the free SVD blocks drawn from a seeded standard normal source.
Matrix random_generalized_inverse(const Matrix& A, std::uint64_t seed);

// Minimum-norm x with A x = b; throws Inconsistent when b is not in the range of A.
Vector least_norm_solution(const Matrix& A, const Vector& b);

RootSet eigvals(const Matrix& A);
double spectral_radius(const Matrix& A);

// Solves P = A P A^T + Q for Schur stable A.
Matrix solve_dlyap(const Matrix& A, const Matrix& Q);

struct RootMatch {
  std::vector<std::pair<int, int>> pairs;  // (index in a, index in b)
  std::vector<int> unmatched_a;
  std::vector<int> unmatched_b;
};

// Greedy nearest-pair matching; pairs farther apart than tol stay unmatched.
// Equal distances are resolved by the smaller index in a, then in b.
RootMatch match_roots(const RootSet& a, const RootSet& b, double tol);

// Largest distance between matched pairs after matching every root of the
// smaller set; the sets must have equal size.
double root_set_distance(const RootSet& a, const RootSet& b);

}  // namespace ddlti
