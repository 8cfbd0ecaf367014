#include "ddlti/matpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include "ddlti/error.hpp"

namespace ddlti {

void require_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) fail(ErrorCode::InvalidInput, std::string(what) + " has non-finite entries");
}

SvdFactors svd(const Matrix& A) {
  require(A.size() > 0, ErrorCode::InvalidInput, "svd of an empty matrix");
  require_finite(A, "svd input");
  Eigen::JacobiSVD<Matrix> dec(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Vector singular_values(const Matrix& A) {
  require(A.size() > 0, ErrorCode::InvalidInput, "singular values of an empty matrix");
  require_finite(A, "svd input");
  Eigen::JacobiSVD<Matrix> dec(A);
  return dec.singularValues();
}

double machine_epsilon() { return std::numeric_limits<double>::epsilon(); }

double default_tolerance(const Matrix& A) {
  require(A.size() > 0, ErrorCode::InvalidInput, "tolerance of an empty matrix");
  const Vector s = singular_values(A);
  const double dim = static_cast<double>(std::max(A.rows(), A.cols()));
  return dim * s(0) * machine_epsilon();
}

int numerical_rank(const Matrix& A, double tol) {
  if (A.size() == 0) return 0;
  const Vector s = singular_values(A);
  if (tol < 0.0) tol = static_cast<double>(std::max(A.rows(), A.cols())) * s(0) * machine_epsilon();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

Matrix pinv_truncated(const Matrix& A, double tol) {
  require(tol >= 0.0, ErrorCode::InvalidInput, "truncation tolerance must be nonnegative");
  require(A.size() > 0, ErrorCode::InvalidInput, "pinv of an empty matrix");
  require_finite(A, "pinv input");
  Eigen::JacobiSVD<Matrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = dec.singularValues();
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > tol) ++k;
  if (k == 0) return Matrix::Zero(A.cols(), A.rows());
  const Matrix& U = dec.matrixU();
  const Matrix& V = dec.matrixV();
  return V.leftCols(k) * s.head(k).cwiseInverse().asDiagonal() * U.leftCols(k).transpose();
}

Matrix pinv(const Matrix& A) { return pinv_truncated(A, default_tolerance(A)); }

Matrix random_generalized_inverse(const Matrix& A, std::uint64_t seed) {
  const SvdFactors f = svd(A);
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  const double tol = static_cast<double>(std::max(m, n)) * f.sigma(0) * machine_epsilon();
  Eigen::Index r = 0;
  while (r < f.sigma.size() && f.sigma(r) > tol) ++r;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // In the SVD basis G = V [S^-1 X; Y Z] U^T with X, Y, Z arbitrary.
  Matrix core(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) core(i, j) = normal(rng);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) core(i, j) = (i == j) ? 1.0 / f.sigma(i) : 0.0;
  return f.V * core * f.U.transpose();
}

Vector least_norm_solution(const Matrix& A, const Vector& b) {
  require(A.rows() == b.size(), ErrorCode::InvalidInput, "least_norm_solution dimension mismatch");
  const Vector x = pinv(A) * b;
  const double scale = std::max(b.norm(), std::numeric_limits<double>::min());
  if ((A * x - b).norm() > 1e-8 * scale)
    fail(ErrorCode::Inconsistent, "right-hand side is not in the range of the matrix");
  return x;
}

RootSet eigvals(const Matrix& A) {
  require(A.rows() == A.cols(), ErrorCode::InvalidInput, "eigvals needs a square matrix");
  require_finite(A, "eigvals input");
  if (A.size() == 0) return {};
  Eigen::EigenSolver<Matrix> es(A, false);
  require(es.info() == Eigen::Success, ErrorCode::NoConvergence, "eigenvalue iteration failed");
  const ComplexVector ev = es.eigenvalues();
  return RootSet(ev.data(), ev.data() + ev.size());
}

double spectral_radius(const Matrix& A) {
  double r = 0.0;
  for (const Complex& z : eigvals(A)) r = std::max(r, std::abs(z));
  return r;
}

namespace {

// X = T X T^H + Qt for upper triangular T, one column at a time from the right.
ComplexMatrix stein_triangular(const ComplexMatrix& T, const ComplexMatrix& Qt) {
  const Eigen::Index n = T.rows();
  ComplexMatrix X = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    ComplexVector w = ComplexVector::Zero(n);
    for (Eigen::Index l = j + 1; l < n; ++l) w += std::conj(T(j, l)) * X.col(l);
    const ComplexVector rhs = T.triangularView<Eigen::Upper>() * w + Qt.col(j);
    ComplexMatrix M = -std::conj(T(j, j)) * T;
    M.diagonal().array() += Complex(1.0);
    X.col(j) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  return X;
}

}  // namespace

Matrix solve_dlyap(const Matrix& A, const Matrix& Q) {
  require(A.rows() == A.cols() && Q.rows() == A.rows() && Q.cols() == A.rows(),
          ErrorCode::InvalidInput, "solve_dlyap dimension mismatch");
  require_finite(Q, "dlyap right-hand side");
  if (A.size() == 0) return Q;
  if (spectral_radius(A) >= 1.0) fail(ErrorCode::Unstable, "Lyapunov solve needs a Schur stable matrix");

  // Bartels-Stewart on the complex Schur form A = U T U^H.
  Eigen::ComplexSchur<Matrix> schur(A);
  require(schur.info() == Eigen::Success, ErrorCode::NoConvergence, "Schur decomposition failed");
  const ComplexMatrix& U = schur.matrixU();
  const ComplexMatrix& T = schur.matrixT();
  auto solve = [&](const Matrix& rhs) {
    const ComplexMatrix X = stein_triangular(T, U.adjoint() * rhs.cast<Complex>() * U);
    const Matrix P = (U * X * U.adjoint()).real();
    return Matrix(0.5 * (P + P.transpose()));
  };
  const Matrix Qs = 0.5 * (Q + Q.transpose());
  Matrix P = solve(Qs);
  for (int it = 0; it < 2; ++it) P += solve(A * P * A.transpose() + Qs - P);

  const double scale = std::max({Q.norm(), (A * P * A.transpose()).norm(), std::numeric_limits<double>::min()});
  if ((P - A * P * A.transpose() - Q).norm() > 1e-8 * scale)
    fail(ErrorCode::NoConvergence, "Lyapunov solve did not reach the residual target");
  return P;
}

RootMatch match_roots(const RootSet& a, const RootSet& b, double tol) {
  std::vector<std::tuple<double, int, int>> cand;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    for (int j = 0; j < static_cast<int>(b.size()); ++j) {
      const double d = std::abs(a[i] - b[j]);
      if (d <= tol) cand.emplace_back(d, i, j);
    }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> ua(a.size(), false), ub(b.size(), false);
  RootMatch out;
  for (const auto& [d, i, j] : cand) {
    if (ua[i] || ub[j]) continue;
    ua[i] = ub[j] = true;
    out.pairs.emplace_back(i, j);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    if (!ua[i]) out.unmatched_a.push_back(i);
  for (int j = 0; j < static_cast<int>(b.size()); ++j)
    if (!ub[j]) out.unmatched_b.push_back(j);
  return out;
}

double root_set_distance(const RootSet& a, const RootSet& b) {
  require(a.size() == b.size(), ErrorCode::InvalidInput, "root sets differ in size");
  const RootMatch m = match_roots(a, b, std::numeric_limits<double>::infinity());
  double worst = 0.0;
  for (const auto& [i, j] : m.pairs) worst = std::max(worst, std::abs(a[i] - b[j]));
  return worst;
}

}  // namespace ddlti
