#include "ddlti/latent_oracle.hpp"

#include <cmath>

#include "ddlti/error.hpp"

namespace ddlti {

namespace {

void require_monic(const Polynomial& x, const char* name) {
  if (!x.is_monic(1e-9)) fail(ErrorCode::InvalidInput, std::string(name) + " must be monic");
}

double autocorr(const Polynomial& x, int lag) {
  double s = 0.0;
  for (int k = 0; k + lag <= x.degree(); ++k) s += x[k] * x[k + lag];
  return s;
}

// Splits the stacked cost vector into J c + v0 where c holds the free
// (non-leading) coefficients of the monic cofactor.
void cost_system(const Polynomial& p, const std::vector<Polynomial>& q, int tau, Matrix& J, Vector& v0) {
  const int n = p.degree();
  const Matrix Tp = convolution_matrix(p, tau + 1);
  int rows = n + tau;
  std::vector<Matrix> Tq;
  for (const Polynomial& qj : q) {
    if (qj.is_zero()) continue;
    Tq.push_back(convolution_matrix(qj, tau + 1));
    rows += static_cast<int>(Tq.back().rows());
  }
  J.resize(rows, tau);
  v0.resize(rows);
  J.topRows(n + tau) = Tp.topLeftCorner(n + tau, tau);
  v0.head(n + tau) = Tp.col(tau).head(n + tau);
  int at = n + tau;
  for (const Matrix& T : Tq) {
    J.middleRows(at, T.rows()) = T.leftCols(tau);
    v0.segment(at, T.rows()) = T.col(tau);
    at += static_cast<int>(T.rows());
  }
}

}  // namespace

ToeplitzStack toeplitz_stack(const Polynomial& p, const std::vector<Polynomial>& q, int tau) {
  require(tau >= 0, ErrorCode::InvalidInput, "cofactor degree must be nonnegative");
  require_monic(p, "p");
  ToeplitzStack s;
  s.P = convolution_matrix(p, tau + 1);
  int rows = 0;
  for (const Polynomial& qj : q) rows += qj.is_zero() ? 0 : qj.degree() + tau + 1;
  s.Q = Matrix::Zero(rows, tau + 1);
  int at = 0;
  for (const Polynomial& qj : q) {
    if (qj.is_zero()) continue;
    const Matrix T = convolution_matrix(qj, tau + 1);
    s.Q.middleRows(at, T.rows()) = T;
    at += static_cast<int>(T.rows());
  }
  s.theta0 = autocorr(p, 0);
  s.theta1 = autocorr(p, 1);
  s.theta2 = autocorr(p, 2);
  for (const Polynomial& qj : q) {
    s.theta0 += autocorr(qj, 0);
    s.theta1 += autocorr(qj, 1);
    s.theta2 += autocorr(qj, 2);
  }
  return s;
}

double cost_f(const Polynomial& r, const Polynomial& p, const std::vector<Polynomial>& q) {
  require_monic(r, "r");
  require_monic(p, "p");
  const Polynomial rp = r * p;
  double c = 0.0;
  for (int k = 0; k < rp.degree(); ++k) c += rp[k] * rp[k];
  for (const Polynomial& qj : q) {
    const Polynomial rq = r * qj;
    for (double v : rq.coeffs()) c += v * v;
  }
  return c;
}

double minimize_lambda(const Polynomial& p, const std::vector<Polynomial>& q) {
  const ToeplitzStack s = toeplitz_stack(p, q, 1);
  return -s.theta1 / s.theta0;
}

PhiPsi minimize_phi_psi(const Polynomial& p, const std::vector<Polynomial>& q) {
  const ToeplitzStack s = toeplitz_stack(p, q, 2);
  const double t0 = s.theta0, t1 = s.theta1, t2 = s.theta2;
  const double det = t0 * t0 - t1 * t1;
  return {t1 * (t2 - t0) / det, (t1 * t1 - t0 * t2) / det};
}

MonicMinimizer minimize_Cstar(const Polynomial& p, const std::vector<Polynomial>& q, int tau) {
  require(tau >= 0, ErrorCode::InvalidInput, "cofactor degree must be nonnegative");
  require_monic(p, "p");
  if (tau == 0) return {Polynomial{1.0}, cost_f(Polynomial{1.0}, p, q)};

  Matrix J;
  Vector v0;
  cost_system(p, q, tau, J, v0);
  const Matrix G = J.transpose() * J;
  const Vector rhs = -J.transpose() * v0;
  Vector c;
  Eigen::LDLT<Matrix> ldlt(G);
  const Vector d = ldlt.vectorD().cwiseAbs();
  const bool well = ldlt.info() == Eigen::Success && d.minCoeff() > 0.0 && d.maxCoeff() / d.minCoeff() <= 1e10;
  if (well)
    c = ldlt.solve(rhs);
  else
    c = J.householderQr().solve(-v0);

  std::vector<double> coeffs(c.data(), c.data() + c.size());
  coeffs.push_back(1.0);
  Polynomial r(std::move(coeffs));
  return {r, cost_f(r, p, q)};
}

MonicMinimizer minimize_Cstar_inverse(const Polynomial& N, const Polynomial& D, double rho, int tau) {
  require(rho != 0.0 && std::isfinite(rho), ErrorCode::InvalidInput, "leading coefficient rho must be nonzero");
  const Polynomial p = N.scaled(1.0 / rho);
  require(p.is_monic(1e-8), ErrorCode::InvalidInput, "N / rho must be monic");
  return minimize_Cstar(p.monic(), {D.scaled(1.0 / rho)}, tau);
}

}  // namespace ddlti
