#include "ddlti/lqr.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ddlti/error.hpp"

namespace ddlti {

namespace {

void require_spd(const Matrix& S, const char* name) {
  require(S.rows() == S.cols() && S.rows() > 0, ErrorCode::InvalidInput, std::string(name) + " must be square");
  require_finite(S, name);
  require((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, S.cwiseAbs().maxCoeff()),
          ErrorCode::InvalidInput, std::string(name) + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::InvalidInput, std::string(name) + " must be positive definite");
}

Matrix sym(const Matrix& X) { return 0.5 * (X + X.transpose()); }

Matrix riccati_map(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, const Matrix& P) {
  const Matrix BtP = B.transpose() * P;
  const Matrix S = BtP * B + R;
  return sym(A.transpose() * P * A + Qx - (BtP * A).transpose() * S.ldlt().solve(BtP * A));
}

Matrix gain(const Matrix& B, const Matrix& R, const Matrix& A, const Matrix& P) {
  const Matrix BtP = B.transpose() * P;
  return (BtP * B + R).ldlt().solve(BtP * A);
}

// Riccati map written in closed-loop (Joseph) form; it equals riccati_map but
// avoids the large cancellation when P is ill-conditioned.
Matrix riccati_residual(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, const Matrix& P) {
  const Matrix K = gain(B, R, A, P);
  const Matrix Ac = A - B * K;
  return sym(Ac.transpose() * P * Ac + Qx + K.transpose() * R * K) - P;
}

}  // namespace

void LQRWeights::validate() const {
  require_spd(Q, "Q");
  require_spd(R, "R");
}

namespace {

double relative_residual(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, const Matrix& P) {
  if (!P.allFinite()) return std::numeric_limits<double>::infinity();
  return riccati_residual(A, B, Qx, R, P).norm() / std::max(P.norm(), 1e-300);
}

bool stabilizes(const Matrix& A, const Matrix& B, const Matrix& R, const Matrix& P) {
  return P.allFinite() && spectral_radius(A - B * gain(B, R, A, P)) < 1.0;
}

Matrix hewer_iterate(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, Matrix P) {
  Matrix best = P;
  double best_res = relative_residual(A, B, Qx, R, P);
  int stalled = 0;
  for (int it = 0; it < 40 && stalled < 8 && best_res > 1e-14; ++it) {
    const Matrix K = gain(B, R, A, P);
    try {
      P = sym(solve_dlyap((A - B * K).transpose(), Qx + K.transpose() * R * K));
    } catch (const Error&) {
      break;
    }
    if (!stabilizes(A, B, R, P)) break;
    const double res = relative_residual(A, B, Qx, R, P);
    if (res < best_res) {
      best = P;
      best_res = res;
      stalled = 0;
    } else {
      ++stalled;
    }
  }
  return best;
}

// Newton (Hewer) refinement from a stabilizing gain, run in state coordinates
// where P has unit diagonal. Large P spreads make the unscaled iteration stall
// at the rounding level of the closed-loop products.
Matrix hewer_refine(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, Matrix P) {
  if (!stabilizes(A, B, R, P)) return P;
  for (int round = 0; round < 4; ++round) {
    Vector t = P.diagonal();
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = t(i) > 0.0 ? 1.0 / std::sqrt(t(i)) : 1.0;
    const Eigen::DiagonalMatrix<double, Eigen::Dynamic> T(t);
    const Eigen::DiagonalMatrix<double, Eigen::Dynamic> Ti(t.cwiseInverse());
    const Matrix As = Ti * A * T;
    const Matrix Bs = Ti * B;
    const Matrix Qs = T * Qx * T;
    const Matrix Ps = hewer_iterate(As, Bs, Qs, R, sym(T * P * T));
    const Matrix Pn = sym(Ti * Ps * Ti);
    if (relative_residual(A, B, Qx, R, Pn) <= relative_residual(A, B, Qx, R, P) && stabilizes(A, B, R, Pn)) P = Pn;
  }
  return P;
}

// Structure-preserving doubling; returns false if it did not converge.
bool doubling(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, const DareOptions& opts,
              Matrix& P, long& iterations) {
  const Eigen::Index n = A.rows();
  Matrix Ak = A;
  Matrix Gk = B * R.ldlt().solve(B.transpose());
  Matrix Hk = sym(Qx);
  const Matrix I = Matrix::Identity(n, n);
  for (long it = 1; it <= std::min<long>(opts.max_iter, 200); ++it) {
    const Eigen::PartialPivLU<Matrix> W(I + Gk * Hk);
    const Matrix WA = W.solve(Ak);
    const Matrix WG = W.solve(Gk);
    const Matrix Hn = sym(Hk + Ak.transpose() * Hk * WA);
    Gk = sym(Gk + Ak * WG * Ak.transpose());
    Ak = (Ak * WA).eval();
    const double diff = (Hn - Hk).cwiseAbs().rowwise().sum().maxCoeff();
    const double ref = Hn.cwiseAbs().rowwise().sum().maxCoeff();
    Hk = Hn;
    iterations = it;
    if (!Hk.allFinite()) break;
    if (diff <= opts.tol * ref || ref == 0.0) {
      P = Hk;
      return true;
    }
  }
  P = Hk;
  return false;
}

}  // namespace

RiccatiSolution solve_dare(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R,
                           const DareOptions& opts) {
  const Eigen::Index n = A.rows();
  require(A.cols() == n && B.rows() == n && Qx.rows() == n && Qx.cols() == n && R.rows() == B.cols() &&
              R.cols() == B.cols(),
          ErrorCode::InvalidInput, "solve_dare dimension mismatch");
  require_spd(R, "R");
  RiccatiSolution sol;
  if (opts.method == DareMethod::FixedPoint) {
    Matrix P = sym(Qx);
    bool done = false;
    for (long it = 1; it <= opts.max_iter; ++it) {
      const Matrix Pn = riccati_map(A, B, Qx, R, P);
      const double diff = (Pn - P).cwiseAbs().rowwise().sum().maxCoeff();
      const double ref = P.cwiseAbs().rowwise().sum().maxCoeff();
      P = Pn;
      sol.iterations = it;
      if (diff <= opts.tol * ref || (ref == 0.0 && diff == 0.0)) {
        done = true;
        break;
      }
    }
    if (!done) fail(ErrorCode::NoConvergence, "Riccati iteration exceeded max_iter");
    sol.P = hewer_refine(A, B, Qx, R, P);
  } else {
    Matrix P;
    const bool converged = doubling(A, B, Qx, R, opts, P, sol.iterations);
    if (converged) sol.P = hewer_refine(A, B, Qx, R, P);
    // Doubling loses accuracy on near-defective unit-circle clusters. Value
    // iteration until the gain stabilizes, then Newton, is the fallback.
    if (!converged || relative_residual(A, B, Qx, R, sol.P) > 1e-8 || !stabilizes(A, B, R, sol.P)) {
      Matrix V = sym(Qx);
      bool found = false;
      for (long it = 0; it <= opts.max_iter; ++it) {
        if (it % 50 == 0 && stabilizes(A, B, R, V)) {
          found = true;
          break;
        }
        V = riccati_map(A, B, Qx, R, V);
        ++sol.iterations;
      }
      if (found) {
        V = hewer_refine(A, B, Qx, R, V);
        if (!converged || relative_residual(A, B, Qx, R, V) < relative_residual(A, B, Qx, R, sol.P)) sol.P = V;
      }
      if (!found && !converged) fail(ErrorCode::NoConvergence, "Riccati solvers found no stabilizing solution");
    }
  }
  sol.K = gain(B, R, A, sol.P);
  sol.residual = riccati_residual(A, B, Qx, R, sol.P).norm();
  if (!sol.P.allFinite() || sol.residual > 1e-8 * std::max(sol.P.norm(), 1e-300))
    fail(ErrorCode::NoConvergence, "Riccati residual above 1e-8 relative");
  if (spectral_radius(A - B * sol.K) >= 1.0) fail(ErrorCode::NoConvergence, "Riccati solution is not stabilizing");
  return sol;
}

RiccatiSolution solve_dare(const NonMinimalRealization& r, const LQRWeights& w, const DareOptions& opts) {
  w.validate();
  require(w.Q.rows() == r.p && w.R.rows() == r.m, ErrorCode::InvalidInput, "weight dimensions disagree with (p, m)");
  const double bscale = std::max(r.B.cwiseAbs().maxCoeff(), r.A.cwiseAbs().maxCoeff());
  if (r.D.cwiseAbs().maxCoeff() > 1e-8 * std::max(bscale, 1.0))
    fail(ErrorCode::Unsupported, "LQR synthesis requires zero feedthrough");
  if (!is_stabilizable_pbh(r)) fail(ErrorCode::NotStabilizable, "realization is not stabilizable");
  return solve_dare(r.A, r.B, r.C.transpose() * w.Q * r.C, w.R, opts);
}

Controller::Controller(const NonMinimalRealization& r, const Matrix& Kin)
    : N(r.N), m(r.m), p(r.p), G(injection(r.N, r.m, r.p)), K(Kin) {
  require(K.rows() == r.m && K.cols() == r.states(), ErrorCode::InvalidInput, "gain must be m x states");
  F = r.A - G * r.C - r.B * K;
  chi_hat = Vector::Zero(r.states());
}

Vector Controller::step(const Vector& y_meas, const Vector& y_ref) {
  require(y_meas.size() == p && y_ref.size() == p, ErrorCode::InvalidInput, "controller expects p-vectors");
  const Vector u = -K * chi_hat;
  chi_hat = F * chi_hat + G * (y_meas - y_ref);
  return u;
}

void Controller::reset(const Vector& chi0) {
  require(chi0.size() == F.rows(), ErrorCode::InvalidInput, "controller state dimension mismatch");
  chi_hat = chi0;
}

Controller build_controller(const NonMinimalRealization& r, const Matrix& K) { return Controller(r, K); }

Vector controller_step(Controller& c, const Vector& y_meas, const Vector& y_ref) { return c.step(y_meas, y_ref); }

Vector constant_chi(int N, int m, const Vector& y_level) {
  const int p = static_cast<int>(y_level.size());
  Window w{Matrix::Zero(m, N), Matrix(p, N)};
  for (int i = 0; i < p; ++i) w.y.row(i).setConstant(y_level(i));
  return build_chi(w);
}

Matrix symmetric_sqrt(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(S));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

ClosedLoop closed_loop(const StateSpace& plant, const Controller& c, const LQRWeights& w) {
  plant.validate();
  w.validate();
  require(plant.D.cwiseAbs().maxCoeff() == 0.0, ErrorCode::InvalidInput, "closed loop requires a plant with D = 0");
  require(plant.inputs() == c.m && plant.outputs() == c.p, ErrorCode::InvalidInput, "plant and controller disagree on (m, p)");
  const Eigen::Index n = plant.states();
  const Eigen::Index s = c.F.rows();
  ClosedLoop cl;
  cl.A = Matrix::Zero(n + s, n + s);
  cl.A.topLeftCorner(n, n) = plant.A;
  cl.A.topRightCorner(n, s) = -plant.B * c.K;
  cl.A.bottomLeftCorner(s, n) = c.G * plant.C;
  cl.A.bottomRightCorner(s, s) = c.F;
  cl.B = Matrix::Zero(n + s, c.p);
  cl.B.bottomRows(s) = c.G;
  cl.Cz = Matrix::Zero(c.p + c.m, n + s);
  cl.Cz.topLeftCorner(c.p, n) = symmetric_sqrt(w.Q) * plant.C;
  cl.Cz.bottomRightCorner(c.m, s) = -symmetric_sqrt(w.R) * c.K;
  return cl;
}

double h2_norm(const ClosedLoop& cl) {
  if (spectral_radius(cl.A) >= 1.0) fail(ErrorCode::Unstable, "closed loop is not Schur stable");
  const Matrix P = solve_dlyap(cl.A, cl.B * cl.B.transpose());
  return std::sqrt((cl.Cz * P * cl.Cz.transpose()).trace());
}

ClosedLoopTrace simulate_closed_loop(const StateSpace& plant, Controller c, const Vector& x0, const Vector& chi0,
                                     const NoiseSpec& noise, const Vector& y_ref, int steps) {
  plant.validate();
  require(plant.D.cwiseAbs().maxCoeff() == 0.0, ErrorCode::InvalidInput, "closed loop requires a plant with D = 0");
  require(x0.size() == plant.states(), ErrorCode::InvalidInput, "initial plant state dimension mismatch");
  require(steps >= 0, ErrorCode::InvalidInput, "step count must be nonnegative");
  c.reset(chi0);
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, noise.sigma > 0.0 ? noise.sigma : 1.0);
  ClosedLoopTrace tr{Matrix(c.m, steps), Matrix(c.p, steps), Matrix(c.F.rows(), steps)};
  Vector x = x0;
  for (int t = 0; t < steps; ++t) {
    const Vector y = plant.C * x;
    Vector ym = y;
    if (noise.sigma > 0.0)
      for (Eigen::Index i = 0; i < ym.size(); ++i) ym(i) += normal(rng);
    tr.chi_hat.col(t) = c.chi_hat;
    const Vector u = c.step(ym, y_ref);
    tr.u.col(t) = u;
    tr.y.col(t) = y;
    x = plant.A * x + plant.B * u;
  }
  return tr;
}

}  // namespace ddlti
