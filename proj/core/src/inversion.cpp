#include "ddlti/inversion.hpp"

#include <cmath>

#include "ddlti/error.hpp"
#include "ddlti/format.hpp"

namespace ddlti {

Matrix InversionBlocks::H() const {
  Matrix S(Up.rows() + Yp.rows() + YfL.rows(), columns());
  S << Up, Yp, YfL;
  return S;
}

InversionBlocks build_inversion_blocks(const Trajectory& traj, int N, int L) {
  traj.validate();
  require(traj.inputs() == 1 && traj.outputs() == 1, ErrorCode::Unsupported, "inversion supports SISO data only");
  require(N >= 1 && L >= 0, ErrorCode::InvalidInput, "inversion needs N >= 1 and L >= 0");
  const int T = traj.length() - N - L;
  require(T >= 1, ErrorCode::InvalidInput, "trajectory shorter than N+L+1 samples");
  InversionBlocks b;
  b.N = N;
  b.L = L;
  b.Up.resize(N, T);
  b.Uf.resize(1, T);
  b.Yp.resize(N, T);
  b.YfL.resize(L + 1, T);
  for (int j = 0; j < T; ++j) {
    for (int k = 0; k < N; ++k) {
      b.Up(k, j) = traj.u(0, j + k);
      b.Yp(k, j) = traj.y(0, j + k);
    }
    b.Uf(0, j) = traj.u(0, j + N);
    for (int l = 0; l <= L; ++l) b.YfL(l, j) = traj.y(0, j + N + l);
  }
  return b;
}

bool rank_condition_inv(const InversionBlocks& blocks, int n, int nu) {
  const int target = blocks.N + n + blocks.L - nu + 1;
  if (blocks.columns() < target) return false;
  return numerical_rank(blocks.H()) == target;
}

Polynomial InverseRepresentation::gamma_polynomial() const {
  std::vector<double> c(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k < N; ++k) c[k] = -gamma(k);
  c[N] = 1.0;
  return Polynomial(std::move(c));
}

Polynomial InverseRepresentation::delta_polynomial() const { return Polynomial::from_vector(delta); }

RowVector InverseRepresentation::packed() const {
  RowVector h(gamma.size() + delta.size());
  h << gamma.transpose(), delta.transpose();
  return h;
}

InverseRepresentation fit_inverse(const InversionBlocks& blocks, std::optional<double> tol) {
  require(blocks.columns() > 0, ErrorCode::InvalidInput, "empty inversion blocks");
  const Matrix H = blocks.H();
  const double t = tol ? *tol : default_tolerance(H);
  const RowVector h = blocks.Uf * pinv_truncated(H, t);
  InverseRepresentation ir;
  ir.N = blocks.N;
  ir.L = blocks.L;
  ir.gamma = h.head(blocks.N).transpose();
  ir.delta = h.tail(blocks.N + blocks.L + 1).transpose();
  return ir;
}

double estimate_step(const InverseRepresentation& ir, const Vector& uhat_window, const Vector& y_window) {
  require(uhat_window.size() == ir.N && y_window.size() == ir.N + ir.L + 1, ErrorCode::InvalidInput,
          "estimation windows must have lengths N and N+L+1");
  return ir.gamma.dot(uhat_window) + ir.delta.dot(y_window);
}

Vector estimate_recursive(const InverseRepresentation& ir, const Vector& y, const Vector& init_guess) {
  require(init_guess.size() == ir.N, ErrorCode::InvalidInput, "initial guess must have N samples");
  const Eigen::Index K = y.size() - ir.L;
  require(K >= ir.N, ErrorCode::InvalidInput, "output sequence too short for the initial window");
  Vector uh(K);
  uh.head(ir.N) = init_guess;
  for (Eigen::Index k = ir.N; k < K; ++k)
    uh(k) = estimate_step(ir, uh.segment(k - ir.N, ir.N), y.segment(k - ir.N, ir.N + ir.L + 1));
  return uh;
}

InverseFactorization factorize_inverse(const InverseRepresentation& ir, const Polynomial& num, const Polynomial& den,
                                       double tol) {
  require(!num.is_zero(), ErrorCode::InvalidInput, "numerator must be nonzero");
  const double rho = num.leading();
  const Polynomial pn = num.scaled(1.0 / rho);
  const Division div = poly_div_exact(ir.gamma_polynomial(), pn, tol);
  InverseFactorization out;
  out.latent = div.quotient.is_zero() ? Polynomial{1.0} : div.quotient.monic();
  out.numerator_residual = div.residual_norm;
  out.denominator_residual = coeff_distance(ir.delta_polynomial(), out.latent * den.scaled(1.0 / rho));
  if (out.numerator_residual > tol || out.denominator_residual > tol)
    fail(ErrorCode::FactorizationFailed, "inverse row does not factor through the true transfer function");
  return out;
}

DobTrace dob_simulate(const StateSpace& ss, const InverseRepresentation& ir, const DOBConfig& cfg, int steps) {
  ss.validate();
  require(ss.inputs() == 1 && ss.outputs() == 1, ErrorCode::Unsupported, "the disturbance observer is SISO only");
  require(ss.D.cwiseAbs().maxCoeff() == 0.0, ErrorCode::InvalidInput,
          "the disturbance observer needs a strictly proper plant");
  require(steps >= 0 && cfg.u0.size() >= steps && cfg.d.size() >= steps, ErrorCode::InvalidInput,
          "command and disturbance must cover every step");
  require(cfg.exact_init || cfg.uhat_init.size() == ir.N, ErrorCode::InvalidInput,
          "initial estimate window must have N samples");
  require(ir.L >= 1, ErrorCode::InvalidInput, "the disturbance observer needs a delay L >= 1");
  const int N = ir.N, L = ir.L;
  DobTrace tr;
  tr.u0 = cfg.u0.head(steps);
  tr.d = cfg.d.head(steps);
  tr.u = Vector::Zero(steps);
  tr.y = Vector::Zero(steps);
  tr.dhat = Vector::Zero(steps);
  tr.uhat = Vector::Zero(steps);
  for (const Complex& z : poly_roots(ir.gamma_polynomial()))
    if (std::abs(z) >= 1.0) tr.non_minimum_phase = true;

  Vector est = Vector::Zero(std::max(steps, 1));
  Vector x = cfg.x0.size() ? cfg.x0 : Vector::Zero(ss.states());
  require(x.size() == ss.states(), ErrorCode::InvalidInput, "initial plant state dimension mismatch");
  for (int t = 0; t < steps; ++t) {
    tr.y(t) = (ss.C * x)(0);
    if (t >= L) {
      const int k = t - L;
      if (k < N)
        est(k) = cfg.exact_init ? tr.u(k) : cfg.uhat_init(k);
      else
        est(k) = estimate_step(ir, est.segment(k - N, N), tr.y.segment(k - N, N + L + 1));
      tr.uhat(t) = est(k);
      tr.dhat(t) = est(k) - (tr.u0(k) - tr.dhat(k));
    }
    tr.u(t) = tr.u0(t) - tr.dhat(t) + tr.d(t);
    x = ss.A * x + ss.B * Vector::Constant(1, tr.u(t));
  }
  return tr;
}

void write_dob_csv(std::ostream& out, const DobTrace& trace) {
  out << "t,u0,d,u,y,dhat,uhat\n";
  for (Eigen::Index t = 0; t < trace.u.size(); ++t) {
    out << t << ',' << format_double(trace.u0(t)) << ',' << format_double(trace.d(t)) << ','
        << format_double(trace.u(t)) << ',' << format_double(trace.y(t)) << ',' << format_double(trace.dhat(t))
        << ',' << format_double(trace.uhat(t)) << '\n';
  }
}

}  // namespace ddlti
