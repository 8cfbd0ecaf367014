#include "ddlti/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ddlti/error.hpp"

namespace ddlti {

void StateSpace::validate() const {
  const auto n = A.rows();
  require(A.cols() == n, ErrorCode::InvalidInput, "A must be square");
  require(B.rows() == n, ErrorCode::InvalidInput, "B row count must match A");
  require(C.cols() == n, ErrorCode::InvalidInput, "C column count must match A");
  require(D.rows() == C.rows() && D.cols() == B.cols(), ErrorCode::InvalidInput,
          "D must be outputs x inputs");
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(C, "C");
  require_finite(D, "D");
}

Matrix simulate(const StateSpace& ss, const Vector& x0, const Matrix& u, Vector* x_final) {
  ss.validate();
  require(x0.size() == ss.states(), ErrorCode::InvalidInput, "initial state dimension mismatch");
  require(u.rows() == ss.inputs(), ErrorCode::InvalidInput, "input row count must equal m");
  Matrix y(ss.outputs(), u.cols());
  Vector x = x0;
  for (Eigen::Index t = 0; t < u.cols(); ++t) {
    y.col(t) = ss.C * x + ss.D * u.col(t);
    x = ss.A * x + ss.B * u.col(t);
  }
  if (x_final) *x_final = x;
  return y;
}

Matrix expm(const Matrix& M) {
  require(M.rows() == M.cols(), ErrorCode::InvalidInput, "expm needs a square matrix");
  require_finite(M, "expm input");
  const Eigen::Index n = M.rows();
  const double norm = M.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix X = M / std::ldexp(1.0, s);
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k < 64; ++k) {
    term = (term * X / static_cast<double>(k)).eval();
    sum += term;
    if (term.norm() <= 1e-16 * sum.norm()) break;
  }
  for (int i = 0; i < s; ++i) sum = (sum * sum).eval();
  return sum;
}

DiscretePair zoh_discretize(const Matrix& Ac, const Matrix& Bc, double Ts) {
  require(Ts > 0.0, ErrorCode::InvalidInput, "sampling period must be positive");
  require(Ac.rows() == Ac.cols() && Bc.rows() == Ac.rows(), ErrorCode::InvalidInput,
          "zoh_discretize dimension mismatch");
  const Eigen::Index n = Ac.rows();
  const Eigen::Index m = Bc.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = Ac * Ts;
  aug.topRightCorner(n, m) = Bc * Ts;
  const Matrix E = expm(aug);
  return {E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

StateSpace Plant::discrete() const {
  const DiscretePair d = zoh_discretize(continuous.A, continuous.B, Ts);
  return {d.A, d.B, continuous.C, continuous.D};
}

Plant msd() {
  const double m1 = 10, m2 = 9, k0 = 0.5, k1 = 9, k2 = 0.1, d0 = 0.2, d1 = 1.8, d2 = 0.3;
  Matrix A(4, 4);
  A << 0, 0, 1, 0,
       0, 0, 0, 1,
       -(k0 + k1) / m1, k1 / m1, -(d0 + d1) / m1, d1 / m1,
       k1 / m2, -(k1 + k2) / m2, d1 / m2, -(d1 + d2) / m2;
  Matrix B(4, 1);
  B << 0, 0, 1 / m1, 0;
  Matrix C(1, 4);
  C << 1, 0, 0, 0;
  return {"msd", {A, B, C, Matrix::Zero(1, 1)}, 0.05};
}

Plant inverted_pendulum() {
  const double M = 0.5, m = 0.2, b = 0.1, l = 0.3, I = 0.006, g = 9.81;
  Eigen::Matrix2d mass;
  mass << M + m, -m * l, -m * l, I + m * l * l;
  const Eigen::Matrix2d mi = mass.inverse();
  Matrix A(4, 4);
  A << 0, 1, 0, 0,
       0, -b * mi(0, 0), mi(0, 1) * m * g * l, 0,
       0, 0, 0, 1,
       0, -b * mi(1, 0), mi(1, 1) * m * g * l, 0;
  Matrix B(4, 1);
  B << 0, mi(0, 0), 0, mi(1, 0);
  Matrix C(1, 4);
  C << 1, 0, 2 * l, 0;
  return {"pendulum", {A, B, C, Matrix::Zero(1, 1)}, 0.05};
}

Plant submarine() {
  const double v = 3.086;
  Matrix A(4, 4);
  A << -0.0123 * v, 0.29029 * v, 0, 0.000475 * v,
       0.000554 * v, -0.02979 * v, 0, -0.001817 * v,
       1, 0, 0, -v,
       0, 1, 0, 0;
  Matrix B(4, 2);
  B << -0.000791, -0.002399,
       0.00018178, -0.000233,
       0, 0,
       0, 0;
  B *= v * v;
  Matrix C = Matrix::Zero(2, 4);
  C(0, 2) = 1;
  C(1, 3) = 1;
  return {"submarine", {A, B, C, Matrix::Zero(2, 2)}, 0.05};
}

Plant plant_by_name(const std::string& name) {
  if (name == "msd") return msd();
  if (name == "pendulum") return inverted_pendulum();
  if (name == "submarine") return submarine();
  fail(ErrorCode::InvalidInput, "unknown plant '" + name + "'");
}

std::vector<Matrix> markov_parameters(const StateSpace& ss, int count) {
  ss.validate();
  std::vector<Matrix> h;
  if (count <= 0) return h;
  h.push_back(ss.D);
  Matrix AkB = ss.B;
  for (int k = 1; k < count; ++k) {
    h.push_back(ss.C * AkB);
    AkB = (ss.A * AkB).eval();
  }
  return h;
}

Matrix impulse_response(const TransferRow& row, int count) {
  const int n = row.den.degree();
  const int m = row.inputs();
  Matrix h = Matrix::Zero(m, std::max(count, 0));
  for (int j = 0; j < m; ++j) {
    const Polynomial& N = row.num[j];
    for (int k = 0; k < count; ++k) {
      double v = N[n - k];
      for (int i = 0; i < k; ++i) v -= row.den[n - k + i] * h(j, i);
      h(j, k) = v;
    }
  }
  return h;
}

namespace {

struct Characteristic {
  Polynomial charpoly;
  std::vector<Matrix> adj;  // adj(zI - A) = sum_k adj[k] z^{n-1-k}
};

// Faddeev-LeVerrier recursion.
Characteristic faddeev_leverrier(const Matrix& A) {
  const Eigen::Index n = A.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[n] = 1.0;
  Characteristic out;
  Matrix Mk = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k > 1) Mk = (A * Mk).eval() + c[n - k + 1] * Matrix::Identity(n, n);
    out.adj.push_back(Mk);
    c[n - k] = -(A * Mk).trace() / static_cast<double>(k);
  }
  out.charpoly = Polynomial(std::move(c));
  return out;
}

// A k-fold root of p is a simple root of its (k-1)-th derivative; clusters of
// nearly coincident computed roots are replaced by a Newton-polished root there.
RootSet merge_clusters(const Polynomial& p, RootSet roots, double rel_tol) {
  const std::size_t n = roots.size();
  std::vector<bool> done(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    done[i] = true;
    std::vector<std::size_t> members{i};
    for (std::size_t k = 0; k < members.size(); ++k)
      for (std::size_t j = 0; j < n; ++j)
        if (!done[j] &&
            std::abs(roots[j] - roots[members[k]]) <= rel_tol * std::max(1.0, std::abs(roots[members[k]]))) {
          done[j] = true;
          members.push_back(j);
        }
    if (members.size() < 2) continue;
    Complex z(0.0, 0.0);
    for (std::size_t j : members) z += roots[j];
    z /= static_cast<double>(members.size());
    Polynomial f = p;
    for (std::size_t k = 1; k < members.size(); ++k) f = f.derivative();
    const Polynomial df = f.derivative();
    for (int it = 0; it < 8; ++it) {
      const Complex d = df(z);
      if (std::abs(d) == 0.0) break;
      const Complex step = f(z) / d;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z))) z = Complex(z.real(), 0.0);
    for (std::size_t j : members) roots[j] = z;
  }
  return roots;
}

}  // namespace

std::vector<TransferRow> tf_rows(const StateSpace& ss, double cancel_tol) {
  ss.validate();
  const int n = ss.states();
  const int m = ss.inputs();
  const Characteristic ch = faddeev_leverrier(ss.A);
  const RootSet den_roots = n > 0 ? merge_clusters(ch.charpoly, poly_roots(ch.charpoly), 1e-5) : RootSet{};

  std::vector<TransferRow> rows;
  for (int i = 0; i < ss.outputs(); ++i) {
    TransferRow row;
    std::vector<RootSet> num_roots(m);
    std::vector<Polynomial> num(m);
    for (int j = 0; j < m; ++j) {
      std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
      for (int k = 0; k < n; ++k) c[n - 1 - k] = ss.C.row(i) * ch.adj[k] * ss.B.col(j);
      num[j] = Polynomial(std::move(c)) + ss.D(i, j) * ch.charpoly;
      if (num[j].degree() >= 1) num_roots[j] = poly_roots(num[j]);
    }

    RootSet cancelled;
    std::vector<std::vector<bool>> used(m);
    for (int j = 0; j < m; ++j) used[j].assign(num_roots[j].size(), false);
    for (const Complex& lam : den_roots) {
      bool all = true;
      std::vector<int> pick(m, -1);
      for (int j = 0; j < m && all; ++j) {
        if (num[j].is_zero()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < static_cast<int>(num_roots[j].size()); ++r) {
          if (used[j][r]) continue;
          const double d = std::abs(num_roots[j][r] - lam);
          if (d < best) {
            best = d;
            pick[j] = r;
          }
        }
        if (best > cancel_tol) {
          if (best <= 10.0 * cancel_tol)
            fail(ErrorCode::ReductionAmbiguous, "pole-zero distance too close to the cancellation tolerance");
          all = false;
        }
      }
      if (!all) continue;
      for (int j = 0; j < m; ++j)
        if (pick[j] >= 0) used[j][pick[j]] = true;
      cancelled.push_back(lam);
    }

    const Polynomial common = Polynomial::from_roots(cancelled);
    const double div_tol = 1e-6;
    Division dd = poly_div_exact(ch.charpoly, common, div_tol * std::max(1.0, ch.charpoly.max_abs()));
    if (!dd.divisible) fail(ErrorCode::ReductionAmbiguous, "denominator reduction left a residual");
    row.den = dd.quotient.monic();
    for (int j = 0; j < m; ++j) {
      if (num[j].is_zero()) {
        row.num.emplace_back();
        continue;
      }
      Division nd = poly_div_exact(num[j], common, div_tol * std::max(1.0, num[j].max_abs()));
      if (!nd.divisible) fail(ErrorCode::ReductionAmbiguous, "numerator reduction left a residual");
      row.num.push_back(nd.quotient.scaled(1.0 / dd.quotient.leading()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

int rank_rel(const Matrix& M, double rel) {
  if (M.size() == 0) return 0;
  const Vector s = singular_values(M);
  if (s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

Matrix markov_hankel(const std::vector<Matrix>& h, int rows_out, int cols_in, int blocks) {
  Matrix H(rows_out * blocks, cols_in * blocks);
  for (int i = 0; i < blocks; ++i)
    for (int j = 0; j < blocks; ++j) H.block(i * rows_out, j * cols_in, rows_out, cols_in) = h[i + j + 1];
  return H;
}

}  // namespace

SystemStructure structure(const StateSpace& ss) {
  ss.validate();
  const int n = ss.states();
  const int m = ss.inputs();
  const int p = ss.outputs();
  SystemStructure out;
  const std::vector<Matrix> h = markov_parameters(ss, 2 * n + 1);

  // Rank tests run on (A - cI)/s, whose Krylov and observability spaces match
  // those of A. At small sampling periods A is close to I and the plain
  // Markov Hankel matrix loses the slow directions below any fixed threshold.
  Matrix As = ss.A;
  if (n > 0) {
    As -= (ss.A.trace() / n) * Matrix::Identity(n, n);
    const double scale = As.norm();
    if (scale > 0.0) As /= scale;
  }
  const StateSpace centered{As, ss.B, ss.C, ss.D};
  const std::vector<Matrix> hs = markov_parameters(centered, 2 * n + 1);
  out.order = n > 0 ? rank_rel(markov_hankel(hs, p, m, n), 1e-8) : 0;

  Matrix On(p * n, n);
  Matrix CAk = ss.C;
  for (int k = 0; k < n; ++k) {
    On.middleRows(k * p, p) = CAk;
    CAk = (CAk * As).eval();
  }
  const int full = rank_rel(On, 1e-8);
  for (int i = 1; i <= n; ++i) {
    if (rank_rel(On.topRows(i * p), 1e-8) == full) {
      out.lag = i;
      break;
    }
  }

  for (int i = 0; i < p; ++i) {
    std::vector<Matrix> hi;
    for (const Matrix& hk : hs) hi.push_back(hk.row(i));
    out.output_orders.push_back(n > 0 ? rank_rel(markov_hankel(hi, 1, m, n), 1e-8) : 0);
    int nu = -1;
    for (int k = 0; k < static_cast<int>(h.size()); ++k) {
      if (h[k].row(i).cwiseAbs().maxCoeff() > 1e-10) {
        nu = k;
        break;
      }
    }
    out.relative_degree.push_back(nu);
  }
  return out;
}

StateSpace similarity_transform(const StateSpace& ss, const Matrix& T) {
  const Matrix Ti = T.inverse();
  return {Ti * ss.A * T, Ti * ss.B, ss.C * T, ss.D};
}

}  // namespace ddlti
