#include "ddlti/realization.hpp"

#include <algorithm>
#include <cmath>

#include "ddlti/error.hpp"

namespace ddlti {

NonMinimalRealization build(const Representation& rep) {
  rep.validate();
  const int N = rep.N, m = rep.m, p = rep.p;
  NonMinimalRealization r{N, m, p, {}, {}, {}, {}};
  const int s = r.block_size();
  r.A = Matrix::Zero(p * s, p * s);
  r.B = Matrix::Zero(p * s, m);
  r.C = Matrix::Zero(p, p * s);
  r.D = Matrix::Zero(p, m);
  for (int i = 0; i < p; ++i) {
    const CoefficientRow& row = rep.rows[i];
    const int o = i * s;
    for (int k = 0; k + 1 < N; ++k) r.A(o + k, o + k + 1) = 1.0;
    r.A.block(o + N - 1, o, 1, N) = row.a.transpose();
    for (int k = 0; k < N; ++k) r.A.block(o + N - 1, o + N + k * m, 1, m) = row.b.col(k).transpose();
    for (int k = 0; k + 1 < N; ++k)
      r.A.block(o + N + k * m, o + N + (k + 1) * m, m, m) = Matrix::Identity(m, m);
    r.B.block(o + N - 1, 0, 1, m) = row.b.col(N).transpose();
    r.B.block(o + N + (N - 1) * m, 0, m, m) = Matrix::Identity(m, m);
    r.C.block(i, o, 1, s) = r.A.block(o + N - 1, o, 1, s);
    r.D.row(i) = row.b.col(N).transpose();
  }
  return r;
}

Matrix injection(int N, int m, int p) {
  require(N >= 1 && m >= 1 && p >= 1, ErrorCode::InvalidInput, "injection needs N, m, p >= 1");
  const int s = N * (m + 1);
  Matrix G = Matrix::Zero(p * s, p);
  for (int i = 0; i < p; ++i) G(i * s + N - 1, i) = 1.0;
  return G;
}

Vector build_chi(const Window& window) {
  const int N = static_cast<int>(window.u.cols());
  const int m = static_cast<int>(window.u.rows());
  const int p = static_cast<int>(window.y.rows());
  require(N >= 1 && window.y.cols() == N, ErrorCode::InvalidInput, "window needs N samples of u and y");
  const int s = N * (m + 1);
  Vector chi(p * s);
  const Vector uflat = Eigen::Map<const Vector>(Matrix(window.u).data(), m * N);
  for (int i = 0; i < p; ++i) {
    chi.segment(i * s, N) = window.y.row(i).transpose();
    chi.segment(i * s + N, m * N) = uflat;
  }
  return chi;
}

namespace {

double relative_sigma_min(const ComplexMatrix& M) {
  Eigen::JacobiSVD<ComplexMatrix> dec(M);
  const Vector s = dec.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

std::vector<PbhMargin> pbh(const Matrix& A, const Matrix& X, bool stack_below, double tol) {
  std::vector<PbhMargin> out;
  const Eigen::Index n = A.rows();
  for (const Complex& lam : eigvals(A)) {
    if (std::abs(lam) < 1.0 - tol) continue;
    ComplexMatrix pencil = lam * ComplexMatrix::Identity(n, n) - A.cast<Complex>();
    ComplexMatrix M;
    if (stack_below) {
      M.resize(n + X.rows(), n);
      M << pencil, X.cast<Complex>();
    } else {
      M.resize(n, n + X.cols());
      M << pencil, X.cast<Complex>();
    }
    out.push_back({lam, relative_sigma_min(M)});
  }
  return out;
}

bool all_above(const std::vector<PbhMargin>& ms, double tol) {
  return std::all_of(ms.begin(), ms.end(), [&](const PbhMargin& x) { return x.margin > tol; });
}

// Column k scaled by the coefficient norm of its source row at |lambda|, so
// that a singleton of a nonvanishing row has margin near one.
void finish_witness(RootWitness& w, const std::vector<double>& scales, double indep_tol) {
  ComplexMatrix M = w.vectors;
  for (Eigen::Index k = 0; k < M.cols(); ++k) M.col(k) /= scales[k];
  Eigen::JacobiSVD<ComplexMatrix> dec(M);
  const Vector s = dec.singularValues();
  w.margin = static_cast<Eigen::Index>(s.size()) < M.cols() ? 0.0 : s(s.size() - 1);
  w.independent = w.margin > indep_tol;
}

double row_scale(const std::vector<Polynomial>& num, Complex lam) {
  double s = 0.0;
  int deg = 0;
  for (const Polynomial& q : num) {
    for (double c : q.coeffs()) s += c * c;
    deg = std::max(deg, q.degree());
  }
  return std::max(std::sqrt(s), 1e-300) * std::pow(std::max(1.0, std::abs(lam)), deg);
}

struct Cluster {
  Complex lambda;
  std::vector<int> outputs;
};

// Groups roots with |lambda| >= 1 - tol across outputs; an output belongs to
// a cluster when one of its roots lies within tol of the cluster root.
std::vector<Cluster> unstable_clusters(const std::vector<RootSet>& roots, double tol) {
  std::vector<Cluster> cl;
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    for (const Complex& z : roots[i]) {
      if (std::abs(z) < 1.0 - tol) continue;
      bool found = false;
      for (Cluster& c : cl)
        if (std::abs(c.lambda - z) <= tol) found = true;
      if (!found) cl.push_back({z, {}});
    }
  }
  for (Cluster& c : cl) {
    for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
      int near = 0;
      for (const Complex& z : roots[i])
        if (std::abs(z - c.lambda) <= tol) ++near;
      if (near > 1) fail(ErrorCode::AmbiguousMatch, "a denominator has several roots within tolerance of a shared root");
      if (near == 1) c.outputs.push_back(i);
    }
  }
  return cl;
}

}  // namespace

NonMinimalRealization input_normalized(const NonMinimalRealization& r, Vector* factors) {
  const int N = r.N, m = r.m, s = r.block_size();
  double amax = 0.0;
  for (int i = 0; i < r.p; ++i) amax = std::max(amax, r.A.block(i * s + N - 1, i * s, 1, N).cwiseAbs().maxCoeff());
  amax = std::max(amax, 1.0);
  NonMinimalRealization out = r;
  if (factors) *factors = Vector::Ones(m);
  for (int j = 0; j < m; ++j) {
    double bmax = 0.0;
    for (int i = 0; i < r.p; ++i) {
      const int row = i * s + N - 1;
      for (int k = 0; k < N; ++k) bmax = std::max(bmax, std::abs(r.A(row, i * s + N + k * m + j)));
      bmax = std::max(bmax, std::abs(r.B(row, j)));
    }
    if (bmax == 0.0) continue;
    const double f = amax / bmax;
    if (factors) (*factors)(j) = f;
    for (int i = 0; i < r.p; ++i) {
      const int row = i * s + N - 1;
      for (int k = 0; k < N; ++k) {
        out.A(row, i * s + N + k * m + j) *= f;
        out.C(i, i * s + N + k * m + j) *= f;
      }
      out.B(row, j) *= f;
      out.D(i, j) *= f;
    }
  }
  return out;
}

std::vector<PbhMargin> detectability_margins(const NonMinimalRealization& r, double tol) {
  const NonMinimalRealization n = input_normalized(r);
  return pbh(n.A, n.C, true, tol);
}

std::vector<PbhMargin> stabilizability_margins(const NonMinimalRealization& r, double tol) {
  const NonMinimalRealization n = input_normalized(r);
  return pbh(n.A, n.B, false, tol);
}

bool is_detectable(const NonMinimalRealization& r, double tol) { return all_above(detectability_margins(r, tol), tol); }

bool is_stabilizable_pbh(const NonMinimalRealization& r, double tol) {
  return all_above(stabilizability_margins(r, tol), tol);
}

StabilizabilityReport prop3_condition(const Representation& rep, const std::vector<TransferRow>& rows, double tol,
                                      double pbh_tol) {
  rep.validate();
  require(rows.empty() || static_cast<int>(rows.size()) == rep.p, ErrorCode::InvalidInput,
          "transfer rows must match the output count");
  std::vector<RootSet> roots;
  for (int i = 0; i < rep.p; ++i) roots.push_back(poles(rep, i));

  StabilizabilityReport rep_out;
  for (Cluster& c : unstable_clusters(roots, tol)) {
    for (const TransferRow& tr : rows) {
      if (tr.order() < 1) continue;
      for (const Complex& z : poly_roots(tr.den))
        if (std::abs(z - c.lambda) <= tol) c.lambda = z;
    }
    RootWitness w;
    w.lambda = c.lambda;
    w.outputs = c.outputs;
    w.vectors.resize(rep.m, static_cast<Eigen::Index>(c.outputs.size()));
    std::vector<double> scales;
    for (std::size_t k = 0; k < c.outputs.size(); ++k) {
      const std::vector<Polynomial> num = rep.rows[c.outputs[k]].numerators();
      for (int j = 0; j < rep.m; ++j) w.vectors(j, static_cast<Eigen::Index>(k)) = num[j](c.lambda);
      scales.push_back(row_scale(num, c.lambda));
    }
    finish_witness(w, scales, pbh_tol);
    rep_out.witnesses.push_back(std::move(w));
  }
  rep_out.verdict = std::all_of(rep_out.witnesses.begin(), rep_out.witnesses.end(),
                                [](const RootWitness& w) { return w.independent; });
  const NonMinimalRealization r = build(rep);
  rep_out.pbh = stabilizability_margins(r, pbh_tol);
  rep_out.pbh_verdict = all_above(rep_out.pbh, pbh_tol);
  return rep_out;
}

StabilizabilityReport cor2_report(const std::vector<TransferRow>& rows, double tol, double indep_tol) {
  std::vector<RootSet> roots;
  for (const TransferRow& tr : rows) roots.push_back(tr.order() >= 1 ? poly_roots(tr.den) : RootSet{});
  StabilizabilityReport out;
  for (const Cluster& c : unstable_clusters(roots, tol)) {
    if (c.outputs.size() < 2) continue;
    RootWitness w;
    w.lambda = c.lambda;
    w.outputs = c.outputs;
    const int m = rows[c.outputs[0]].inputs();
    w.vectors.resize(m, static_cast<Eigen::Index>(c.outputs.size()));
    std::vector<double> scales;
    for (std::size_t k = 0; k < c.outputs.size(); ++k) {
      const TransferRow& tr = rows[c.outputs[k]];
      for (int j = 0; j < m; ++j) w.vectors(j, static_cast<Eigen::Index>(k)) = tr.num[j](c.lambda);
      scales.push_back(row_scale(tr.num, c.lambda));
    }
    finish_witness(w, scales, indep_tol);
    out.witnesses.push_back(std::move(w));
  }
  out.verdict = std::all_of(out.witnesses.begin(), out.witnesses.end(),
                            [](const RootWitness& w) { return w.independent; });
  out.pbh_verdict = out.verdict;
  return out;
}

bool cor2_condition2(const std::vector<TransferRow>& rows, double tol) { return cor2_report(rows, tol).verdict; }

}  // namespace ddlti
