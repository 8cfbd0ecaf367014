#include "ddlti/ddrep.hpp"

#include <algorithm>
#include <cmath>

#include "ddlti/error.hpp"

namespace ddlti {

RowVector CoefficientRow::packed() const {
  const int n = N();
  const int mm = m();
  RowVector h(mm * (n + 1) + n);
  for (int k = 0; k <= n; ++k) h.segment(k * mm, mm) = b.col(k).transpose();
  h.tail(n) = a.transpose();
  return h;
}

CoefficientRow CoefficientRow::unpack(const RowVector& packed, int N, int m, int output) {
  require(packed.size() == m * (N + 1) + N, ErrorCode::InvalidInput, "packed row has the wrong length");
  CoefficientRow row;
  row.output = output;
  row.b.resize(m, N + 1);
  for (int k = 0; k <= N; ++k) row.b.col(k) = packed.segment(k * m, m).transpose();
  row.a = packed.tail(N).transpose();
  return row;
}

Polynomial CoefficientRow::denominator() const {
  std::vector<double> c(static_cast<std::size_t>(N()) + 1);
  for (int k = 0; k < N(); ++k) c[k] = -a(k);
  c[N()] = 1.0;
  return Polynomial(std::move(c));
}

Polynomial CoefficientRow::numerator(int j) const {
  require(j >= 0 && j < m(), ErrorCode::InvalidInput, "input index out of range");
  return Polynomial::from_vector(b.row(j).transpose());
}

std::vector<Polynomial> CoefficientRow::numerators() const {
  std::vector<Polynomial> out;
  for (int j = 0; j < m(); ++j) out.push_back(numerator(j));
  return out;
}

bool Representation::rank_condition_met(int i, int n_i) const {
  require(i >= 0 && i < static_cast<int>(ranks.size()), ErrorCode::InvalidInput, "no rank recorded for output");
  return ranks[i] == m * (N + 1) + n_i;
}

void Representation::validate() const {
  require(N >= 1 && m >= 1 && p >= 1, ErrorCode::InvalidInput, "representation needs N, m, p >= 1");
  require(static_cast<int>(rows.size()) == p, ErrorCode::InvalidInput, "representation needs one row per output");
  for (const CoefficientRow& r : rows) {
    require(r.N() == N && r.m() == m && r.b.cols() == N + 1, ErrorCode::InvalidInput,
            "coefficient row shape disagrees with N, m");
    require(r.a.allFinite() && r.b.allFinite(), ErrorCode::InvalidInput, "coefficient row is not finite");
  }
}

Representation fit(const DataBlocks& blocks, std::optional<double> tol) {
  require(blocks.columns() > 0 && blocks.N >= 1, ErrorCode::InvalidInput, "empty data blocks");
  if (tol) require(*tol >= 0.0, ErrorCode::InvalidInput, "truncation tolerance must be nonnegative");
  Representation rep{blocks.N, blocks.m, blocks.p, {}, {}};
  for (int i = 0; i < blocks.p; ++i) {
    const Matrix H = blocks.H_i(i);
    const double t = tol ? *tol : default_tolerance(H);
    const RowVector h = blocks.Yf_i(i) * pinv_truncated(H, t);
    rep.rows.push_back(CoefficientRow::unpack(h, blocks.N, blocks.m, i));
    rep.ranks.push_back(numerical_rank(H, t));
  }
  return rep;
}

Representation fit_with_ginverse(const DataBlocks& blocks, std::uint64_t seed) {
  require(blocks.p == 1, ErrorCode::Unsupported, "generalized-inverse fit supports a single output only");
  require(blocks.columns() > 0, ErrorCode::InvalidInput, "empty data blocks");
  const Matrix H = blocks.H_i(0);
  const RowVector h = blocks.Yf_i(0) * random_generalized_inverse(H, seed);
  return {blocks.N, blocks.m, 1, {CoefficientRow::unpack(h, blocks.N, blocks.m, 0)}, {numerical_rank(H)}};
}

Representation fit_averaged(const std::vector<DataBlocks>& datasets, std::optional<double> tol) {
  require(!datasets.empty(), ErrorCode::InvalidInput, "no datasets to average");
  const DataBlocks& ref = datasets.front();
  Representation rep{ref.N, ref.m, ref.p, {}, {}};
  for (int i = 0; i < ref.p; ++i)
    rep.rows.push_back(CoefficientRow::unpack(average_predictor(datasets, tol, i), ref.N, ref.m, i));
  return rep;
}

Representation without_feedthrough(Representation rep) {
  rep.validate();
  for (CoefficientRow& r : rep.rows) r.b.col(rep.N).setZero();
  return rep;
}

Vector step(const Representation& rep, const std::vector<RegressorStack>& regs) {
  require(static_cast<int>(regs.size()) == rep.p, ErrorCode::InvalidInput, "need one regressor stack per output");
  Vector y(rep.p);
  for (int i = 0; i < rep.p; ++i) {
    const CoefficientRow& r = rep.rows[i];
    const RegressorStack& g = regs[i];
    require(g.u_past.rows() == rep.m && g.u_past.cols() == rep.N && g.u_now.size() == rep.m &&
                g.y_past.size() == rep.N,
            ErrorCode::InvalidInput, "regressor stack shape mismatch");
    double v = r.a.dot(g.y_past) + r.b.col(rep.N).dot(g.u_now);
    for (int k = 0; k < rep.N; ++k) v += r.b.col(k).dot(g.u_past.col(k));
    y(i) = v;
  }
  return y;
}

Matrix predict_recursive(const Representation& rep, const Matrix& u, const Window& init) {
  rep.validate();
  const int N = rep.N;
  require(u.rows() == rep.m, ErrorCode::InvalidInput, "input row count must equal m");
  require(init.u.rows() == rep.m && init.u.cols() == N && init.y.rows() == rep.p && init.y.cols() == N,
          ErrorCode::InvalidInput, "initial window must be N samples of (u, y)");
  const Eigen::Index T = u.cols();
  Matrix uh(rep.m, N + T), yh(rep.p, N + T);
  uh << init.u, u;
  yh.leftCols(N) = init.y;
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int i = 0; i < rep.p; ++i) {
      const CoefficientRow& r = rep.rows[i];
      double v = r.a.dot(yh.row(i).segment(t, N).transpose());
      for (int k = 0; k <= N; ++k) v += r.b.col(k).dot(uh.col(t + k));
      yh(i, N + t) = v;
    }
  }
  return yh.rightCols(T);
}

RootSet poles(const Representation& rep, int i) {
  require(i >= 0 && i < rep.p, ErrorCode::InvalidInput, "output index out of range");
  return poly_roots(rep.rows[i].denominator());
}

LatentFactorization latent_factorize(const Representation& rep, int i, const TransferRow& true_row, double tol) {
  require(i >= 0 && i < rep.p, ErrorCode::InvalidInput, "output index out of range");
  require(true_row.order() <= rep.N, ErrorCode::InvalidInput, "system order exceeds the window N");
  require(true_row.inputs() == rep.m, ErrorCode::InvalidInput, "transfer row input count mismatch");
  const CoefficientRow& r = rep.rows[i];
  const Division div = poly_div_exact(r.denominator(), true_row.den, tol);
  LatentFactorization out;
  out.system = true_row.den;
  out.latent = div.quotient.is_zero() ? Polynomial{1.0} : div.quotient.monic();
  out.denominator_residual = div.residual_norm;
  for (int j = 0; j < rep.m; ++j)
    out.numerator_residual =
        std::max(out.numerator_residual, coeff_distance(r.numerator(j), out.latent * true_row.num[j]));
  if (out.denominator_residual > tol || out.numerator_residual > tol)
    fail(ErrorCode::FactorizationFailed, "fitted row does not factor through the true transfer row");
  return out;
}

PoleClasses classify_poles(const RootSet& all, const RootSet& system_roots, double tol) {
  require(all.size() >= system_roots.size(), ErrorCode::InvalidInput, "fewer poles than system roots");
  for (const Complex& s : system_roots) {
    int near = 0;
    for (const Complex& z : all)
      if (std::abs(z - s) <= tol) ++near;
    if (near > 1) fail(ErrorCode::AmbiguousMatch, "two poles lie within tolerance of one system root");
  }
  const RootMatch match = match_roots(system_roots, all, tol);
  PoleClasses out;
  std::vector<bool> is_system(all.size(), false);
  for (const auto& pr : match.pairs) is_system[pr.second] = true;
  for (std::size_t k = 0; k < all.size(); ++k) (is_system[k] ? out.system : out.latent).push_back(all[k]);
  return out;
}

}  // namespace ddlti
