#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddlti::testing {

int PlantSampler::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

double PlantSampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

RootSet PlantSampler::sample_roots(int count, double radius, double min_separation, const RootSet& avoid) {
  for (;;) {
    RootSet roots;
    while (static_cast<int>(roots.size()) < count) {
      if (count - static_cast<int>(roots.size()) >= 2 && uniform(0.0, 1.0) < 0.5) {
        const double mod = uniform(0.05, radius);
        const double ang = uniform(0.15, std::numbers::pi - 0.15);
        roots.emplace_back(std::polar(mod, ang));
        roots.emplace_back(std::polar(mod, -ang));
      } else {
        roots.emplace_back(uniform(-radius, radius), 0.0);
      }
    }
    bool ok = true;
    for (std::size_t i = 0; i < roots.size() && ok; ++i) {
      for (std::size_t j = i + 1; j < roots.size() && ok; ++j)
        if (std::abs(roots[i] - roots[j]) < min_separation) ok = false;
      for (const Complex& a : avoid)
        if (std::abs(roots[i] - a) < min_separation) ok = false;
    }
    if (ok) return roots;
  }
}

StateSpace canonical_siso(const Polynomial& den, const Polynomial& num) {
  const int n = den.degree();
  const Polynomial d = den.monic();
  StateSpace ss{Matrix::Zero(n, n), Matrix::Zero(n, 1), Matrix::Zero(1, n), Matrix::Zero(1, 1)};
  for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (int k = 0; k < n; ++k) ss.A(n - 1, k) = -d[k];
  ss.B(n - 1, 0) = 1.0;
  // num = c_n d + remainder, with remainder of degree < n
  const double dn = num.degree() == n ? num[n] / den.leading() : 0.0;
  const Polynomial rem = (1.0 / den.leading()) * num - dn * d;
  for (int k = 0; k < n; ++k) ss.C(0, k) = rem[k];
  ss.D(0, 0) = dn;
  return ss;
}

StateSpace PlantSampler::siso(const RandomPlantSpec& spec) {
  const RootSet poles = sample_roots(spec.order, spec.radius, spec.min_separation);
  const int zero_count = spec.order - spec.relative_degree;
  const RootSet zeros = sample_roots(zero_count, spec.radius, spec.min_separation, poles);
  const double gain = uniform(0.5, 2.0) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
  return canonical_siso(Polynomial::from_roots(poles), gain * Polynomial::from_roots(zeros));
}

StateSpace PlantSampler::mimo(const RandomPlantSpec& spec) {
  const int n = spec.order;
  const RootSet poles = sample_roots(n, spec.radius, spec.min_separation);
  Matrix Ad = Matrix::Zero(n, n);
  for (int k = 0; k < n;) {
    if (std::abs(poles[k].imag()) > 0.0) {
      Ad(k, k) = poles[k].real();
      Ad(k + 1, k + 1) = poles[k].real();
      Ad(k, k + 1) = poles[k].imag();
      Ad(k + 1, k) = -poles[k].imag();
      k += 2;
    } else {
      Ad(k, k) = poles[k].real();
      ++k;
    }
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix T(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) T(i, j) = normal(rng_);
  Eigen::HouseholderQR<Matrix> qr(T);
  const Matrix Qm = qr.householderQ();
  StateSpace ss{Qm * Ad * Qm.transpose(), Matrix(n, spec.inputs), Matrix(spec.outputs, n),
                Matrix::Zero(spec.outputs, spec.inputs)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < spec.inputs; ++j) ss.B(i, j) = normal(rng_);
  for (int i = 0; i < spec.outputs; ++i)
    for (int j = 0; j < n; ++j) ss.C(i, j) = normal(rng_);
  return ss;
}

StateSpace PlantSampler::minimum_phase(int order, int relative_degree, double zero_radius) {
  const RootSet poles = sample_roots(order, 0.95, 1e-2);
  const RootSet zeros = sample_roots(order - relative_degree, zero_radius, 1e-2, poles);
  const double gain = uniform(0.5, 2.0);
  return canonical_siso(Polynomial::from_roots(poles), gain * Polynomial::from_roots(zeros));
}

Trajectory exact_data(const StateSpace& ss, int N, std::uint64_t seed, int extra_columns) {
  const int m = ss.inputs();
  const int columns = m * (N + 1) + ss.states() + extra_columns;
  const Matrix u = pe_input(m, N + columns, 1.0, seed);
  return collect(ss, Vector::Zero(ss.states()), u);
}

Representation oracle_representation(const std::vector<TransferRow>& rows, int N, int m) {
  Representation rep;
  rep.N = N;
  rep.m = m;
  rep.p = static_cast<int>(rows.size());
  for (int i = 0; i < rep.p; ++i) {
    const MonicMinimizer mc = minimize_Cstar(rows[i].den, rows[i].num, N - rows[i].order());
    const Polynomial den = mc.r * rows[i].den;
    CoefficientRow row;
    row.output = i;
    row.a = Vector(N);
    row.b = Matrix::Zero(m, N + 1);
    for (int k = 0; k < N; ++k) row.a(k) = -den[k];
    for (int j = 0; j < m; ++j) {
      const Polynomial num = mc.r * rows[i].num[j];
      for (int k = 0; k <= N; ++k) row.b(j, k) = num[k];
    }
    rep.rows.push_back(row);
  }
  return rep;
}

Matrix model_lqr_gain(const Matrix& A, const Matrix& B, const Matrix& Qx, const Matrix& R, int max_iter) {
  Matrix P = Qx;
  Matrix K = Matrix::Zero(B.cols(), A.rows());
  for (int it = 0; it < max_iter; ++it) {
    const Matrix S = R + B.transpose() * P * B;
    const Matrix Kn = S.fullPivLu().solve(B.transpose() * P * A);
    const Matrix Pn = A.transpose() * P * (A - B * Kn) + Qx;
    const double change = (Pn - P).norm();
    P = 0.5 * (Pn + Pn.transpose());
    K = Kn;
    if (change <= 1e-14 * P.norm()) break;
  }
  return K;
}

Matrix long_series_expm(const Matrix& M, int terms) {
  Matrix sum = Matrix::Identity(M.rows(), M.cols());
  Matrix term = sum;
  for (int k = 1; k <= terms; ++k) {
    term = (term * M / static_cast<double>(k)).eval();
    sum += term;
  }
  return sum;
}

double max_root_modulus(const Polynomial& p) {
  if (p.degree() < 1) return 0.0;
  double r = 0.0;
  for (const Complex& z : poly_roots(p)) r = std::max(r, std::abs(z));
  return r;
}

double h2_frequency_grid(const Matrix& A, const Matrix& B, const Matrix& C, int points) {
  const int n = static_cast<int>(A.rows());
  const ComplexMatrix Ac = A.cast<Complex>();
  const ComplexMatrix Bc = B.cast<Complex>();
  const ComplexMatrix Cc = C.cast<Complex>();
  double acc = 0.0;
  for (int k = 0; k < points; ++k) {
    const double w = 2.0 * std::numbers::pi * (k + 0.5) / points;
    const ComplexMatrix M = std::polar(1.0, w) * ComplexMatrix::Identity(n, n) - Ac;
    const ComplexMatrix G = Cc * M.partialPivLu().solve(Bc);
    acc += G.squaredNorm();
  }
  return std::sqrt(acc / points);
}

}  // namespace ddlti::testing
