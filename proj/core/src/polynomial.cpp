#include "ddlti/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "ddlti/error.hpp"

namespace ddlti {

namespace {

void trim(std::vector<double>& c) {
  double mx = 0.0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  const double thr = Polynomial::kTrimRatio * mx;
  while (!c.empty() && std::abs(c.back()) <= thr) c.pop_back();
}

template <typename T>
T horner(const std::vector<double>& c, T z) {
  T acc = T(0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + T(*it);
  return acc;
}

// Diagonal similarity scaling by powers of two that equalizes row and column
// norms before the eigenvalue solve.
void balance(Matrix& A) {
  const Eigen::Index n = A.rows();
  const double radix = 2.0;
  bool converged = false;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        converged = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
}

}  // namespace

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) {
  for (double v : c_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, "polynomial coefficient is not finite");
  trim(c_);
}

Polynomial::Polynomial(std::initializer_list<double> ascending)
    : Polynomial(std::vector<double>(ascending)) {}

Polynomial Polynomial::monomial(int degree, double coefficient) {
  require(degree >= 0, ErrorCode::InvalidInput, "monomial degree must be nonnegative");
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = coefficient;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::from_roots(const RootSet& roots) {
  std::vector<Complex> c{Complex(1.0)};
  for (const Complex& r : roots) {
    std::vector<Complex> next(c.size() + 1, Complex(0.0));
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  std::vector<double> re(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) re[k] = c[k].real();
  return Polynomial(std::move(re));
}

Polynomial Polynomial::from_vector(const Vector& ascending) {
  return Polynomial(std::vector<double>(ascending.data(), ascending.data() + ascending.size()));
}

double Polynomial::operator[](int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return 0.0;
  return c_[static_cast<std::size_t>(k)];
}

double Polynomial::leading() const { return c_.empty() ? 0.0 : c_.back(); }

double Polynomial::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

Vector Polynomial::to_vector(int length) const {
  if (length < 0) length = static_cast<int>(c_.size());
  Vector v = Vector::Zero(length);
  for (int k = 0; k < std::min<int>(length, static_cast<int>(c_.size())); ++k) v(k) = c_[k];
  return v;
}

bool Polynomial::is_monic(double tol) const {
  return !c_.empty() && std::abs(c_.back() - 1.0) <= tol;
}

Polynomial Polynomial::monic() const {
  require(!c_.empty(), ErrorCode::InvalidInput, "zero polynomial has no monic normalization");
  std::vector<double> c = c_;
  const double lead = c.back();
  for (double& v : c) v /= lead;
  c.back() = 1.0;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::scaled(double s) const {
  std::vector<double> c = c_;
  for (double& v : c) v *= s;
  return Polynomial(std::move(c));
}

double Polynomial::operator()(double z) const { return horner(c_, z); }
Complex Polynomial::operator()(Complex z) const { return horner(c_, z); }

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coeffs().size(), b.coeffs().size()), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[static_cast<int>(k)] + b[static_cast<int>(k)];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + b.scaled(-1.0); }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  std::vector<double> c(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) c[i + j] += x[i] * y[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& a) { return a.scaled(s); }

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }

double coeff_distance(const Polynomial& a, const Polynomial& b) {
  const int n = std::max(a.degree(), b.degree()) + 1;
  double d = 0.0;
  for (int k = 0; k < n; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

Matrix convolution_matrix(const Polynomial& a, int width) {
  require(width >= 0, ErrorCode::InvalidInput, "convolution width must be nonnegative");
  const int na = a.degree() + 1;
  Matrix T = Matrix::Zero(std::max(na + width - 1, 0), width);
  for (int j = 0; j < width; ++j)
    for (int k = 0; k < na; ++k) T(j + k, j) = a[k];
  return T;
}

Division poly_div_exact(const Polynomial& a, const Polynomial& d, double tol) {
  require(!d.is_zero(), ErrorCode::InvalidInput, "division by the zero polynomial");
  Division out;
  if (a.is_zero()) {
    out.divisible = true;
    return out;
  }
  const int qdeg = a.degree() - d.degree();
  if (qdeg < 0) {
    out.residual_norm = a.max_abs();
    out.divisible = out.residual_norm <= tol;
    return out;
  }
  const Matrix T = convolution_matrix(d, qdeg + 1);
  const Vector rhs = a.to_vector(static_cast<int>(T.rows()));
  const Vector q = T.colPivHouseholderQr().solve(rhs);
  out.quotient = Polynomial::from_vector(q);
  out.residual_norm = (T * q - rhs).cwiseAbs().maxCoeff();
  out.divisible = out.residual_norm <= tol;
  return out;
}

RootSet poly_roots(const Polynomial& a) {
  if (a.degree() < 1) fail(ErrorCode::EmptyRootSet, "polynomial of degree < 1 has no roots");
  const Polynomial p = a.monic();
  const int n = p.degree();
  Matrix comp = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) comp(0, k) = -p[n - 1 - k];
  for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  balance(comp);
  RootSet roots = eigvals(comp);

  const Polynomial dp = p.derivative();
  for (Complex& z : roots) {
    Complex fz = p(z);
    for (int it = 0; it < 8; ++it) {
      const Complex dz = dp(z);
      if (dz == Complex(0.0)) break;
      const Complex cand = z - fz / dz;
      if (std::abs(cand - z) > 1e-6 * (1.0 + std::abs(z))) break;
      const Complex fc = p(cand);
      if (!(std::abs(fc) < std::abs(fz))) break;
      z = cand;
      fz = fc;
    }
  }
  return roots;
}

}  // namespace ddlti
