#pragma once

#include <initializer_list>
#include <vector>

#include "ddlti/matpoly.hpp"

namespace ddlti {

// Real polynomial with coefficients in ascending degree order. Trailing
// coefficients with |c| <= kTrimRatio * max|c| are dropped on construction,
// so the zero polynomial has no coefficients.
class Polynomial {
 public:
  static constexpr double kTrimRatio = 1e-10;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> ascending);
  Polynomial(std::initializer_list<double> ascending);

  static Polynomial monomial(int degree, double coefficient = 1.0);
  // Monic polynomial with the given roots; imaginary parts of the expanded
  // coefficients are discarded, so the set should be conjugate closed.
  static Polynomial from_roots(const RootSet& roots);
  static Polynomial from_vector(const Vector& ascending);

  const std::vector<double>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  double operator[](int k) const;
  double leading() const;
  double max_abs() const;
  Vector to_vector(int length = -1) const;

  bool is_monic(double tol = 1e-12) const;
  Polynomial monic() const;
  Polynomial scaled(double s) const;

  double operator()(double z) const;
  Complex operator()(Complex z) const;
  Polynomial derivative() const;

 private:
  std::vector<double> c_;
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator-(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(double s, const Polynomial& a);

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);

// Max-norm of the coefficient difference, treating missing entries as zero.
double coeff_distance(const Polynomial& a, const Polynomial& b);

struct Division {
  Polynomial quotient;
  double residual_norm = 0.0;  // max-norm of a - quotient * d
  bool divisible = false;      // residual_norm <= tol
};

// Least-squares quotient of a by d over the Toeplitz convolution system.
Division poly_div_exact(const Polynomial& a, const Polynomial& d, double tol);

// Companion-matrix eigenvalues of the monic normalization, Newton polished.
RootSet poly_roots(const Polynomial& a);

// Convolution matrix mapping the coefficients of a degree-(width-1)
// polynomial r to those of r * a.
Matrix convolution_matrix(const Polynomial& a, int width);

}  // namespace ddlti
