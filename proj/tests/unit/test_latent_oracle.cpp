#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <ddlti/ddlti.hpp>

#include "support.hpp"

using namespace ddlti;
using ddlti::testing::PlantSampler;

namespace {

struct Instance {
  Polynomial p;
  std::vector<Polynomial> q;
};

Instance random_instance(PlantSampler& rs, int degree, int inputs, double radius) {
  Instance in;
  in.p = Polynomial::from_roots(rs.sample_roots(degree, radius, 1e-2));
  for (int j = 0; j < inputs; ++j) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (double& v : c) v = rs.uniform(-2.0, 2.0);
    in.q.emplace_back(std::move(c));
  }
  return in;
}

Polynomial monic_from(const std::vector<double>& lower) {
  std::vector<double> c = lower;
  c.push_back(1.0);
  return Polynomial(std::move(c));
}

// Coarse-to-fine grid search over the lower coefficients of a monic r.
std::vector<double> grid_minimize(const Instance& in, int tau) {
  std::vector<double> center(tau, 0.0);
  double half = 3.0;
  const int points = tau == 1 ? 601 : 61;
  while (half > 1e-5) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> arg = center;
    const double h = 2.0 * half / (points - 1);
    std::vector<double> x(tau);
    const int total = tau == 1 ? points : points * points;
    for (int idx = 0; idx < total; ++idx) {
      x[0] = center[0] - half + h * (idx % points);
      if (tau == 2) x[1] = center[1] - half + h * (idx / points);
      const double c = cost_f(monic_from(x), in.p, in.q);
      if (c < best) {
        best = c;
        arg = x;
      }
    }
    center = arg;
    half = 4.0 * h;
  }
  return center;
}

}  // namespace

TEST_CASE("cost_f examples") {
  CHECK(cost_f(Polynomial{1.0}, Polynomial{-0.5, 1.0}, {Polynomial{1.0}}) == doctest::Approx(1.25));
  for (double lambda : {-1.0, 0.0, 0.3, 2.0}) {
    const double c = cost_f(Polynomial{lambda, 1.0}, Polynomial{-2.0, 1.0}, {Polynomial{1.0}});
    CHECK(c == doctest::Approx(6.0 * lambda * lambda - 4.0 * lambda + 5.0));
  }
  const Polynomial r{0.4, -0.2, 1.0}, p = Polynomial::from_roots({0.5, -1.5});
  const Polynomial q{0.3, 1.0};
  const double base = cost_f(r, p, {q});
  const double q_part = base - cost_f(r, p, {Polynomial{}});
  const double scaled = cost_f(r, p, {3.0 * q}) - cost_f(r, p, {Polynomial{}});
  CHECK(scaled == doctest::Approx(9.0 * q_part));
  CHECK_THROWS_AS(cost_f(Polynomial{0.0, 2.0}, p, {q}), Error);
  CHECK_THROWS_AS(cost_f(r, Polynomial{1.0, 2.0}, {q}), Error);
}

TEST_CASE("factor reduction identity") {
  PlantSampler rs(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance in = random_instance(rs, rs.uniform_int(1, 4), rs.uniform_int(1, 2), 2.0);
    const double lambda = rs.uniform(-2.0, 2.0);
    const Polynomial rest = monic_from({rs.uniform(-1.0, 1.0)});
    const Polynomial lin{-lambda, 1.0};
    std::vector<Polynomial> q2;
    for (const Polynomial& q : in.q) q2.push_back(lin * q);
    const double lhs = cost_f(lin * rest, in.p, in.q);
    const double rhs = cost_f(rest, lin * in.p, q2);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, lhs));
  }
}

TEST_CASE("tau = 1 closed form") {
  CHECK(std::abs(minimize_lambda(Polynomial{0.0, 1.0}, {Polynomial{1.0}})) <= 1e-15);
  CHECK(minimize_lambda(Polynomial{-2.0, 1.0}, {Polynomial{1.0}}) == doctest::Approx(1.0 / 3.0));
  PlantSampler rs(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_instance(rs, rs.uniform_int(1, 5), rs.uniform_int(1, 2), 3.0);
    const double lambda = minimize_lambda(in.p, in.q);
    CHECK(std::abs(lambda) < 1.0);
    const MonicMinimizer mc = minimize_Cstar(in.p, in.q, 1);
    CHECK(std::abs(mc.r[0] - lambda) <= 1e-10);
  }
}

TEST_CASE("tau = 2 closed form") {
  PlantSampler rs(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_instance(rs, rs.uniform_int(1, 5), rs.uniform_int(1, 2), 3.0);
    const PhiPsi pp = minimize_phi_psi(in.p, in.q);
    CHECK(pp.psi < 1.0);
    const MonicMinimizer mc = minimize_Cstar(in.p, in.q, 2);
    CHECK(std::abs(mc.r[1] - pp.phi) <= 1e-10);
    CHECK(std::abs(mc.r[0] - pp.psi) <= 1e-10);
  }
  // p and q even in z: the lag-1 correlation vanishes and the quadratic is symmetric in phi
  const Polynomial p{0.5, 0.0, 1.0};
  CHECK(std::abs(minimize_phi_psi(p, {Polynomial{0.7, 0.0, 0.2}}).phi) <= 1e-12);
}

TEST_CASE("minimize_Cstar examples") {
  const MonicMinimizer zero = minimize_Cstar(Polynomial{-2.0, 1.0}, {Polynomial{1.0}}, 0);
  CHECK(coeff_distance(zero.r, Polynomial{1.0}) == 0.0);
  const MonicMinimizer one = minimize_Cstar(Polynomial{-2.0, 1.0}, {Polynomial{1.0}}, 1);
  CHECK(coeff_distance(one.r, Polynomial{1.0 / 3.0, 1.0}) <= 1e-12);

  const TransferRow row = tf_rows(msd().discrete())[0];
  const MonicMinimizer msd2 = minimize_Cstar(row.den, row.num, 2);
  for (const Complex& z : poly_roots(msd2.r)) {
    CHECK(std::abs(z.real() + 0.6669) <= 1e-3);
    CHECK(std::abs(std::abs(z.imag()) - 0.4714) <= 1e-3);
  }
}

TEST_CASE("attained cost matches cost_f") {
  PlantSampler rs(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = random_instance(rs, rs.uniform_int(1, 5), rs.uniform_int(1, 2), 2.0);
    const MonicMinimizer mc = minimize_Cstar(in.p, in.q, rs.uniform_int(0, 6));
    CHECK(mc.r.is_monic());
    CHECK(mc.cost >= 0.0);
    CHECK(std::abs(mc.cost - cost_f(mc.r, in.p, in.q)) <= 1e-10 * std::max(1.0, mc.cost));
  }
}

TEST_CASE("minimizer is Schur stable") {
  PlantSampler rs(7);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Instance in = random_instance(rs, rs.uniform_int(1, 5), rs.uniform_int(1, 2), 2.0);
    const int tau = rs.uniform_int(1, 6);
    worst = std::max(worst, ddlti::testing::max_root_modulus(minimize_Cstar(in.p, in.q, tau).r));
  }
  CHECK(worst <= 1.0 - 1e-6);
}

TEST_CASE("minimizer matches a brute-force grid search") {
  PlantSampler rs(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance in = random_instance(rs, rs.uniform_int(1, 3), 1, 1.5);
    const int tau = 1 + trial % 2;
    const MonicMinimizer mc = minimize_Cstar(in.p, in.q, tau);
    const std::vector<double> g = grid_minimize(in, tau);
    for (int k = 0; k < tau; ++k) CHECK(std::abs(mc.r[k] - g[k]) <= 1e-4);
  }
}

TEST_CASE("inverse-side minimizer") {
  const MonicMinimizer inv = minimize_Cstar_inverse(Polynomial{1.0}, Polynomial{-0.5, 1.0}, 1.0, 1);
  CHECK(coeff_distance(inv.r, Polynomial{2.0 / 9.0, 1.0}) <= 1e-12);
  CHECK(coeff_distance(minimize_Cstar_inverse(Polynomial{1.0}, Polynomial{-0.5, 1.0}, 1.0, 0).r, Polynomial{1.0}) == 0.0);
  CHECK_THROWS_AS(minimize_Cstar_inverse(Polynomial{1.0}, Polynomial{-0.5, 1.0}, 0.0, 1), Error);

  PlantSampler rs(9);
  for (int trial = 0; trial < 50; ++trial) {
    const StateSpace ss = rs.minimum_phase(rs.uniform_int(1, 4), 1, 0.9);
    const TransferRow row = tf_rows(ss)[0];
    const double rho = row.num[0].leading();
    const MonicMinimizer mc = minimize_Cstar_inverse(row.num[0], row.den, rho, rs.uniform_int(1, 4));
    CHECK(ddlti::testing::max_root_modulus(mc.r) <= 1.0 - 1e-6);
  }
}

TEST_CASE("Toeplitz stack structure") {
  const Polynomial p = Polynomial::from_roots({0.5, -0.25});
  const ToeplitzStack ts = toeplitz_stack(p, {Polynomial{1.0, 2.0}}, 2);
  CHECK(ts.P.cols() == 3);
  CHECK(ts.P.rows() == 5);
  for (int i = 1; i < ts.P.rows(); ++i)
    for (int j = 1; j < ts.P.cols(); ++j) CHECK(ts.P(i, j) == ts.P(i - 1, j - 1));
  CHECK(ts.theta0 >= 1.0);
}
