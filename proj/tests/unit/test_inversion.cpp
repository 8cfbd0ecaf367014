#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <ddlti/ddlti.hpp>

#include "support.hpp"

using namespace ddlti;
using ddlti::testing::PlantSampler;

namespace {

double max_abs(const Matrix& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

Trajectory pe_data(const StateSpace& ss, int length, std::uint64_t seed) {
  return collect(ss, Vector::Zero(ss.states()), pe_input(1, length, 1.0, seed));
}

// Enough columns for the inverse rank condition with room to spare.
int inverse_length(int n, int N, int L) { return N + L + 2 * (N + n + L + 1) + 10; }

InverseRepresentation msd_inverse(std::uint64_t seed = 1) {
  return fit_inverse(build_inversion_blocks(pe_data(msd().discrete(), 6 + 2 + 94, seed), 6, 2));
}

}  // namespace

TEST_CASE("inversion blocks") {
  Trajectory tr{Matrix(1, 4), Matrix(1, 4)};
  tr.u << 1, 2, 3, 4;
  tr.y << 5, 6, 7, 8;
  const InversionBlocks one = build_inversion_blocks(tr, 1, 2);
  REQUIRE(one.columns() == 1);
  CHECK(one.Up(0, 0) == 1.0);
  CHECK(one.Uf(0, 0) == 2.0);
  CHECK(one.Yp(0, 0) == 5.0);
  CHECK(max_abs(one.YfL - (Matrix(3, 1) << 6, 7, 8).finished()) == 0.0);
  CHECK_THROWS_AS(build_inversion_blocks(tr, 2, 2), Error);

  const Trajectory mimo = generate_data(submarine().discrete(), DataSetup{40, 1, 1, 1.0, {}}).front();
  try {
    build_inversion_blocks(mimo, 3, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unsupported);
  }

  const InversionBlocks b = build_inversion_blocks(pe_data(msd().discrete(), 102, 1), 6, 2);
  CHECK(b.columns() == 94);
  CHECK(b.H().rows() == 15);
  CHECK(b.H().cols() == 94);
}

TEST_CASE("inversion block columns are plant trajectories") {
  const StateSpace ss = msd().discrete();
  const int N = 4, L = 2;
  const Trajectory tr = pe_data(ss, 40, 2);
  const InversionBlocks b = build_inversion_blocks(tr, N, L);
  Vector x = Vector::Zero(4);
  for (int j = 0; j < b.columns(); ++j) {
    // the output window needs L inputs beyond u(j+N); take them from the trajectory
    const Matrix u = tr.u.middleCols(j, N + L + 1);
    for (int k = 0; k < N; ++k) CHECK(u(0, k) == b.Up(k, j));
    CHECK(u(0, N) == b.Uf(0, j));
    const Matrix y = simulate(ss, x, u);
    for (int k = 0; k < N; ++k) CHECK(std::abs(y(0, k) - b.Yp(k, j)) <= 1e-12);
    for (int k = 0; k <= L; ++k) CHECK(std::abs(y(0, N + k) - b.YfL(k, j)) <= 1e-12);
    x = ss.A * x + ss.B * tr.u.col(j);
  }
}

TEST_CASE("inverse rank condition") {
  const StateSpace ss = msd().discrete();
  const InversionBlocks b = build_inversion_blocks(pe_data(ss, 102, 1), 6, 2);
  CHECK(numerical_rank(b.H(), default_tolerance(b.H())) == 12);
  CHECK(rank_condition_inv(b, 4, 1));
  const Trajectory constant = collect(ss, Vector::Zero(4), Matrix::Ones(1, 102));
  CHECK_FALSE(rank_condition_inv(build_inversion_blocks(constant, 6, 2), 4, 1));
  // minimal PE order n + N + L + 1
  CHECK(pe_order(pe_data(ss, 102, 1).u, 4 + 6 + 2 + 1));
}

TEST_CASE("first-order inverse example") {
  const StateSpace ss = ddlti::testing::canonical_siso(Polynomial{-0.5, 1.0}, Polynomial{1.0});
  const InverseRepresentation ir = fit_inverse(build_inversion_blocks(pe_data(ss, 30, 3), 1, 1));
  CHECK(coeff_distance(ir.gamma_polynomial(), Polynomial{2.0 / 9.0, 1.0}) <= 1e-8);
  const InverseFactorization f = factorize_inverse(ir, Polynomial{1.0}, Polynomial{-0.5, 1.0}, 1e-6);
  CHECK(coeff_distance(f.latent, Polynomial{2.0 / 9.0, 1.0}) <= 1e-8);
  const MonicMinimizer oracle = minimize_Cstar_inverse(Polynomial{1.0}, Polynomial{-0.5, 1.0}, 1.0, 1);
  CHECK(coeff_distance(f.latent, oracle.r) <= 1e-6);
}

TEST_CASE("fit residual and MSD inverse stability") {
  const InversionBlocks b = build_inversion_blocks(pe_data(msd().discrete(), 102, 1), 6, 2);
  const InverseRepresentation ir = fit_inverse(b);
  RowVector row(ir.N + ir.N + ir.L + 1);
  row << ir.gamma.transpose(), ir.delta.transpose();
  CHECK(max_abs(b.Uf - row * b.H()) <= 1e-8 * max_abs(b.Uf));
  CHECK(max_abs(ir.packed() - row) == 0.0);
  CHECK(ddlti::testing::max_root_modulus(ir.gamma_polynomial()) < 1.0);

  const TransferRow tr = tf_rows(msd().discrete())[0];
  const InverseFactorization f = factorize_inverse(ir, tr.num[0], tr.den, 1e-6);
  CHECK(f.latent.degree() == 6 - 4 + 1);
  // gamma roots are the plant zeros together with the latent roots
  const RootSet expect = [&] {
    RootSet r = poly_roots(tr.num[0]);
    for (const Complex& z : poly_roots(f.latent)) r.push_back(z);
    return r;
  }();
  const RootMatch rm = match_roots(poly_roots(ir.gamma_polynomial()), expect, 1e-6);
  CHECK(rm.pairs.size() == expect.size());
  CHECK(rm.unmatched_a.empty());
}

TEST_CASE("latent inverse factor is Schur stable") {
  PlantSampler rs(41);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rs.uniform_int(1, 4), nu = rs.uniform_int(1, n);
    const StateSpace ss = rs.minimum_phase(n, nu, 0.95);
    const int N = rs.uniform_int(std::max(1, n - nu), 8);
    const int L = nu + rs.uniform_int(0, 2);
    const InverseRepresentation ir =
        fit_inverse(build_inversion_blocks(pe_data(ss, inverse_length(n, N, L), 500 + trial), N, L));
    const TransferRow row = tf_rows(ss)[0];
    const InverseFactorization f = factorize_inverse(ir, row.num[0], row.den, 1e-5);
    CHECK(f.latent.degree() == N - n + nu);
    worst = std::max(worst, ddlti::testing::max_root_modulus(f.latent));
  }
  CHECK(worst <= 1.0 - 1e-6);
}

TEST_CASE("inverse representation is data independent") {
  PlantSampler rs(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rs.uniform_int(1, 4), nu = rs.uniform_int(1, n);
    const StateSpace ss = rs.minimum_phase(n, nu, 0.9);
    const int N = rs.uniform_int(std::max(1, n - nu), 6), L = nu + rs.uniform_int(0, 1);
    const int len = inverse_length(n, N, L);
    const RowVector a = fit_inverse(build_inversion_blocks(pe_data(ss, len, 600 + trial), N, L)).packed();
    const RowVector b = fit_inverse(build_inversion_blocks(pe_data(ss, len + 7, 700 + trial), N, L)).packed();
    CHECK(max_abs(a - b) <= 1e-8 * std::max(1.0, max_abs(a)));
  }
}

TEST_CASE("output coefficients vanish beyond N + nu") {
  PlantSampler rs(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rs.uniform_int(1, 4), nu = rs.uniform_int(1, n);
    const StateSpace ss = rs.minimum_phase(n, nu, 0.9);
    const int N = rs.uniform_int(std::max(1, n - nu), 6), L = nu + rs.uniform_int(1, 2);
    const InverseRepresentation ir =
        fit_inverse(build_inversion_blocks(pe_data(ss, inverse_length(n, N, L), 800 + trial), N, L));
    const double scale = ir.delta.cwiseAbs().maxCoeff();
    for (int k = N + nu + 1; k <= N + L; ++k) CHECK(std::abs(ir.delta(k)) <= 1e-8 * scale);
  }
}

TEST_CASE("estimate_step") {
  const InverseRepresentation ir = msd_inverse();
  CHECK(estimate_step(ir, Vector::Zero(6), Vector::Zero(9)) == 0.0);
  const Vector ua = Vector::LinSpaced(6, -1.0, 1.0), ub = Vector::LinSpaced(6, 2.0, 0.0);
  const Vector ya = Vector::LinSpaced(9, 0.3, -0.4), yb = Vector::LinSpaced(9, 1.0, 1.5);
  const double lhs = estimate_step(ir, 2.0 * ua - ub, 2.0 * ya - yb);
  const double scale = ir.gamma.cwiseAbs().sum() + ir.delta.cwiseAbs().sum();
  CHECK(std::abs(lhs - (2.0 * estimate_step(ir, ua, ya) - estimate_step(ir, ub, yb))) <= 1e-12 * scale);
  CHECK_THROWS_AS(estimate_step(ir, Vector::Zero(5), Vector::Zero(9)), Error);
}

TEST_CASE("cascade with exact initialization reproduces the delayed input") {
  PlantSampler rs(44);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rs.uniform_int(1, 4), nu = rs.uniform_int(1, n);
    const StateSpace ss = rs.minimum_phase(n, nu, 0.9);
    const int N = rs.uniform_int(std::max(1, n - nu), 6), L = nu + rs.uniform_int(0, 2);
    const InverseRepresentation ir =
        fit_inverse(build_inversion_blocks(pe_data(ss, inverse_length(n, N, L), 900 + trial), N, L));
    const Trajectory fresh = pe_data(ss, 200, 1000 + trial);
    const Vector y = fresh.y.row(0).transpose();
    const Vector u = fresh.u.row(0).transpose();
    const Vector uhat = estimate_recursive(ir, y, u.head(N));
    REQUIRE(uhat.size() == 200 - L);
    CHECK(max_abs(uhat - u.head(uhat.size())) <= 1e-6);
  }
}

TEST_CASE("estimation from a wrong start") {
  PlantSampler rs(45);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rs.uniform_int(1, 4), nu = rs.uniform_int(1, n);
    const StateSpace ss = rs.minimum_phase(n, nu, 0.8);
    const int N = rs.uniform_int(std::max(1, n - nu), 6), L = nu + rs.uniform_int(0, 2);
    const InverseRepresentation ir =
        fit_inverse(build_inversion_blocks(pe_data(ss, inverse_length(n, N, L), 1100 + trial), N, L));
    const Trajectory tr = pe_data(ss, 420, 1200 + trial);
    const Vector u = tr.u.row(0).transpose();
    const Vector uhat = estimate_recursive(ir, tr.y.row(0).transpose(), Vector::Zero(N));
    const Vector err = (uhat - u.head(uhat.size())).cwiseAbs();
    CHECK(err.segment(400 - N, N).maxCoeff() <= 1e-3 * err.head(N).maxCoeff());
  }

  // a zero at 1.5 makes the estimation error grow
  const StateSpace nmp =
      ddlti::testing::canonical_siso(Polynomial::from_roots({0.5, -0.3}), Polynomial::from_roots({1.5}));
  const InverseRepresentation bad = fit_inverse(build_inversion_blocks(pe_data(nmp, 40, 5), 2, 1));
  const Trajectory ntr = pe_data(nmp, 120, 6);
  const Vector nu = ntr.u.row(0).transpose();
  Vector guess = nu.head(2);
  guess(0) += 1e-3;
  const Vector nhat = estimate_recursive(bad, ntr.y.row(0).transpose(), guess);
  const Vector nerr = (nhat - nu.head(nhat.size())).cwiseAbs();
  CHECK(nerr.segment(100, 10).maxCoeff() >= 10.0 * nerr.head(2).maxCoeff());
}

TEST_CASE("factorization edge cases") {
  // N = n - nu leaves no latent factor
  const StateSpace ss = ddlti::testing::canonical_siso(Polynomial::from_roots({0.5, -0.2}), Polynomial{0.3, 1.0});
  const InverseRepresentation ir = fit_inverse(build_inversion_blocks(pe_data(ss, 40, 7), 1, 1));
  const TransferRow row = tf_rows(ss)[0];
  const InverseFactorization f = factorize_inverse(ir, row.num[0], row.den, 1e-6);
  CHECK(f.latent.degree() == 0);
  CHECK(coeff_distance(f.latent, Polynomial{1.0}) <= 1e-8);
  CHECK_THROWS_AS(factorize_inverse(ir, Polynomial{0.9, 1.0}, row.den, 1e-6), Error);
}

TEST_CASE("disturbance observer") {
  const StateSpace ss = msd().discrete();
  const InverseRepresentation ir = msd_inverse();
  const int steps = 300;

  DOBConfig quiet;
  quiet.exact_init = true;
  quiet.u0 = Vector::Ones(steps);
  quiet.d = Vector::Zero(steps);
  const DobTrace q = dob_simulate(ss, ir, quiet, steps);
  CHECK(max_abs(q.u - q.u0) <= 1e-8);
  CHECK(max_abs(q.dhat) <= 1e-8);
  CHECK_FALSE(q.non_minimum_phase);

  DOBConfig constant = quiet;
  constant.d = Vector::Constant(steps, 0.3);
  const DobTrace c = dob_simulate(ss, ir, constant, steps);
  CHECK(std::abs(c.u(steps - 1) - c.u0(steps - 1)) <= 1e-6);
  CHECK(std::abs(c.dhat(steps - 1) - 0.3) <= 1e-6);

  DOBConfig slow;
  slow.uhat_init = Vector::Zero(6);
  slow.u0 = Vector::Ones(1500);
  slow.d = Vector(1500);
  for (int t = 0; t < 1500; ++t) slow.d(t) = 0.5 * std::sin(0.02 * t);
  const DobTrace s = dob_simulate(ss, ir, slow, 1500);
  const double early = (s.u - s.u0).head(100).cwiseAbs().maxCoeff();
  const double late = (s.u - s.u0).tail(100).cwiseAbs().maxCoeff();
  CHECK(late < early);

  DOBConfig bad = quiet;
  bad.exact_init = false;
  bad.uhat_init = Vector::Zero(3);
  CHECK_THROWS_AS(dob_simulate(ss, ir, bad, steps), Error);

  const StateSpace nmp =
      ddlti::testing::canonical_siso(Polynomial::from_roots({0.5, -0.3}), Polynomial::from_roots({1.5}));
  const InverseRepresentation nir = fit_inverse(build_inversion_blocks(pe_data(nmp, 40, 5), 2, 1));
  DOBConfig nq = quiet;
  CHECK(dob_simulate(nmp, nir, nq, 20).non_minimum_phase);
}

TEST_CASE("disturbance observer CSV") {
  DOBConfig cfg;
  cfg.exact_init = true;
  cfg.u0 = Vector::Ones(5);
  cfg.d = Vector::Constant(5, 0.1);
  const DobTrace tr = dob_simulate(msd().discrete(), msd_inverse(), cfg, 5);
  std::ostringstream out;
  write_dob_csv(out, tr);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,u0,d,u,y,dhat,uhat");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto cells = split_csv_line(line);
    REQUIRE(cells.size() == 7);
    CHECK(parse_double(cells[3], "u") == tr.u(rows));
    ++rows;
  }
  CHECK(rows == 5);
}
