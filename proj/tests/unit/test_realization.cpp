#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <ddlti/ddlti.hpp>

#include "support.hpp"

using namespace ddlti;
using ddlti::testing::PlantSampler;

namespace {

double max_abs(const Matrix& A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

Representation exact_fit(const StateSpace& ss, int N, std::uint64_t seed) {
  return fit(build_blocks(ddlti::testing::exact_data(ss, N, seed), N));
}

// Two outputs reading the same unstable mode through identical rows.
StateSpace duplicated_outputs() {
  StateSpace ss{Matrix::Constant(1, 1, 2.0), Matrix::Ones(1, 1), Matrix::Ones(2, 1), Matrix::Zero(2, 1)};
  return ss;
}

}  // namespace

TEST_CASE("build examples") {
  Representation rep;
  rep.N = 1;
  rep.m = 1;
  rep.p = 1;
  CoefficientRow row;
  row.b = Matrix(1, 2);
  row.b << 1.0, 0.0;
  row.a = Vector::Constant(1, 0.5);
  rep.rows.push_back(row);
  const NonMinimalRealization r = build(rep);
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 0.5, 1.0, 0.0, 0.0;
  B << 0.0, 1.0;
  C << 0.5, 1.0;
  CHECK(max_abs(r.A - A) == 0.0);
  CHECK(max_abs(r.B - B) == 0.0);
  CHECK(max_abs(r.C - C) == 0.0);
  CHECK(max_abs(r.D) == 0.0);

  Representation zero = exact_fit(msd().discrete(), 3, 1);
  for (CoefficientRow& cr : zero.rows) {
    cr.a.setZero();
    cr.b.setZero();
  }
  const NonMinimalRealization z = build(zero);
  CHECK(max_abs(z.C) == 0.0);
  Matrix power = Matrix::Identity(z.states(), z.states());
  for (int k = 0; k < z.states(); ++k) power = power * z.A;
  CHECK(max_abs(power) == 0.0);
}

TEST_CASE("D equals the newest input coefficient") {
  PlantSampler rs(21);
  const StateSpace ss = rs.mimo({3, 2, 2, 1.2, 1e-2, 1});
  StateSpace direct = ss;
  direct.D = Matrix::Constant(2, 2, 0.4);
  const Representation rep = exact_fit(direct, 4, 2);
  const NonMinimalRealization r = build(rep);
  for (int i = 0; i < rep.p; ++i) CHECK(max_abs(r.D.row(i) - rep.rows[i].b.col(rep.N).transpose()) == 0.0);
  CHECK(max_abs(r.D - direct.D) <= 1e-8);
}

TEST_CASE("A - G C is nilpotent of index N") {
  PlantSampler rs(22);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = rs.uniform_int(1, 2), p = rs.uniform_int(1, 2), n = rs.uniform_int(1, 4);
    const StateSpace ss = rs.mimo({n, m, p, 1.5, 1e-2, 1});
    const int N = n + rs.uniform_int(0, 2);
    const NonMinimalRealization r = build(exact_fit(ss, N, 100 + trial));
    const Matrix F = r.A - injection(N, m, p) * r.C;
    Matrix power = Matrix::Identity(r.states(), r.states());
    for (int k = 0; k < N; ++k) power = power * F;
    CHECK(max_abs(power) == 0.0);
  }
}

TEST_CASE("Markov parameters match the plant") {
  const StateSpace ss = msd().discrete();
  const int N = 6;
  const NonMinimalRealization r = build(exact_fit(ss, N, 1));
  const auto mr = markov_parameters(r.as_state_space(), 2 * N + 1);
  const auto mp = markov_parameters(ss, 2 * N + 1);
  for (int k = 0; k <= 2 * N; ++k) CHECK(max_abs(mr[k] - mp[k]) <= 1e-6);

  PlantSampler rs(23);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = rs.uniform_int(1, 2), p = rs.uniform_int(1, 2), n = rs.uniform_int(1, 4);
    const StateSpace plant = rs.mimo({n, m, p, 1.2, 1e-2, 1});
    const int Nt = n + rs.uniform_int(0, 2);
    const auto a = markov_parameters(build(exact_fit(plant, Nt, 200 + trial)).as_state_space(), 2 * Nt + 1);
    const auto b = markov_parameters(plant, 2 * Nt + 1);
    for (int k = 0; k <= 2 * Nt; ++k)
      CHECK(max_abs(a[k] - b[k]) <= 1e-6 * std::max(1.0, max_abs(b[k])));
  }
}

TEST_CASE("build_chi") {
  const Window zero{Matrix::Zero(2, 3), Matrix::Zero(2, 3)};
  CHECK(build_chi(zero).size() == 2 * 3 * 3);
  CHECK(max_abs(build_chi(zero)) == 0.0);

  Window w{Matrix(1, 2), Matrix(1, 2)};
  w.u << 3.0, 4.0;
  w.y << 1.0, 2.0;
  Vector expect(4);
  expect << 1.0, 2.0, 3.0, 4.0;
  CHECK(max_abs(build_chi(w) - expect) == 0.0);
  CHECK_THROWS_AS(build_chi(Window{Matrix::Zero(1, 2), Matrix::Zero(1, 3)}), Error);
}

TEST_CASE("realization driven from a true window reproduces the next outputs") {
  PlantSampler rs(24);
  const StateSpace ss = rs.mimo({3, 2, 2, 1.1, 1e-2, 1});
  const int N = 4;
  const NonMinimalRealization r = build(exact_fit(ss, N, 5));
  const Trajectory tr = collect(ss, Vector::Zero(3), pe_input(2, 60, 1.0, 6));
  for (int t = N; t < 60; ++t) {
    const Window w{tr.u.middleCols(t - N, N), tr.y.middleCols(t - N, N)};
    Vector chi = build_chi(w);
    const Vector yhat = r.C * chi + r.D * tr.u.col(t);
    CHECK(max_abs(yhat - tr.y.col(t)) <= 1e-8);
    if (t + 1 < 60) {
      chi = r.A * chi + r.B * tr.u.col(t);
      const Window next{tr.u.middleCols(t + 1 - N, N), tr.y.middleCols(t + 1 - N, N)};
      CHECK(max_abs(chi - build_chi(next)) <= 1e-8);
    }
  }
}

TEST_CASE("injection layout") {
  const Matrix G = injection(3, 2, 2);
  CHECK(G.rows() == 18);
  CHECK(G.cols() == 2);
  CHECK(G.sum() == 2.0);
  CHECK(G(2, 0) == 1.0);
  CHECK(G(11, 1) == 1.0);
  CHECK_THROWS_AS(injection(0, 1, 1), Error);
}

TEST_CASE("detectability") {
  PlantSampler rs(25);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = rs.uniform_int(1, 2), p = rs.uniform_int(1, 2), n = rs.uniform_int(1, 5);
    const StateSpace ss = rs.mimo({n, m, p, 1.5, 1e-2, 1});
    const int N = n + rs.uniform_int(0, 2);
    CHECK(is_detectable(build(exact_fit(ss, N, 300 + trial))));
  }
  NonMinimalRealization bad;
  bad.N = 1;
  bad.m = 1;
  bad.p = 1;
  bad.A = Matrix::Zero(2, 2);
  bad.A(0, 0) = 1.2;
  bad.B = Matrix::Ones(2, 1);
  bad.C = Matrix::Zero(1, 2);
  bad.D = Matrix::Zero(1, 1);
  CHECK_FALSE(is_detectable(bad));

  NonMinimalRealization nil = bad;
  nil.A.setZero();
  nil.A(0, 1) = 1.0;
  nil.C = Matrix::Constant(1, 2, 3.0);
  CHECK(is_detectable(nil));
}

TEST_CASE("single-output builds are stabilizable") {
  PlantSampler rs(26);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = rs.uniform_int(1, 2), n = rs.uniform_int(1, 5);
    const StateSpace ss = rs.mimo({n, m, 1, 1.5, 1e-2, 1});
    const int N = n + rs.uniform_int(0, 2);
    CHECK(is_stabilizable_pbh(build(exact_fit(ss, N, 400 + trial))));
  }
}

TEST_CASE("submarine builds are stabilizable") {
  const StateSpace sub = submarine().discrete();
  const auto data = generate_data(sub, DataSetup{100, 1, 1, 1.0, {}});
  for (int N = 4; N <= 16; N += 4) CHECK(is_stabilizable_pbh(build(fit_trajectories(data, N))));
  CHECK(cor2_condition2(tf_rows(sub)));
}

TEST_CASE("parallel rows sharing an unstable pole are not stabilizable") {
  const StateSpace ss = duplicated_outputs();
  const auto rows = tf_rows(ss);
  const Representation rep = ddlti::testing::oracle_representation(rows, 2, 1);
  CHECK_FALSE(is_stabilizable_pbh(build(rep)));
  const StabilizabilityReport r = prop3_condition(rep, rows);
  CHECK_FALSE(r.verdict);
  CHECK(r.verdict == r.pbh_verdict);
  CHECK_FALSE(cor2_condition2(rows));
}

TEST_CASE("stable and single-output systems are vacuously fine") {
  const StateSpace ss = msd().discrete();
  const auto rows = tf_rows(ss);
  CHECK(cor2_condition2(rows));
  const StabilizabilityReport r = prop3_condition(exact_fit(ss, 6, 1), rows);
  CHECK(r.verdict);
  CHECK(r.pbh_verdict);

  const StateSpace pend = inverted_pendulum().discrete();
  const StabilizabilityReport pr = prop3_condition(exact_fit(pend, 6, 2), tf_rows(pend));
  CHECK(pr.verdict);
  for (const RootWitness& w : pr.witnesses) CHECK(w.outputs.size() <= 1);
}

TEST_CASE("shared unstable root witness") {
  StateSpace ex{Matrix::Zero(4, 4), Matrix(4, 2), Matrix(2, 4), Matrix::Zero(2, 2)};
  ex.A.diagonal() << 2, 3, 0, 2;
  ex.B << 1, 0, 0, 1, 1, 0, 0, 1;
  ex.C << 1, 1, 0, 0, 0, 0, 1, 1;
  const StabilizabilityReport er = cor2_report(tf_rows(ex));
  CHECK(er.verdict);
  int found = 0;
  for (const RootWitness& wt : er.witnesses) {
    if (std::abs(wt.lambda - Complex(2.0, 0.0)) > 1e-9) continue;
    ++found;
    REQUIRE(wt.vectors.cols() == 2);
    ComplexMatrix expect(2, 2);
    expect << -1.0, 0.0, 0.0, 2.0;
    CHECK(wt.independent);
    CHECK((wt.vectors - expect).cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK(found == 1);
}

TEST_CASE("prop3 agrees with PBH on random builds") {
  PlantSampler rs(27);
  int stabilizable = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = rs.uniform_int(1, 2), p = rs.uniform_int(1, 2), n = rs.uniform_int(1, 4);
    const StateSpace ss = rs.mimo({n, m, p, 1.5, 1e-2, 1});
    const int N = n + rs.uniform_int(0, 2);
    const StabilizabilityReport r = prop3_condition(exact_fit(ss, N, 500 + trial), tf_rows(ss));
    CHECK(r.verdict == r.pbh_verdict);
    stabilizable += r.verdict ? 1 : 0;
  }
  CHECK(stabilizable > 0);
}

TEST_CASE("input normalization is a similarity") {
  PlantSampler rs(28);
  const StateSpace ss = rs.mimo({3, 2, 2, 1.2, 1e-2, 1});
  const int N = 4;
  const NonMinimalRealization r = build(exact_fit(ss, N, 7));
  NonMinimalRealization scaled = r;
  scaled.B.col(1) *= 1e-4;
  Vector f;
  const NonMinimalRealization nr = input_normalized(scaled, &f);
  REQUIRE(f.size() == 2);
  // u = diag(f) u', so the normalized Markov parameters carry diag(f)
  const auto a = markov_parameters(nr.as_state_space(), 2 * N);
  const auto b = markov_parameters(scaled.as_state_space(), 2 * N);
  for (int k = 0; k < 2 * N; ++k) CHECK(max_abs(a[k] * f.asDiagonal().inverse() - b[k]) <= 1e-9 * std::max(1.0, max_abs(b[k])));
  CHECK(is_stabilizable_pbh(nr) == is_stabilizable_pbh(scaled));
}
