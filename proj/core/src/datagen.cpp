#include "ddlti/datagen.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "ddlti/error.hpp"
#include "ddlti/format.hpp"

namespace ddlti {

void Trajectory::validate() const {
  require(u.cols() == y.cols(), ErrorCode::InvalidInput, "trajectory input and output lengths differ");
  require_finite(u, "trajectory input");
  require_finite(y, "trajectory output");
}

Matrix hankel(const Matrix& signal, int L) {
  const int d = static_cast<int>(signal.rows());
  const int T = static_cast<int>(signal.cols());
  require(L >= 1, ErrorCode::InvalidInput, "Hankel window must be positive");
  require(L <= T, ErrorCode::InvalidInput, "Hankel window exceeds the signal length");
  const int cols = T - L + 1;
  Matrix H(d * L, cols);
  for (int j = 0; j < cols; ++j)
    for (int k = 0; k < L; ++k) H.block(k * d, j, d, 1) = signal.col(j + k);
  return H;
}

bool pe_order(const Matrix& u, int order) {
  if (order < 1 || order > u.cols()) return false;
  const Matrix H = hankel(u, order);
  if (H.cols() < H.rows()) return false;
  const Vector s = singular_values(H);
  if (s(0) == 0.0) return false;
  return s(s.size() - 1) > 1e-8 * s(0);
}

Matrix DataBlocks::past_stack() const {
  Matrix S(Up.rows() + Uf.rows() + Yp.rows(), columns());
  S << Up, Uf, Yp;
  return S;
}

Matrix DataBlocks::full_stack() const {
  Matrix S(Up.rows() + Uf.rows() + Yp.rows() + Yf.rows(), columns());
  S << Up, Uf, Yp, Yf;
  return S;
}

Matrix DataBlocks::Yp_i(int i) const {
  require(i >= 0 && i < p, ErrorCode::InvalidInput, "output index out of range");
  Matrix out(N, columns());
  for (int k = 0; k < N; ++k) out.row(k) = Yp.row(k * p + i);
  return out;
}

Matrix DataBlocks::H_i(int i) const {
  Matrix S(Up.rows() + Uf.rows() + N, columns());
  S << Up, Uf, Yp_i(i);
  return S;
}

RowVector DataBlocks::Yf_i(int i) const {
  require(i >= 0 && i < p, ErrorCode::InvalidInput, "output index out of range");
  return Yf.row(i);
}

DataBlocks build_blocks(const Trajectory& traj, int N) {
  traj.validate();
  require(N >= 1, ErrorCode::InvalidInput, "window N must be at least 1");
  require(traj.length() >= N + 1, ErrorCode::InvalidInput, "trajectory shorter than N+1 samples");
  const int m = traj.inputs();
  const int p = traj.outputs();
  const Matrix Hu = hankel(traj.u, N + 1);
  const Matrix Hy = hankel(traj.y, N + 1);
  DataBlocks b;
  b.N = N;
  b.m = m;
  b.p = p;
  b.Up = Hu.topRows(m * N);
  b.Uf = Hu.bottomRows(m);
  b.Yp = Hy.topRows(p * N);
  b.Yf = Hy.bottomRows(p);
  return b;
}

bool verify_rank_condition(const DataBlocks& blocks, int n) {
  const int target = blocks.m * (blocks.N + 1) + n;
  if (blocks.columns() < target) return false;
  return numerical_rank(blocks.past_stack()) == target;
}

Trajectory add_noise(const Trajectory& traj, const NoiseSpec& spec) {
  require(spec.sigma >= 0.0 && std::isfinite(spec.sigma), ErrorCode::InvalidInput,
          "noise standard deviation must be finite and nonnegative");
  Trajectory out = traj;
  if (spec.sigma == 0.0) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.sigma);
  for (Eigen::Index t = 0; t < out.y.cols(); ++t)
    for (Eigen::Index i = 0; i < out.y.rows(); ++i) out.y(i, t) += normal(rng);
  return out;
}

double snr(const DataBlocks& clean, const DataBlocks& noise) {
  const Matrix S = clean.full_stack();
  const Matrix E = noise.full_stack();
  require(S.rows() == E.rows() && S.cols() == E.cols(), ErrorCode::InvalidInput,
          "clean and noise stacks differ in shape");
  const Vector se = singular_values(E);
  if (se(0) == 0.0) return std::numeric_limits<double>::infinity();
  const Vector ss = singular_values(S);
  const double tol = static_cast<double>(std::max(S.rows(), S.cols())) * ss(0) * machine_epsilon();
  double smin = ss(0);
  for (Eigen::Index k = 0; k < ss.size(); ++k)
    if (ss(k) > tol) smin = ss(k);
  return 10.0 * std::log10(smin) - 10.0 * std::log10(se(0));
}

RowVector average_predictor(const std::vector<DataBlocks>& datasets, std::optional<double> tol, int i) {
  require(!datasets.empty(), ErrorCode::InvalidInput, "no datasets to average");
  const DataBlocks& ref = datasets.front();
  RowVector sum;
  for (const DataBlocks& b : datasets) {
    require(b.N == ref.N && b.m == ref.m && b.p == ref.p, ErrorCode::InvalidInput,
            "datasets disagree on N, m or p");
    const Matrix H = b.H_i(i);
    const RowVector row = b.Yf_i(i) * pinv_truncated(H, tol ? *tol : default_tolerance(H));
    if (sum.size() == 0)
      sum = row;
    else
      sum += row;
  }
  return sum / static_cast<double>(datasets.size());
}

Matrix pe_input(int m, int length, double amplitude, std::uint64_t seed) {
  require(m >= 1 && length >= 0, ErrorCode::InvalidInput, "bad input dimensions");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Matrix u(m, length);
  for (int t = 0; t < length; ++t)
    for (int k = 0; k < m; ++k) u(k, t) = amplitude * uni(rng);
  return u;
}

Trajectory collect(const StateSpace& ss, const Vector& x0, const Matrix& u) {
  return {u, simulate(ss, x0, u)};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  traj.validate();
  os << "t";
  for (int k = 0; k < traj.inputs(); ++k) os << ",u" << k + 1;
  for (int k = 0; k < traj.outputs(); ++k) os << ",y" << k + 1;
  os << '\n';
  for (int t = 0; t < traj.length(); ++t) {
    os << t;
    for (int k = 0; k < traj.inputs(); ++k) os << ',' << format_double(traj.u(k, t));
    for (int k = 0; k < traj.outputs(); ++k) os << ',' << format_double(traj.y(k, t));
    os << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::InvalidInput, "trajectory CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  require(!header.empty() && header[0] == "t", ErrorCode::InvalidInput, "trajectory header must start with 't'");
  int m = 0, p = 0;
  for (std::size_t k = 1; k < header.size(); ++k) {
    const std::string& h = header[k];
    if (p == 0 && h == "u" + std::to_string(m + 1))
      ++m;
    else if (h == "y" + std::to_string(p + 1))
      ++p;
    else
      fail(ErrorCode::InvalidInput, "unexpected trajectory column '" + h + "'");
  }
  require(m >= 1 && p >= 1, ErrorCode::InvalidInput, "trajectory needs at least one u and one y column");

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    require(cells.size() == header.size(), ErrorCode::InvalidInput,
            "trajectory row " + std::to_string(lineno) + " has the wrong column count");
    std::vector<double> vals;
    for (std::size_t k = 1; k < cells.size(); ++k) vals.push_back(parse_double(cells[k], header[k]));
    rows.push_back(std::move(vals));
  }
  Trajectory traj{Matrix(m, rows.size()), Matrix(p, rows.size())};
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (int k = 0; k < m; ++k) traj.u(k, t) = rows[t][k];
    for (int k = 0; k < p; ++k) traj.y(k, t) = rows[t][m + k];
  }
  traj.validate();
  return traj;
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::InvalidInput, "cannot write trajectory file '" + path + "'");
  write_trajectory_csv(os, traj);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorCode::InvalidInput, "cannot read trajectory file '" + path + "'");
  return read_trajectory_csv(is);
}

}  // namespace ddlti
