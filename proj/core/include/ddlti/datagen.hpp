#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ddlti/lti.hpp"
#include "ddlti/matpoly.hpp"

namespace ddlti {

struct Trajectory {
  Matrix u;  // m x T'
  Matrix y;  // p x T'

  int inputs() const { return static_cast<int>(u.rows()); }
  int outputs() const { return static_cast<int>(y.rows()); }
  int length() const { return static_cast<int>(u.cols()); }
  void validate() const;
};

// Block Hankel matrix with L block rows; column j stacks s_j .. s_{j+L-1}.
Matrix hankel(const Matrix& signal, int L);

bool pe_order(const Matrix& u, int order);

struct DataBlocks {
  int N = 0;
  int m = 0;
  int p = 0;
  Matrix Up;  // mN x T
  Matrix Uf;  // m x T
  Matrix Yp;  // pN x T
  Matrix Yf;  // p x T

  int columns() const { return static_cast<int>(Uf.cols()); }
  Matrix past_stack() const;  // [Up; Uf; Yp]
  Matrix full_stack() const;  // [Up; Uf; Yp; Yf]
  Matrix Yp_i(int i) const;   // rows of Yp belonging to output i
  Matrix H_i(int i) const;    // [Up; Uf; Yp_i]
  RowVector Yf_i(int i) const;
};

DataBlocks build_blocks(const Trajectory& traj, int N);

bool verify_rank_condition(const DataBlocks& blocks, int n);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

Trajectory add_noise(const Trajectory& traj, const NoiseSpec& spec);

// Decibel ratio of the smallest nonzero singular value of the clean stack to
// the largest of the noise stack; +inf when the noise stack is zero.
double snr(const DataBlocks& clean, const DataBlocks& noise);

// Mean over datasets of Yf_i * pinv_truncated(H_i, tol), tol defaulting per dataset.
RowVector average_predictor(const std::vector<DataBlocks>& datasets, std::optional<double> tol, int i);

// Seeded i.i.d. uniform samples on [-amplitude, amplitude], m x length.
Matrix pe_input(int m, int length, double amplitude, std::uint64_t seed);

Trajectory collect(const StateSpace& ss, const Vector& x0, const Matrix& u);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

}  // namespace ddlti
