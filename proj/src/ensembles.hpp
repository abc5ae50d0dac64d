#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "distribution.hpp"
#include "rng.hpp"

// Samplers for the random objects of the lab: symmetric matrices, columns,
// mu-random index sets, the symmetrized-thinned column, and the zeroed-out
// block matrix. All samplers are pure functions of (params, seed, index).

namespace rmt {

// Dense symmetric matrix; one copy of every entry is stored (packed upper
// triangle), so A(i,j) == A(j,i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);

  int n() const { return n_; }
  double operator()(int i, int j) const { return tri_[index(i, j)]; }
  void set(int i, int j, double v) { tri_[index(i, j)] = v; }

  Eigen::MatrixXd dense() const;
  Eigen::VectorXd col(int j) const;
  // Minor with the given (sorted, distinct) rows/columns removed.
  SymMatrix minor_removing(const std::vector<int>& removed) const;

  bool all_finite() const;

 private:
  std::size_t index(int i, int j) const;

  int n_ = 0;
  std::vector<double> tri_;
};

SymMatrix sample_sym(const Distribution& dist, int n, std::uint64_t seed);

// Samples the matrix indexed by an arbitrary sorted list of global indices;
// entry (a,b) comes from the stream of (seed, idx[a], idx[b]). sample_sym is
// the special case idx = (0..n-1), which is what makes minors consistent.
SymMatrix sample_sym_indexed(const Distribution& dist, std::uint64_t seed,
                             const std::vector<int>& indices);

Eigen::VectorXd sample_col(const Distribution& dist, int n,
                           std::uint64_t seed);

// Each index included independently with probability mu.
std::vector<int> sample_mu_subset(int n, double mu, std::uint64_t seed);

// Coordinate j equals (X_j - X'_j) * 1{j in J} for a mu-random J.
Eigen::VectorXd sample_tilde_x(const Distribution& dist, int n, double mu,
                               std::uint64_t seed);

struct ZeroedMatrixParams {
  int n = 0;
  int d = 0;       // block size, 1 <= d <= n/3
  double nu = 0.25;
  Distribution base = Distribution::rademacher();

  void validate() const;
};

// Symmetric matrix with zero blocks [0,d)x[0,d) and [d,n)x[d,n); off-block
// entries are i.i.d. copies of (symmetrized base) * Bernoulli(nu).
SymMatrix sample_zeroed(const ZeroedMatrixParams& params, std::uint64_t seed);

// Lazy sign vector in {-1,0,1}^n with P(0) = 1 - nu (not variance-normalized;
// used by the conditioned small-ball experiment).
Eigen::VectorXd sample_lazy_sign_vector(int n, double nu, std::uint64_t seed);

}  // namespace rmt
