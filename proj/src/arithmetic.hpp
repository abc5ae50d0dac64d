#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

// Arithmetic-structure functionals: distance to the integer lattice, the
// least common denominator and its subvector variant, distance to sparse
// vectors, and flat-coordinate counts.

namespace rmt {

double dist_to_integer(double x);
double torus_dist(const Eigen::VectorXd& v);

struct LcdParams {
  double alpha = 0.25;
  double gamma = 0.5;
  double cap = 1e6;
  // 0 means automatic: gamma / (8 * max(norm, eps)). A user-supplied value
  // must satisfy grid_step <= gamma / (4 * max(1, |v|_2)).
  double grid_step = 0.0;
};

enum class LcdBranch { GammaBranch, AlphaBranch, None };

struct LcdResult {
  bool bounded = false;
  double value = 0.0;      // located denominator, or the cap when unbounded
  double witness_t = 0.0;  // admissible dilation achieving the value
  LcdBranch binding = LcdBranch::None;
};

// Smallest phi > 0 with |phi v|_T <= min{gamma phi |v|_2, sqrt(alpha n)},
// located by a Lipschitz-sound grid scan plus refinement; Unbounded(cap) if
// no admissible phi <= cap exists.
LcdResult lcd(const Eigen::VectorXd& v, const LcdParams& params);

// True if phi satisfies the defining inequality with the given slack.
bool lcd_admissible(const Eigen::VectorXd& v, const LcdParams& params,
                    double phi, double slack = 0.0);

enum class SubvectorMode { Exact, Heuristic };

struct SubvectorLcdResult {
  LcdResult lcd;
  std::vector<int> kept;  // the subset I realizing the reported value
};

// Minimum of the LCD over subvectors keeping at least (1-2 mu) n coordinates
// (dropped coordinates are zeroed; the ambient dimension stays n). The
// normalized variant rescales each subvector to unit norm. Exact mode
// enumerates all removal sets; heuristic mode greedily drops the coordinates
// farthest from the lattice at the current witness, with random restarts,
// and is an upper bound on the exact value.
SubvectorLcdResult subvector_lcd(const Eigen::VectorXd& v,
                                 const LcdParams& params, double mu,
                                 SubvectorMode mode, bool normalized = true,
                                 std::uint64_t seed = 0, int restarts = 8);

// Euclidean distance from v to the set of vectors supported on at most
// ceil(delta * n) coordinates (ties between equal magnitudes broken by index).
double compress_dist(const Eigen::VectorXd& v, double delta);

struct CompressParams {
  double delta = 0.1;  // sparsity fraction, in (0,1)
  double rho = 0.3;    // distance threshold, in (0,1)

  void validate() const;
};

// Membership in the compressible set; agrees with compress_dist by
// construction: compressible exactly when the distance is <= rho.
bool is_compressible(const Eigen::VectorXd& v, const CompressParams& params);

// Number of coordinates with |v_j| sqrt(n) in [c, 1/c].
int flat_count(const Eigen::VectorXd& v, double c);

}  // namespace rmt
