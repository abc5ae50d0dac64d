#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <vector>

#include "ensembles.hpp"

// Symmetric eigen/singular computations and the spectrum-derived functionals:
// least singular value, gaps, interval counts, the log-weighted singular norm,
// column-span distances and the quadratic-form distance identity.

namespace rmt {

struct Spectrum {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns aligned with values

  int n() const { return static_cast<int>(eigenvalues.size()); }
};

Spectrum eigen_sym(const SymMatrix& a);
// Values-only path (descending), for drivers that never touch eigenvectors.
Eigen::VectorXd eigenvalues_sym(const SymMatrix& a);

// Checks the residual and orthonormality contracts of a computed Spectrum;
// returns the worst residual scaled by its tolerance (<= 1 means pass).
double spectrum_defect(const SymMatrix& a, const Spectrum& s);

double sigma_min(const Eigen::VectorXd& eigenvalues);
double sigma_min(const SymMatrix& a);

// Number of eigenvalues in the open interval (a,b); requires a < b.
int count_interval(const Eigen::VectorXd& eigenvalues, double a, double b);
int count_interval(const Spectrum& s, double a, double b);

// lambda_k - lambda_{k+l} with 1-based k; requires 1 <= k <= n-l, l >= 1.
double eigen_gap(const Eigen::VectorXd& eigenvalues, int k, int l);
double eigen_gap(const Spectrum& s, int k, int l);

// Singular values below this are treated as exact zeros and excluded from
// inverse statistics with a counter (a measure-zero perturbation has no
// floating-point representation).
double singular_cutoff(int n);

struct SingularProfile {
  std::vector<double> sigmas;  // descending
  std::vector<double> mus;     // mu_k = 1/sigma_{n-k+1}; +inf past the cutoff
  int n_singular = 0;

  bool invertible() const { return n_singular == 0; }
  double mu1() const { return mus.front(); }
};

SingularProfile singular_profile(const Eigen::VectorXd& eigenvalues);

// sqrt( sum_k sigma_k^2 (log(1+k))^2 ), k counted from 1, natural log.
double norm_star(std::span<const double> sigmas);

// Euclidean distance from column j to the span of the other columns.
double dist_to_colspan(const SymMatrix& a, int j);

struct SingularMinorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DistIdentityResult {
  double lhs = 0.0;  // d_1 by orthogonal projection
  double rhs = 0.0;  // |<A_minor^{-1} X, X> - a_00| / sqrt(1 + |A_minor^{-1} X|^2)
  double abs_err = 0.0;
};

// Throws SingularMinorError when the leading minor is numerically singular.
DistIdentityResult dist_identity_check(const SymMatrix& a);

enum class PairMode {
  AllPairs,    // every eigenpair of A against every eigenpair of the minor
  LeastPairs,  // only the least-singular pair on each side
};

struct PerturbationResult {
  double max_ratio = 0.0;
  int skipped_pairs = 0;  // |u_j| below 1e-12
};

// Largest of |<v, X^(j)>| * |u_j| / |lambda - lambda'| over the selected
// eigenpairs (lambda,u) of A and (lambda',v) of the minor A^(j).
PerturbationResult perturbation_check(const SymMatrix& a, int j,
                                      PairMode mode = PairMode::AllPairs);

struct SigmaMinLowerResult {
  bool ok = true;
  double max_violation = 0.0;  // max_j |v_j| d_j(A) - sigma_min(A)
};

SigmaMinLowerResult sigma_min_lower_check(const SymMatrix& a);

}  // namespace rmt
