#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "distribution.hpp"
#include "ensembles.hpp"

// Probability-side functionals: Levy concentration estimation, exact and
// Monte Carlo characteristic functions, Esseen-type integrals, the
// characteristic-function sandwich bounds, the tilted decoupling inequality,
// and the threshold scale of a direction against the zeroed-out ensemble.

namespace rmt {

struct ConcentrationEstimate {
  double p_hat = 0.0;
  std::int64_t trials = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::optional<double> window_center;  // nullopt means swept (sup over w)
};

// Exact sup over window centers for the empirical measure: the largest
// number of samples in any closed interval of width 2*eps, over trials.
// Samples must be sorted ascending.
ConcentrationEstimate levy_scalar(const std::vector<double>& sorted_samples,
                                  double eps);

struct SmallBallResult {
  ConcentrationEstimate at_zero;  // P(|<X,v>| <= eps)
  ConcentrationEstimate swept;    // Levy concentration of <X,v> at radius eps
};

SmallBallResult small_ball(const Eigen::VectorXd& v, const Distribution& dist,
                           double eps, std::int64_t trials, std::uint64_t seed,
                           int threads = 1);

class CharFn {
 public:
  enum class Form { ExactDiscrete, MonteCarlo };

  static CharFn exact_from_atoms(std::vector<Atom> atoms);
  static CharFn monte_carlo(std::vector<double> samples);

  std::complex<double> operator()(double t) const;
  Form form() const { return form_; }

 private:
  Form form_ = Form::ExactDiscrete;
  std::vector<Atom> atoms_;
  std::vector<double> samples_;
};

// Exact evaluator by atom summation; throws for the gaussian law.
CharFn charfn_exact(const Distribution& dist);

struct XiBoundsResult {
  double max_violation = 0.0;  // largest signed violation of either side
  double worst_t = 0.0;
};

// Verifies exp(-32 nu p E|t zbar|_T^2) <= phi_xi(t) <= exp(-nu p E|t zbar|_T^2)
// at every grid point, exactly on the atom tables.
XiBoundsResult xi_bounds_check(const Distribution& dist, double nu,
                               const std::vector<double>& t_grid);

// Verifies 1 - 20 |a|_T^2 <= cos(2 pi a) <= 1 - |a|_T^2 on the grid.
double cosine_bound_check(const std::vector<double>& a_grid);

struct EsseenResult {
  double lhs = 0.0;           // Levy concentration of Z = <X,v> at radius delta
  double rhs = 0.0;           // delta * integral of |phi_Z| over [-1/delta, 1/delta]
  double ratio = 0.0;         // lhs / rhs
  double quad_rel_err = 0.0;  // Richardson check on the quadrature
  bool lhs_exact = true;
};

EsseenResult esseen_bound_check(const Distribution& dist,
                                const Eigen::VectorXd& v, double delta,
                                int panels = 10000, std::uint64_t seed = 1);

struct DecouplingResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;  // lhs <= rhs + 1e-9
};

// Exact enumeration of both sides of the tilted decoupling inequality for a
// discrete law; j_set selects the J side of the partition.
DecouplingResult decoupling_check(const Distribution& dist, const SymMatrix& m,
                                  const Eigen::VectorXd& u, double theta,
                                  const std::vector<int>& j_set);

struct ThresholdParams {
  double L = 2.0;
  std::int64_t trials = 10000;
  std::vector<double> t_grid;  // ascending, in (0,1]
};

struct ThresholdPoint {
  double t = 0.0;
  std::int64_t count = 0;
  double log_wilson_low = 0.0;
  double log_target = 0.0;  // n log(4 L t)
  bool admissible = false;
};

struct ThresholdResult {
  double value = 0.0;  // largest admissible grid t, or 0
  std::vector<ThresholdPoint> points;
};

// Admissibility rule shared by the threshold estimator and its driver: the
// Wilson lower bound of the count must clear (4Lt)^n in log space.
bool threshold_admissible(std::int64_t count, std::int64_t trials, int n,
                          double L, double t, double* log_low,
                          double* log_target);

// Conservative Monte Carlo estimate of the threshold scale: a grid t is
// admissible when the Wilson lower bound of P(|Mv|_2 <= t sqrt(n)) clears
// (4Lt)^n, compared in log space.
ThresholdResult threshold(const Eigen::VectorXd& v,
                          const ZeroedMatrixParams& zparams,
                          const ThresholdParams& tparams, std::uint64_t seed,
                          int threads = 1);

}  // namespace rmt
