#pragma once

#include <string>
#include <vector>

#include "rng.hpp"

// Entry laws: mean-zero, variance-one subgaussian distributions, plus the
// symmetrized / truncated / lazy variants derived from them.

namespace rmt {

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

class Distribution {
 public:
  enum class Kind {
    Rademacher,
    LazySigned,
    SparseRademacher,
    UniformPm10,
    Gaussian,
    CustomDiscrete,
  };

  static Distribution rademacher();
  // 0 with probability 1-nu, +-1/sqrt(nu) with probability nu/2 each.
  static Distribution lazy_signed(double nu);
  static Distribution sparse_rademacher(double p);
  // Symmetric three-point law on {-s, 0, +s}; s chosen for unit variance.
  static Distribution uniform_pm1_0(double w_minus, double w_zero,
                                    double w_plus);
  static Distribution gaussian();
  static Distribution custom_discrete(std::vector<Atom> atoms,
                                      double subgaussian_b = 1.0);

  Kind kind() const { return kind_; }
  bool is_discrete() const { return kind_ != Kind::Gaussian; }
  const std::vector<Atom>& atoms() const;
  double subgaussian_b() const { return subgaussian_b_; }

  // Checks sum(p)=1, mean 0, variance 1, all to 1e-12 (discrete kinds).
  void validate() const;

  // Inverse CDF over atoms sorted ascending, so for Rademacher u<1/2 maps to
  // -1 and u>=1/2 to +1. Discrete kinds only.
  double value_from_u01(double u) const;

  double sample(rng::Stream& stream) const;

  std::string describe() const;

 private:
  Distribution(Kind kind, std::vector<Atom> atoms, double b);

  Kind kind_;
  std::vector<Atom> atoms_;  // sorted by value; empty for gaussian
  double subgaussian_b_ = 1.0;
};

// Law of the symmetrized difference of two independent copies.
std::vector<Atom> symmetrized_atoms(const Distribution& dist);

// Truncated symmetrized law: the symmetrized variable conditioned on landing
// in the window (1, 16 B^2), together with the truncation probability p.
struct LazyParams {
  double nu = 0.25;
  double p_truncation = 0.0;
  double window_lo = 1.0;
  double window_hi = 16.0;
  std::vector<Atom> zbar_atoms;

  void validate() const;
};

LazyParams make_lazy_params(const Distribution& dist, double nu);

// Law of the lazified, truncated, symmetrized variable.
std::vector<Atom> xi_nu_atoms(const LazyParams& lp);

// Law of (symmetrized variable) * Bernoulli(nu).
std::vector<Atom> tilde_z_nu_atoms(const Distribution& dist, double nu);

double atoms_mean(const std::vector<Atom>& atoms);
double atoms_variance(const std::vector<Atom>& atoms);

}  // namespace rmt
