#include "distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rmt {

namespace {

void sort_atoms(std::vector<Atom>& atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
}

std::vector<Atom> merge_atoms(const std::map<double, double>& mass) {
  std::vector<Atom> out;
  out.reserve(mass.size());
  for (const auto& [v, p] : mass) {
    if (p > 0.0) out.push_back({v, p});
  }
  return out;
}

}  // namespace

Distribution::Distribution(Kind kind, std::vector<Atom> atoms, double b)
    : kind_(kind), atoms_(std::move(atoms)), subgaussian_b_(b) {
  sort_atoms(atoms_);
}

Distribution Distribution::rademacher() {
  return Distribution(Kind::Rademacher, {{-1.0, 0.5}, {1.0, 0.5}}, 1.0);
}

Distribution Distribution::lazy_signed(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw std::invalid_argument("lazy_signed: nu must lie in (0,1)");
  }
  const double s = 1.0 / std::sqrt(nu);
  return Distribution(Kind::LazySigned,
                      {{-s, nu / 2.0}, {0.0, 1.0 - nu}, {s, nu / 2.0}},
                      std::max(1.0, s));
}

Distribution Distribution::sparse_rademacher(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("sparse_rademacher: p must lie in (0,1)");
  }
  const double s = 1.0 / std::sqrt(p);
  return Distribution(Kind::SparseRademacher,
                      {{-s, p / 2.0}, {0.0, 1.0 - p}, {s, p / 2.0}},
                      std::max(1.0, s));
}

Distribution Distribution::uniform_pm1_0(double w_minus, double w_zero,
                                         double w_plus) {
  if (!(w_minus > 0.0 && w_plus > 0.0 && w_zero >= 0.0)) {
    throw std::invalid_argument("uniform_pm1_0: weights must be positive");
  }
  if (std::abs(w_minus + w_zero + w_plus - 1.0) > 1e-12) {
    throw std::invalid_argument("uniform_pm1_0: weights must sum to 1");
  }
  if (std::abs(w_minus - w_plus) > 1e-12) {
    throw std::invalid_argument("uniform_pm1_0: asymmetric weights break mean 0");
  }
  const double s = 1.0 / std::sqrt(w_minus + w_plus);
  return Distribution(Kind::UniformPm10,
                      {{-s, w_minus}, {0.0, w_zero}, {s, w_plus}},
                      std::max(1.0, s));
}

Distribution Distribution::gaussian() {
  return Distribution(Kind::Gaussian, {}, 1.0);
}

Distribution Distribution::custom_discrete(std::vector<Atom> atoms,
                                           double subgaussian_b) {
  Distribution d(Kind::CustomDiscrete, std::move(atoms), subgaussian_b);
  d.validate();
  return d;
}

const std::vector<Atom>& Distribution::atoms() const {
  if (!is_discrete()) {
    throw std::logic_error("atoms(): gaussian law has no atom table");
  }
  return atoms_;
}

void Distribution::validate() const {
  if (!is_discrete()) return;
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (a.prob < 0.0) throw std::invalid_argument("negative atom probability");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("atom probabilities must sum to 1 (1e-12)");
  }
  if (std::abs(atoms_mean(atoms_)) > 1e-12) {
    throw std::invalid_argument("distribution mean must be 0 (1e-12)");
  }
  if (std::abs(atoms_variance(atoms_) - 1.0) > 1e-12) {
    throw std::invalid_argument("distribution variance must be 1 (1e-12)");
  }
}

double Distribution::value_from_u01(double u) const {
  const auto& as = atoms();
  double cum = 0.0;
  for (const Atom& a : as) {
    cum += a.prob;
    if (u < cum) return a.value;
  }
  return as.back().value;
}

double Distribution::sample(rng::Stream& stream) const {
  if (kind_ == Kind::Gaussian) return stream.gaussian();
  return value_from_u01(stream.u01());
}

std::string Distribution::describe() const {
  switch (kind_) {
    case Kind::Rademacher: return "rademacher";
    case Kind::LazySigned: return "lazy_signed";
    case Kind::SparseRademacher: return "sparse_rademacher";
    case Kind::UniformPm10: return "uniform_pm1_0";
    case Kind::Gaussian: return "gaussian";
    case Kind::CustomDiscrete: return "custom_discrete";
  }
  return "unknown";
}

std::vector<Atom> symmetrized_atoms(const Distribution& dist) {
  const auto& as = dist.atoms();
  std::map<double, double> mass;
  for (const Atom& a : as) {
    for (const Atom& b : as) {
      mass[a.value - b.value] += a.prob * b.prob;
    }
  }
  return merge_atoms(mass);
}

void LazyParams::validate() const {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw std::invalid_argument("LazyParams: nu must lie in (0,1)");
  }
  if (!(p_truncation > 0.0 && p_truncation <= 1.0)) {
    throw std::invalid_argument("LazyParams: truncation probability not in (0,1]");
  }
  if (!(window_lo < window_hi)) {
    throw std::invalid_argument("LazyParams: window is empty");
  }
}

LazyParams make_lazy_params(const Distribution& dist, double nu) {
  LazyParams lp;
  lp.nu = nu;
  const double b = dist.subgaussian_b();
  lp.window_lo = 1.0;
  lp.window_hi = 16.0 * b * b;
  double p = 0.0;
  std::map<double, double> mass;
  for (const Atom& a : symmetrized_atoms(dist)) {
    const double mag = std::abs(a.value);
    if (mag > lp.window_lo && mag < lp.window_hi) {
      p += a.prob;
      mass[a.value] += a.prob;
    }
  }
  lp.p_truncation = p;
  if (p > 0.0) {
    for (const auto& [v, m] : mass) lp.zbar_atoms.push_back({v, m / p});
  }
  lp.validate();
  return lp;
}

std::vector<Atom> xi_nu_atoms(const LazyParams& lp) {
  const double keep = lp.nu * lp.p_truncation;
  std::map<double, double> mass;
  mass[0.0] = 1.0 - keep;
  for (const Atom& a : lp.zbar_atoms) mass[a.value] += keep * a.prob;
  return merge_atoms(mass);
}

std::vector<Atom> tilde_z_nu_atoms(const Distribution& dist, double nu) {
  std::map<double, double> mass;
  mass[0.0] = 1.0 - nu;
  for (const Atom& a : symmetrized_atoms(dist)) mass[a.value] += nu * a.prob;
  return merge_atoms(mass);
}

double atoms_mean(const std::vector<Atom>& atoms) {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.prob * a.value;
  return m;
}

double atoms_variance(const std::vector<Atom>& atoms) {
  const double m = atoms_mean(atoms);
  double v = 0.0;
  for (const Atom& a : atoms) v += a.prob * (a.value - m) * (a.value - m);
  return v;
}

}  // namespace rmt
