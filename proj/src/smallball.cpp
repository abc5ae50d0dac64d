#include "smallball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "arithmetic.hpp"
#include "stats.hpp"

namespace rmt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ConcentrationEstimate estimate_from_count(std::int64_t count,
                                          std::int64_t trials,
                                          std::optional<double> center) {
  const WilsonInterval w = wilson(count, trials);
  ConcentrationEstimate e;
  e.p_hat = w.p_hat;
  e.trials = trials;
  e.ci_low = w.low;
  e.ci_high = w.high;
  e.window_center = center;
  return e;
}

}  // namespace

ConcentrationEstimate levy_scalar(const std::vector<double>& sorted_samples,
                                  double eps) {
  if (sorted_samples.empty()) {
    throw std::invalid_argument("levy_scalar: empty sample set");
  }
  if (!(eps >= 0.0)) throw std::invalid_argument("levy_scalar: eps must be >= 0");
  if (!std::is_sorted(sorted_samples.begin(), sorted_samples.end())) {
    throw std::invalid_argument("levy_scalar: samples must be sorted");
  }
  const std::int64_t n = static_cast<std::int64_t>(sorted_samples.size());
  // Any optimal window can be slid right until its left edge hits a sample,
  // so scanning windows anchored at samples attains the exact sup.
  std::int64_t best = 0;
  std::size_t right = 0;
  for (std::size_t left = 0; left < sorted_samples.size(); ++left) {
    const double hi = sorted_samples[left] + 2.0 * eps;
    if (right < left) right = left;
    while (right < sorted_samples.size() && sorted_samples[right] <= hi) {
      ++right;
    }
    best = std::max<std::int64_t>(best, static_cast<std::int64_t>(right - left));
  }
  return estimate_from_count(best, n, std::nullopt);
}

SmallBallResult small_ball(const Eigen::VectorXd& v, const Distribution& dist,
                           double eps, std::int64_t trials, std::uint64_t seed,
                           int threads) {
  if (trials <= 0) throw std::invalid_argument("small_ball: trials must be > 0");
  const int n = static_cast<int>(v.size());
  std::vector<double> z(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](std::int64_t t) {
    const std::uint64_t ts =
        rng::derive_seed(seed, static_cast<std::uint64_t>(t));
    const Eigen::VectorXd x = sample_col(dist, n, ts);
    z[static_cast<std::size_t>(t)] = x.dot(v);
  });
  std::int64_t count = 0;
  for (double val : z) {
    if (std::abs(val) <= eps) ++count;
  }
  SmallBallResult r;
  r.at_zero = estimate_from_count(count, trials, 0.0);
  std::sort(z.begin(), z.end());
  r.swept = levy_scalar(z, eps);
  return r;
}

CharFn CharFn::exact_from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("CharFn: empty atom table");
  CharFn f;
  f.form_ = Form::ExactDiscrete;
  f.atoms_ = std::move(atoms);
  return f;
}

CharFn CharFn::monte_carlo(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("CharFn: empty sample set");
  CharFn f;
  f.form_ = Form::MonteCarlo;
  f.samples_ = std::move(samples);
  return f;
}

std::complex<double> CharFn::operator()(double t) const {
  std::complex<double> sum{0.0, 0.0};
  if (form_ == Form::ExactDiscrete) {
    for (const Atom& a : atoms_) {
      sum += a.prob * std::polar(1.0, kTwoPi * t * a.value);
    }
  } else {
    for (double s : samples_) sum += std::polar(1.0, kTwoPi * t * s);
    sum /= static_cast<double>(samples_.size());
  }
  return sum;
}

CharFn charfn_exact(const Distribution& dist) {
  if (!dist.is_discrete()) {
    throw std::invalid_argument(
        "charfn_exact: continuous law, use the monte_carlo form");
  }
  return CharFn::exact_from_atoms(dist.atoms());
}

XiBoundsResult xi_bounds_check(const Distribution& dist, double nu,
                               const std::vector<double>& t_grid) {
  const LazyParams lp = make_lazy_params(dist, nu);
  const double nup = lp.nu * lp.p_truncation;
  XiBoundsResult r;
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    double expect_cos = 0.0;
    double expect_torus_sq = 0.0;
    for (const Atom& a : lp.zbar_atoms) {
      expect_cos += a.prob * std::cos(kTwoPi * t * a.value);
      const double d = dist_to_integer(t * a.value);
      expect_torus_sq += a.prob * d * d;
    }
    const double phi = 1.0 - nup + nup * expect_cos;
    const double lower = std::exp(-32.0 * nup * expect_torus_sq);
    const double upper = std::exp(-nup * expect_torus_sq);
    const double viol = std::max(lower - phi, phi - upper);
    if (viol > r.max_violation) {
      r.max_violation = viol;
      r.worst_t = t;
    }
  }
  return r;
}

double cosine_bound_check(const std::vector<double>& a_grid) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double a : a_grid) {
    const double d = dist_to_integer(a);
    const double c = std::cos(kTwoPi * a);
    worst = std::max(worst, std::max((1.0 - 20.0 * d * d) - c, c - (1.0 - d * d)));
  }
  return worst;
}

namespace {

// Distribution of <X,v> by sequential convolution of the per-coordinate atom
// laws; returns false if the support grows past the cap.
bool convolve_inner_product(const Distribution& dist, const Eigen::VectorXd& v,
                            std::size_t max_support,
                            std::map<double, double>* out) {
  std::map<double, double> acc;
  acc[0.0] = 1.0;
  for (int i = 0; i < v.size(); ++i) {
    std::map<double, double> next;
    for (const auto& [z, p] : acc) {
      for (const Atom& a : dist.atoms()) {
        next[z + a.value * v(i)] += p * a.prob;
      }
    }
    if (next.size() > max_support) return false;
    acc = std::move(next);
  }
  *out = std::move(acc);
  return true;
}

double simpson_abs_charfn(const Distribution& dist, const Eigen::VectorXd& v,
                          double lo, double hi, int panels) {
  const CharFn base = charfn_exact(dist);
  auto integrand = [&](double theta) {
    std::complex<double> prod{1.0, 0.0};
    for (int i = 0; i < v.size(); ++i) prod *= base(theta * v(i));
    return std::abs(prod);
  };
  const double h = (hi - lo) / panels;
  double sum = integrand(lo) + integrand(hi);
  for (int i = 1; i < panels; ++i) {
    sum += integrand(lo + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace

EsseenResult esseen_bound_check(const Distribution& dist,
                                const Eigen::VectorXd& v, double delta,
                                int panels, std::uint64_t seed) {
  if (!dist.is_discrete()) {
    throw std::invalid_argument("esseen_bound_check: discrete law required");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("esseen_bound_check: delta > 0");
  if (panels < 2) throw std::invalid_argument("esseen_bound_check: panels >= 2");
  if (panels % 2 == 1) ++panels;

  EsseenResult r;
  std::map<double, double> law;
  if (convolve_inner_product(dist, v, 2'000'000, &law)) {
    // Exact sup over windows [t-delta, t+delta] anchored at atoms.
    std::vector<Atom> atoms;
    atoms.reserve(law.size());
    for (const auto& [z, p] : law) atoms.push_back({z, p});
    double best = 0.0;
    std::size_t right = 0;
    double tail = 0.0;
    for (std::size_t left = 0; left < atoms.size(); ++left) {
      const double hi = atoms[left].value + 2.0 * delta;
      if (right < left) {
        right = left;
        tail = 0.0;
      }
      while (right < atoms.size() && atoms[right].value <= hi) {
        tail += atoms[right].prob;
        ++right;
      }
      best = std::max(best, tail);
      tail -= atoms[left].prob;
    }
    r.lhs = best;
    r.lhs_exact = true;
  } else {
    constexpr std::int64_t kTrials = 200'000;
    std::vector<double> z(kTrials);
    for (std::int64_t t = 0; t < kTrials; ++t) {
      const std::uint64_t ts =
          rng::derive_seed(seed, static_cast<std::uint64_t>(t));
      z[static_cast<std::size_t>(t)] =
          sample_col(dist, static_cast<int>(v.size()), ts).dot(v);
    }
    std::sort(z.begin(), z.end());
    r.lhs = levy_scalar(z, delta).p_hat;
    r.lhs_exact = false;
  }

  const double lo = -1.0 / delta;
  const double hi = 1.0 / delta;
  // |phi| has kinks where a factor vanishes, so the Richardson doubling is
  // repeated until the refinement disturbance drops below 1e-6 relative.
  double coarse = simpson_abs_charfn(dist, v, lo, hi, panels);
  double fine = simpson_abs_charfn(dist, v, lo, hi, 2 * panels);
  double rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
  for (int round = 0; round < 4 && rel > 1e-6; ++round) {
    panels *= 2;
    coarse = fine;
    fine = simpson_abs_charfn(dist, v, lo, hi, 2 * panels);
    rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
  }
  r.rhs = delta * fine;
  r.quad_rel_err = rel;
  r.ratio = r.lhs / std::max(r.rhs, 1e-300);
  return r;
}

DecouplingResult decoupling_check(const Distribution& dist, const SymMatrix& m,
                                  const Eigen::VectorXd& u, double theta,
                                  const std::vector<int>& j_set) {
  const int n = m.n();
  if (u.size() != n) throw std::invalid_argument("decoupling_check: size mismatch");
  if (!dist.is_discrete()) {
    throw std::invalid_argument("decoupling_check: discrete law required");
  }
  const auto& atoms = dist.atoms();
  const std::size_t na = atoms.size();

  std::vector<bool> in_j(n, false);
  for (int j : j_set) {
    if (j < 0 || j >= n) throw std::invalid_argument("decoupling_check: bad J index");
    if (in_j[j]) throw std::invalid_argument("decoupling_check: duplicate J index");
    in_j[j] = true;
  }
  std::vector<int> js, is;
  for (int i = 0; i < n; ++i) (in_j[i] ? js : is).push_back(i);

  const double full_states = std::pow(double(na), n);
  const double pair_states = std::pow(double(na), 2.0 * js.size());
  if (full_states > 4e6 || pair_states > 4e6) {
    throw std::invalid_argument("decoupling_check: enumeration too large");
  }

  const Eigen::MatrixXd md = m.dense();

  // lhs = |E exp(2 pi i theta <Mx,x> + <x,u>)|^2 over the full product law.
  std::complex<double> lhs_sum{0.0, 0.0};
  std::vector<std::size_t> odo(n, 0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = atoms[0].value;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= atoms[odo[i]].prob;
    const double quad = x.dot(md * x);
    const double tilt = x.dot(u);
    lhs_sum += w * std::polar(std::exp(tilt), kTwoPi * theta * quad);
    int pos = 0;
    while (pos < n) {
      if (++odo[pos] < na) {
        x(pos) = atoms[odo[pos]].value;
        break;
      }
      odo[pos] = 0;
      x(pos) = atoms[0].value;
      ++pos;
    }
    if (pos == n) break;
  }
  const double lhs = std::norm(lhs_sum);

  // rhs: outer expectation over (X_J, X'_J); the inner expectation over X_I
  // factorizes into per-coordinate tilted characteristic functions.
  const int nj = static_cast<int>(js.size());
  std::vector<std::size_t> odo2(2 * nj, 0);
  double rhs = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < 2 * nj; ++i) w *= atoms[odo2[i]].prob;
    double tilt_sum = 0.0;
    for (int i = 0; i < nj; ++i) {
      tilt_sum += (atoms[odo2[i]].value + atoms[odo2[nj + i]].value) * u(js[i]);
    }
    std::complex<double> inner{1.0, 0.0};
    for (int ii : is) {
      double wcoef = 0.0;
      for (int i = 0; i < nj; ++i) {
        wcoef += md(ii, js[i]) *
                 (atoms[odo2[i]].value - atoms[odo2[nj + i]].value);
      }
      std::complex<double> factor{0.0, 0.0};
      for (const Atom& a : atoms) {
        factor += a.prob * std::polar(std::exp(2.0 * a.value * u(ii)),
                                      2.0 * kTwoPi * theta * a.value * wcoef);
      }
      inner *= factor;
    }
    rhs += w * std::exp(tilt_sum) * std::abs(inner);
    int pos = 0;
    while (pos < 2 * nj && ++odo2[pos] == na) {
      odo2[pos] = 0;
      ++pos;
    }
    if (pos == 2 * nj) break;
  }

  DecouplingResult r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.holds = lhs <= rhs + 1e-9;
  return r;
}

ThresholdResult threshold(const Eigen::VectorXd& v,
                          const ZeroedMatrixParams& zparams,
                          const ThresholdParams& tparams, std::uint64_t seed,
                          int threads) {
  zparams.validate();
  if (!(tparams.L >= 2.0)) throw std::invalid_argument("threshold: L must be >= 2");
  if (tparams.t_grid.empty() ||
      !std::is_sorted(tparams.t_grid.begin(), tparams.t_grid.end())) {
    throw std::invalid_argument("threshold: t_grid must be sorted ascending");
  }
  for (double t : tparams.t_grid) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw std::invalid_argument("threshold: grid values must lie in (0,1]");
    }
  }
  const int n = zparams.n;
  if (v.size() != n) throw std::invalid_argument("threshold: vector size mismatch");

  std::vector<double> norms(static_cast<std::size_t>(tparams.trials));
  parallel_for(tparams.trials, threads, [&](std::int64_t t) {
    const std::uint64_t ts =
        rng::derive_seed(seed, static_cast<std::uint64_t>(t));
    const SymMatrix m = sample_zeroed(zparams, ts);
    norms[static_cast<std::size_t>(t)] = (m.dense() * v).norm();
  });

  const double root_n = std::sqrt(double(n));
  ThresholdResult result;
  for (double t : tparams.t_grid) {
    ThresholdPoint pt;
    pt.t = t;
    for (double nv : norms) {
      if (nv <= t * root_n) ++pt.count;
    }
    pt.admissible = threshold_admissible(pt.count, tparams.trials, n, tparams.L,
                                         t, &pt.log_wilson_low, &pt.log_target);
    if (pt.admissible) result.value = t;
    result.points.push_back(pt);
  }
  return result;
}

bool threshold_admissible(std::int64_t count, std::int64_t trials, int n,
                          double L, double t, double* log_low,
                          double* log_target) {
  const WilsonInterval w = wilson(count, trials);
  const double low = (w.low > 0.0) ? std::log(w.low)
                                   : -std::numeric_limits<double>::infinity();
  const double target = n * std::log(4.0 * L * t);
  if (log_low) *log_low = low;
  if (log_target) *log_target = target;
  return low >= target;
}

}  // namespace rmt
