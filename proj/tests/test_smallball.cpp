#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ensembles.hpp"
#include "arithmetic.hpp"
#include "oracles.hpp"
#include "smallball.hpp"
#include "stats.hpp"

using rmt::Distribution;

namespace {

// O(N^2) brute-force sliding-window sup for cross-checking levy_scalar.
double levy_bruteforce(const std::vector<double>& sorted, double eps) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (sorted[j] >= sorted[i] && sorted[j] <= sorted[i] + 2.0 * eps) ++count;
    }
    best = std::max(best, count);
  }
  return double(best) / double(sorted.size());
}

}  // namespace

TEST_CASE("levy_scalar equals the exact empirical sup (brute force, N<=2000)") {
  rmt::rng::Stream s(5, rmt::rng::Tag::Aux, 3, 0);
  for (double eps : {0.01, 0.1, 0.5}) {
    std::vector<double> xs(1500);
    for (double& x : xs) x = 3.0 * s.gaussian();
    std::sort(xs.begin(), xs.end());
    const auto est = rmt::levy_scalar(xs, eps);
    CHECK(est.p_hat == doctest::Approx(levy_bruteforce(xs, eps)));
    CHECK(est.ci_low <= est.p_hat);
    CHECK(est.p_hat <= est.ci_high);
    CHECK_FALSE(est.window_center.has_value());
  }
}

TEST_CASE("levy_scalar trivial cases") {
  const std::vector<double> point(1200, 0.0);
  CHECK(rmt::levy_scalar(point, 0.25).p_hat == 1.0);

  // 2k+1 atoms spaced wider than the window: one atom per window.
  std::vector<double> grid;
  for (int a = -3; a <= 3; ++a) {
    for (int r = 0; r < 200; ++r) grid.push_back(double(a));
  }
  std::sort(grid.begin(), grid.end());
  CHECK(rmt::levy_scalar(grid, 0.4).p_hat == doctest::Approx(1.0 / 7.0));

  CHECK_THROWS(rmt::levy_scalar({}, 0.1));
  CHECK_THROWS(rmt::levy_scalar({1.0, 0.0}, 0.1));  // unsorted
}

TEST_CASE("levy_scalar is monotone in the radius") {
  rmt::rng::Stream s(6, rmt::rng::Tag::Aux, 4, 0);
  std::vector<double> xs(2000);
  for (double& x : xs) x = s.gaussian();
  std::sort(xs.begin(), xs.end());
  double prev = 0.0;
  for (double eps : {0.0, 0.05, 0.1, 0.3, 1.0}) {
    const double cur = rmt::levy_scalar(xs, eps).p_hat;
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("small_ball matches the exact binomial atom for the constant vector") {
  // X rademacher^10, v = (1,..,1)/sqrt(10), eps = 0.4/sqrt(10): the window
  // holds only the S=0 atom, so L = C(10,5)/2^10.
  const int n = 10;
  const Eigen::VectorXd v =
      Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  const double exact = oracle::binom_half_pmf(10, 5);
  CHECK(exact == doctest::Approx(252.0 / 1024.0));
  const auto r = rmt::small_ball(v, Distribution::rademacher(),
                                 0.4 / std::sqrt(10.0), 100000, 77);
  CHECK(r.swept.p_hat >= exact - 3.0 * (r.swept.ci_high - r.swept.ci_low));
  CHECK(exact >= r.swept.ci_low - 0.01);
  CHECK(exact <= r.swept.ci_high + 0.01);
  // Window at zero: |S|/sqrt(10) <= eps also captures exactly S=0.
  CHECK(exact >= r.at_zero.ci_low);
  CHECK(exact <= r.at_zero.ci_high);
}

TEST_CASE("small_ball trivial cases") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
  e1(0) = 1.0;
  const auto zero = rmt::small_ball(e1, Distribution::rademacher(), 0.5, 2000, 3);
  CHECK(zero.at_zero.p_hat == 0.0);  // atoms at +-1 only
  // eps beyond the l1 reach: probability one.
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.5);
  const auto one = rmt::small_ball(v, Distribution::rademacher(), 2.1, 2000, 3);
  CHECK(one.at_zero.p_hat == 1.0);
}

TEST_CASE("charfn_exact: rademacher symmetrized lazy law") {
  const Distribution d = Distribution::rademacher();
  const auto tilde = rmt::tilde_z_nu_atoms(d, 0.25);
  const rmt::CharFn phi = rmt::CharFn::exact_from_atoms(tilde);
  CHECK(std::abs(phi(0.0) - 1.0) <= 1e-12);
  // phi(1/4) = 1 - nu: the +-2 atoms contribute cos(pi) = -1.
  CHECK(phi(0.25).real() == doctest::Approx(0.75));
  CHECK(phi(0.25).imag() == doctest::Approx(0.0));
  // Integer t for an integer-valued law: back to 1.
  CHECK(phi(1.0).real() == doctest::Approx(1.0));
  CHECK(phi(3.0).real() == doctest::Approx(1.0));
}

TEST_CASE("charfn invariants: |phi| <= 1 and exact/MC agreement") {
  const Distribution d = Distribution::lazy_signed(0.25);
  const rmt::CharFn exact = rmt::charfn_exact(d);
  rmt::rng::Stream s(8, rmt::rng::Tag::Aux, 5, 0);
  const int trials = 40000;
  std::vector<double> samples(trials);
  for (double& x : samples) x = d.sample(s);
  const rmt::CharFn mc = rmt::CharFn::monte_carlo(samples);
  for (double t = 0.0; t <= 3.0; t += 0.125) {
    CHECK(std::abs(exact(t)) <= 1.0 + 1e-9);
    CHECK(std::abs(exact(t) - mc(t)) <= 4.0 / std::sqrt(double(trials)));
  }
  CHECK_THROWS(rmt::charfn_exact(Distribution::gaussian()));
}

TEST_CASE("xi bounds hold on a dense grid for discrete laws") {
  std::vector<double> grid;
  for (int i = 0; i <= 1000; ++i) grid.push_back(4.0 * i / 1000.0);
  for (const Distribution& d :
       {Distribution::rademacher(), Distribution::lazy_signed(0.25),
        Distribution::uniform_pm1_0(1.0 / 3, 1.0 / 3, 1.0 / 3)}) {
    const auto r = rmt::xi_bounds_check(d, 0.25, grid);
    CHECK(r.max_violation <= 1e-9);
  }
  // t = 0 is the equality point 1 = 1 = 1.
  const auto zero = rmt::xi_bounds_check(Distribution::rademacher(), 0.25, {0.0});
  CHECK(std::abs(zero.max_violation) <= 1e-12);
}

TEST_CASE("cosine torus bound holds on a grid") {
  std::vector<double> grid;
  for (int i = 0; i <= 2000; ++i) grid.push_back(-2.0 + 4.0 * i / 2000.0);
  CHECK(rmt::cosine_bound_check(grid) <= 1e-9);
  CHECK(rmt::cosine_bound_check({0.0}) == doctest::Approx(0.0));
}

TEST_CASE("esseen bound: single rademacher closed form") {
  Eigen::VectorXd v(1);
  v(0) = 1.0;
  const auto r = rmt::esseen_bound_check(Distribution::rademacher(), v, 0.5);
  CHECK(r.lhs == doctest::Approx(0.5));  // window at t=1 catches one atom
  CHECK(r.lhs_exact);
  CHECK(r.rhs > 0.0);
  CHECK(std::isfinite(r.ratio));
  CHECK(r.quad_rel_err <= 1e-6);
}

TEST_CASE("esseen bound: large delta saturates lhs at 1") {
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.5);
  const auto r = rmt::esseen_bound_check(Distribution::rademacher(), v, 10.0);
  CHECK(r.lhs == doctest::Approx(1.0));
}

TEST_CASE("esseen bound: e1 reduces to the one-dimensional law") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(5);
  e1(0) = 1.0;
  Eigen::VectorXd v1(1);
  v1(0) = 1.0;
  const auto a = rmt::esseen_bound_check(Distribution::rademacher(), e1, 0.5);
  const auto b = rmt::esseen_bound_check(Distribution::rademacher(), v1, 0.5);
  CHECK(a.lhs == doctest::Approx(b.lhs));
  CHECK(a.rhs == doctest::Approx(b.rhs).epsilon(1e-9));
}

TEST_CASE("decoupling inequality: trivial and exhaustive cases") {
  const Distribution d = Distribution::rademacher();
  rmt::SymMatrix m(4);
  // theta = 0, u = 0: both sides are exactly 1.
  const auto trivial = rmt::decoupling_check(
      d, m, Eigen::VectorXd::Zero(4), 0.0, {0, 1});
  CHECK(trivial.lhs == doctest::Approx(1.0));
  CHECK(trivial.rhs == doctest::Approx(1.0));
  CHECK(trivial.holds);

  // M = 0, random tilt: both sides factor into one-dimensional tilts.
  rmt::rng::Stream s(9, rmt::rng::Tag::Aux, 6, 0);
  Eigen::VectorXd u(4);
  for (int i = 0; i < 4; ++i) u(i) = 0.5 * s.gaussian();
  const auto zero_m = rmt::decoupling_check(d, m, u, 0.7, {1, 3});
  CHECK(zero_m.holds);

  // Random small instances, exhaustive enumeration on both sides.
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 4 + 2 * (rep % 3);  // 4, 6, 8
    rmt::SymMatrix mm(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) mm.set(i, j, s.gaussian());
    }
    Eigen::VectorXd uu(n);
    for (int i = 0; i < n; ++i) uu(i) = 0.3 * s.gaussian();
    const double theta = 2.0 * s.u01() - 1.0;
    std::vector<int> jset;
    for (int i = 0; i < n; ++i) {
      if (s.u01() < 0.5) jset.push_back(i);
    }
    const auto r = rmt::decoupling_check(d, mm, uu, theta, jset);
    CHECK(r.holds);
    CHECK(r.lhs <= r.rhs + 1e-9);
  }
}

TEST_CASE("decoupling rejects oversized enumerations and bad J") {
  const Distribution d = Distribution::rademacher();
  rmt::SymMatrix m(30);
  CHECK_THROWS(rmt::decoupling_check(d, m, Eigen::VectorXd::Zero(30), 0.1, {0}));
  rmt::SymMatrix small(4);
  CHECK_THROWS(rmt::decoupling_check(d, small, Eigen::VectorXd::Zero(4), 0.1,
                                     {0, 0}));
  CHECK_THROWS(rmt::decoupling_check(Distribution::gaussian(), small,
                                     Eigen::VectorXd::Zero(4), 0.1, {0}));
}

TEST_CASE("threshold: deterministic zero matrix crosses at 1/(4L)") {
  // nu = 0 makes M identically zero, so P(|Mv| <= t sqrt n) = 1 for all t and
  // T_L is the largest grid t with (4Lt)^n <= 1. Grid points sit 1e-3 away
  // from the crossing so the Wilson correction cannot flip them.
  rmt::ZeroedMatrixParams zp;
  zp.n = 30;
  zp.d = 5;
  zp.nu = 0.0;
  zp.base = Distribution::rademacher();
  rmt::ThresholdParams tp;
  tp.L = 2.0;
  tp.trials = 4000;
  const double crossing = 1.0 / (4.0 * tp.L);
  tp.t_grid = {0.01, 0.05, crossing * (1.0 - 1e-3), crossing * (1.0 + 1e-3),
               0.5, 1.0};
  const Eigen::VectorXd v =
      Eigen::VectorXd::Constant(30, 1.0 / std::sqrt(30.0));
  const auto r = rmt::threshold(v, zp, tp, 11);
  CHECK(r.value == doctest::Approx(crossing * (1.0 - 1e-3)));

  // v = 0: |Mv| = 0 deterministically for any nu; same crossing.
  zp.nu = 0.25;
  const auto r0 = rmt::threshold(Eigen::VectorXd::Zero(30), zp, tp, 11);
  CHECK(r0.value == doctest::Approx(crossing * (1.0 - 1e-3)));
}

TEST_CASE("threshold is monotone nonincreasing in L") {
  rmt::ZeroedMatrixParams zp;
  zp.n = 24;
  zp.d = 4;
  zp.nu = 0.25;
  zp.base = Distribution::rademacher();
  rmt::ThresholdParams tp;
  tp.trials = 3000;
  tp.t_grid = rmt::log_grid(1e-3, 1.0, 25);
  const Eigen::VectorXd v =
      Eigen::VectorXd::Constant(24, 1.0 / std::sqrt(24.0));
  double prev = 1.0;
  for (double big_l : {2.0, 4.0, 8.0}) {
    tp.L = big_l;
    const auto r = rmt::threshold(v, zp, tp, 13);
    CHECK(r.value <= prev + 1e-12);
    prev = r.value;
  }
}

TEST_CASE("threshold validates parameters") {
  rmt::ZeroedMatrixParams zp;
  zp.n = 24;
  zp.d = 4;
  zp.base = Distribution::rademacher();
  rmt::ThresholdParams tp;
  tp.L = 1.0;  // below 2
  tp.t_grid = {0.5};
  CHECK_THROWS(rmt::threshold(Eigen::VectorXd::Zero(24), zp, tp, 1));
  tp.L = 2.0;
  tp.t_grid = {0.5, 0.1};  // unsorted
  CHECK_THROWS(rmt::threshold(Eigen::VectorXd::Zero(24), zp, tp, 1));
  tp.t_grid = {0.5, 1.5};  // outside (0,1]
  CHECK_THROWS(rmt::threshold(Eigen::VectorXd::Zero(24), zp, tp, 1));
}

TEST_CASE("cosine-product bound with fitted constant c = 0.1 (rademacher)") {
  // prod_j E|cos(2 pi xi a_j)| <= exp(-c min_{r in [1,1/c]} |ra|_T^2) for the
  // symmetrized rademacher xi on random coefficient vectors; the minimum over
  // the dilation r is taken on a fine grid.
  const double c = 0.1;
  const auto xi = rmt::symmetrized_atoms(Distribution::rademacher());
  rmt::rng::Stream s(404, rmt::rng::Tag::Aux, 7, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + (rep % 8);
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a(i) = 4.0 * (s.u01() - 0.5);
    double lhs = 1.0;
    for (int i = 0; i < n; ++i) {
      double e = 0.0;
      for (const rmt::Atom& at : xi) {
        e += at.prob * std::abs(std::cos(2.0 * std::numbers::pi * at.value * a(i)));
      }
      lhs *= e;
    }
    double min_torus_sq = std::numeric_limits<double>::infinity();
    for (int g = 0; g <= 4000; ++g) {
      const double r = 1.0 + (1.0 / c - 1.0) * g / 4000.0;
      const double td = rmt::torus_dist(r * a);
      min_torus_sq = std::min(min_torus_sq, td * td);
    }
    CHECK(lhs <= std::exp(-c * min_torus_sq) + 1e-9);
  }
}
