#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "arithmetic.hpp"
#include "ensembles.hpp"
#include "report.hpp"
#include "smallball.hpp"
#include "spectral.hpp"
#include "stats.hpp"

namespace rmt {

namespace {

constexpr double kSemicircleConstant = 2.0 / std::numbers::pi;

json base_report(const std::string& name, const Config& cfg) {
  json r;
  r["experiment"] = name;
  r["schema_version"] = 1;
  r["config"] = cfg.raw();
  r["summary"] = json::object();
  r["fitted"] = json::object();
  r["tables"] = json::array();
  r["violations"] = json::array();
  return r;
}

std::vector<std::int64_t> sum_counts(const std::vector<json>& units,
                                     const std::string& key, std::size_t m) {
  std::vector<std::int64_t> total(m, 0);
  for (const json& u : units) {
    const auto& c = u.at(key);
    for (std::size_t i = 0; i < m; ++i) total[i] += c.at(i).get<std::int64_t>();
  }
  return total;
}

std::int64_t sum_scalar(const std::vector<json>& units, const std::string& key) {
  std::int64_t total = 0;
  for (const json& u : units) total += u.at(key).get<std::int64_t>();
  return total;
}

LcdParams lcd_params_from(const Config& cfg) {
  LcdParams p;
  p.alpha = cfg.num("alpha", 0.25);
  p.gamma = cfg.num("gamma", 0.5);
  p.cap = cfg.num("cap", 1e4);
  return p;
}

// Checks monotonicity of a tail curve in eps up to 3-sigma CI slack.
void check_monotone(const std::vector<double>& eps,
                    const std::vector<WilsonInterval>& est, json* violations) {
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    const double slack = 3.0 * ((est[i].high - est[i].low) / 2.0 +
                                (est[i + 1].high - est[i + 1].low) / 2.0);
    if (est[i].p_hat > est[i + 1].p_hat + slack) {
      violations->push_back("tail estimate not monotone at eps=" +
                            format_double(eps[i]));
    }
  }
}

std::int64_t checked_trials(const Config& cfg, std::int64_t def) {
  const std::int64_t trials = cfg.integer("trials", def);
  if (trials < 100) throw ConfigError("config: trials must be >= 100");
  return trials;
}

int blocks_for(const Config& cfg) {
  return make_blocks(checked_trials(cfg, 1000)).units;
}

}  // namespace

TrialBlocks make_blocks(std::int64_t trials) {
  TrialBlocks b;
  b.trials = std::max<std::int64_t>(trials, 0);
  b.units = static_cast<int>(std::clamp<std::int64_t>(trials / 1000, 1, 32));
  return b;
}

Distribution ensemble_from_config(const Config& cfg) {
  const json e = cfg.sub("ensemble");
  const std::string kind =
      e.contains("kind") ? e.at("kind").get<std::string>() : "rademacher";
  if (kind == "rademacher") return Distribution::rademacher();
  if (kind == "gaussian") return Distribution::gaussian();
  if (kind == "lazy_signed") {
    const double nu = e.contains("nu") ? e.at("nu").get<double>() : 0.25;
    return Distribution::lazy_signed(nu);
  }
  if (kind == "sparse_rademacher") {
    const double p = e.contains("p") ? e.at("p").get<double>() : 0.25;
    return Distribution::sparse_rademacher(p);
  }
  if (kind == "uniform_pm1_0") {
    std::vector<double> w = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    if (e.contains("weights")) {
      w = e.at("weights").get<std::vector<double>>();
      if (w.size() != 3) throw ConfigError("ensemble: weights must have 3 entries");
    }
    return Distribution::uniform_pm1_0(w[0], w[1], w[2]);
  }
  if (kind == "custom_discrete") {
    if (!e.contains("atoms")) throw ConfigError("ensemble: custom needs atoms");
    std::vector<Atom> atoms;
    for (const auto& a : e.at("atoms")) {
      atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    }
    const double b = e.contains("b") ? e.at("b").get<double>() : 1.0;
    return Distribution::custom_discrete(std::move(atoms), b);
  }
  throw ConfigError("ensemble: unknown kind '" + kind + "'");
}

Eigen::VectorXd make_direction(const std::string& kind, int n,
                               std::uint64_t seed, double two_level_ratio) {
  if (n < 1) throw ConfigError("direction: n must be >= 1");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (kind == "constant") {
    v.setConstant(1.0 / std::sqrt(double(n)));
  } else if (kind == "e1") {
    v(0) = 1.0;
  } else if (kind == "two_level") {
    const int half = n / 2;
    for (int i = 0; i < n; ++i) v(i) = (i < half) ? two_level_ratio : 1.0;
    v /= v.norm();
  } else if (kind == "random_unit") {
    rng::Stream s(seed, rng::Tag::Aux, 0, 0);
    for (int i = 0; i < n; ++i) v(i) = s.gaussian();
    v /= v.norm();
  } else {
    throw ConfigError("direction: unknown kind '" + kind + "'");
  }
  return v;
}

std::vector<double> grid_from_config(const Config& cfg, const std::string& kind,
                                     double def_lo, double def_hi,
                                     int def_points) {
  const std::string list_key = kind + "_list";
  if (cfg.has(list_key)) {
    auto g = cfg.num_list(list_key);
    if (g.empty()) throw ConfigError("config: '" + list_key + "' is empty");
    if (!std::is_sorted(g.begin(), g.end())) {
      throw ConfigError("config: '" + list_key + "' must be sorted ascending");
    }
    return g;
  }
  const double lo = cfg.num(kind + "_min", def_lo);
  const double hi = cfg.num(kind + "_max", def_hi);
  const int points = static_cast<int>(cfg.integer(kind + "_points", def_points));
  return log_grid(lo, hi, points);
}

namespace {

// ---------------------------------------------------------------------------
// tail

class Tail final : public ExperimentDriver {
 public:
  std::string name() const override { return "tail"; }

  json defaults() const override {
    return json{{"n", 100},
                {"trials", 2000},
                {"eps_min", 1e-3},
                {"eps_max", 1e-1},
                {"eps_points", 25},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const int n = static_cast<int>(cfg.integer("n", 100));
    const auto eps = grid_from_config(cfg, "eps", 1e-3, 1e-1, 25);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 2000));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    std::vector<double> smin(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      smin[static_cast<std::size_t>(i)] =
          sigma_min(eigenvalues_sym(sample_sym(dist, n, ts)));
    });

    const double scale = 1.0 / std::sqrt(double(n));
    std::vector<std::int64_t> counts(eps.size(), 0);
    std::int64_t singular = 0;
    const double cutoff = singular_cutoff(n);
    for (double s : smin) {
      if (s < cutoff) ++singular;
      for (std::size_t i = 0; i < eps.size(); ++i) {
        if (s <= eps[i] * scale) ++counts[i];
      }
    }
    return json{{"counts", counts}, {"singular", singular}, {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const auto eps = grid_from_config(cfg, "eps", 1e-3, 1e-1, 25);
    const auto counts = sum_counts(units, "counts", eps.size());
    const std::int64_t trials = sum_scalar(units, "trials");
    const std::int64_t singular = sum_scalar(units, "singular");
    const bool gaussian_ensemble =
        ensemble_from_config(cfg).kind() == Distribution::Kind::Gaussian;

    json report = base_report(name(), cfg);
    std::vector<WilsonInterval> est(eps.size());
    std::vector<double> phats(eps.size());
    std::vector<std::vector<json>> rows;
    double fitted_c = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      est[i] = wilson(counts[i], trials);
      phats[i] = est[i].p_hat;
      fitted_c = std::max(fitted_c, est[i].p_hat / eps[i]);
      rows.push_back({eps[i], est[i].p_hat, est[i].low, est[i].high, eps[i]});
      if (gaussian_ensemble) {
        const double half = (est[i].high - est[i].low) / 2.0;
        if (est[i].p_hat > eps[i] + 3.0 * half) {
          report["violations"].push_back(
              "gaussian tail exceeds the exact-reference line at eps=" +
              format_double(eps[i]));
        }
      }
    }
    check_monotone(eps, est, &report["violations"]);
    const LineFit fit = fit_loglog(eps, phats);
    report["tables"].push_back(make_table(
        "tail_curve", {"epsilon", "p_hat", "ci_low", "ci_high", "edelman_ref"},
        rows));
    report["fitted"] = {{"slope", fit.slope},
                        {"slope_stderr", fit.slope_stderr},
                        {"fitted_C", fitted_c}};
    report["summary"] = {{"trials", trials},
                         {"excluded_singular", 0},
                         {"singular_samples", singular},
                         {"slope_points", fit.points}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// gaps: eigenvalue repulsion and simple spectrum.

class Gaps final : public ExperimentDriver {
 public:
  std::string name() const override { return "gaps"; }

  json defaults() const override {
    return json{{"n", 50},      {"trials", 2000},   {"l", 1},
                {"k", 0},       {"eps_min", 1e-3},  {"eps_max", 1e-1},
                {"eps_points", 25}, {"repeated_tol", 1e-10},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const int n = static_cast<int>(cfg.integer("n", 50));
    const int l = static_cast<int>(cfg.integer("l", 1));
    const int k = static_cast<int>(cfg.integer("k", 0));
    if (l < 1 || l > n - 1) throw ConfigError("gaps: need 1 <= l <= n-1");
    if (k < 0 || (k > 0 && k > n - l)) throw ConfigError("gaps: need k <= n-l");
    const auto eps = grid_from_config(cfg, "eps", 1e-3, 1e-1, 25);
    const double repeated_tol = cfg.num("repeated_tol", 1e-10);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 2000));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    std::vector<double> stat(static_cast<std::size_t>(e - b));
    std::vector<double> min_consec(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      const Eigen::VectorXd ev = eigenvalues_sym(sample_sym(dist, n, ts));
      double g;
      if (k > 0) {
        g = eigen_gap(ev, k, l);
      } else {
        g = std::numeric_limits<double>::infinity();
        for (int kk = 1; kk <= n - l; ++kk) g = std::min(g, eigen_gap(ev, kk, l));
      }
      stat[static_cast<std::size_t>(i)] = g;
      double mc = std::numeric_limits<double>::infinity();
      for (int kk = 1; kk <= n - 1; ++kk) mc = std::min(mc, eigen_gap(ev, kk, 1));
      min_consec[static_cast<std::size_t>(i)] = mc;
    });

    const double scale = 1.0 / std::sqrt(double(n));
    std::vector<std::int64_t> counts(eps.size(), 0);
    std::int64_t repeated = 0;
    for (std::size_t i = 0; i < stat.size(); ++i) {
      if (min_consec[i] < repeated_tol) ++repeated;
      for (std::size_t j = 0; j < eps.size(); ++j) {
        if (stat[i] <= eps[j] * scale) ++counts[j];
      }
    }
    return json{{"counts", counts}, {"repeated", repeated}, {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const auto eps = grid_from_config(cfg, "eps", 1e-3, 1e-1, 25);
    const int l = static_cast<int>(cfg.integer("l", 1));
    const auto counts = sum_counts(units, "counts", eps.size());
    const std::int64_t trials = sum_scalar(units, "trials");
    const std::int64_t repeated = sum_scalar(units, "repeated");

    json report = base_report(name(), cfg);
    std::vector<WilsonInterval> est(eps.size());
    std::vector<double> phats(eps.size());
    double c_hat = 0.0;
    std::vector<std::vector<json>> rows;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      est[i] = wilson(counts[i], trials);
      phats[i] = est[i].p_hat;
      if (est[i].p_hat > 0.0) {
        c_hat = std::max(c_hat, std::pow(est[i].p_hat, 1.0 / l) / eps[i]);
      }
      rows.push_back({eps[i], est[i].p_hat, est[i].low, est[i].high});
    }
    check_monotone(eps, est, &report["violations"]);
    const LineFit fit = fit_loglog(eps, phats);
    report["tables"].push_back(make_table(
        "gap_curve", {"epsilon", "p_hat", "ci_low", "ci_high"}, rows));
    report["fitted"] = {{"slope", fit.slope},
                        {"slope_stderr", fit.slope_stderr},
                        {"C_hat", c_hat}};
    report["summary"] = {{"trials", trials},
                         {"l", l},
                         {"repeated_eigenvalue_samples", repeated}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// locallaw: eigenvalue counts in short centered intervals.

class LocalLaw final : public ExperimentDriver {
 public:
  std::string name() const override { return "locallaw"; }

  json defaults() const override {
    return json{{"n", 400},
                {"trials", 200},
                {"t_list", {0.5, 1.0, 2.0}},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const int n = static_cast<int>(cfg.integer("n", 400));
    const auto ts_grid = grid_from_config(cfg, "t", 0.5, 2.0, 3);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 200));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    std::vector<std::vector<double>> ratios(
        static_cast<std::size_t>(e - b),
        std::vector<double>(ts_grid.size(), 0.0));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      const Eigen::VectorXd ev = eigenvalues_sym(sample_sym(dist, n, ts));
      for (std::size_t j = 0; j < ts_grid.size(); ++j) {
        const double t = ts_grid[j];
        ratios[static_cast<std::size_t>(i)][j] =
            count_interval(ev, -t, t) / (std::sqrt(double(n)) * t);
      }
    });

    json sums = json::array();
    json sumsqs = json::array();
    json tails = json::array();
    for (std::size_t j = 0; j < ts_grid.size(); ++j) {
      double s = 0.0, s2 = 0.0;
      std::int64_t tail = 0;
      for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double r = ratios[i][j];
        s += r;
        s2 += r * r;
        if (std::abs(r - kSemicircleConstant) > std::numbers::pi) ++tail;
      }
      sums.push_back(s);
      sumsqs.push_back(s2);
      tails.push_back(tail);
    }
    return json{
        {"sum", sums}, {"sumsq", sumsqs}, {"tail", tails}, {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const auto ts_grid = grid_from_config(cfg, "t", 0.5, 2.0, 3);
    const std::int64_t trials = sum_scalar(units, "trials");
    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    double worst_rel_dev = 0.0;
    std::int64_t total_tail = 0;
    for (std::size_t j = 0; j < ts_grid.size(); ++j) {
      double s = 0.0, s2 = 0.0;
      std::int64_t tail = 0;
      for (const json& u : units) {
        s += u.at("sum").at(j).get<double>();
        s2 += u.at("sumsq").at(j).get<double>();
        tail += u.at("tail").at(j).get<std::int64_t>();
      }
      const double mean_ratio = s / trials;
      const double var =
          std::max(0.0, s2 / trials - mean_ratio * mean_ratio);
      const double rel_dev =
          std::abs(mean_ratio - kSemicircleConstant) / kSemicircleConstant;
      worst_rel_dev = std::max(worst_rel_dev, rel_dev);
      total_tail += tail;
      rows.push_back({ts_grid[j], mean_ratio, std::sqrt(var), rel_dev, tail,
                      kSemicircleConstant});
    }
    report["tables"].push_back(make_table(
        "locallaw_curve",
        {"t", "mean_ratio", "sd_ratio", "rel_dev", "tail_count", "reference"},
        rows));
    report["summary"] = {{"trials", trials},
                         {"worst_rel_dev", worst_rel_dev},
                         {"tail_events", total_tail}};
    report["fitted"] = {{"reference", kSemicircleConstant}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// moments: weighted inverse singular-value statistics.

class Moments final : public ExperimentDriver {
 public:
  std::string name() const override { return "moments"; }

  json defaults() const override {
    return json{{"n_list", {50, 100, 200}},
                {"k_list", {5}},
                {"p", 1},
                {"trials", 500},
                {"s_list", {2.0, 4.0, 8.0, 16.0, 32.0}},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  std::vector<std::int64_t> n_values(const Config& cfg) const {
    if (cfg.has("n")) return {cfg.integer("n", 100)};
    auto l = cfg.int_list("n_list");
    if (l.empty()) l = {50, 100, 200};
    return l;
  }

  int unit_count(const Config& cfg) const override {
    return static_cast<int>(n_values(cfg).size()) * blocks_for(cfg);
  }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const auto ns = n_values(cfg);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 500));
    const int ni = unit / blocks.units;
    const int bu = unit % blocks.units;
    const int n = static_cast<int>(ns.at(ni));
    auto ks = cfg.int_list("k_list");
    if (ks.empty()) ks = {5};
    const int p = static_cast<int>(cfg.integer("p", 1));
    if (p != 1 && p != 2) throw ConfigError("moments: p must be 1 or 2");
    auto s_list = cfg.num_list("s_list");
    if (s_list.empty()) s_list = {2.0, 4.0, 8.0, 16.0, 32.0};
    for (std::int64_t k : ks) {
      if (k < 1 || k > n) throw ConfigError("moments: k out of range");
    }
    const std::int64_t b = blocks.begin(bu);
    const std::int64_t e = blocks.end(bu);

    struct TrialOut {
      bool ok = false;
      std::vector<double> ratios;
      double distortion = 0.0;
    };
    std::vector<TrialOut> out(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts = rng::derive_seed(
          cfg.seed(), static_cast<std::uint64_t>(b + i),
          static_cast<std::uint64_t>(ni));
      const Eigen::VectorXd ev = eigenvalues_sym(sample_sym(dist, n, ts));
      const SingularProfile prof = singular_profile(ev);
      TrialOut& t = out[static_cast<std::size_t>(i)];
      if (!prof.invertible()) return;
      t.ok = true;
      const double root_n = std::sqrt(double(n));
      for (std::int64_t k : ks) {
        t.ratios.push_back(root_n / (prof.mus[static_cast<std::size_t>(k - 1)] *
                                     double(k)));
      }
      t.distortion = norm_star(prof.mus) / prof.mu1();
    });

    std::int64_t included = 0, excluded = 0;
    std::vector<double> ratio_pow_sums(ks.size(), 0.0);
    double distortion_pow_sum = 0.0;
    std::vector<std::vector<std::int64_t>> tail_counts(
        ks.size(), std::vector<std::int64_t>(s_list.size(), 0));
    for (const TrialOut& t : out) {
      if (!t.ok) {
        ++excluded;
        continue;
      }
      ++included;
      for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        ratio_pow_sums[ki] += std::pow(t.ratios[ki], p);
        for (std::size_t si = 0; si < s_list.size(); ++si) {
          if (t.ratios[ki] >= s_list[si]) ++tail_counts[ki][si];
        }
      }
      distortion_pow_sum += std::pow(t.distortion, p);
    }
    return json{{"n", n},
                {"included", included},
                {"excluded", excluded},
                {"ratio_pow_sums", ratio_pow_sums},
                {"distortion_pow_sum", distortion_pow_sum},
                {"tail_counts", tail_counts}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const auto ns = n_values(cfg);
    auto ks = cfg.int_list("k_list");
    if (ks.empty()) ks = {5};
    auto s_list = cfg.num_list("s_list");
    if (s_list.empty()) s_list = {2.0, 4.0, 8.0, 16.0, 32.0};
    const int p = static_cast<int>(cfg.integer("p", 1));
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 500));

    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> mean_rows, tail_rows;
    // mean_ratio[k][n_idx] for the growth check across n.
    std::vector<std::vector<double>> means(ks.size(),
                                           std::vector<double>(ns.size(), 0.0));
    std::vector<double> distortion_means(ns.size(), 0.0);
    std::int64_t excluded_total = 0;
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      std::int64_t included = 0, excluded = 0;
      std::vector<double> rsums(ks.size(), 0.0);
      double dsum = 0.0;
      std::vector<std::vector<std::int64_t>> tails(
          ks.size(), std::vector<std::int64_t>(s_list.size(), 0));
      for (int bu = 0; bu < blocks.units; ++bu) {
        const json& u = units.at(ni * blocks.units + bu);
        included += u.at("included").get<std::int64_t>();
        excluded += u.at("excluded").get<std::int64_t>();
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
          rsums[ki] += u.at("ratio_pow_sums").at(ki).get<double>();
          for (std::size_t si = 0; si < s_list.size(); ++si) {
            tails[ki][si] +=
                u.at("tail_counts").at(ki).at(si).get<std::int64_t>();
          }
        }
        dsum += u.at("distortion_pow_sum").get<double>();
      }
      excluded_total += excluded;
      for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        const double m = included > 0 ? rsums[ki] / included : 0.0;
        means[ki][ni] = m;
        const double dm = included > 0 ? dsum / included : 0.0;
        distortion_means[ni] = dm;
        mean_rows.push_back({static_cast<std::int64_t>(ns[ni]), ks[ki], m, dm,
                             included, excluded});
        for (std::size_t si = 0; si < s_list.size(); ++si) {
          const auto w = included > 0 ? wilson(tails[ki][si], included)
                                      : WilsonInterval{};
          tail_rows.push_back({static_cast<std::int64_t>(ns[ni]), ks[ki],
                               s_list[si], w.p_hat, w.low, w.high});
        }
      }
    }
    double max_consecutive = 0.0;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      for (std::size_t ni = 0; ni + 1 < ns.size(); ++ni) {
        if (means[ki][ni] > 0.0) {
          max_consecutive =
              std::max(max_consecutive, means[ki][ni + 1] / means[ki][ni]);
        }
      }
    }
    double max_distortion = 0.0;
    for (double d : distortion_means) max_distortion = std::max(max_distortion, d);
    report["tables"].push_back(make_table(
        "moment_means",
        {"n", "k", "mean_ratio_p", "mean_distortion_p", "included", "excluded"},
        mean_rows));
    report["tables"].push_back(make_table(
        "moment_tails", {"n", "k", "s", "p_hat", "ci_low", "ci_high"},
        tail_rows));
    report["fitted"] = {{"max_consecutive_mean_ratio", max_consecutive},
                        {"max_distortion_mean", max_distortion}};
    report["summary"] = {{"excluded_singular", excluded_total}, {"p", p}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// hw: concentration of |MX|_2 around the Hilbert-Schmidt norm.

class HansonWright final : public ExperimentDriver {
 public:
  std::string name() const override { return "hw"; }

  json defaults() const override {
    return json{{"n", 100},
                {"trials", 20000},
                {"ensemble", {{"kind", "gaussian"}}},
                {"matrix", {{"kind", "identity"}, {"scale", 1.0}}},
                {"t_list", {0.5, 1.0, 1.5, 2.0, 3.0, 4.0}}};
  }

  struct FixedMatrix {
    Eigen::MatrixXd m;
    double hs = 0.0;
    double op = 0.0;
  };

  FixedMatrix build_matrix(const Config& cfg) const {
    const int n = static_cast<int>(cfg.integer("n", 100));
    const json spec = cfg.sub("matrix");
    const std::string kind =
        spec.contains("kind") ? spec.at("kind").get<std::string>() : "identity";
    const double scale =
        spec.contains("scale") ? spec.at("scale").get<double>() : 1.0;
    FixedMatrix fm;
    if (kind == "identity") {
      fm.m = scale * Eigen::MatrixXd::Identity(n, n);
      fm.hs = std::abs(scale) * std::sqrt(double(n));
      fm.op = std::abs(scale);
    } else if (kind == "goe") {
      const SymMatrix a = sample_sym(Distribution::gaussian(), n,
                                     rng::derive_seed(cfg.seed(), 0, 1));
      fm.m = scale * a.dense();
      fm.hs = fm.m.norm();
      fm.op = eigenvalues_sym(a).cwiseAbs().maxCoeff() * std::abs(scale);
    } else if (kind == "rank_one") {
      const Eigen::VectorXd u =
          make_direction("random_unit", n, rng::derive_seed(cfg.seed(), 0, 2));
      fm.m = scale * u * u.transpose();
      fm.hs = std::abs(scale);
      fm.op = std::abs(scale);
    } else {
      throw ConfigError("hw: unknown matrix kind '" + kind + "'");
    }
    return fm;
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const int n = static_cast<int>(cfg.integer("n", 100));
    const FixedMatrix fm = build_matrix(cfg);
    const auto t_grid = grid_from_config(cfg, "t", 0.5, 4.0, 6);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 20000));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    std::vector<double> devs(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      const Eigen::VectorXd x = sample_col(dist, n, ts);
      devs[static_cast<std::size_t>(i)] = std::abs((fm.m * x).norm() - fm.hs);
    });
    std::vector<std::int64_t> counts(t_grid.size(), 0);
    for (double d : devs) {
      for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (d > t_grid[i]) ++counts[i];
      }
    }
    return json{{"counts", counts}, {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const auto t_grid = grid_from_config(cfg, "t", 0.5, 4.0, 6);
    const auto counts = sum_counts(units, "counts", t_grid.size());
    const std::int64_t trials = sum_scalar(units, "trials");
    const FixedMatrix fm = build_matrix(cfg);
    const double b4 = std::pow(ensemble_from_config(cfg).subgaussian_b(), 4.0);

    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    double c_hat = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      const WilsonInterval w = wilson(counts[i], trials);
      const double t = t_grid[i];
      if (t > 0.0) {
        const double c = (b4 * fm.op * fm.op / (t * t)) * std::log(2.0 / w.high);
        c_hat = std::min(c_hat, c);
      }
      rows.push_back({t, w.p_hat, w.low, w.high});
    }
    if (!std::isfinite(c_hat)) c_hat = 0.0;
    c_hat = std::max(c_hat, 0.0);
    report["tables"].push_back(
        make_table("hw_tail", {"t", "p_hat", "ci_low", "ci_high"}, rows));
    report["fitted"] = {{"c_hat", c_hat}};
    report["summary"] = {{"trials", trials},
                         {"hs_norm", fm.hs},
                         {"op_norm", fm.op}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// negcorr: small-ball and large-deviation joint events.

class NegCorr final : public ExperimentDriver {
 public:
  std::string name() const override { return "negcorr"; }

  json defaults() const override {
    return json{{"n", 64},
                {"trials", 20000},
                {"eps_list", {0.1, 0.2, 0.3, 0.5}},
                {"t_list", {0.0, 0.5, 1.0, 1.5}},
                {"alpha", 0.25},
                {"gamma", 0.5},
                {"cap", 1e4},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  void directions(const Config& cfg, Eigen::VectorXd* v,
                  Eigen::VectorXd* u) const {
    const int n = static_cast<int>(cfg.integer("n", 64));
    rng::Stream s(rng::derive_seed(cfg.seed(), 0, 3), rng::Tag::Aux, 0, 0);
    Eigen::MatrixXd g(n, 2);
    for (int i = 0; i < n; ++i) {
      g(i, 0) = s.gaussian();
      g(i, 1) = s.gaussian();
    }
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
        Eigen::MatrixXd::Identity(n, 2);
    *v = q.col(0);
    *u = q.col(1);
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const int n = static_cast<int>(cfg.integer("n", 64));
    const auto eps = grid_from_config(cfg, "eps", 0.1, 0.5, 4);
    const auto tg = grid_from_config(cfg, "t", 0.0, 1.5, 4);
    Eigen::VectorXd v, u;
    directions(cfg, &v, &u);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 20000));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    std::vector<std::pair<double, double>> ab(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      const Eigen::VectorXd x = sample_col(dist, n, ts);
      ab[static_cast<std::size_t>(i)] = {x.dot(v), x.dot(u)};
    });

    std::vector<std::int64_t> ca(eps.size(), 0), cb(tg.size(), 0);
    std::vector<std::int64_t> cj(eps.size() * tg.size(), 0);
    for (const auto& [a, bb] : ab) {
      for (std::size_t i = 0; i < eps.size(); ++i) {
        const bool ea = std::abs(a) <= eps[i];
        if (ea) ++ca[i];
        for (std::size_t j = 0; j < tg.size(); ++j) {
          if (ea && bb > tg[j]) ++cj[i * tg.size() + j];
        }
      }
      for (std::size_t j = 0; j < tg.size(); ++j) {
        if (bb > tg[j]) ++cb[j];
      }
    }
    return json{{"count_a", ca}, {"count_b", cb}, {"count_joint", cj},
                {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const auto eps = grid_from_config(cfg, "eps", 0.1, 0.5, 4);
    const auto tg = grid_from_config(cfg, "t", 0.0, 1.5, 4);
    const auto ca = sum_counts(units, "count_a", eps.size());
    const auto cb = sum_counts(units, "count_b", tg.size());
    const auto cj = sum_counts(units, "count_joint", eps.size() * tg.size());
    const std::int64_t trials = sum_scalar(units, "trials");

    Eigen::VectorXd v, u;
    directions(cfg, &v, &u);
    const LcdResult vlcd = lcd(v, lcd_params_from(cfg));

    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    double max_ratio = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const WilsonInterval wa = wilson(ca[i], trials);
      for (std::size_t j = 0; j < tg.size(); ++j) {
        const WilsonInterval wb = wilson(cb[j], trials);
        const WilsonInterval wj = wilson(cj[i * tg.size() + j], trials);
        const double prod = wa.p_hat * wb.p_hat;
        const double ratio = prod > 0.0 ? wj.p_hat / prod : 0.0;
        const double rlow =
            (wa.high * wb.high > 0.0) ? wj.low / (wa.high * wb.high) : 0.0;
        const double rhigh = (wa.low * wb.low > 0.0)
                                 ? wj.high / (wa.low * wb.low)
                                 : std::numeric_limits<double>::infinity();
        if (prod > 0.0) max_ratio = std::max(max_ratio, ratio);
        rows.push_back({eps[i], tg[j], wj.p_hat, wj.low, wj.high, wa.p_hat,
                        wb.p_hat, ratio, rlow, rhigh});
      }
    }
    report["tables"].push_back(make_table(
        "negcorr_grid",
        {"epsilon", "t", "p_joint", "joint_ci_low", "joint_ci_high", "p_a",
         "p_b", "ratio", "ratio_ci_low", "ratio_ci_high"},
        rows));
    report["fitted"] = {{"max_ratio", max_ratio}};
    report["summary"] = {{"trials", trials},
                         {"lcd_v_bounded", vlcd.bounded},
                         {"lcd_v_value", vlcd.value}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// invlwo: conditioned inverse Littlewood-Offord experiment.

class InvLwo final : public ExperimentDriver {
 public:
  std::string name() const override { return "invlwo"; }

  json defaults() const override {
    return json{{"d", 128},
                {"nu", 0.25},
                {"trials", 50000},
                {"eps_list", {0.25, 0.5, 1.0}},
                {"k_list", {0, 2, 4, 8, 16}},
                {"c2", 0.25},
                {"alpha", 0.25},
                {"gamma", 0.5},
                {"cap", 1e4},
                {"vector_kind", "random_unit"}};
  }

  Eigen::MatrixXd orthonormal_w(const Config& cfg, int d, int kmax) const {
    rng::Stream s(rng::derive_seed(cfg.seed(), 0, 4), rng::Tag::Aux, 0, 0);
    Eigen::MatrixXd g(d, kmax);
    for (int j = 0; j < kmax; ++j) {
      for (int i = 0; i < d; ++i) g(i, j) = s.gaussian();
    }
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() *
           Eigen::MatrixXd::Identity(d, kmax);
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const int d = static_cast<int>(cfg.integer("d", 128));
    const double nu = cfg.num("nu", 0.25);
    if (nu > 0.25 + 1e-12) {
      throw ConfigError("invlwo: nu must be <= 1/4 (lazy vector)");
    }
    auto ks = cfg.int_list("k_list");
    if (ks.empty()) ks = {0, 2, 4, 8, 16};
    const auto eps = grid_from_config(cfg, "eps", 0.25, 1.0, 3);
    const double c2 = cfg.num("c2", 0.25);
    const int kmax = static_cast<int>(*std::max_element(ks.begin(), ks.end()));
    const Eigen::VectorXd v = make_direction(
        cfg.str("vector_kind", "random_unit"), d, rng::derive_seed(cfg.seed(), 0, 5));
    const Eigen::MatrixXd w = kmax > 0 ? orthonormal_w(cfg, d, kmax)
                                       : Eigen::MatrixXd(d, 0);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 50000));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    struct TrialOut {
      double a = 0.0;
      std::vector<double> prefix_sq;
    };
    std::vector<TrialOut> out(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      const Eigen::VectorXd x = sample_lazy_sign_vector(d, nu, ts);
      TrialOut& t = out[static_cast<std::size_t>(i)];
      t.a = x.dot(v);
      t.prefix_sq.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
      for (int j = 0; j < kmax; ++j) {
        const double pj = w.col(j).dot(x);
        t.prefix_sq[static_cast<std::size_t>(j) + 1] =
            t.prefix_sq[static_cast<std::size_t>(j)] + pj * pj;
      }
    });

    std::vector<std::int64_t> counts(eps.size() * ks.size(), 0);
    for (const TrialOut& t : out) {
      for (std::size_t i = 0; i < eps.size(); ++i) {
        if (std::abs(t.a) > eps[i]) continue;
        for (std::size_t j = 0; j < ks.size(); ++j) {
          const auto k = static_cast<std::size_t>(ks[j]);
          if (t.prefix_sq[k] <= c2 * c2 * double(ks[j])) {
            ++counts[i * ks.size() + j];
          }
        }
      }
    }
    return json{{"counts", counts}, {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const int d = static_cast<int>(cfg.integer("d", 128));
    auto ks = cfg.int_list("k_list");
    if (ks.empty()) ks = {0, 2, 4, 8, 16};
    const auto eps = grid_from_config(cfg, "eps", 0.25, 1.0, 3);
    const auto counts = sum_counts(units, "counts", eps.size() * ks.size());
    const std::int64_t trials = sum_scalar(units, "trials");
    const Eigen::VectorXd v = make_direction(
        cfg.str("vector_kind", "random_unit"), d, rng::derive_seed(cfg.seed(), 0, 5));
    const LcdResult vlcd = lcd(v, lcd_params_from(cfg));

    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    json decay = json::array();
    for (std::size_t i = 0; i < eps.size(); ++i) {
      std::vector<double> xs, ys;
      for (std::size_t j = 0; j < ks.size(); ++j) {
        const WilsonInterval w = wilson(counts[i * ks.size() + j], trials);
        rows.push_back({eps[i], ks[j], counts[i * ks.size() + j], w.p_hat,
                        w.low, w.high});
        if (ks[j] > 0 && w.p_hat > 0.0) {
          xs.push_back(double(ks[j]));
          ys.push_back(std::log(w.p_hat));
        }
      }
      const LineFit fit = fit_line(xs, ys);
      const double d_eps_product = vlcd.bounded ? vlcd.value * eps[i]
                                                : std::numeric_limits<double>::infinity();
      decay.push_back(json{{"epsilon", eps[i]},
                           {"decay_slope", fit.slope},
                           {"decay_slope_stderr", fit.slope_stderr},
                           {"decay_points", fit.points},
                           {"lcd_condition_holds",
                            !vlcd.bounded || vlcd.value > 16.0 / eps[i]},
                           {"lcd_times_eps", d_eps_product}});
    }
    report["tables"].push_back(make_table(
        "invlwo_grid", {"epsilon", "k", "count", "p_hat", "ci_low", "ci_high"},
        rows));
    report["fitted"] = {{"decay", decay}};
    report["summary"] = {{"trials", trials},
                         {"lcd_v_bounded", vlcd.bounded},
                         {"lcd_v_value", vlcd.value}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// smallball: small-ball curves against arithmetic structure.

class SmallBallExp final : public ExperimentDriver {
 public:
  std::string name() const override { return "smallball"; }

  json defaults() const override {
    return json{{"n", 100},
                {"trials", 20000},
                {"eps_min", 1e-3},
                {"eps_max", 0.5},
                {"eps_points", 33},
                {"family", {"constant", "two_level", "random_unit", "e1"}},
                {"alpha", 0.25},
                {"gamma", 0.5},
                {"cap", 1e4},
                {"c_ref", 10.0},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  std::vector<std::string> family(const Config& cfg) const {
    std::vector<std::string> f;
    if (cfg.raw().contains("family")) {
      for (const auto& e : cfg.raw().at("family")) f.push_back(e.get<std::string>());
    }
    if (f.empty()) f = {"constant", "two_level", "random_unit", "e1"};
    return f;
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const int n = static_cast<int>(cfg.integer("n", 100));
    const auto eps = grid_from_config(cfg, "eps", 1e-3, 0.5, 33);
    const auto fam = family(cfg);
    std::vector<Eigen::VectorXd> vecs;
    for (const auto& kind : fam) {
      vecs.push_back(make_direction(kind, n, rng::derive_seed(cfg.seed(), 0, 6)));
    }
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 20000));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    std::vector<std::vector<double>> z(
        fam.size(), std::vector<double>(static_cast<std::size_t>(e - b)));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      const Eigen::VectorXd x = sample_col(dist, n, ts);
      for (std::size_t f = 0; f < vecs.size(); ++f) {
        z[f][static_cast<std::size_t>(i)] = x.dot(vecs[f]);
      }
    });

    std::vector<std::vector<std::int64_t>> counts(
        fam.size(), std::vector<std::int64_t>(eps.size(), 0));
    for (std::size_t f = 0; f < fam.size(); ++f) {
      for (double val : z[f]) {
        for (std::size_t i = 0; i < eps.size(); ++i) {
          if (std::abs(val) <= eps[i]) ++counts[f][i];
        }
      }
    }
    return json{{"counts", counts}, {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const int n = static_cast<int>(cfg.integer("n", 100));
    const auto eps = grid_from_config(cfg, "eps", 1e-3, 0.5, 33);
    const auto fam = family(cfg);
    const std::int64_t trials = sum_scalar(units, "trials");
    const double c_ref = cfg.num("c_ref", 10.0);
    const LcdParams lparams = lcd_params_from(cfg);

    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    json per_vector = json::array();
    for (std::size_t f = 0; f < fam.size(); ++f) {
      std::vector<std::int64_t> counts(eps.size(), 0);
      for (const json& u : units) {
        for (std::size_t i = 0; i < eps.size(); ++i) {
          counts[i] += u.at("counts").at(f).at(i).get<std::int64_t>();
        }
      }
      const Eigen::VectorXd v =
          make_direction(fam[f], n, rng::derive_seed(cfg.seed(), 0, 6));
      const LcdResult r = lcd(v, lparams);
      double max_excess = 0.0;
      json exceeds = json::array();
      for (std::size_t i = 0; i < eps.size(); ++i) {
        const WilsonInterval w = wilson(counts[i], trials);
        rows.push_back({fam[f], eps[i], w.p_hat, w.low, w.high});
        max_excess = std::max(max_excess, w.p_hat / eps[i]);
        if (w.p_hat > c_ref * eps[i]) exceeds.push_back(eps[i]);
      }
      per_vector.push_back(json{{"vector", fam[f]},
                                {"lcd_bounded", r.bounded},
                                {"lcd_value", r.value},
                                {"max_phat_over_eps", max_excess},
                                {"exceeds_linear_at", exceeds}});
    }
    report["tables"].push_back(make_table(
        "smallball_curves", {"vector", "epsilon", "p_hat", "ci_low", "ci_high"},
        rows));
    report["fitted"] = {{"per_vector", per_vector}, {"c_ref", c_ref}};
    report["summary"] = {{"trials", trials}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// distid: the quadratic-form distance identity.

class DistId final : public ExperimentDriver {
 public:
  std::string name() const override { return "distid"; }

  json defaults() const override {
    return json{{"n_list", {8, 16, 24, 32, 40, 48, 56, 64}},
                {"trials", 1000},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  std::vector<std::int64_t> n_values(const Config& cfg) const {
    if (cfg.has("n")) return {cfg.integer("n", 8)};
    auto l = cfg.int_list("n_list");
    if (l.empty()) l = {8, 16, 24, 32, 40, 48, 56, 64};
    return l;
  }

  int unit_count(const Config& cfg) const override {
    return static_cast<int>(n_values(cfg).size()) * blocks_for(cfg);
  }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const auto ns = n_values(cfg);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 1000));
    const int ni = unit / blocks.units;
    const int bu = unit % blocks.units;
    const int m = static_cast<int>(ns.at(ni));
    if (m < 2) throw ConfigError("distid: n must be >= 2");
    const std::int64_t b = blocks.begin(bu);
    const std::int64_t e = blocks.end(bu);

    std::vector<double> errs(static_cast<std::size_t>(e - b), -1.0);
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts = rng::derive_seed(
          cfg.seed(), static_cast<std::uint64_t>(b + i),
          static_cast<std::uint64_t>(ni));
      const SymMatrix a = sample_sym(dist, m, ts);
      try {
        errs[static_cast<std::size_t>(i)] = dist_identity_check(a).abs_err;
      } catch (const SingularMinorError&) {
        // left at -1: skipped
      }
    });
    double max_err = 0.0;
    std::int64_t skipped = 0, done = 0;
    for (double e2 : errs) {
      if (e2 < 0.0) {
        ++skipped;
      } else {
        ++done;
        max_err = std::max(max_err, e2);
      }
    }
    return json{{"n", m}, {"max_abs_err", max_err}, {"skipped", skipped},
                {"done", done}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const auto ns = n_values(cfg);
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 1000));
    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    double global_max = 0.0;
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      double max_err = 0.0;
      std::int64_t skipped = 0, done = 0;
      for (int bu = 0; bu < blocks.units; ++bu) {
        const json& u = units.at(ni * blocks.units + bu);
        max_err = std::max(max_err, u.at("max_abs_err").get<double>());
        skipped += u.at("skipped").get<std::int64_t>();
        done += u.at("done").get<std::int64_t>();
      }
      global_max = std::max(global_max, max_err);
      rows.push_back(
          {static_cast<std::int64_t>(ns[ni]), done, skipped, max_err});
    }
    if (global_max > 1e-6) {
      report["violations"].push_back(
          "distance identity max abs err exceeds 1e-6: " +
          format_double(global_max));
    }
    report["tables"].push_back(make_table(
        "distid", {"n", "seeds", "skipped_singular", "max_abs_err"}, rows));
    report["fitted"] = {{"global_max_abs_err", global_max}};
    report["summary"] = {{"global_max_abs_err", global_max}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// charfn: characteristic-function sandwich and cosine bounds.

class CharFnAudit final : public ExperimentDriver {
 public:
  std::string name() const override { return "charfn"; }

  json defaults() const override {
    return json{{"nu", 0.25},
                {"t_max", 4.0},
                {"t_points", 1000},
                {"a_points", 1000},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  int unit_count(const Config&) const override { return 1; }

  json run_unit(const Config& cfg, int, int) const override {
    const Distribution dist = ensemble_from_config(cfg);
    if (!dist.is_discrete()) throw ConfigError("charfn: ensemble must be discrete");
    const double nu = cfg.num("nu", 0.25);
    const double t_max = cfg.num("t_max", 4.0);
    const int t_points = static_cast<int>(cfg.integer("t_points", 1000));
    const int a_points = static_cast<int>(cfg.integer("a_points", 1000));

    std::vector<double> t_grid(t_points);
    for (int i = 0; i < t_points; ++i) t_grid[i] = t_max * i / (t_points - 1);
    const XiBoundsResult xi = xi_bounds_check(dist, nu, t_grid);
    std::vector<double> a_grid(a_points);
    for (int i = 0; i < a_points; ++i) {
      a_grid[i] = -2.0 + 4.0 * i / (a_points - 1);
    }
    const double cosv = cosine_bound_check(a_grid);
    const LazyParams lp = make_lazy_params(dist, nu);
    return json{{"xi_max_violation", xi.max_violation},
                {"xi_worst_t", xi.worst_t},
                {"cos_max_violation", cosv},
                {"p_truncation", lp.p_truncation}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const json& u = units.at(0);
    const Distribution dist = ensemble_from_config(cfg);
    const double nu = cfg.num("nu", 0.25);
    json report = base_report(name(), cfg);
    const double xi_viol = u.at("xi_max_violation").get<double>();
    const double cos_viol = u.at("cos_max_violation").get<double>();
    if (xi_viol > 1e-9) {
      report["violations"].push_back("characteristic-function sandwich violated");
    }
    if (cos_viol > 1e-9) {
      report["violations"].push_back("cosine torus bound violated");
    }
    // Small table of the sandwich for plotting.
    const LazyParams lp = make_lazy_params(dist, nu);
    const double nup = lp.nu * lp.p_truncation;
    std::vector<std::vector<json>> rows;
    const double t_max = cfg.num("t_max", 4.0);
    for (int i = 0; i <= 64; ++i) {
      const double t = t_max * i / 64.0;
      double ec = 0.0, et = 0.0;
      for (const Atom& a : lp.zbar_atoms) {
        ec += a.prob * std::cos(2.0 * std::numbers::pi * t * a.value);
        const double d2 = dist_to_integer(t * a.value);
        et += a.prob * d2 * d2;
      }
      rows.push_back({t, 1.0 - nup + nup * ec, std::exp(-32.0 * nup * et),
                      std::exp(-nup * et)});
    }
    report["tables"].push_back(make_table(
        "charfn_sandwich", {"t", "phi_xi", "lower_bound", "upper_bound"},
        rows));
    report["fitted"] = {{"xi_max_violation", xi_viol},
                        {"cos_max_violation", cos_viol}};
    report["summary"] = {{"p_truncation", u.at("p_truncation").get<double>()},
                         {"nu", nu}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// threshold: structure scale of a direction against the zeroed ensemble.

class ThresholdExp final : public ExperimentDriver {
 public:
  std::string name() const override { return "threshold"; }

  json defaults() const override {
    return json{{"n", 60},      {"d", 6},          {"nu", 0.25},
                {"L", 2.0},     {"trials", 20000}, {"t_min", 1e-3},
                {"t_max", 1.0}, {"t_points", 48},
                {"vector_kind", "constant"},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const int n = static_cast<int>(cfg.integer("n", 60));
    ZeroedMatrixParams zp;
    zp.n = n;
    zp.d = static_cast<int>(cfg.integer("d", std::max<std::int64_t>(1, n / 10)));
    zp.nu = cfg.num("nu", 0.25);
    zp.base = ensemble_from_config(cfg);
    zp.validate();
    const auto tg = grid_from_config(cfg, "t", 1e-3, 1.0, 48);
    const Eigen::VectorXd v = make_direction(
        cfg.str("vector_kind", "constant"), n, rng::derive_seed(cfg.seed(), 0, 7));
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 20000));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    std::vector<double> norms(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      norms[static_cast<std::size_t>(i)] =
          (sample_zeroed(zp, ts).dense() * v).norm();
    });
    const double root_n = std::sqrt(double(n));
    std::vector<std::int64_t> counts(tg.size(), 0);
    for (double nv : norms) {
      for (std::size_t i = 0; i < tg.size(); ++i) {
        if (nv <= tg[i] * root_n) ++counts[i];
      }
    }
    return json{{"counts", counts}, {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    const int n = static_cast<int>(cfg.integer("n", 60));
    const double L = cfg.num("L", 2.0);
    if (!(L >= 2.0)) throw ConfigError("threshold: L must be >= 2");
    const auto tg = grid_from_config(cfg, "t", 1e-3, 1.0, 48);
    const auto counts = sum_counts(units, "counts", tg.size());
    const std::int64_t trials = sum_scalar(units, "trials");

    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    double t_l = 0.0;
    for (std::size_t i = 0; i < tg.size(); ++i) {
      double log_low = 0.0, log_target = 0.0;
      const bool ok = threshold_admissible(counts[i], trials, n, L, tg[i],
                                           &log_low, &log_target);
      if (ok) t_l = tg[i];
      const WilsonInterval w = wilson(counts[i], trials);
      rows.push_back({tg[i], counts[i], w.p_hat, log_low, log_target, ok});
    }
    report["tables"].push_back(make_table(
        "threshold_scan",
        {"t", "count", "p_hat", "log_wilson_low", "log_target", "admissible"},
        rows));
    report["fitted"] = {{"T_L", t_l}};
    report["summary"] = {{"trials", trials}, {"L", L}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// audit: compressibility and flatness of least-singular eigenvectors.

class FlatnessAudit final : public ExperimentDriver {
 public:
  std::string name() const override { return "audit"; }

  json defaults() const override {
    return json{{"n", 100},
                {"trials", 400},
                {"delta_list", {0.05, 0.1, 0.2, 0.3}},
                {"rho_list", {0.1, 0.3, 0.5}},
                {"c_list", {0.05, 0.1, 0.2, 0.3}},
                {"ensemble", {{"kind", "rademacher"}}}};
  }

  int unit_count(const Config& cfg) const override { return blocks_for(cfg); }

  json run_unit(const Config& cfg, int unit, int threads) const override {
    const Distribution dist = ensemble_from_config(cfg);
    const int n = static_cast<int>(cfg.integer("n", 100));
    auto deltas = cfg.num_list("delta_list");
    if (deltas.empty()) deltas = {0.05, 0.1, 0.2, 0.3};
    auto rhos = cfg.num_list("rho_list");
    if (rhos.empty()) rhos = {0.1, 0.3, 0.5};
    auto cs = cfg.num_list("c_list");
    if (cs.empty()) cs = {0.05, 0.1, 0.2, 0.3};
    const TrialBlocks blocks = make_blocks(checked_trials(cfg, 400));
    const std::int64_t b = blocks.begin(unit);
    const std::int64_t e = blocks.end(unit);

    struct TrialOut {
      std::vector<double> compress;  // per delta
      std::vector<int> flat;         // per c
    };
    std::vector<TrialOut> out(static_cast<std::size_t>(e - b));
    parallel_for(e - b, threads, [&](std::int64_t i) {
      const std::uint64_t ts =
          rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(b + i));
      const Spectrum s = eigen_sym(sample_sym(dist, n, ts));
      int least = 0;
      for (int k = 1; k < n; ++k) {
        if (std::abs(s.eigenvalues(k)) < std::abs(s.eigenvalues(least))) least = k;
      }
      const Eigen::VectorXd v = s.eigenvectors.col(least);
      TrialOut& t = out[static_cast<std::size_t>(i)];
      for (double d : deltas) t.compress.push_back(compress_dist(v, d));
      for (double c : cs) t.flat.push_back(flat_count(v, c));
    });

    std::vector<std::int64_t> incompressible(deltas.size() * rhos.size(), 0);
    std::vector<std::int64_t> flat_ok(cs.size(), 0);
    for (const TrialOut& t : out) {
      for (std::size_t di = 0; di < deltas.size(); ++di) {
        for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
          if (t.compress[di] > rhos[ri]) ++incompressible[di * rhos.size() + ri];
        }
      }
      for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        if (t.flat[ci] >= cs[ci] * n) ++flat_ok[ci];
      }
    }
    return json{{"incompressible", incompressible},
                {"flat_ok", flat_ok},
                {"trials", e - b}};
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    auto deltas = cfg.num_list("delta_list");
    if (deltas.empty()) deltas = {0.05, 0.1, 0.2, 0.3};
    auto rhos = cfg.num_list("rho_list");
    if (rhos.empty()) rhos = {0.1, 0.3, 0.5};
    auto cs = cfg.num_list("c_list");
    if (cs.empty()) cs = {0.05, 0.1, 0.2, 0.3};
    const auto inc = sum_counts(units, "incompressible", deltas.size() * rhos.size());
    const auto flat = sum_counts(units, "flat_ok", cs.size());
    const std::int64_t trials = sum_scalar(units, "trials");

    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> inc_rows, flat_rows;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        const WilsonInterval w = wilson(inc[di * rhos.size() + ri], trials);
        inc_rows.push_back({deltas[di], rhos[ri], w.p_hat, w.low, w.high});
      }
    }
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
      const WilsonInterval w = wilson(flat[ci], trials);
      flat_rows.push_back({cs[ci], w.p_hat, w.low, w.high});
    }
    report["tables"].push_back(make_table(
        "audit_incompressible",
        {"delta", "rho", "fraction", "ci_low", "ci_high"}, inc_rows));
    report["tables"].push_back(make_table(
        "audit_flatness", {"c", "fraction", "ci_low", "ci_high"}, flat_rows));
    report["summary"] = {{"trials", trials}};
    return report;
  }
};

// ---------------------------------------------------------------------------
// lcd: denominator search diagnostics with witness verification.

class LcdExp final : public ExperimentDriver {
 public:
  std::string name() const override { return "lcd"; }

  json defaults() const override {
    json vectors = json::array();
    vectors.push_back(json{{"kind", "e1"}, {"n", 16}});
    vectors.push_back(json{{"kind", "constant"}, {"n", 4}});
    vectors.push_back(json{{"kind", "two_level"}, {"n", 16}});
    vectors.push_back(json{{"kind", "random_unit"}, {"n", 8}});
    vectors.push_back(json{{"kind", "random_unit"}, {"n", 64}});
    return json{{"alpha", 0.25}, {"gamma", 0.5}, {"cap", 1e4},
                {"vectors", vectors}, {"mu", 0.125}, {"subvector", false}};
  }

  int unit_count(const Config& cfg) const override {
    const json v = cfg.raw().contains("vectors") ? cfg.raw().at("vectors")
                                                 : defaults().at("vectors");
    return static_cast<int>(v.size());
  }

  json run_unit(const Config& cfg, int unit, int) const override {
    const json vecs = cfg.raw().contains("vectors") ? cfg.raw().at("vectors")
                                                    : defaults().at("vectors");
    const json spec = vecs.at(unit);
    const std::string kind = spec.at("kind").get<std::string>();
    const int n = spec.at("n").get<int>();
    const Eigen::VectorXd v = make_direction(
        kind, n, rng::derive_seed(cfg.seed(), static_cast<std::uint64_t>(unit), 8));
    const LcdParams params = lcd_params_from(cfg);
    const LcdResult r = lcd(v, params);
    const bool verified =
        !r.bounded || lcd_admissible(v, params, r.witness_t, 1e-9);
    json out{{"kind", kind},
             {"n", n},
             {"bounded", r.bounded},
             {"value", r.value},
             {"witness", r.witness_t},
             {"branch", r.binding == LcdBranch::GammaBranch  ? "gamma"
                        : r.binding == LcdBranch::AlphaBranch ? "alpha"
                                                              : "none"},
             {"witness_verified", verified}};
    if (cfg.flag("subvector", false)) {
      const auto sub = subvector_lcd(v, params, cfg.num("mu", 0.125),
                                     SubvectorMode::Heuristic, true,
                                     rng::derive_seed(cfg.seed(), 77, unit));
      out["subvector_value"] = sub.lcd.bounded ? sub.lcd.value : params.cap;
      out["subvector_bounded"] = sub.lcd.bounded;
      out["subvector_kept"] = static_cast<std::int64_t>(sub.kept.size());
    }
    return out;
  }

  json assemble(const Config& cfg, const std::vector<json>& units) const override {
    json report = base_report(name(), cfg);
    std::vector<std::vector<json>> rows;
    for (const json& u : units) {
      if (!u.at("witness_verified").get<bool>()) {
        report["violations"].push_back("lcd witness failed re-verification for " +
                                       u.at("kind").get<std::string>());
      }
      rows.push_back({u.at("kind"), u.at("n"), u.at("bounded"), u.at("value"),
                      u.at("witness"), u.at("branch"),
                      u.at("witness_verified")});
    }
    report["tables"].push_back(make_table(
        "lcd_values",
        {"vector", "n", "bounded", "value", "witness", "branch", "verified"},
        rows));
    report["summary"] = {{"vectors", static_cast<std::int64_t>(units.size())}};
    return report;
  }
};

const std::vector<const ExperimentDriver*>& registry() {
  static const Tail tail;
  static const Gaps gaps;
  static const LocalLaw locallaw;
  static const Moments moments;
  static const HansonWright hw;
  static const NegCorr negcorr;
  static const InvLwo invlwo;
  static const LcdExp lcdexp;
  static const SmallBallExp smallball;
  static const DistId distid;
  static const CharFnAudit charfn;
  static const ThresholdExp threshold;
  static const FlatnessAudit audit;
  static const std::vector<const ExperimentDriver*> list = {
      &tail,     &gaps,   &locallaw, &moments, &hw,        &negcorr, &invlwo,
      &lcdexp,   &smallball, &distid, &charfn, &threshold, &audit};
  return list;
}

}  // namespace

const ExperimentDriver* find_driver(const std::string& subcommand) {
  for (const ExperimentDriver* d : registry()) {
    if (d->name() == subcommand) return d;
  }
  return nullptr;
}

std::vector<std::string> driver_names() {
  std::vector<std::string> names;
  for (const ExperimentDriver* d : registry()) names.push_back(d->name());
  return names;
}

}  // namespace rmt
