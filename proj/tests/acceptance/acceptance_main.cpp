// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Criterion 14 drives the installed CLI binary (path in argv[1]).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "arithmetic.hpp"
#include "ensembles.hpp"
#include "experiments.hpp"
#include "smallball.hpp"
#include "spectral.hpp"
#include "stats.hpp"

namespace fs = std::filesystem;
using rmt::Config;
using rmt::Distribution;
using rmt::json;

namespace {

int g_failures = 0;
std::string g_cli_bin;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("%s  criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

json run_experiment(const std::string& sub, json overrides) {
  const rmt::ExperimentDriver* d = rmt::find_driver(sub);
  json base = d->defaults();
  base["seed"] = 20260810;
  const Config cfg(rmt::merge_json(base, overrides));
  std::vector<json> units;
  for (int u = 0; u < d->unit_count(cfg); ++u) {
    units.push_back(d->run_unit(cfg, u, 4));
  }
  return d->assemble(cfg, units);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --------------------------------------------------------------------------

void criterion1_goe_baseline() {
  const json rep = run_experiment(
      "tail", {{"n", 100},
               {"trials", 100000},
               {"eps_min", 1e-3},
               {"eps_max", 1e-1},
               {"eps_points", 25},
               {"ensemble", {{"kind", "gaussian"}}}});
  bool pass = true;
  double worst_margin = 1e9;
  for (const auto& row : rep.at("tables").at(0).at("rows")) {
    const double eps = row.at(0).get<double>();
    const double p = row.at(1).get<double>();
    const double half =
        (row.at(3).get<double>() - row.at(2).get<double>()) / 2.0;
    const double margin = eps + 3.0 * half - p;
    worst_margin = std::min(worst_margin, margin);
    if (p > eps + 3.0 * half) pass = false;
  }
  pass = pass && rep.at("violations").empty();
  report(1, "gaussian tail within the exact-reference line", pass,
         "min(eps + 3ci - p_hat) = " + fmt(worst_margin));
}

void criterion2_rademacher_tail() {
  const json rep = run_experiment("tail", {{"n", 100},
                                           {"trials", 100000},
                                           {"eps_min", 1e-3},
                                           {"eps_max", 1e-1},
                                           {"eps_points", 25}});
  const double slope = rep.at("fitted").at("slope").get<double>();
  const double c = rep.at("fitted").at("fitted_C").get<double>();
  const bool pass = slope >= 0.8 && slope <= 1.2 && c <= 10.0;
  report(2, "rademacher tail linearity", pass,
         "slope = " + fmt(slope) + ", fitted C = " + fmt(c));
}

void criterion3_simple_spectrum() {
  const json rep = run_experiment(
      "gaps", {{"n", 50}, {"trials", 10000}, {"l", 1},
               {"eps_list", {0.01, 0.1}}});
  const std::int64_t repeated =
      rep.at("summary").at("repeated_eigenvalue_samples").get<std::int64_t>();
  report(3, "simple spectrum (no gap below 1e-10)", repeated == 0,
         std::to_string(repeated) + " repeated-eigenvalue samples in 1e4");
}

void criterion4_repulsion() {
  const json rep1 = run_experiment("gaps", {{"n", 50},
                                            {"trials", 100000},
                                            {"l", 1},
                                            {"eps_min", 0.02},
                                            {"eps_max", 0.1},
                                            {"eps_points", 9}});
  const double slope1 = rep1.at("fitted").at("slope").get<double>();
  const double c1 = rep1.at("fitted").at("C_hat").get<double>();
  const json rep2 = run_experiment("gaps", {{"n", 50},
                                            {"trials", 100000},
                                            {"l", 2},
                                            {"eps_min", 0.4},
                                            {"eps_max", 1.0},
                                            {"eps_points", 7}});
  const double slope2 = rep2.at("fitted").at("slope").get<double>();
  const bool pass = slope1 >= 0.9 && c1 <= 20.0 && slope2 >= 1.8;
  report(4, "eigenvalue repulsion exponents", pass,
         "l=1 slope " + fmt(slope1) + " (C_hat " + fmt(c1) + "), l=2 slope " +
             fmt(slope2));
}

void criterion5_local_law() {
  const json rep = run_experiment(
      "locallaw", {{"n", 400}, {"trials", 200}, {"t_list", {0.5, 1.0, 2.0}}});
  bool pass = true;
  std::int64_t tails = 0;
  double worst = 0.0;
  for (const auto& row : rep.at("tables").at(0).at("rows")) {
    const double rel_dev = row.at(3).get<double>();
    worst = std::max(worst, rel_dev);
    tails += row.at(4).get<std::int64_t>();
    if (rel_dev > 0.10) pass = false;
  }
  pass = pass && tails == 0;
  report(5, "local semicircle constant 2/pi", pass,
         "worst relative deviation " + fmt(worst) + ", " +
             std::to_string(tails) + " gross outliers");
}

void criterion6_spectral_moments() {
  const json rep = run_experiment("moments", {{"n_list", {50, 100, 200}},
                                              {"k_list", {5}},
                                              {"p", 1},
                                              {"trials", 500}});
  const double growth =
      rep.at("fitted").at("max_consecutive_mean_ratio").get<double>();
  const double distortion =
      rep.at("fitted").at("max_distortion_mean").get<double>();
  const bool pass = growth <= 1.25 && distortion <= 5.0;
  report(6, "inverse singular-value moments stay bounded", pass,
         "max consecutive mean ratio " + fmt(growth) +
             ", max distortion mean " + fmt(distortion));
}

void criterion7_distance_identity() {
  const json rep = run_experiment(
      "distid",
      {{"n_list", {8, 16, 24, 32, 40, 48, 56, 64}}, {"trials", 1000}});
  const double max_err = rep.at("fitted").at("global_max_abs_err").get<double>();
  report(7, "distance identity to 1e-6", max_err <= 1e-6,
         "max |d_1 - formula| = " + fmt(max_err));
}

void criterion8_facts_52_53() {
  int violations = 0;
  double worst_ratio = 0.0, worst_gap = -1e9;
  for (int m = 0; m < 1000; ++m) {
    const rmt::SymMatrix a = rmt::sample_sym(
        Distribution::rademacher(), 10, rmt::rng::derive_seed(8080, m));
    const auto lower = rmt::sigma_min_lower_check(a);
    worst_gap = std::max(worst_gap, lower.max_violation);
    if (!lower.ok) ++violations;
    for (int j = 0; j < 10; ++j) {
      const auto pert = rmt::perturbation_check(a, j);
      worst_ratio = std::max(worst_ratio, pert.max_ratio);
      if (pert.max_ratio > 1.0 + 1e-8) ++violations;
    }
  }
  report(8, "facts: sigma_min lower bound + eigenvector perturbation",
         violations == 0,
         "worst ratio " + fmt(worst_ratio) + ", worst bound gap " +
             fmt(worst_gap) + ", " + std::to_string(violations) +
             " violations in 1e3 matrices");
}

void criterion9_decoupling() {
  rmt::rng::Stream s(9090, rmt::rng::Tag::Aux, 0, 0);
  int bad = 0, total = 0;
  for (int n : {4, 6, 8}) {
    for (int rep = 0; rep < 100; ++rep) {
      rmt::SymMatrix m(n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) m.set(i, j, s.gaussian());
      }
      Eigen::VectorXd u(n);
      for (int i = 0; i < n; ++i) u(i) = 0.4 * s.gaussian();
      const double theta = 3.0 * (s.u01() - 0.5);
      std::vector<int> jset;
      for (int i = 0; i < n; ++i) {
        if (s.u01() < 0.5) jset.push_back(i);
      }
      const auto r = rmt::decoupling_check(Distribution::rademacher(), m, u,
                                           theta, jset);
      ++total;
      if (!r.holds) ++bad;
    }
  }
  report(9, "tilted decoupling inequality (exhaustive)", bad == 0,
         std::to_string(total - bad) + "/" + std::to_string(total) +
             " instances hold");
}

void criterion10_charfn_bounds() {
  const json rep = run_experiment("charfn", json::object());
  const double xi = rep.at("fitted").at("xi_max_violation").get<double>();
  const double cosv = rep.at("fitted").at("cos_max_violation").get<double>();
  report(10, "characteristic-function sandwich + cosine bound",
         xi <= 1e-9 && cosv <= 1e-9 && rep.at("violations").empty(),
         "xi violation " + fmt(xi) + ", cosine violation " + fmt(cosv));
}

void criterion11_lcd_oracle() {
  rmt::LcdParams params;
  params.alpha = 0.25;
  params.gamma = 0.5;
  params.cap = 100.0;

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(16);
  e1(0) = 1.0;
  const auto r1 = rmt::lcd(e1, params);
  const bool closed1 = r1.bounded && std::abs(r1.value - 2.0 / 3.0) <= 1e-6;

  const Eigen::VectorXd v4 = Eigen::VectorXd::Constant(4, 0.5);
  const auto r2 = rmt::lcd(v4, params);
  const bool closed2 = r2.bounded && std::abs(r2.value - 4.0 / 3.0) <= 1e-6;

  bool witnesses = rmt::lcd_admissible(e1, params, r1.witness_t, 1e-9) &&
                   rmt::lcd_admissible(v4, params, r2.witness_t, 1e-9);

  int agree = 0;
  const int cases = 100;
  for (int c = 0; c < cases; ++c) {
    const int n = 2 + (c % 7);
    const Eigen::VectorXd v =
        rmt::make_direction("random_unit", n, rmt::rng::derive_seed(1111, c));
    const auto impl = rmt::lcd(v, params);
    const auto brute =
        oracle::lcd_dense_scan(v, params.alpha, params.gamma, params.cap);
    if (impl.bounded && brute.has_value()) {
      const double tol =
          params.gamma / (64.0 * 1024.0) * 2.0 + 1e-6 * impl.value + 1e-9;
      if (std::abs(impl.value - *brute) <= tol &&
          rmt::lcd_admissible(v, params, impl.witness_t, 1e-9)) {
        ++agree;
      }
    }
  }
  report(11, "LCD closed forms, witnesses, dense-scan agreement",
         closed1 && closed2 && witnesses && agree == cases,
         "e1 -> " + fmt(r1.value) + ", const4 -> " + fmt(r2.value) + ", " +
             std::to_string(agree) + "/" + std::to_string(cases) +
             " oracle agreements");
}

void criterion12_smallball_structure() {
  // Constant-direction rademacher small ball versus the exact binomial atom.
  const int n = 100;
  const Eigen::VectorXd v =
      Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  const double exact = oracle::binom_half_pmf(n, n / 2);
  const auto sb = rmt::small_ball(v, Distribution::rademacher(), 1e-3, 100000,
                                  20260810, 4);
  // 3-sigma agreement with the exact atom, matching the slack convention of
  // the gaussian baseline criterion (a bare 95% interval misses 5% of the
  // time by construction).
  const double sigma = (sb.at_zero.ci_high - sb.at_zero.ci_low) / (2.0 * 1.96);
  const bool binom_ok = std::abs(sb.at_zero.p_hat - exact) <= 3.0 * sigma;

  const json rep = run_experiment("invlwo", {{"d", 128},
                                             {"trials", 200000},
                                             {"eps_list", {0.5}},
                                             {"k_list", {2, 4, 8, 16}},
                                             {"c2", 0.25}});
  const auto& rows = rep.at("tables").at(0).at("rows");
  bool decreasing = true;
  std::string seq;
  double prev = 2.0;
  for (const auto& row : rows) {
    const double p = row.at(3).get<double>();
    seq += fmt(p) + " ";
    if (!(p < prev) || p <= 0.0) decreasing = false;
    prev = p;
  }
  report(12, "small ball vs structure (binomial atom + lazy decay in k)",
         binom_ok && decreasing,
         "binomial " + fmt(exact) + " vs estimate " + fmt(sb.at_zero.p_hat) +
             " (3-sigma " + fmt(3.0 * sigma) + "); joint p by k: " + seq);
}

void criterion13_negative_correlation() {
  const json gauss = run_experiment(
      "negcorr", {{"n", 64}, {"trials", 100000},
                  {"ensemble", {{"kind", "gaussian"}}}});
  bool ci_contains_one = true;
  for (const auto& row : gauss.at("tables").at(0).at("rows")) {
    const double lo = row.at(8).get<double>();
    const double hi = row.at(9).get<double>();
    if (!(lo <= 1.0 && 1.0 <= hi)) ci_contains_one = false;
  }
  const json rad = run_experiment("negcorr", {{"n", 64}, {"trials", 100000}});
  const double max_ratio = rad.at("fitted").at("max_ratio").get<double>();
  report(13, "approximate negative correlation", ci_contains_one && max_ratio <= 4.0,
         std::string("gaussian ratio CIs all contain 1: ") +
             (ci_contains_one ? "yes" : "no") + "; rademacher max ratio " +
             fmt(max_ratio));
}

// Criterion 14: every subcommand, run twice per thread count in {1,4,8},
// byte-identical deterministic outputs (everything except manifest.json).
std::map<std::string, std::string> dir_outputs(const fs::path& run_dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[name] = buf.str();
  }
  return files;
}

void criterion14_determinism() {
  const fs::path base = fs::temp_directory_path() / "rmtlab_acceptance_det";
  fs::remove_all(base);
  fs::create_directories(base);
  bool pass = true;
  std::string failed_sub;
  int round = 0;
  for (const std::string& sub : rmt::driver_names()) {
    std::map<std::string, std::string> reference;
    for (const std::string threads : {"1", "4", "8", "1", "4", "8"}) {
      const fs::path out = base / (sub + std::to_string(round++));
      std::string args = sub + " --seed 99 --trials 200 --threads " + threads;
      if (sub == "locallaw") args += " -n 24";
      if (sub == "distid") args += " -n 10";
      if (sub == "invlwo") args += " --set d=32";
      if (sub == "threshold") args += " -n 15 --set d=3";
      if (sub == "tail" || sub == "gaps" || sub == "hw" || sub == "negcorr" ||
          sub == "smallball" || sub == "audit" || sub == "moments") {
        args += " -n 12";
      }
      const std::string cmd = "'" + g_cli_bin + "' " + args + " --out '" +
                              out.string() + "' > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        pass = false;
        failed_sub = sub + " (nonzero exit)";
        break;
      }
      fs::path run_dir;
      for (const auto& e : fs::directory_iterator(out)) {
        if (e.is_directory()) run_dir = e.path();
      }
      const auto files = dir_outputs(run_dir);
      if (reference.empty()) {
        reference = files;
      } else if (files != reference) {
        pass = false;
        failed_sub = sub + " (threads " + threads + ")";
      }
    }
    if (!pass) break;
  }
  report(14, "byte-identical outputs across reruns and thread counts", pass,
         pass ? "13 subcommands x {1,4,8} threads x 2 runs"
              : "mismatch in " + failed_sub);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-rmtlab-cli>\n");
    return 64;
  }
  g_cli_bin = argv[1];
  const auto t0 = std::chrono::steady_clock::now();

  criterion1_goe_baseline();
  criterion2_rademacher_tail();
  criterion3_simple_spectrum();
  criterion4_repulsion();
  criterion5_local_law();
  criterion6_spectral_moments();
  criterion7_distance_identity();
  criterion8_facts_52_53();
  criterion9_decoupling();
  criterion10_charfn_bounds();
  criterion11_lcd_oracle();
  criterion12_smallball_structure();
  criterion13_negative_correlation();
  criterion14_determinism();

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("%d/14 criteria passed in %.1f s\n", 14 - g_failures, secs);
  return g_failures;
}
