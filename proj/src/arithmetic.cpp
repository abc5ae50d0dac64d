#include "arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rng.hpp"

namespace rmt {

double dist_to_integer(double x) { return std::abs(x - std::nearbyint(x)); }

double torus_dist(const Eigen::VectorXd& v) {
  double sum = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double d = dist_to_integer(v(i));
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

struct LcdEvaluator {
  const Eigen::VectorXd& v;
  double norm;
  double gamma;
  double alpha_thresh;

  // Admissibility defect; <= 0 exactly when phi satisfies the definition.
  double defect(double phi) const {
    double sum = 0.0;
    for (int i = 0; i < v.size(); ++i) {
      const double d = dist_to_integer(phi * v(i));
      sum += d * d;
    }
    return std::sqrt(sum) - std::min(gamma * phi * norm, alpha_thresh);
  }

  double lipschitz() const { return norm * (1.0 + gamma) + 1e-300; }
};

// Minimal phi in [a,b] with defect(phi) <= 0, or nullopt. The relaxed
// endpoint test never discards a subinterval containing an admissible point
// (the defect is Lipschitz), so the leftmost candidate is found first.
std::optional<double> refine_cell(const LcdEvaluator& e, double a, double b,
                                  double tol) {
  if (b - a <= tol) {
    for (double phi : {a, 0.5 * (a + b), b}) {
      if (phi > tol && e.defect(phi) <= 0.0) return phi;
    }
    return std::nullopt;
  }
  const double sub = (b - a) / 4.0;
  const double budget = sub * e.lipschitz();
  for (int m = 1; m <= 4; ++m) {
    const double right = a + m * sub;
    if (e.defect(right) <= budget) {
      if (auto r = refine_cell(e, right - sub, right, tol)) return r;
    }
  }
  return std::nullopt;
}

}  // namespace

bool lcd_admissible(const Eigen::VectorXd& v, const LcdParams& params,
                    double phi, double slack) {
  const double thresh = std::min(params.gamma * phi * v.norm(),
                                 std::sqrt(params.alpha * double(v.size())));
  return torus_dist(phi * v) <= thresh + slack;
}

LcdResult lcd(const Eigen::VectorXd& v, const LcdParams& params) {
  if (!(params.cap > 0.0)) throw std::invalid_argument("lcd: cap must be > 0");
  if (!(params.alpha > 0.0 && params.alpha < 1.0) ||
      !(params.gamma > 0.0 && params.gamma < 1.0)) {
    throw std::invalid_argument("lcd: alpha and gamma must lie in (0,1)");
  }
  const double norm = v.norm();
  LcdEvaluator eval{v, norm, params.gamma,
                    std::sqrt(params.alpha * double(v.size()))};

  double h = params.grid_step;
  if (h > 0.0) {
    if (h > params.gamma / (4.0 * std::max(1.0, norm)) + 1e-15) {
      throw std::invalid_argument("lcd: grid_step too coarse for resolution guarantee");
    }
  } else {
    h = params.gamma / (8.0 * std::max(norm, 1e-12));
  }

  const double lips = eval.lipschitz();
  double left = 0.0;
  while (left < params.cap) {
    const double right = std::min(left + h, params.cap);
    if (eval.defect(right) <= (right - left) * lips) {
      const double tol = 1e-10 * std::max(1.0, left);
      if (auto phi = refine_cell(eval, left, right, tol)) {
        LcdResult r;
        r.bounded = true;
        r.value = *phi;
        r.witness_t = *phi;
        r.binding = (params.gamma * (*phi) * norm <= eval.alpha_thresh)
                        ? LcdBranch::GammaBranch
                        : LcdBranch::AlphaBranch;
        return r;
      }
    }
    left = right;
  }
  LcdResult r;
  r.bounded = false;
  r.value = params.cap;
  r.witness_t = 0.0;
  r.binding = LcdBranch::None;
  return r;
}

namespace {

double compare_key(const LcdResult& r) {
  return r.bounded ? r.value : std::numeric_limits<double>::infinity();
}

LcdResult lcd_of_subset(const Eigen::VectorXd& v, const LcdParams& params,
                        const std::vector<bool>& removed, bool normalized,
                        bool* degenerate) {
  Eigen::VectorXd w = v;
  for (int i = 0; i < v.size(); ++i) {
    if (removed[i]) w(i) = 0.0;
  }
  const double norm = w.norm();
  if (norm < 1e-12) {
    *degenerate = true;
    return {};
  }
  *degenerate = false;
  if (normalized) w /= norm;
  return lcd(w, params);
}

}  // namespace

SubvectorLcdResult subvector_lcd(const Eigen::VectorXd& v,
                                 const LcdParams& params, double mu,
                                 SubvectorMode mode, bool normalized,
                                 std::uint64_t seed, int restarts) {
  const int n = static_cast<int>(v.size());
  if (!(mu >= 0.0 && mu < 0.5)) {
    throw std::invalid_argument("subvector_lcd: mu must lie in [0, 0.5)");
  }
  const int max_removed = static_cast<int>(std::floor(2.0 * mu * n));

  SubvectorLcdResult best;
  double best_key = std::numeric_limits<double>::infinity();
  bool have_any = false;

  auto consider = [&](const std::vector<bool>& removed) {
    bool degenerate = false;
    const LcdResult r = lcd_of_subset(v, params, removed, normalized, &degenerate);
    if (degenerate) return;
    const double key = compare_key(r);
    if (!have_any || key < best_key) {
      have_any = true;
      best_key = key;
      best.lcd = r;
      best.kept.clear();
      for (int i = 0; i < n; ++i) {
        if (!removed[i]) best.kept.push_back(i);
      }
    }
  };

  std::vector<bool> removed(n, false);
  consider(removed);

  if (mode == SubvectorMode::Exact) {
    double binom = 1.0;
    for (int s = 1; s <= max_removed; ++s) binom = binom * (n - s + 1) / s;
    if (binom > 1e6) {
      throw std::invalid_argument("subvector_lcd: exact enumeration too large");
    }
    // Enumerate removal sets of every size 1..max_removed.
    for (int size = 1; size <= max_removed; ++size) {
      std::vector<int> comb(size);
      std::iota(comb.begin(), comb.end(), 0);
      while (true) {
        std::fill(removed.begin(), removed.end(), false);
        for (int idx : comb) removed[idx] = true;
        consider(removed);
        int pos = size - 1;
        while (pos >= 0 && comb[pos] == n - size + pos) --pos;
        if (pos < 0) break;
        ++comb[pos];
        for (int q = pos + 1; q < size; ++q) comb[q] = comb[q - 1] + 1;
      }
    }
  } else {
    // Greedy: repeatedly drop the kept coordinate farthest from the lattice
    // at the current witness dilation.
    std::vector<bool> greedy(n, false);
    Eigen::VectorXd w = v;
    LcdResult current = best.lcd;
    for (int step = 0; step < max_removed; ++step) {
      const double phi = current.bounded ? current.witness_t : params.cap;
      int worst = -1;
      double worst_dist = -1.0;
      const double norm = w.norm();
      for (int i = 0; i < n; ++i) {
        if (greedy[i] || w(i) == 0.0) continue;
        const double scale = (normalized && norm > 1e-12) ? 1.0 / norm : 1.0;
        const double d = dist_to_integer(phi * w(i) * scale);
        if (d > worst_dist) {
          worst_dist = d;
          worst = i;
        }
      }
      if (worst < 0) break;
      greedy[worst] = true;
      w(worst) = 0.0;
      bool degenerate = false;
      current = lcd_of_subset(v, params, greedy, normalized, &degenerate);
      if (degenerate) break;
      consider(greedy);
    }
    for (int s = 0; s < restarts && max_removed > 0; ++s) {
      rng::Stream stream(seed, rng::Tag::Heuristic,
                         static_cast<std::uint64_t>(s), 0);
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      for (int i = 0; i < max_removed; ++i) {
        const int j = i + static_cast<int>(stream.u01() * (n - i));
        std::swap(order[i], order[std::min(j, n - 1)]);
      }
      std::fill(removed.begin(), removed.end(), false);
      for (int i = 0; i < max_removed; ++i) removed[order[i]] = true;
      consider(removed);
    }
  }

  if (!have_any) {
    throw std::invalid_argument("subvector_lcd: all admissible subvectors are zero");
  }
  return best;
}

double compress_dist(const Eigen::VectorXd& v, double delta) {
  const int n = static_cast<int>(v.size());
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("compress_dist: delta must lie in (0,1)");
  }
  const int keep = std::min(n, static_cast<int>(std::ceil(delta * n)));
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(v(a)) > std::abs(v(b));
  });
  double sum = 0.0;
  for (int r = keep; r < n; ++r) sum += v(idx[r]) * v(idx[r]);
  return std::sqrt(sum);
}

void CompressParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0) || !(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("CompressParams: delta and rho must lie in (0,1)");
  }
}

bool is_compressible(const Eigen::VectorXd& v, const CompressParams& params) {
  params.validate();
  return compress_dist(v, params.delta) <= params.rho;
}

int flat_count(const Eigen::VectorXd& v, double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw std::invalid_argument("flat_count: c must lie in (0,1)");
  }
  const double root_n = std::sqrt(double(v.size()));
  int count = 0;
  for (int i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i)) * root_n;
    if (m >= c && m <= 1.0 / c) ++count;
  }
  return count;
}

}  // namespace rmt
