#include "stats.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rmt {

WilsonInterval wilson(std::int64_t successes, std::int64_t trials) {
  if (trials <= 0) throw std::invalid_argument("wilson: trials must be > 0");
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson: successes out of range");
  }
  constexpr double z = 1.959963984540054;  // 95%
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  WilsonInterval w;
  w.p_hat = p;
  // The boundary cases are exactly 0 and 1; rounding dust there would turn
  // log-space comparisons of impossible events into finite numbers.
  w.low = (successes == 0) ? 0.0 : std::max(0.0, center - half);
  w.high = (successes == trials) ? 1.0 : std::min(1.0, center + half);
  return w;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  LineFit f;
  f.points = static_cast<int>(x.size());
  if (f.points < 2) return f;
  double sx = 0, sy = 0;
  for (int i = 0; i < f.points; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / f.points;
  const double my = sy / f.points;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (f.points > 2) {
    double rss = 0.0;
    for (int i = 0; i < f.points; ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / (f.points - 2) / sxx);
  }
  return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return fit_line(lx, ly);
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty");
  double s = 0.0;
  for (double v : xs) s += v;
  return s / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double v : xs) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi and points >= 2");
  }
  std::vector<double> g(points);
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = std::exp(std::log(lo) + i * step);
  g.front() = lo;
  g.back() = hi;
  return g;
}

void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  threads = std::max(1, threads);
  if (threads == 1 || count == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::int64_t>(threads, count));
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace rmt
