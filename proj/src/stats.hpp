#pragma once

#include <cstdint>
#include <functional>
#include <vector>

// Small statistics toolbox: Wilson score intervals, least-squares fits with
// slope standard errors, and a deterministic parallel map over trial indices.

namespace rmt {

struct WilsonInterval {
  double p_hat = 0.0;
  double low = 0.0;
  double high = 0.0;
};

// 95% score interval; valid for p_hat near 0, which is where the tail
// experiments live.
WilsonInterval wilson(std::int64_t successes, std::int64_t trials);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Log-log slope fit restricted to pairs with x > 0 and y > 0.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);

// Log-spaced grid from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

// Runs fn(i) for i in [0, count) across `threads` workers. Results must be
// written to per-index slots by the caller; combined with an index-ordered
// reduction this is deterministic for any thread count.
void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace rmt
