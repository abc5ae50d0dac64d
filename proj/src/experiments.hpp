#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "distribution.hpp"

// Orchestrated Monte Carlo studies. Each experiment is a driver with a fixed
// decomposition into work units (checkpoint granularity for resume); a unit
// result is plain JSON, and assembling the full unit list reproduces the
// report byte for byte. Per-trial seeds are derived from (seed, trial index),
// so results are independent of threading and of where unit boundaries fall.

namespace rmt {

class ExperimentDriver {
 public:
  virtual ~ExperimentDriver() = default;

  virtual std::string name() const = 0;
  virtual json defaults() const = 0;
  virtual int unit_count(const Config& cfg) const = 0;
  virtual json run_unit(const Config& cfg, int unit, int threads) const = 0;
  virtual json assemble(const Config& cfg,
                        const std::vector<json>& units) const = 0;
};

const ExperimentDriver* find_driver(const std::string& subcommand);
std::vector<std::string> driver_names();

// Shared config helpers (exposed for tests).
Distribution ensemble_from_config(const Config& cfg);
Eigen::VectorXd make_direction(const std::string& kind, int n,
                               std::uint64_t seed, double two_level_ratio = 2.0);
std::vector<double> grid_from_config(const Config& cfg, const std::string& kind,
                                     double def_lo, double def_hi,
                                     int def_points);

// Work-unit decomposition of a trial count (deterministic in the config).
struct TrialBlocks {
  std::int64_t trials = 0;
  int units = 1;

  std::int64_t begin(int unit) const { return trials * unit / units; }
  std::int64_t end(int unit) const { return trials * (unit + 1) / units; }
};

TrialBlocks make_blocks(std::int64_t trials);

}  // namespace rmt
