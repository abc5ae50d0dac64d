#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmt {

namespace {

Eigen::VectorXd descending(const Eigen::VectorXd& ascending) {
  return ascending.reverse();
}

void require_finite(const SymMatrix& a) {
  if (!a.all_finite()) {
    throw std::invalid_argument("matrix has non-finite entries");
  }
}

}  // namespace

Spectrum eigen_sym(const SymMatrix& a) {
  require_finite(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed to converge");
  }
  Spectrum s;
  s.eigenvalues = descending(solver.eigenvalues());
  s.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return s;
}

Eigen::VectorXd eigenvalues_sym(const SymMatrix& a) {
  require_finite(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigensolver failed to converge");
  }
  return descending(solver.eigenvalues());
}

double spectrum_defect(const SymMatrix& a, const Spectrum& s) {
  const int n = s.n();
  const Eigen::MatrixXd dense = a.dense();
  const double op = s.eigenvalues.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * n;
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double resid =
        (dense * s.eigenvectors.col(k) - s.eigenvalues(k) * s.eigenvectors.col(k))
            .norm();
    const double allowed = tol * (1.0 + std::abs(s.eigenvalues(k))) *
                           std::max(op, std::numeric_limits<double>::min());
    worst = std::max(worst, resid / allowed);
  }
  const double ortho =
      (s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  worst = std::max(worst, ortho / tol);
  return worst;
}

double sigma_min(const Eigen::VectorXd& eigenvalues) {
  return eigenvalues.cwiseAbs().minCoeff();
}

double sigma_min(const SymMatrix& a) { return sigma_min(eigenvalues_sym(a)); }

int count_interval(const Eigen::VectorXd& eigenvalues, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("count_interval: need a < b");
  int count = 0;
  for (int i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > a && eigenvalues(i) < b) ++count;
  }
  return count;
}

int count_interval(const Spectrum& s, double a, double b) {
  return count_interval(s.eigenvalues, a, b);
}

double eigen_gap(const Eigen::VectorXd& eigenvalues, int k, int l) {
  const int n = static_cast<int>(eigenvalues.size());
  if (l < 1 || k < 1 || k > n - l) {
    throw std::out_of_range("eigen_gap: need 1 <= k <= n-l, l >= 1");
  }
  return eigenvalues(k - 1) - eigenvalues(k + l - 1);
}

double eigen_gap(const Spectrum& s, int k, int l) {
  return eigen_gap(s.eigenvalues, k, l);
}

double singular_cutoff(int n) { return 1e-10 * std::sqrt(double(n)); }

SingularProfile singular_profile(const Eigen::VectorXd& eigenvalues) {
  const int n = static_cast<int>(eigenvalues.size());
  SingularProfile p;
  p.sigmas.resize(n);
  for (int i = 0; i < n; ++i) p.sigmas[i] = std::abs(eigenvalues(i));
  std::sort(p.sigmas.begin(), p.sigmas.end(), std::greater<double>());
  const double cutoff = singular_cutoff(n);
  p.mus.resize(n);
  for (int k = 0; k < n; ++k) {
    const double sigma = p.sigmas[n - 1 - k];
    if (sigma < cutoff) {
      p.mus[k] = std::numeric_limits<double>::infinity();
      ++p.n_singular;
    } else {
      p.mus[k] = 1.0 / sigma;
    }
  }
  return p;
}

double norm_star(std::span<const double> sigmas) {
  double sum = 0.0;
  int k = 1;
  for (double s : sigmas) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("norm_star: non-finite singular value");
    }
    const double w = std::log(1.0 + k);
    sum += s * s * w * w;
    ++k;
  }
  return std::sqrt(sum);
}

double dist_to_colspan(const SymMatrix& a, int j) {
  require_finite(a);
  const int n = a.n();
  if (j < 0 || j >= n) throw std::out_of_range("dist_to_colspan: bad column");
  Eigen::MatrixXd others(n, n - 1);
  int c = 0;
  for (int k = 0; k < n; ++k) {
    if (k == j) continue;
    others.col(c++) = a.col(k);
  }
  const Eigen::VectorXd x = a.col(j);
  const Eigen::VectorXd coef = others.colPivHouseholderQr().solve(x);
  return (x - others * coef).norm();
}

DistIdentityResult dist_identity_check(const SymMatrix& a) {
  require_finite(a);
  const int m = a.n();
  if (m < 2) throw std::invalid_argument("dist_identity_check: need n >= 2");
  const SymMatrix minor = a.minor_removing({0});
  const Eigen::VectorXd evals = eigenvalues_sym(minor);
  if (sigma_min(evals) <= 1e-10) {
    throw SingularMinorError("dist_identity_check: singular leading minor");
  }
  Eigen::VectorXd x(m - 1);
  for (int i = 1; i < m; ++i) x(i - 1) = a(i, 0);
  const Eigen::VectorXd y = minor.dense().colPivHouseholderQr().solve(x);
  DistIdentityResult r;
  r.lhs = dist_to_colspan(a, 0);
  r.rhs = std::abs(y.dot(x) - a(0, 0)) / std::sqrt(1.0 + y.squaredNorm());
  r.abs_err = std::abs(r.lhs - r.rhs);
  return r;
}

PerturbationResult perturbation_check(const SymMatrix& a, int j,
                                      PairMode mode) {
  const int n = a.n();
  if (j < 0 || j >= n) throw std::out_of_range("perturbation_check: bad index");
  if (n < 2) throw std::invalid_argument("perturbation_check: need n >= 2");
  const Spectrum full = eigen_sym(a);
  const Spectrum minor = eigen_sym(a.minor_removing({j}));
  Eigen::VectorXd x(n - 1);
  int c = 0;
  for (int i = 0; i < n; ++i) {
    if (i != j) x(c++) = a(i, j);
  }

  auto least_index = [](const Eigen::VectorXd& vals) {
    int best = 0;
    for (int i = 1; i < vals.size(); ++i) {
      if (std::abs(vals(i)) < std::abs(vals(best))) best = i;
    }
    return best;
  };

  std::vector<int> full_set, minor_set;
  if (mode == PairMode::AllPairs) {
    for (int i = 0; i < n; ++i) full_set.push_back(i);
    for (int i = 0; i < n - 1; ++i) minor_set.push_back(i);
  } else {
    full_set.push_back(least_index(full.eigenvalues));
    minor_set.push_back(least_index(minor.eigenvalues));
  }

  // The exact inequality is lhs * |u_j| <= |lambda - lambda'|; computed
  // eigenpairs carry additive noise of order eps * n * |A|, so the ratio is
  // taken against the difference plus that noise floor. Interlacing near-ties
  // then read as ratio <= 1 instead of noise divided by noise.
  const double op = full.eigenvalues.cwiseAbs().maxCoeff();
  const double noise = 1e-12 * n * (1.0 + op);

  PerturbationResult result;
  for (int fi : full_set) {
    const double uj = std::abs(full.eigenvectors(j, fi));
    if (uj < 1e-12) {
      result.skipped_pairs += static_cast<int>(minor_set.size());
      continue;
    }
    for (int mi : minor_set) {
      const double lhs = std::abs(minor.eigenvectors.col(mi).dot(x)) * uj;
      const double denom =
          std::abs(full.eigenvalues(fi) - minor.eigenvalues(mi)) + noise;
      result.max_ratio = std::max(result.max_ratio, lhs / denom);
    }
  }
  return result;
}

SigmaMinLowerResult sigma_min_lower_check(const SymMatrix& a) {
  const Spectrum s = eigen_sym(a);
  int least = 0;
  for (int i = 1; i < s.n(); ++i) {
    if (std::abs(s.eigenvalues(i)) < std::abs(s.eigenvalues(least))) least = i;
  }
  const double smin = std::abs(s.eigenvalues(least));
  const Eigen::VectorXd v = s.eigenvectors.col(least);
  SigmaMinLowerResult r;
  r.max_violation = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < a.n(); ++j) {
    const double bound = std::abs(v(j)) * dist_to_colspan(a, j);
    r.max_violation = std::max(r.max_violation, bound - smin);
  }
  r.ok = r.max_violation <= 1e-8;
  return r;
}

}  // namespace rmt
