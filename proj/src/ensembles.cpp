#include "ensembles.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rmt {

SymMatrix::SymMatrix(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("SymMatrix: n must be >= 1");
  tri_.assign(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0);
}

std::size_t SymMatrix::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw std::out_of_range("SymMatrix index");
  }
  if (i > j) std::swap(i, j);
  const std::size_t row = static_cast<std::size_t>(i);
  return row * n_ - row * (row - 1) / 2 + (j - i);
}

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      const double v = (*this)(i, j);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

Eigen::VectorXd SymMatrix::col(int j) const {
  Eigen::VectorXd v(n_);
  for (int i = 0; i < n_; ++i) v(i) = (*this)(i, j);
  return v;
}

SymMatrix SymMatrix::minor_removing(const std::vector<int>& removed) const {
  std::vector<int> keep;
  keep.reserve(n_);
  std::size_t r = 0;
  for (int i = 0; i < n_; ++i) {
    if (r < removed.size() && removed[r] == i) {
      ++r;
      continue;
    }
    keep.push_back(i);
  }
  if (r != removed.size()) {
    throw std::invalid_argument("minor_removing: indices must be sorted and in range");
  }
  if (keep.empty()) throw std::invalid_argument("minor_removing: empty minor");
  SymMatrix out(static_cast<int>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t b = a; b < keep.size(); ++b) {
      out.set(static_cast<int>(a), static_cast<int>(b),
              (*this)(keep[a], keep[b]));
    }
  }
  return out;
}

bool SymMatrix::all_finite() const {
  for (double v : tri_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

SymMatrix sample_sym(const Distribution& dist, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_sym: n must be >= 1");
  SymMatrix a(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      rng::Stream s(seed, rng::Tag::MatrixEntry, static_cast<std::uint64_t>(i),
                    static_cast<std::uint64_t>(j));
      a.set(i, j, dist.sample(s));
    }
  }
  return a;
}

SymMatrix sample_sym_indexed(const Distribution& dist, std::uint64_t seed,
                             const std::vector<int>& indices) {
  if (indices.empty()) {
    throw std::invalid_argument("sample_sym_indexed: empty index list");
  }
  SymMatrix a(static_cast<int>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = i; j < indices.size(); ++j) {
      rng::Stream s(seed, rng::Tag::MatrixEntry,
                    static_cast<std::uint64_t>(indices[i]),
                    static_cast<std::uint64_t>(indices[j]));
      a.set(static_cast<int>(i), static_cast<int>(j), dist.sample(s));
    }
  }
  return a;
}

Eigen::VectorXd sample_col(const Distribution& dist, int n,
                           std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_col: n must be >= 1");
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    rng::Stream s(seed, rng::Tag::VectorEntry, static_cast<std::uint64_t>(i),
                  0);
    x(i) = dist.sample(s);
  }
  return x;
}

std::vector<int> sample_mu_subset(int n, double mu, std::uint64_t seed) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    throw std::invalid_argument("sample_mu_subset: mu must lie in [0,1]");
  }
  std::vector<int> subset;
  for (int i = 0; i < n; ++i) {
    rng::Stream s(seed, rng::Tag::SubsetEntry, static_cast<std::uint64_t>(i),
                  0);
    if (s.u01() < mu) subset.push_back(i);
  }
  return subset;
}

Eigen::VectorXd sample_tilde_x(const Distribution& dist, int n, double mu,
                               std::uint64_t seed) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    rng::Stream member(seed, rng::Tag::SubsetEntry,
                       static_cast<std::uint64_t>(i), 0);
    if (member.u01() >= mu) continue;
    rng::Stream s(seed, rng::Tag::VectorEntry, static_cast<std::uint64_t>(i),
                  1);
    const double a = dist.sample(s);
    const double b = dist.sample(s);
    x(i) = a - b;
  }
  return x;
}

void ZeroedMatrixParams::validate() const {
  if (n < 3) throw std::invalid_argument("ZeroedMatrixParams: n must be >= 3");
  if (d < 1 || 3 * d > n) {
    throw std::invalid_argument("ZeroedMatrixParams: need 1 <= d <= n/3");
  }
  if (!(nu >= 0.0 && nu <= 1.0)) {
    throw std::invalid_argument("ZeroedMatrixParams: nu must lie in [0,1]");
  }
}

SymMatrix sample_zeroed(const ZeroedMatrixParams& params, std::uint64_t seed) {
  params.validate();
  SymMatrix m(params.n);
  for (int i = 0; i < params.d; ++i) {
    for (int j = params.d; j < params.n; ++j) {
      rng::Stream s(seed, rng::Tag::MatrixEntry, static_cast<std::uint64_t>(i),
                    static_cast<std::uint64_t>(j));
      if (s.u01() >= params.nu) continue;
      const double a = params.base.sample(s);
      const double b = params.base.sample(s);
      m.set(i, j, a - b);
    }
  }
  return m;
}

Eigen::VectorXd sample_lazy_sign_vector(int n, double nu, std::uint64_t seed) {
  if (!(nu >= 0.0 && nu <= 1.0)) {
    throw std::invalid_argument("sample_lazy_sign_vector: nu must lie in [0,1]");
  }
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    rng::Stream s(seed, rng::Tag::VectorEntry, static_cast<std::uint64_t>(i),
                  2);
    const double u = s.u01();
    if (u < nu / 2.0) {
      x(i) = -1.0;
    } else if (u < nu) {
      x(i) = 1.0;
    } else {
      x(i) = 0.0;
    }
  }
  return x;
}

}  // namespace rmt
