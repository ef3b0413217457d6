// Copyright 2026 The fbmcode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fbmcode/grid_paths.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

namespace fbmcode {

namespace {

// Autocovariance of unit-step fractional Gaussian noise.
double fgn_autocov(std::size_t lag, double hurst) {
  const double k = static_cast<double>(lag);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(std::abs(k - 1.0), h2));
}

void require_positive(int value, const char* what) {
  if (value <= 0) {
    throw std::invalid_argument(std::string(what) + " must be positive, got " +
                                std::to_string(value));
  }
}

}  // namespace

SampledPath::SampledPath(double hurst, int horizon, int n_per_unit, std::vector<double> values,
                         PathKind kind)
    : hurst_(hurst), horizon_(horizon), n_per_unit_(n_per_unit), values_(std::move(values)),
      kind_(kind) {
  require_hurst(hurst);
  require_positive(horizon, "horizon");
  require_positive(n_per_unit, "n_per_unit");
  const auto expected = static_cast<std::size_t>(horizon) * static_cast<std::size_t>(n_per_unit) + 1;
  if (values_.size() != expected) {
    throw std::invalid_argument("SampledPath: expected " + std::to_string(expected) +
                                " values, got " + std::to_string(values_.size()));
  }
}

SampledPath SampledPath::with_kind(PathKind kind) const {
  SampledPath out = *this;
  out.kind_ = kind;
  return out;
}

void require_same_grid(const SampledPath& f, const SampledPath& g) {
  if (!f.same_grid(g)) {
    throw std::invalid_argument("grid mismatch: [0," + std::to_string(f.horizon()) + "]@" +
                                std::to_string(f.n_per_unit()) + " vs [0," +
                                std::to_string(g.horizon()) + "]@" + std::to_string(g.n_per_unit()));
  }
}

void require_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw std::domain_error("Hurst index must lie in (0,1), got " + std::to_string(hurst));
  }
}

double fbm_covariance(double t, double s, double hurst) {
  require_hurst(hurst);
  if (t < 0.0 || s < 0.0) throw std::domain_error("fbm_covariance: times must be nonnegative");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

// ---------------------------------------------------------------------------
// FbmSampler

struct FbmSampler::Impl {
  std::size_t increments = 0;
  double step_scale = 1.0;  // n_per_unit^{-H}
  // Circulant route: sqrt(lambda_j / m) for the 2N-point embedding.
  std::vector<double> root_eigen;
  // Cholesky route: lower factor of the N x N increment covariance.
  Eigen::MatrixXd chol;
  bool circulant = true;
};

FbmSampler::FbmSampler(double hurst, int horizon, int n_per_unit)
    : hurst_(hurst), horizon_(horizon), n_per_unit_(n_per_unit), impl_(std::make_unique<Impl>()) {
  require_hurst(hurst);
  require_positive(horizon, "horizon");
  require_positive(n_per_unit, "n_per_unit");

  const std::size_t n = static_cast<std::size_t>(horizon) * static_cast<std::size_t>(n_per_unit);
  impl_->increments = n;
  impl_->step_scale = std::pow(static_cast<double>(n_per_unit), -hurst);

  const std::size_t m = 2 * n;
  std::vector<std::complex<double>> row(m);
  for (std::size_t j = 0; j <= n; ++j) row[j] = fgn_autocov(j, hurst);
  for (std::size_t j = n + 1; j < m; ++j) row[j] = fgn_autocov(m - j, hurst);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> eig;
  fft.fwd(eig, row);

  double min_eig = std::numeric_limits<double>::infinity();
  for (const auto& e : eig) min_eig = std::min(min_eig, e.real());

  if (min_eig >= -1e-9) {
    impl_->root_eigen.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      impl_->root_eigen[j] = std::sqrt(std::max(0.0, eig[j].real()) / static_cast<double>(m));
    }
    return;
  }

  if (n > kCholeskyCap) {
    throw std::runtime_error("FbmSampler: circulant embedding failed and " + std::to_string(n) +
                             " increments exceed the Cholesky cap");
  }
  impl_->circulant = false;
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = fgn_autocov(i > j ? i - j : j - i, hurst);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("FbmSampler: Cholesky failed");
  impl_->chol = llt.matrixL();
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;
FbmSampler& FbmSampler::operator=(FbmSampler&&) noexcept = default;

bool FbmSampler::uses_circulant() const { return impl_->circulant; }

SampledPath FbmSampler::sample(Engine& engine) const {
  const std::size_t n = impl_->increments;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> noise(n);

  if (impl_->circulant) {
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> w(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double re = normal(engine);
      const double im = normal(engine);
      w[j] = std::complex<double>(re, im) * impl_->root_eigen[j];
    }
    thread_local Eigen::FFT<double> fft;
    std::vector<std::complex<double>> y;
    fft.fwd(y, w);
    for (std::size_t k = 0; k < n; ++k) noise[k] = y[k].real();
  } else {
    Eigen::VectorXd z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = normal(engine);
    const Eigen::VectorXd x = impl_->chol.triangularView<Eigen::Lower>() * z;
    for (std::size_t k = 0; k < n; ++k) noise[k] = x[k];
  }

  std::vector<double> values(n + 1);
  values[0] = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += noise[k];
    values[k + 1] = acc * impl_->step_scale;
  }
  return SampledPath(hurst_, horizon_, n_per_unit_, std::move(values));
}

SampledPath FbmSampler::sample(const RngSpec& spec) const {
  Engine engine = make_engine(spec);
  return sample(engine);
}

SampledPath sample_fbm(double hurst, int horizon, int n_per_unit, const RngSpec& spec) {
  return FbmSampler(hurst, horizon, n_per_unit).sample(spec);
}

// ---------------------------------------------------------------------------
// Self-similarity operators

SampledPath scale_alpha(const SampledPath& f, int n) {
  if (n < 1) throw std::invalid_argument("scale_alpha: n must be >= 1");
  if (f.horizon() != 1) throw std::invalid_argument("scale_alpha: source must live on [0,1]");
  if (f.n_per_unit() % n != 0) {
    throw std::invalid_argument("scale_alpha: n_per_unit " + std::to_string(f.n_per_unit()) +
                                " is not divisible by n=" + std::to_string(n));
  }
  const double factor = std::pow(static_cast<double>(n), f.hurst());
  std::vector<double> values(f.values().begin(), f.values().end());
  for (double& v : values) v *= factor;
  return SampledPath(f.hurst(), n, f.n_per_unit() / n, std::move(values), f.kind());
}

SampledPath scale_alpha_inv(const SampledPath& g, int n) {
  if (n < 1) throw std::invalid_argument("scale_alpha_inv: n must be >= 1");
  if (g.horizon() != n) {
    throw std::invalid_argument("scale_alpha_inv: source must live on [0," + std::to_string(n) + "]");
  }
  const double factor = std::pow(static_cast<double>(n), g.hurst());
  std::vector<double> values(g.values().begin(), g.values().end());
  for (double& v : values) v /= factor;
  return SampledPath(g.hurst(), 1, g.n_per_unit() * n, std::move(values), g.kind());
}

SampledPath shift_increment(const SampledPath& w, int n) {
  if (n < 0 || n + 1 > w.horizon()) {
    throw std::out_of_range("shift_increment: block " + std::to_string(n) +
                            " does not fit in horizon " + std::to_string(w.horizon()));
  }
  const auto npu = static_cast<std::size_t>(w.n_per_unit());
  const std::size_t start = static_cast<std::size_t>(n) * npu;
  const double origin = w[start];
  std::vector<double> values(npu + 1);
  for (std::size_t j = 0; j <= npu; ++j) values[j] = w[start + j] - origin;
  return SampledPath(w.hurst(), 1, w.n_per_unit(), std::move(values), w.kind());
}

// ---------------------------------------------------------------------------
// Distances

double sup_distance(const SampledPath& f, const SampledPath& g) {
  require_same_grid(f, g);
  double best = 0.0;
  const auto a = f.values();
  const auto b = g.values();
  for (std::size_t k = 0; k < a.size(); ++k) best = std::max(best, std::abs(a[k] - b[k]));
  return best;
}

double lp_distance(const SampledPath& f, const SampledPath& g, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_distance: p must be >= 1");
  require_same_grid(f, g);
  const auto a = f.values();
  const auto b = g.values();
  const std::size_t n = a.size() - 1;
  double acc = 0.0;
  if (p == 2.0) {
    for (std::size_t k = 0; k < n; ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(acc / static_cast<double>(n));
  }
  for (std::size_t k = 0; k < n; ++k) acc += std::pow(std::abs(a[k] - b[k]), p);
  return std::pow(acc / static_cast<double>(n), 1.0 / p);
}

Norm Norm::lp(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("Norm::lp: p must be in [1,inf)");
  return {Kind::lp, p};
}

double Norm::distance(const SampledPath& f, const SampledPath& g) const {
  return kind == Kind::sup ? sup_distance(f, g) : lp_distance(f, g, p);
}

std::string Norm::name() const { return kind == Kind::sup ? "sup" : "lp"; }

}  // namespace fbmcode
