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

#include "fbmcode/gauss_rd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/math/special_functions/trigamma.hpp>

#include "fbmcode/csv.hpp"
#include "fbmcode/grid_paths.hpp"

namespace fbmcode {

Spectrum::Spectrum(std::vector<double> eigenvalues, double tail_mass, SpectrumSource source,
                   double hurst, std::size_t grid_n)
    : eigenvalues_(std::move(eigenvalues)), tail_mass_(tail_mass), source_(source), hurst_(hurst),
      grid_n_(grid_n) {
  if (eigenvalues_.empty()) throw std::invalid_argument("Spectrum: no eigenvalues");
  for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
    if (!(eigenvalues_[k] > kFloor)) throw std::invalid_argument("Spectrum: eigenvalue below floor");
    if (k > 0 && eigenvalues_[k] > eigenvalues_[k - 1]) {
      throw std::invalid_argument("Spectrum: eigenvalues must be nonincreasing");
    }
  }
  if (!(tail_mass_ >= 0.0)) throw std::invalid_argument("Spectrum: negative tail mass");

  const std::size_t n = eigenvalues_.size();
  log_prefix_.assign(n + 1, 0.0L);
  suffix_.assign(n + 1, 0.0L);
  for (std::size_t k = 0; k < n; ++k) {
    log_prefix_[k + 1] = log_prefix_[k] + std::log(static_cast<long double>(eigenvalues_[k]));
  }
  for (std::size_t k = n; k-- > 0;) suffix_[k] = suffix_[k + 1] + eigenvalues_[k];
}

double Spectrum::trace() const { return static_cast<double>(suffix_[0] + tail_mass_); }

std::size_t Spectrum::count_above(double theta) const {
  const auto it = std::partition_point(eigenvalues_.begin(), eigenvalues_.end(),
                                       [theta](double lambda) { return lambda > theta; });
  return static_cast<std::size_t>(it - eigenvalues_.begin());
}

Spectrum exact_bm_spectrum(std::size_t terms) {
  if (terms == 0) throw std::invalid_argument("exact_bm_spectrum: terms must be positive");
  const double pi2 = std::numbers::pi * std::numbers::pi;
  std::vector<double> eig(terms);
  for (std::size_t k = 1; k <= terms; ++k) {
    const double m = static_cast<double>(k) - 0.5;
    eig[k - 1] = 1.0 / (pi2 * m * m);
  }
  const double tail = boost::math::trigamma(static_cast<double>(terms) + 0.5) / pi2;
  return Spectrum(std::move(eig), tail, SpectrumSource::exact_bm, 0.5, 0);
}

Spectrum covariance_spectrum(double hurst, std::size_t n, QuadratureRule rule) {
  require_hurst(hurst);
  if (n == 0 || n > 4096) throw std::invalid_argument("covariance_spectrum: n must be in [1, 4096]");
  const double offset = rule == QuadratureRule::midpoint ? 0.5 : 0.0;
  const double dn = static_cast<double>(n);
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + offset) / dn;
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = (static_cast<double>(j) + offset) / dn;
      a(i, j) = a(j, i) = fbm_covariance(t, s, hurst) / dn;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("covariance_spectrum: eigensolve failed");
  std::vector<double> eig;
  eig.reserve(n);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double v = solver.eigenvalues()[k];
    if (v > Spectrum::kFloor) eig.push_back(v);
  }
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return Spectrum(std::move(eig), 0.0, SpectrumSource::discretized, hurst, n);
}

namespace {

long double rate_at(const Spectrum& spec, long double log_theta, std::size_t active) {
  return 0.5L * (spec.log_prefix(active) - static_cast<long double>(active) * log_theta);
}

}  // namespace

WaterfillSolution solve_waterfill(const Spectrum& spec, double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("waterfill: rate must be finite and nonnegative");
  }
  const auto eig = spec.eigenvalues();
  const double top = eig.front();
  if (rate == 0.0) return {top, std::sqrt(spec.trace()), 0.0, 0};

  long double lo = std::log(static_cast<long double>(eig.back()));
  long double hi = std::log(static_cast<long double>(top));
  const std::size_t all = eig.size();
  const long double max_rate = rate_at(spec, lo, all);
  if (rate >= max_rate) {
    if (spec.tail_mass() > 0.0) {
      throw std::invalid_argument("waterfill: rate " + std::to_string(rate) +
                                  " exceeds what the stored spectrum resolves (" +
                                  std::to_string(static_cast<double>(max_rate)) + ")");
    }
    // Every component is active; the water level has a closed form.
    const long double log_theta = (spec.log_prefix(all) - 2.0L * rate) / static_cast<long double>(all);
    const double theta = static_cast<double>(std::exp(log_theta));
    return {theta, static_cast<double>(std::sqrt(static_cast<long double>(all) * theta)), rate, all};
  }
  // Rate is decreasing in theta.
  while (hi - lo > 1e-13L) {
    const long double mid = 0.5L * (lo + hi);
    const std::size_t active = spec.count_above(static_cast<double>(std::exp(mid)));
    if (rate_at(spec, mid, active) > rate) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const long double log_theta = 0.5L * (lo + hi);
  const double theta = static_cast<double>(std::exp(log_theta));
  const std::size_t active = spec.count_above(theta);
  const long double mass = static_cast<long double>(active) * theta + spec.mass_suffix(active) +
                           spec.tail_mass();
  return {theta, static_cast<double>(std::sqrt(mass)),
          static_cast<double>(rate_at(spec, log_theta, active)), active};
}

double waterfill(const Spectrum& spec, double rate) { return solve_waterfill(spec, rate).distortion; }

std::vector<KappaPoint> kappa_rd_estimate(const Spectrum& spec, std::span<const double> rates) {
  std::vector<KappaPoint> curve;
  curve.reserve(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i > 0 && !(rates[i] > rates[i - 1])) {
      throw std::invalid_argument("kappa_rd_estimate: rates must be increasing");
    }
    const double d = waterfill(spec, rates[i]);
    curve.push_back({rates[i], d, std::pow(rates[i], spec.hurst()) * d});
  }
  return curve;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spec) {
  out << "k,lambda\n";
  const auto eig = spec.eigenvalues();
  for (std::size_t k = 0; k < eig.size(); ++k) out << (k + 1) << ',' << format_double(eig[k]) << '\n';
}

void write_curve_csv(std::ostream& out, std::span<const KappaPoint> curve) {
  out << "r,D,rH_D\n";
  for (const auto& p : curve) {
    out << format_double(p.rate) << ',' << format_double(p.distortion) << ','
        << format_double(p.normalized) << '\n';
  }
}

}  // namespace fbmcode
