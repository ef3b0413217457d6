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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fbmcode {

enum class SpectrumSource { exact_bm, discretized };

/// Where the quadrature nodes of a discretized covariance operator sit.
enum class QuadratureRule {
  midpoint,  ///< t_i = (i + 1/2)/n
  left,      ///< t_i = i/n, matching the left Riemann sum of lp_distance
};

/// Eigenvalues of a Gaussian covariance operator on L^2[0,1], descending.
///
/// `tail_mass` is the analytically known sum of eigenvalues beyond the stored
/// ones (nonzero only for exact_bm). Prefix sums of log-eigenvalues and
/// suffix sums of eigenvalues are cached so a water level can be evaluated
/// in O(log n).
class Spectrum {
 public:
  Spectrum(std::vector<double> eigenvalues, double tail_mass, SpectrumSource source,
           double hurst, std::size_t grid_n);

  std::span<const double> eigenvalues() const { return eigenvalues_; }
  std::size_t size() const { return eigenvalues_.size(); }
  double tail_mass() const { return tail_mass_; }
  SpectrumSource source() const { return source_; }
  double hurst() const { return hurst_; }
  std::size_t grid_n() const { return grid_n_; }

  /// Sum of all eigenvalues including the tail.
  double trace() const;
  /// Number of eigenvalues strictly above theta.
  std::size_t count_above(double theta) const;
  /// sum_{k<count} log lambda_k.
  long double log_prefix(std::size_t count) const { return log_prefix_[count]; }
  /// sum_{k>=count} lambda_k over the stored eigenvalues.
  long double mass_suffix(std::size_t count) const { return suffix_[count]; }

  static constexpr double kFloor = 1e-14;

 private:
  std::vector<double> eigenvalues_;
  double tail_mass_;
  SpectrumSource source_;
  double hurst_;
  std::size_t grid_n_;
  std::vector<long double> log_prefix_;
  std::vector<long double> suffix_;
};

/// Brownian motion: lambda_k = 1/(pi^2 (k - 1/2)^2), k = 1..terms, plus the
/// exact remainder psi_1(terms + 1/2)/pi^2.
Spectrum exact_bm_spectrum(std::size_t terms = 1'000'000);

/// Eigenvalues of (1/n) K(t_i, t_j) for the FBM kernel, floored at 1e-14.
Spectrum covariance_spectrum(double hurst, std::size_t n,
                             QuadratureRule rule = QuadratureRule::midpoint);

struct WaterfillSolution {
  double theta = 0.0;       ///< water level
  double distortion = 0.0;  ///< sqrt(sum min(lambda_k, theta))
  double rate = 0.0;        ///< 1/2 sum log+(lambda_k / theta), recomputed
  std::size_t active = 0;   ///< eigenvalues above theta
};

/// Reverse water-filling: bisection on log theta until the bracket is below
/// 1e-13 relative.
WaterfillSolution solve_waterfill(const Spectrum& spec, double rate);

/// D(r|2) = sqrt(sum_k min(lambda_k, theta(r))).
double waterfill(const Spectrum& spec, double rate);

struct KappaPoint {
  double rate = 0.0;
  double distortion = 0.0;
  double normalized = 0.0;  ///< rate^H * distortion
};

std::vector<KappaPoint> kappa_rd_estimate(const Spectrum& spec, std::span<const double> rates);

void write_spectrum_csv(std::ostream& out, const Spectrum& spec);
void write_curve_csv(std::ostream& out, std::span<const KappaPoint> curve);

}  // namespace fbmcode
