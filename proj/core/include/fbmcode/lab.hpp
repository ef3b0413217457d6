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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbmcode/grid_paths.hpp"

namespace fbmcode {

enum class Scheme { random_code, concat, increment_lp, waterfill_ref };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Moment sentinel for the essential supremum; reported as the sample maximum.
inline constexpr double kInfMoment = std::numeric_limits<double>::infinity();

struct DistortionRecord {
  Scheme scheme = Scheme::random_code;
  double hurst = 0.5;
  Norm norm = Norm::sup();
  double moment_q = 2.0;
  double rate_nats = 0.0;   ///< realized mean code length; NaN if no sample was coded
  double distortion = 0.0;  ///< (mean d^q)^{1/q}, or max d for q = inf
  std::size_t mc_samples = 0;
  double miss_rate = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const DistortionRecord&, const DistortionRecord&) = default;
};

struct RandomCodeSettings {
  int n_per_unit = 64;
  std::size_t pool_size = 10'000;
  bool fresh_pools = false;  ///< new pool per rate instead of one shared pool
};

struct ConcatSettings {
  int M = 3;
  double d = 1.0;             ///< base radius = per-block budget
  int block_n_per_unit = 32;  ///< grid of one block; paths use n * this on [0,1]
  std::size_t base_pool = 256;
  std::size_t training_blocks = 4096;
};

struct IncrementSettings {
  int block_n_per_unit = 32;
  std::size_t block_codebook = 64;
  double eps_scale = 0.5;
  double kappa_hat = 0.45015815807855303;  ///< sqrt(2)/pi
};

struct WaterfillSettings {
  std::size_t grid_n = 1024;
  std::size_t bm_terms = 1'000'000;
};

struct SweepConfig {
  Scheme scheme = Scheme::random_code;
  double hurst = 0.5;
  Norm norm = Norm::sup();
  double q = 2.0;
  std::vector<double> rates;
  std::size_t mc = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  RandomCodeSettings random;
  ConcatSettings concat;
  IncrementSettings increment;
  WaterfillSettings waterfill;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Per-rate raw measurements behind one record.
struct SweepCell {
  double rate = 0.0;   ///< requested rate
  int blocks = 1;      ///< n used by the block schemes
  std::vector<double> distances;
  std::vector<std::optional<double>> code_lengths;  ///< none on a miss
  std::vector<bool> within_bound;  ///< per-trial deterministic guarantee held
  double bound = 0.0;              ///< per-trial guarantee (sup schemes), 0 if none
  double base_entropy = 0.0;       ///< concat: entropy of the base weights
};

struct SweepResult {
  std::vector<DistortionRecord> records;
  std::vector<SweepCell> cells;
};

SweepResult run_sweep(const SweepConfig& config);
std::vector<DistortionRecord> rd_sweep(const SweepConfig& config);

/// (mean d^q)^{1/q}, or the maximum for q = inf.
double moment_norm(std::span<const double> distances, double q);

struct KappaEstimate {
  double hurst = 0.5;
  Norm norm = Norm::sup();
  std::vector<std::pair<double, double>> values;  ///< (rate, rate^H * distortion), by rate
  std::optional<double> plateau;
};

/// Plateau = mean of the last three normalized values when their spread
/// (max - min) / mean is below 10%.
KappaEstimate kappa_estimate(std::span<const DistortionRecord> records, double hurst);

struct MomentRatioReport {
  double ratio = 1.0;              ///< E[A^q2]^{1/q2} / E[A^q1]^{1/q1}
  double spread_probability = 0.0; ///< P(|A/median - 1| > 0.25)
  double median = 0.0;
};

MomentRatioReport moment_concentration_diag(std::span<const double> distances, double q1, double q2);

struct LogMomentCheck {
  double lhs = 0.0;  ///< E[(log Z)^2]^{1/2}
  double rhs = 0.0;  ///< (1 + sqrt 2)(1 + log E Z)
  bool holds = false;
};

/// Empirical check of E[(log Z)^q]^{1/q} <= c (1 + log E Z) for q = 2, c = 1 + sqrt 2.
LogMomentCheck log_moment_check(std::span<const double> samples, double q = 2.0);

enum class ReportFormat { csv, json };

ReportFormat report_format_from_string(const std::string& name);

void write_report(std::ostream& out, std::span<const DistortionRecord> records, ReportFormat format);
void write_report(const std::filesystem::path& path, std::span<const DistortionRecord> records,
                  ReportFormat format);
std::vector<DistortionRecord> read_report(std::istream& in, ReportFormat format);
std::vector<DistortionRecord> read_report(const std::filesystem::path& path, ReportFormat format);

void write_kappa(std::ostream& out, const KappaEstimate& estimate, ReportFormat format);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write into per-index slots.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace fbmcode
