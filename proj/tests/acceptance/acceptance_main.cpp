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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "fbmcode/codebook.hpp"
#include "fbmcode/concat_coder.hpp"
#include "fbmcode/gauss_rd.hpp"
#include "fbmcode/grid_paths.hpp"
#include "fbmcode/increment_coder.hpp"
#include "fbmcode/lab.hpp"
#include "fbmcode/random_coder.hpp"

#ifdef FBMCODE_HAVE_CLI
#include "cli.hpp"
#endif

using namespace fbmcode;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const double kKappaBm = std::numbers::sqrt2 / std::numbers::pi;

// 1. Brownian L2 anchor and plateau.
Outcome kappa_anchor() {
  const auto start = std::chrono::steady_clock::now();
  const Spectrum s = exact_bm_spectrum(1'000'000);
  const double at_1000 = std::sqrt(1000.0) * waterfill(s, 1000.0);
  SweepConfig c;
  c.scheme = Scheme::waterfill_ref;
  c.norm = Norm::lp(2);
  c.rates = {1e2, 1e3, 1e4};
  c.waterfill.bm_terms = 1'000'000;
  const KappaEstimate k = kappa_estimate(rd_sweep(c), 0.5);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double rel = std::abs(at_1000 / kKappaBm - 1.0);
  return {rel <= 0.02 && k.plateau.has_value() && secs < 10.0,
          fmt("r^1/2 D(1000)=%.6f target=%.6f rel=%.4f plateau=%s runtime=%.2fs<10s", at_1000, kKappaBm, rel,
              k.plateau ? fmt("%.6f", *k.plateau).c_str() : "none", secs)};
}

// 2. Error propagation of the concatenation coder.
Outcome concat_bound() {
  const auto start = std::chrono::steady_clock::now();
  const int n = 8, npu = 16, paths = 1000;
  const double d = 1.0;
  std::size_t qualifying = 0, violations = 0, trials = 0;
  double worst_ratio = 0.0;
  for (double hurst : {0.3, 0.5, 0.7}) {
    RandomBaseConfig bc;
    bc.hurst = hurst;
    bc.n_per_unit = npu;
    bc.pool_size = 128;
    bc.radius = d;
    bc.training_blocks = 1024;
    const BaseQuantizer base = make_random_base(bc, RngSpec{201, static_cast<std::uint64_t>(hurst * 10)});
    const FbmSampler sampler(hurst, n, npu);
    for (int M : {2, 3, 8}) {
      const ConcatParams params{M, d};
      for (int t = 0; t < paths; ++t) {
        const SampledPath w = sampler.sample(RngSpec{202, static_cast<std::uint64_t>(hurst * 10)}.child(M, t));
        const ConcatCodeword cw = encode_concat(w, base, params);
        ++trials;
        const auto errs = block_errors(w, cw, base);
        if (*std::max_element(errs.begin(), errs.end()) > d) continue;
        ++qualifying;
        const double err = sup_distance(w, decode_concat(cw, base));
        worst_ratio = std::max(worst_ratio, err / params.error_bound());
        if (err > params.error_bound() * (1.0 + 1e-12)) ++violations;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {violations == 0 && qualifying > trials / 2 && secs < 120.0,
          fmt("trials=%zu qualifying=%zu violations=%zu worst error/bound=%.4f runtime=%.1fs<120s", trials,
              qualifying, violations, worst_ratio, secs)};
}

// 3. Realized concat rate per block against log M + base entropy.
Outcome entropy_accounting() {
  RandomBaseConfig bc;
  bc.hurst = 0.5;
  bc.n_per_unit = 16;
  bc.pool_size = 64;
  bc.radius = 1.0;
  bc.training_blocks = 20'000;
  const BaseQuantizer base = make_random_base(bc, RngSpec{301, 0});
  const int n = 8, paths = 1000, M = 3;
  const FbmSampler sampler(0.5, n, 16);
  std::vector<double> per_block(paths);
  for (int t = 0; t < paths; ++t) {
    const SampledPath w = sampler.sample(RngSpec{302, static_cast<std::uint64_t>(t)});
    per_block[t] = concat_code_length(encode_concat(w, base, ConcatParams{M, 1.0}), base).nats / n;
  }
  double mean = 0, sq = 0;
  for (double v : per_block) mean += v;
  mean /= paths;
  for (double v : per_block) sq += (v - mean) * (v - mean);
  const double se = std::sqrt(sq / (paths - 1) / paths);
  const double target = std::log(static_cast<double>(M)) + entropy(base.codebook.weights());
  return {mean <= target + 3.0 * se,
          fmt("mean per block=%.4f log M + H(base)=%.4f 3SE=%.4f", mean, target, 3.0 * se)};
}

// 4. Increment coder accuracy and per-symbol code length.
Outcome increment_coder() {
  std::mt19937_64 rng(401);
  std::normal_distribution<double> z(0.0, 1.0);
  const double c = increment_weight_constant();
  const std::vector<double> eps_values{0.05, 0.25, 1.0};
  std::size_t violations = 0, worst_case = 0;
  double worst_margin = -1e300;
  for (int w = 0; w < 10'000; ++w) {
    const double eps = eps_values[w % eps_values.size()];
    std::vector<double> sums(100);
    double s = 0.0, log_bound = 0.0;
    for (auto& v : sums) {
      const double step = z(rng);
      log_bound += std::log(std::abs(step) / (2.0 * eps) + 2.0);
      v = (s += step);
    }
    const IncrementCode code = encode_sums(sums, eps);
    const auto rec = decode_sums(code);
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (std::abs(sums[i] - rec[i]) > eps * (1.0 + 1e-12)) ++violations;
    }
    const double per_symbol = code.code_length.nats / sums.size();
    const double bound = 2.0 * log_bound / sums.size() + 2.0 * c + 0.05;
    if (per_symbol > bound) ++worst_case;
    worst_margin = std::max(worst_margin, per_symbol - bound);
  }
  return {violations == 0 && worst_case == 0,
          fmt("walks=10000 l_inf violations=%zu code-length violations=%zu max(len-bound)=%.4f", violations,
              worst_case, worst_margin)};
}

// 5. Conditional law of the first-hit index.
Outcome random_coder_geometric() {
  const FbmSampler sampler(0.5, 1, 16);
  const SampledPath x = sample_fbm(0.5, 1, 16, RngSpec{501, 0});
  const double radius = 1.0;
  const double p = smallball_conditional(sampler, x, radius, 1'000'000, RngSpec{501, 1}).estimate;
  const std::size_t pools = 10'000;
  std::vector<std::size_t> index(pools);
  std::size_t misses = 0, length_mismatch = 0;
  const double zeta_const = std::log(std::numbers::pi * std::numbers::pi / 6.0);
  for (std::size_t t = 0; t < pools; ++t) {
    Engine engine = make_engine(RngSpec{501, 2}.child(t));
    const RandomCode code = first_hit_streamed(sampler, engine, x, radius, 1'000'000);
    if (!code.hit()) {
      ++misses;
      continue;
    }
    index[t] = *code.hit_index;
    const double want = 2.0 * std::log(static_cast<double>(index[t])) + zeta_const;
    if (code.code_length->nats != want) ++length_mismatch;
  }
  std::vector<double> expect;
  double head = 0.0;
  for (std::size_t k = 1;; ++k) {
    const double e = pools * p * std::pow(1.0 - p, static_cast<double>(k - 1));
    if (e < 10.0) break;
    expect.push_back(e);
    head += e;
  }
  expect.push_back(pools - head);
  const std::size_t bins = expect.size();
  std::vector<double> observed(bins, 0.0);
  for (std::size_t k : index) {
    if (k > 0) observed[std::min(k, bins) - 1] += 1.0;
  }
  double chi2 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) chi2 += (observed[b] - expect[b]) * (observed[b] - expect[b]) / expect[b];
  const double pvalue =
      boost::math::cdf(boost::math::complement(boost::math::chi_squared(static_cast<double>(bins - 1)), chi2));
  return {misses == 0 && length_mismatch == 0 && pvalue > 0.01 && bins >= 3,
          fmt("pools=%zu hit prob=%.4f bins=%zu chi2=%.2f p-value=%.4f misses=%zu code-length mismatches=%zu", pools,
              p, bins, chi2, pvalue, misses, length_mismatch)};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// 6. Log-log slope of the discretized distortion-rate curve.
Outcome scaling_law() {
  bool ok = true;
  std::string detail;
  for (double hurst : {0.3, 0.5, 0.7}) {
    const Spectrum s = covariance_spectrum(hurst, 2048);
    std::vector<double> lx, ly;
    for (int i = 0; i <= 40; ++i) {
      const double r = 10.0 * std::pow(100.0, i / 40.0);
      lx.push_back(std::log(r));
      ly.push_back(std::log(waterfill(s, r)));
    }
    const double b = slope(lx, ly);
    ok = ok && std::abs(b + hurst) <= 0.05;
    detail += fmt("H=%.1f slope=%.4f ", hurst, b);
  }
  return {ok, detail + "(target -H +- 0.05)"};
}

// 7. Every L2 record sits on or above the Gaussian distortion-rate curve of its grid.
Outcome converse() {
  std::vector<SweepConfig> configs;
  SweepConfig inc;
  inc.scheme = Scheme::increment_lp;
  inc.norm = Norm::lp(2);
  inc.rates = {10, 30, 100, 300};
  inc.mc = 200;
  inc.seed = 701;
  inc.increment.block_n_per_unit = 16;
  inc.increment.block_codebook = 64;
  configs.push_back(inc);
  SweepConfig rnd;
  rnd.scheme = Scheme::random_code;
  rnd.norm = Norm::lp(2);
  rnd.rates = {1, 2, 4, 8};
  rnd.mc = 200;
  rnd.seed = 702;
  rnd.random.pool_size = 4000;
  configs.push_back(rnd);
  SweepConfig cat;
  cat.scheme = Scheme::concat;
  cat.norm = Norm::lp(2);
  cat.rates = {10, 50, 200};
  cat.mc = 200;
  cat.seed = 703;
  cat.concat.block_n_per_unit = 16;
  cat.concat.base_pool = 128;
  cat.concat.training_blocks = 1024;
  configs.push_back(cat);

  std::size_t checked = 0, violations = 0;
  double min_gap = 1e300;
  for (double hurst : {0.3, 0.5, 0.7}) {
    for (SweepConfig c : configs) {
      c.hurst = hurst;
      const SweepResult res = run_sweep(c);
      for (std::size_t i = 0; i < res.records.size(); ++i) {
        const DistortionRecord& rec = res.records[i];
        if (std::isnan(rec.rate_nats)) continue;
        const int grid = c.scheme == Scheme::random_code
                             ? c.random.n_per_unit
                             : res.cells[i].blocks * (c.scheme == Scheme::concat ? c.concat.block_n_per_unit
                                                                                 : c.increment.block_n_per_unit);
        const Spectrum s = covariance_spectrum(hurst, static_cast<std::size_t>(grid), QuadratureRule::left);
        const double gap = rec.distortion - waterfill(s, rec.rate_nats);
        min_gap = std::min(min_gap, gap);
        ++checked;
        if (gap < -1e-6) ++violations;
      }
    }
  }
  return {violations == 0 && checked > 0,
          fmt("records=%zu violations=%zu min(D - D_rd)=%.4f", checked, violations, min_gap)};
}

// 8. Normalized sup-norm curve of the concatenation coder at H = 1/2.
Outcome sup_consistency() {
  SweepConfig c;
  c.scheme = Scheme::concat;
  c.hurst = 0.5;
  c.norm = Norm::sup();
  c.rates = {50, 100, 200, 400};
  c.mc = 200;
  c.seed = 801;
  c.concat.block_n_per_unit = 16;
  c.concat.base_pool = 128;
  c.concat.training_blocks = 1024;
  const KappaEstimate k = kappa_estimate(rd_sweep(c), 0.5);
  const double floor = std::numbers::pi / std::sqrt(8.0);
  double lowest = 1e300;
  std::string detail;
  for (const auto& [rate, value] : k.values) {
    if (rate < 50.0) continue;
    lowest = std::min(lowest, value);
    detail += fmt("r=%.1f:%.3f ", rate, value);
  }
  return {lowest >= floor && lowest < 1e300, detail + fmt("min=%.4f floor pi/sqrt8=%.4f", lowest, floor)};
}

// 9. Thread count never changes the bytes of a report.
Outcome determinism() {
#ifdef FBMCODE_HAVE_CLI
  const std::vector<std::vector<std::string>> commands{
      {"rd", "--scheme", "concat", "--rates", "10,50", "--mc", "100", "--block-n-per-unit", "16", "--base-pool",
       "64", "--training-blocks", "256", "--seed", "901"},
      {"rd", "--scheme", "random_code", "--norm", "lp", "--p", "2", "--rates", "1,2,4", "--mc", "100",
       "--pool-size", "1000", "--seed", "902", "--format", "json"},
      {"rd", "--scheme", "increment_lp", "--norm", "lp", "--p", "2", "--rates", "10,30", "--mc", "100",
       "--block-n-per-unit", "16", "--block-codebook", "32", "--seed", "903"},
      {"kappa", "--scheme", "concat", "--hurst", "0.7", "--rates", "10,20,40", "--mc", "100",
       "--block-n-per-unit", "16", "--base-pool", "64", "--training-blocks", "256", "--seed", "904"},
      {"sample", "--hurst", "0.3", "--n-per-unit", "256", "--seed", "905"}};
  std::size_t mismatches = 0, failures = 0;
  for (const auto& base : commands) {
    std::string reference;
    for (const char* threads : {"1", "2", "4"}) {
      std::vector<std::string> args = base;
      args.insert(args.end(), {"--threads", threads});
      std::ostringstream out, err;
      if (cli::run(args, out, err) != 0) ++failures;
      if (reference.empty()) {
        reference = out.str();
      } else if (out.str() != reference) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0 && failures == 0,
          fmt("commands=%zu thread counts={1,2,4} mismatches=%zu failed runs=%zu", commands.size(), mismatches,
              failures)};
#else
  return {false, "command-line tool not built"};
#endif
}

// 10. Log-moment inequality and the two-point moment ratio.
Outcome appendix_properties() {
  std::mt19937_64 rng(1001);
  std::size_t failures = 0;
  double worst = 0.0;
  for (int family = 0; family < 1000; ++family) {
    std::vector<double> z(1000);
    const double scale = std::exp(std::uniform_real_distribution<double>(0.0, 7.0)(rng));
    switch (family % 5) {
      case 0: {
        std::geometric_distribution<int> g(1.0 / scale);
        for (auto& v : z) v = 1.0 + g(rng);
        break;
      }
      case 1: {
        std::lognormal_distribution<double> g(0.0, std::log1p(scale) / 3.0);
        for (auto& v : z) v = 1.0 + g(rng);
        break;
      }
      case 2: {
        std::uniform_real_distribution<double> g(1.0, 1.0 + scale);
        for (auto& v : z) v = g(rng);
        break;
      }
      case 3: {
        std::bernoulli_distribution g(0.5);
        for (auto& v : z) v = g(rng) ? 1.0 : 1.0 + scale;
        break;
      }
      default: {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double alpha = 1.1 + 3.0 * u(rng);
        for (auto& v : z) v = std::pow(1.0 - u(rng), -1.0 / alpha);  // Pareto on [1, inf)
        break;
      }
    }
    const LogMomentCheck c = log_moment_check(z);
    if (!c.holds) ++failures;
    worst = std::max(worst, c.lhs / c.rhs);
  }
  const double ratio = moment_concentration_diag(std::vector<double>{0.0, 1.0}, 1.0, 2.0).ratio;
  const double err = std::abs(ratio - std::numbers::sqrt2);
  return {failures == 0 && err <= 1e-9,
          fmt("distributions=1000 failures=%zu max lhs/rhs=%.4f two-point ratio=%.12f |err|=%.1e", failures, worst,
              ratio, err)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"C1 kappa anchor", kappa_anchor},
      {"C2 concatenation bound", concat_bound},
      {"C3 entropy accounting", entropy_accounting},
      {"C4 increment coder", increment_coder},
      {"C5 random coder geometric law", random_coder_geometric},
      {"C6 scaling law", scaling_law},
      {"C7 converse", converse},
      {"C8 sup-norm consistency", sup_consistency},
      {"C9 determinism", determinism},
      {"C10 log-moment properties", appendix_properties},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
