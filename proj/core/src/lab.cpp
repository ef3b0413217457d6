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

#include "fbmcode/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "fbmcode/codebook.hpp"
#include "fbmcode/concat_coder.hpp"
#include "fbmcode/csv.hpp"
#include "fbmcode/gauss_rd.hpp"
#include "fbmcode/increment_coder.hpp"
#include "fbmcode/random_coder.hpp"

namespace fbmcode {

namespace {

// Stream labels under the root seed.
constexpr std::uint64_t kPathStream = 1;
constexpr std::uint64_t kPoolStream = 2;
constexpr std::uint64_t kBaseStream = 3;
constexpr std::uint64_t kBlockCodebookStream = 4;

void fail(const std::string& field, const std::string& why) {
  throw std::invalid_argument(field + ": " + why);
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::random_code: return "random_code";
    case Scheme::concat: return "concat";
    case Scheme::increment_lp: return "increment_lp";
    case Scheme::waterfill_ref: return "waterfill_ref";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "random_code" || name == "random-code") return Scheme::random_code;
  if (name == "concat") return Scheme::concat;
  if (name == "increment_lp" || name == "increment-lp") return Scheme::increment_lp;
  if (name == "waterfill_ref" || name == "waterfill-ref") return Scheme::waterfill_ref;
  throw std::invalid_argument("scheme: unknown scheme '" + name + "'");
}

void SweepConfig::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0)) fail("hurst", "must lie in (0,1)");
  if (rates.empty()) fail("rates", "must be nonempty");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0) || !std::isfinite(rates[i])) fail("rates", "must be positive and finite");
    if (i > 0 && !(rates[i] > rates[i - 1])) fail("rates", "must be increasing");
  }
  if (!(q > 0.0)) fail("q", "must be positive or inf");
  if (norm.kind == Norm::Kind::lp && !(norm.p >= 1.0 && std::isfinite(norm.p))) fail("p", "must be in [1,inf)");
  switch (scheme) {
    case Scheme::random_code:
      if (mc < 100) fail("mc", "must be >= 100");
      if (random.n_per_unit < 1) fail("n_per_unit", "must be positive");
      if (random.pool_size < 1) fail("pool_size", "must be positive");
      break;
    case Scheme::concat:
      if (mc < 100) fail("mc", "must be >= 100");
      if (concat.M < 2) fail("M", "must be >= 2");
      if (!(concat.d > 0.0)) fail("d", "must be positive");
      if (concat.block_n_per_unit < 1) fail("block_n_per_unit", "must be positive");
      if (concat.base_pool < 1) fail("base_pool", "must be positive");
      break;
    case Scheme::increment_lp:
      if (mc < 100) fail("mc", "must be >= 100");
      if (norm.kind != Norm::Kind::lp) fail("norm", "increment_lp codes in L^p only");
      if (increment.block_n_per_unit < 1) fail("block_n_per_unit", "must be positive");
      if (increment.block_codebook < 2) fail("block_codebook", "must be >= 2");
      if (!(increment.eps_scale > 0.0)) fail("eps_scale", "must be positive");
      if (!(increment.kappa_hat > 0.0)) fail("kappa_hat", "must be positive");
      break;
    case Scheme::waterfill_ref:
      if (norm.kind != Norm::Kind::lp || norm.p != 2.0) fail("norm", "waterfill_ref is defined for lp with p=2 only");
      if (q != 2.0) fail("q", "waterfill_ref is defined for q=2 only");
      if (waterfill.grid_n < 1 || waterfill.grid_n > 4096) fail("grid_n", "must be in [1,4096]");
      break;
  }
}

double moment_norm(std::span<const double> distances, double q) {
  if (distances.empty()) return 0.0;
  if (std::isinf(q)) return *std::max_element(distances.begin(), distances.end());
  double acc = 0.0;
  for (double d : distances) acc += std::pow(d, q);
  return std::pow(acc / static_cast<double>(distances.size()), 1.0 / q);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

int blocks_for_rate(double rate, double per_block) {
  return std::max(1, static_cast<int>(std::lround(rate / per_block)));
}

DistortionRecord summarize(const SweepConfig& config, const SweepCell& cell) {
  DistortionRecord rec;
  rec.scheme = config.scheme;
  rec.hurst = config.hurst;
  rec.norm = config.norm;
  rec.moment_q = config.q;
  rec.seed = config.seed;
  rec.mc_samples = cell.distances.size();
  rec.distortion = moment_norm(cell.distances, config.q);
  double total = 0.0;
  std::size_t hits = 0;
  std::size_t misses = 0;
  for (std::size_t j = 0; j < cell.code_lengths.size(); ++j) {
    if (cell.code_lengths[j]) {
      total += *cell.code_lengths[j];
      ++hits;
    }
    if (!cell.within_bound[j]) ++misses;
  }
  rec.rate_nats = hits ? total / static_cast<double>(hits) : std::numeric_limits<double>::quiet_NaN();
  rec.miss_rate = rec.mc_samples ? static_cast<double>(misses) / static_cast<double>(rec.mc_samples) : 0.0;
  return rec;
}

void resize_cell(SweepCell& cell, std::size_t mc) {
  cell.distances.assign(mc, 0.0);
  cell.code_lengths.assign(mc, std::nullopt);
  cell.within_bound.assign(mc, true);
}

void sweep_random_code(const SweepConfig& config, const RngSpec& root, std::vector<SweepCell>& cells) {
  const auto& s = config.random;
  const FbmSampler sampler(config.hurst, 1, s.n_per_unit);
  std::shared_ptr<const RandomPool> shared;
  if (!s.fresh_pools) {
    shared = std::make_shared<const RandomPool>(
        RandomPool::build(config.hurst, s.n_per_unit, s.pool_size, root.child(kPoolStream)));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto& cell = cells[i];
    auto pool = shared ? shared
                       : std::make_shared<const RandomPool>(RandomPool::build(
                             config.hurst, s.n_per_unit, s.pool_size, root.child(kPoolStream, i + 1)));
    resize_cell(cell, config.mc);
    const double radius = std::pow(cell.rate, -config.hurst);
    cell.bound = radius;
    parallel_for(config.mc, config.threads, [&](std::size_t j) {
      const SampledPath x = sampler.sample(root.child(kPathStream, j));
      const RandomCode code = first_hit(*pool, x, radius);
      if (code.hit()) {
        const auto& entry = pool->path(*code.hit_index - 1);
        cell.distances[j] = config.norm.kind == Norm::Kind::sup ? code.distortion : config.norm.distance(x, entry);
        cell.code_lengths[j] = code.code_length->nats;
      } else {
        cell.distances[j] = fallback_on_miss(*pool, x, config.norm).distortion;
        cell.within_bound[j] = false;
      }
    });
  }
}

void sweep_concat(const SweepConfig& config, const RngSpec& root, std::vector<SweepCell>& cells) {
  const auto& s = config.concat;
  RandomBaseConfig base_config;
  base_config.hurst = config.hurst;
  base_config.n_per_unit = s.block_n_per_unit;
  base_config.pool_size = s.base_pool;
  base_config.radius = s.d;
  base_config.training_blocks = s.training_blocks;
  const BaseQuantizer base = make_random_base(base_config, root.child(kBaseStream));
  const double base_entropy = entropy(base.codebook.weights());
  const double per_block = base_entropy + std::log(static_cast<double>(s.M));
  const ConcatParams params{s.M, s.d};

  for (auto& cell : cells) {
    const int n = blocks_for_rate(cell.rate, per_block);
    cell.blocks = n;
    cell.base_entropy = base_entropy;
    cell.bound = params.error_bound() * std::pow(static_cast<double>(n), -config.hurst);
    resize_cell(cell, config.mc);
    const FbmSampler sampler(config.hurst, 1, n * s.block_n_per_unit);
    parallel_for(config.mc, config.threads, [&](std::size_t j) {
      const SampledPath x = sampler.sample(root.child(kPathStream, j));
      const RescaledCode code = rescale_scheme(x, n, base, params);
      cell.distances[j] = config.norm.distance(x, code.reconstruction.with_kind(x.kind()));
      cell.code_lengths[j] = code.code_length.nats;
      cell.within_bound[j] = code.within_budget;
    });
  }
}

void sweep_increment(const SweepConfig& config, const RngSpec& root, std::vector<SweepCell>& cells) {
  const auto& s = config.increment;
  const FbmSampler block_sampler(config.hurst, 1, s.block_n_per_unit);
  std::vector<SampledPath> entries;
  entries.reserve(s.block_codebook);
  for (std::size_t k = 0; k < s.block_codebook; ++k) {
    entries.push_back(block_sampler.sample(root.child(kBlockCodebookStream, k)).with_kind(PathKind::step));
  }
  const Codebook block_cb(std::move(entries));
  const double block_rate = std::log(static_cast<double>(s.block_codebook));
  const double eps = s.eps_scale * s.kappa_hat * std::pow(block_rate, -config.hurst);
  const double p = config.norm.p;

  for (auto& cell : cells) {
    const int n = blocks_for_rate(cell.rate, block_rate + 2.0);
    cell.blocks = n;
    resize_cell(cell, config.mc);
    const FbmSampler sampler(config.hurst, 1, n * s.block_n_per_unit);
    parallel_for(config.mc, config.threads, [&](std::size_t j) {
      const SampledPath x = sampler.sample(root.child(kPathStream, j));
      const SampledPath scaled = scale_alpha(x, n);
      const LpCode code = encode_lp(scaled, block_cb, eps, p);
      const SampledPath recon = scale_alpha_inv(code.reconstruction, n);
      cell.distances[j] = lp_distance(x, recon, p);
      cell.code_lengths[j] = code.code_length.nats;
      cell.within_bound[j] = code.distortion <= code.block_distortion + eps * (1.0 + 1e-12);
    });
  }
}

void sweep_waterfill(const SweepConfig& config, std::vector<SweepCell>& cells,
                     std::vector<DistortionRecord>& records) {
  const Spectrum spec = config.hurst == 0.5 ? exact_bm_spectrum(config.waterfill.bm_terms)
                                            : covariance_spectrum(config.hurst, config.waterfill.grid_n);
  for (auto& cell : cells) {
    DistortionRecord rec;
    rec.scheme = Scheme::waterfill_ref;
    rec.hurst = config.hurst;
    rec.norm = config.norm;
    rec.moment_q = config.q;
    rec.rate_nats = cell.rate;
    rec.distortion = waterfill(spec, cell.rate);
    rec.mc_samples = 0;
    rec.miss_rate = 0.0;
    rec.seed = config.seed;
    records.push_back(rec);
  }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  const RngSpec root{config.seed, 0};
  SweepResult result;
  result.cells.resize(config.rates.size());
  for (std::size_t i = 0; i < config.rates.size(); ++i) result.cells[i].rate = config.rates[i];

  switch (config.scheme) {
    case Scheme::random_code: sweep_random_code(config, root, result.cells); break;
    case Scheme::concat: sweep_concat(config, root, result.cells); break;
    case Scheme::increment_lp: sweep_increment(config, root, result.cells); break;
    case Scheme::waterfill_ref: sweep_waterfill(config, result.cells, result.records); return result;
  }
  for (const auto& cell : result.cells) result.records.push_back(summarize(config, cell));
  return result;
}

std::vector<DistortionRecord> rd_sweep(const SweepConfig& config) { return run_sweep(config).records; }

// ---------------------------------------------------------------------------
// Estimates and diagnostics

KappaEstimate kappa_estimate(std::span<const DistortionRecord> records, double hurst) {
  KappaEstimate est;
  est.hurst = hurst;
  if (!records.empty()) est.norm = records.front().norm;
  for (const auto& r : records) {
    if (std::isnan(r.rate_nats) || !(r.rate_nats > 0.0)) continue;
    est.values.emplace_back(r.rate_nats, std::pow(r.rate_nats, hurst) * r.distortion);
  }
  std::stable_sort(est.values.begin(), est.values.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (est.values.size() >= 3) {
    const auto tail = std::span(est.values).last(3);
    double lo = tail[0].second, hi = tail[0].second, sum = 0.0;
    for (const auto& v : tail) {
      lo = std::min(lo, v.second);
      hi = std::max(hi, v.second);
      sum += v.second;
    }
    const double mean = sum / 3.0;
    if (mean > 0.0 && (hi - lo) / mean < 0.10) est.plateau = mean;
  }
  return est;
}

MomentRatioReport moment_concentration_diag(std::span<const double> distances, double q1, double q2) {
  if (!(q1 > 0.0 && q1 < q2)) throw std::invalid_argument("moment_concentration_diag: need 0 < q1 < q2");
  if (distances.empty()) throw std::invalid_argument("moment_concentration_diag: no samples");
  MomentRatioReport report;
  const double m1 = moment_norm(distances, q1);
  const double m2 = moment_norm(distances, q2);
  report.ratio = m1 > 0.0 ? m2 / m1 : 1.0;

  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  report.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  std::size_t far = 0;
  for (double a : sorted) {
    const bool outside = report.median > 0.0 ? std::abs(a / report.median - 1.0) > 0.25 : a > 0.0;
    if (outside) ++far;
  }
  report.spread_probability = static_cast<double>(far) / static_cast<double>(n);
  return report;
}

LogMomentCheck log_moment_check(std::span<const double> samples, double q) {
  if (q != 2.0) throw std::invalid_argument("log_moment_check: only q = 2 is supported");
  if (samples.empty()) throw std::invalid_argument("log_moment_check: no samples");
  double sum_z = 0.0;
  double sum_log2 = 0.0;
  for (double z : samples) {
    if (!(z >= 1.0)) throw std::invalid_argument("log_moment_check: samples must be >= 1");
    sum_z += z;
    const double l = std::log(z);
    sum_log2 += l * l;
  }
  const double n = static_cast<double>(samples.size());
  LogMomentCheck check;
  check.lhs = std::sqrt(sum_log2 / n);
  check.rhs = (1.0 + std::numbers::sqrt2) * (1.0 + std::log(sum_z / n));
  check.holds = check.lhs <= check.rhs;
  return check;
}

// ---------------------------------------------------------------------------
// Reports

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("format: expected csv or json, got '" + name + "'");
}

namespace {

constexpr const char* kCsvHeader = "scheme,hurst,norm,p,q,rate_nats,distortion,mc_samples,miss_rate,seed";

double record_p(const DistortionRecord& r) {
  return r.norm.kind == Norm::Kind::sup ? std::numeric_limits<double>::infinity() : r.norm.p;
}

Norm norm_from(const std::string& name, double p) {
  if (name == "sup") return Norm::sup();
  if (name == "lp") return Norm::lp(p);
  throw std::invalid_argument("unknown norm '" + name + "'");
}

nlohmann::json number_or_text(double v) {
  if (std::isinf(v) || std::isnan(v)) return format_double(v);
  return v;
}

double number_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

}  // namespace

void write_report(std::ostream& out, std::span<const DistortionRecord> records, ReportFormat format) {
  if (format == ReportFormat::csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
      out << to_string(r.scheme) << ',' << format_double(r.hurst) << ',' << r.norm.name() << ','
          << format_double(record_p(r)) << ',' << format_double(r.moment_q) << ','
          << format_double(r.rate_nats) << ',' << format_double(r.distortion) << ','
          << r.mc_samples << ',' << format_double(r.miss_rate) << ',' << r.seed << '\n';
    }
    return;
  }
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json o;
    o["scheme"] = to_string(r.scheme);
    o["hurst"] = r.hurst;
    o["norm"] = r.norm.name();
    o["p"] = number_or_text(record_p(r));
    o["q"] = number_or_text(r.moment_q);
    o["rate_nats"] = number_or_text(r.rate_nats);
    o["distortion"] = r.distortion;
    o["mc_samples"] = r.mc_samples;
    o["miss_rate"] = r.miss_rate;
    o["seed"] = r.seed;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

void write_report(const std::filesystem::path& path, std::span<const DistortionRecord> records,
                  ReportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_report(out, records, format);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<DistortionRecord> read_report(std::istream& in, ReportFormat format) {
  std::vector<DistortionRecord> records;
  if (format == ReportFormat::csv) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("report: bad CSV header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != 10) throw std::runtime_error("report: expected 10 fields in '" + line + "'");
      DistortionRecord r;
      r.scheme = scheme_from_string(f[0]);
      r.hurst = parse_double(f[1]);
      r.norm = norm_from(f[2], f[2] == "lp" ? parse_double(f[3]) : 0.0);
      r.moment_q = parse_double(f[4]);
      r.rate_nats = parse_double(f[5]);
      r.distortion = parse_double(f[6]);
      r.mc_samples = std::stoull(f[7]);
      r.miss_rate = parse_double(f[8]);
      r.seed = std::stoull(f[9]);
      records.push_back(r);
    }
    return records;
  }
  const nlohmann::json arr = nlohmann::json::parse(in);
  for (const auto& o : arr) {
    DistortionRecord r;
    r.scheme = scheme_from_string(o.at("scheme").get<std::string>());
    r.hurst = o.at("hurst").get<double>();
    const auto norm = o.at("norm").get<std::string>();
    r.norm = norm_from(norm, norm == "lp" ? number_from(o.at("p")) : 0.0);
    r.moment_q = number_from(o.at("q"));
    r.rate_nats = number_from(o.at("rate_nats"));
    r.distortion = o.at("distortion").get<double>();
    r.mc_samples = o.at("mc_samples").get<std::size_t>();
    r.miss_rate = o.at("miss_rate").get<double>();
    r.seed = o.at("seed").get<std::uint64_t>();
    records.push_back(r);
  }
  return records;
}

std::vector<DistortionRecord> read_report(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  try {
    return read_report(in, format);
  } catch (const std::exception& e) {
    throw std::runtime_error("'" + path.string() + "': " + e.what());
  }
}

void write_kappa(std::ostream& out, const KappaEstimate& estimate, ReportFormat format) {
  if (format == ReportFormat::csv) {
    out << "rate_nats,rH_D\n";
    for (const auto& [rate, value] : estimate.values) out << format_double(rate) << ',' << format_double(value) << '\n';
    out << "# plateau=" << (estimate.plateau ? format_double(*estimate.plateau) : std::string("none")) << '\n';
    return;
  }
  nlohmann::json o;
  o["hurst"] = estimate.hurst;
  o["norm"] = estimate.norm.name();
  auto& values = o["values"] = nlohmann::json::array();
  for (const auto& [rate, value] : estimate.values) values.push_back({{"rate_nats", rate}, {"rH_D", value}});
  o["plateau"] = estimate.plateau ? nlohmann::json(*estimate.plateau) : nlohmann::json(nullptr);
  out << o.dump(2) << '\n';
}

}  // namespace fbmcode
