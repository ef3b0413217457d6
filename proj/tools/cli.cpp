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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fbmcode/codebook.hpp"
#include "fbmcode/concat_coder.hpp"
#include "fbmcode/csv.hpp"
#include "fbmcode/gauss_rd.hpp"
#include "fbmcode/grid_paths.hpp"
#include "fbmcode/increment_coder.hpp"
#include "fbmcode/lab.hpp"

namespace fbmcode::cli {

namespace {

/// Raised for anything the user can fix by changing arguments or the config file.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  std::string format = "csv";
  std::string config;
};

struct SampleOptions {
  double hurst = 0.5;
  int horizon = 1;
  int n_per_unit = 256;
};

struct SweepOptions {
  std::string scheme = "concat";
  double hurst = 0.5;
  std::string norm = "sup";
  double p = 2.0;
  std::string q = "2";
  std::string rates;
  std::size_t mc = 1000;

  int n_per_unit = 64;
  std::size_t pool_size = 10'000;
  bool fresh_pools = false;

  int M = 3;
  double d = 1.0;
  int block_n_per_unit = 32;
  std::size_t base_pool = 256;
  std::size_t training_blocks = 4096;

  std::size_t block_codebook = 64;
  double eps_scale = 0.5;

  std::size_t grid = 1024;
  std::size_t terms = 1'000'000;
};

struct WaterfillOptions {
  std::string spectrum = "exact-bm";
  double hurst = 0.5;
  std::size_t grid = 1024;
  std::size_t terms = 1'000'000;
  std::string rates = "10,100,1000";
};

std::vector<double> parse_list(const std::string& field, const std::string& text) {
  std::vector<double> values;
  try {
    for (const auto& token : split_csv_line(text)) values.push_back(parse_double(token));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field + ": " + e.what());
  }
  return values;
}

double parse_moment(const std::string& text) {
  try {
    return parse_double(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError("q: expected a positive number or 'inf', got '" + text + "'");
  }
}

std::string default_rates(Scheme scheme) {
  switch (scheme) {
    case Scheme::random_code: return "1,2,4";
    case Scheme::waterfill_ref: return "10,100,1000";
    default: return "10,20,50,100";
  }
}

SweepConfig make_sweep(const SweepOptions& o, const CommonOptions& c) {
  SweepConfig cfg;
  try {
    cfg.scheme = scheme_from_string(o.scheme);
    if (o.norm == "sup") {
      cfg.norm = Norm::sup();
    } else if (o.norm == "lp") {
      cfg.norm = Norm::lp(o.p);
    } else {
      throw std::invalid_argument("norm: expected sup or lp, got '" + o.norm + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.hurst = o.hurst;
  cfg.q = parse_moment(o.q);
  cfg.rates = parse_list("rates", o.rates.empty() ? default_rates(cfg.scheme) : o.rates);
  cfg.mc = o.mc;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  cfg.random = {o.n_per_unit, o.pool_size, o.fresh_pools};
  cfg.concat = {o.M, o.d, o.block_n_per_unit, o.base_pool, o.training_blocks};
  cfg.increment.block_n_per_unit = o.block_n_per_unit;
  cfg.increment.block_codebook = o.block_codebook;
  cfg.increment.eps_scale = o.eps_scale;
  cfg.waterfill = {o.grid, o.terms};
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ReportFormat make_format(const std::string& name) {
  try {
    return report_format_from_string(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void add_common(CLI::App& app, CommonOptions& c) {
  app.add_option("--seed", c.seed, "Root seed")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads (output does not depend on it)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "Output file; relative paths resolve against $" + std::string(kOutputDirEnv) +
                                     " when set (default: stdout)");
  app.add_option("--format", c.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", c.config, "Flat key=value file with default flag values; flags override it");
}

void add_sweep(CLI::App& app, SweepOptions& o) {
  app.add_option("--scheme", o.scheme, "random_code | concat | increment_lp | waterfill_ref")
      ->capture_default_str();
  app.add_option("--hurst", o.hurst, "Hurst index in (0,1)")->capture_default_str();
  app.add_option("--norm", o.norm, "sup | lp")->capture_default_str();
  app.add_option("--p", o.p, "Exponent of the lp norm")->capture_default_str();
  app.add_option("--q", o.q, "Moment of the distortion, or inf")->capture_default_str();
  app.add_option("--rates", o.rates, "Comma-separated increasing rates in nats (default depends on scheme)");
  app.add_option("--mc", o.mc, "Monte Carlo paths per rate")->capture_default_str();
  app.add_option("--n-per-unit", o.n_per_unit, "random_code: grid points per unit")->capture_default_str();
  app.add_option("--pool-size", o.pool_size, "random_code: pool size")->capture_default_str();
  app.add_flag("--fresh-pools", o.fresh_pools, "random_code: draw a new pool for every rate");
  app.add_option("--M", o.M, "concat: offsets per block boundary")->capture_default_str();
  app.add_option("--d", o.d, "concat: per-block error budget")->capture_default_str();
  app.add_option("--block-n-per-unit", o.block_n_per_unit, "concat, increment_lp: grid points per block")
      ->capture_default_str();
  app.add_option("--base-pool", o.base_pool, "concat: base codebook size")->capture_default_str();
  app.add_option("--training-blocks", o.training_blocks, "concat: blocks used to estimate base weights")
      ->capture_default_str();
  app.add_option("--block-codebook", o.block_codebook, "increment_lp: block codebook size")->capture_default_str();
  app.add_option("--eps-scale", o.eps_scale, "increment_lp: level accuracy multiplier")->capture_default_str();
  app.add_option("--grid", o.grid, "waterfill_ref: discretization size for H != 0.5")->capture_default_str();
  app.add_option("--terms", o.terms, "waterfill_ref: exact eigenvalues kept at H = 0.5")->capture_default_str();
}

// ---------------------------------------------------------------------------
// Config file

std::vector<std::string> read_config_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || key == "config") {
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) + ": invalid key");
    }
    if (key == "fresh-pools") {
      if (value == "true" || value == "1") args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

/// Locates --config in the user arguments so its contents can be spliced in
/// ahead of the explicit flags.
std::optional<std::string> find_config(std::span<const std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Output

std::filesystem::path resolve_out(const std::string& out) {
  std::filesystem::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      path = std::filesystem::path(dir) / path;
    }
  }
  return path;
}

void emit(const std::string& text, const CommonOptions& c, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  const auto path = resolve_out(c.out);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  file << text;
  file.flush();
  if (!file) throw std::runtime_error("write to '" + path.string() + "' failed");
}

// ---------------------------------------------------------------------------
// Subcommands

std::string do_sample(const SampleOptions& o, const CommonOptions& c) {
  if (!(o.hurst > 0.0 && o.hurst < 1.0)) throw ConfigError("hurst: must lie in (0,1)");
  if (o.horizon < 1) throw ConfigError("horizon: must be positive");
  if (o.n_per_unit < 1) throw ConfigError("n-per-unit: must be positive");
  const ReportFormat format = make_format(c.format);

  const SampledPath path = sample_fbm(o.hurst, o.horizon, o.n_per_unit, RngSpec{c.seed, 0});
  std::ostringstream text;
  if (format == ReportFormat::csv) {
    text << "t,value\n";
    for (std::size_t k = 0; k < path.values().size(); ++k) {
      text << format_double(path.time(k)) << ',' << format_double(path[k]) << '\n';
    }
  } else {
    nlohmann::json j;
    j["hurst"] = o.hurst;
    j["horizon"] = o.horizon;
    j["n_per_unit"] = o.n_per_unit;
    j["seed"] = c.seed;
    j["values"] = std::vector<double>(path.values().begin(), path.values().end());
    text << j.dump(2) << '\n';
  }
  return text.str();
}

std::string do_rd(const SweepOptions& o, const CommonOptions& c) {
  const SweepConfig cfg = make_sweep(o, c);
  const ReportFormat format = make_format(c.format);
  const auto records = rd_sweep(cfg);
  std::ostringstream text;
  write_report(text, records, format);
  return text.str();
}

std::string do_kappa(const SweepOptions& o, const CommonOptions& c) {
  const SweepConfig cfg = make_sweep(o, c);
  const ReportFormat format = make_format(c.format);
  const auto records = rd_sweep(cfg);
  std::ostringstream text;
  write_kappa(text, kappa_estimate(records, cfg.hurst), format);
  return text.str();
}

std::string do_waterfill(const WaterfillOptions& o, const CommonOptions& c) {
  const ReportFormat format = make_format(c.format);
  const auto rates = parse_list("rates", o.rates);
  if (rates.empty()) throw ConfigError("rates: must be nonempty");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0) || (i > 0 && !(rates[i] > rates[i - 1]))) {
      throw ConfigError("rates: must be positive and increasing");
    }
  }
  std::optional<Spectrum> spec;
  if (o.spectrum == "exact-bm") {
    if (o.terms < 1) throw ConfigError("terms: must be positive");
    spec = exact_bm_spectrum(o.terms);
  } else if (o.spectrum == "discretized") {
    if (!(o.hurst > 0.0 && o.hurst < 1.0)) throw ConfigError("hurst: must lie in (0,1)");
    if (o.grid < 1 || o.grid > 4096) throw ConfigError("grid: must be in [1,4096]");
    spec = covariance_spectrum(o.hurst, o.grid);
  } else {
    throw ConfigError("spectrum: expected exact-bm or discretized, got '" + o.spectrum + "'");
  }
  const auto curve = kappa_rd_estimate(*spec, rates);
  std::ostringstream text;
  if (format == ReportFormat::csv) {
    write_curve_csv(text, curve);
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : curve) arr.push_back({{"r", p.rate}, {"D", p.distortion}, {"rH_D", p.normalized}});
    text << arr.dump(2) << '\n';
  }
  return text.str();
}

struct Check {
  std::string name;
  bool ok = true;
  std::string detail;
};

Check check_concat_bound(std::uint64_t seed) {
  Check check{"concat_sup_bound"};
  std::size_t qualified = 0, violations = 0;
  const RngSpec root{seed, 0};
  for (double hurst : {0.3, 0.5, 0.7}) {
    RandomBaseConfig bc;
    bc.hurst = hurst;
    bc.n_per_unit = 16;
    bc.pool_size = 128;
    bc.training_blocks = 256;
    const BaseQuantizer base = make_random_base(bc, root.child(1, static_cast<std::uint64_t>(hurst * 10)));
    const FbmSampler sampler(hurst, 1, 8 * bc.n_per_unit);
    for (int M : {2, 3, 8}) {
      const ConcatParams params{M, 1.0};
      for (std::uint64_t j = 0; j < 40; ++j) {
        const SampledPath x = sampler.sample(root.child(2, j));
        const RescaledCode code = rescale_scheme(x, 8, base, params);
        if (!code.within_budget) continue;
        ++qualified;
        if (code.error_on_horizon > params.error_bound() * (1.0 + 1e-12)) ++violations;
      }
    }
  }
  check.ok = violations == 0 && qualified > 0;
  check.detail = std::to_string(qualified) + " qualifying paths, " + std::to_string(violations) + " violations";
  return check;
}

Check check_increment_bound(std::uint64_t seed) {
  Check check{"increment_linf_bound"};
  Engine engine = make_engine(RngSpec{seed, 0}.child(3));
  std::normal_distribution<double> normal;
  std::size_t violations = 0;
  const double eps = 0.1;
  for (int walk = 0; walk < 1000; ++walk) {
    std::vector<double> sums(64);
    double s = 0.0;
    for (auto& v : sums) v = (s += normal(engine));
    const auto decoded = decode_sums(encode_sums(sums, eps));
    for (std::size_t i = 0; i < sums.size(); ++i) {
      if (std::abs(sums[i] - decoded[i]) > eps + 1e-12 * std::max(1.0, std::abs(sums[i]))) ++violations;
    }
  }
  check.ok = violations == 0;
  check.detail = std::to_string(violations) + " violations over 1000 walks";
  return check;
}

Check check_scaling(std::uint64_t seed) {
  Check check{"scaling_identities"};
  double worst = 0.0;
  for (double hurst : {0.3, 0.5, 0.7}) {
    const SampledPath f = sample_fbm(hurst, 1, 256, RngSpec{seed, 0}.child(4));
    for (int n : {2, 4, 8}) {
      const SampledPath g = scale_alpha(f, n);
      const double factor = std::pow(static_cast<double>(n), hurst);
      for (std::size_t k = 0; k < g.values().size(); ++k) worst = std::max(worst, std::abs(g[k] - factor * f[k]));
      worst = std::max(worst, sup_distance(scale_alpha_inv(g, n), f));
    }
  }
  check.ok = worst <= 1e-12;
  check.detail = "max deviation " + format_double(worst);
  return check;
}

Check check_gibbs(std::uint64_t seed) {
  Check check{"gibbs_inequality"};
  Engine engine = make_engine(RngSpec{seed, 0}.child(5));
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  std::size_t violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t dim = 2 + static_cast<std::size_t>(trial % 19);
    std::vector<double> q(dim), p(dim);
    double sq = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      sq += q[i] = unit(engine);
      sp += p[i] = unit(engine);
    }
    for (std::size_t i = 0; i < dim; ++i) {
      q[i] /= sq;
      p[i] /= sp;
    }
    if (cross_entropy(q, p) < entropy(q) - 1e-12) ++violations;
  }
  check.ok = violations == 0;
  check.detail = std::to_string(violations) + " violations over 200 pairs";
  return check;
}

Check check_waterfill_scalar() {
  Check check{"waterfill_scalar_closed_form"};
  const Spectrum spec({0.7}, 0.0, SpectrumSource::discretized, 0.5, 1);
  double worst = 0.0;
  for (double r : {0.1, 1.0, 3.0, 10.0}) {
    worst = std::max(worst, std::abs(waterfill(spec, r) - std::sqrt(0.7) * std::exp(-r)) / std::exp(-r));
  }
  check.ok = worst <= 1e-9;
  check.detail = "max relative deviation " + format_double(worst);
  return check;
}

int do_selftest(const CommonOptions& c, std::ostream& out) {
  const std::vector<Check> checks = {check_concat_bound(c.seed), check_increment_bound(c.seed),
                                     check_scaling(c.seed), check_gibbs(c.seed), check_waterfill_scalar()};
  std::ostringstream text;
  bool all = true;
  for (const auto& ch : checks) {
    text << (ch.ok ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << '\n';
    all = all && ch.ok;
  }
  emit(text.str(), c, out);
  return all ? kOk : kRuntimeFailure;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coding schemes and rate-distortion experiments for fractional Brownian motion", "fbmcode"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  CommonOptions common;
  SampleOptions sample_opts;
  SweepOptions sweep_opts;
  WaterfillOptions wf_opts;

  auto* sample = app.add_subcommand("sample", "Emit one FBM path as CSV (t,value)");
  add_common(*sample, common);
  sample->add_option("--hurst", sample_opts.hurst, "Hurst index in (0,1)")->capture_default_str();
  sample->add_option("--horizon", sample_opts.horizon, "Path length in time units")->capture_default_str();
  sample->add_option("--n-per-unit", sample_opts.n_per_unit, "Grid points per unit")->capture_default_str();

  auto* rd = app.add_subcommand("rd", "Rate-distortion sweep, one record per rate");
  add_common(*rd, common);
  add_sweep(*rd, sweep_opts);

  auto* kappa = app.add_subcommand("kappa", "Normalized curve rate^H * D and its plateau");
  add_common(*kappa, common);
  add_sweep(*kappa, sweep_opts);

  auto* wf = app.add_subcommand("waterfill", "Gaussian L2 distortion-rate curve by reverse water-filling");
  add_common(*wf, common);
  wf->add_option("--spectrum", wf_opts.spectrum, "exact-bm | discretized")->capture_default_str();
  wf->add_option("--hurst", wf_opts.hurst, "Hurst index for the discretized spectrum")->capture_default_str();
  wf->add_option("--grid", wf_opts.grid, "Discretization size")->capture_default_str();
  wf->add_option("--terms", wf_opts.terms, "Exact eigenvalues kept before the analytic tail")
      ->capture_default_str();
  wf->add_option("--rates", wf_opts.rates, "Comma-separated increasing rates in nats")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Check the exact deterministic invariants");
  add_common(*selftest, common);

  try {
    std::vector<std::string> full(args.begin(), args.end());
    if (const auto config = find_config(args); config && !full.empty()) {
      const auto extra = read_config_args(*config);
      full.insert(full.begin() + 1, extra.begin(), extra.end());
    }
    std::reverse(full.begin(), full.end());
    app.parse(full);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (sample->parsed()) emit(do_sample(sample_opts, common), common, out);
    if (rd->parsed()) emit(do_rd(sweep_opts, common), common, out);
    if (kappa->parsed()) emit(do_kappa(sweep_opts, common), common, out);
    if (wf->parsed()) emit(do_waterfill(wf_opts, common), common, out);
    if (selftest->parsed()) return do_selftest(common, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace fbmcode::cli
