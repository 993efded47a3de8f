// Copyright 2026 The privlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "privlearn/bitvec.hpp"
#include "privlearn/dp.hpp"
#include "privlearn/exp_mech.hpp"
#include "privlearn/learning.hpp"
#include "privlearn/local.hpp"
#include "privlearn/masked_parity.hpp"
#include "privlearn/parity.hpp"
#include "privlearn/rng.hpp"
#include "privlearn/sq.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace privlearn;

// Stream-id spacing between phases of one run; trial counts are validated to
// stay below it so per-trial streams never collide.
constexpr std::uint64_t kPhaseStride = 1'000'000;
// Stream-id spacing between the points of a parameter sweep.
constexpr std::uint64_t kSweepStride = 50'000'000;

// ---------------------------------------------------------------------------
// Formatting and artifact plumbing
// ---------------------------------------------------------------------------

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string CsvField(const std::string& s) { return s; }
std::string CsvField(const char* s) { return std::string(s); }
std::string CsvField(double v) { return FormatDouble(v); }
std::string CsvField(bool v) { return v ? "1" : "0"; }
template <class T, std::enable_if_t<std::is_integral_v<T> && !std::is_same_v<T, bool>, int> = 0>
std::string CsvField(T v) {
  return std::to_string(v);
}

template <class... Ts>
std::string CsvLine(const Ts&... fields) {
  std::string line;
  const char* sep = "";
  ((line += sep, line += CsvField(fields), sep = ","), ...);
  return line;
}

struct CsvSink {
  std::string header;
  std::vector<std::string> rows;
};

void WriteTextFile(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path);
}

unsigned ResolveThreads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Runs body(0..count-1) on a worker pool. Each body call must touch only its
// own slot of any shared output, so results are identical for any thread
// count; the first exception wins and is rethrown after the pool drains.
void ParallelTrials(std::size_t count, unsigned threads,
                    const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = std::min<std::size_t>(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&]() {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        stop.store(true, std::memory_order_relaxed);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;
};

void AddCommonFlags(CLI::App* cmd, CommonOpts& common, const std::string& default_out) {
  common.out = default_out;
  cmd->add_option("--seed", common.seed, "Root seed; every trial derives its own stream from it")
      ->required();
  cmd->add_option("--out", common.out,
                  "Output basename; writes <out>.summary.json and <out>.trials.csv")
      ->capture_default_str();
  cmd->add_option("--threads", common.threads, "Worker threads for trials (0 = hardware count)")
      ->capture_default_str();
  cmd->fallthrough();
}

// Routes bare key=value lines from a config file to the subcommand being run, so
// the file can name that subcommand's flags without section headers.  Sectioned
// keys (e.g. [learn-parity]) pass through untouched.
class SubcommandConfig : public CLI::ConfigBase {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigBase::from_config(input);
    const std::vector<CLI::App*> active = app_->get_subcommands();
    if (!active.empty()) {
      const std::string& name = active.front()->get_name();
      for (CLI::ConfigItem& item : items) {
        if (item.parents.empty() && item.name != "++" && item.name != "--") {
          item.parents.push_back(name);
        }
      }
    }
    return items;
  }

 private:
  const CLI::App* app_;
};

void FinishRun(const CommonOpts& common, const std::string& experiment, json config,
               const json& results, bool pass, const CsvSink& csv,
               std::chrono::steady_clock::time_point started) {
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  config["seed"] = common.seed;
  config["threads"] = common.threads;
  json summary;
  summary["experiment"] = experiment;
  summary["config"] = std::move(config);
  summary["results"] = results;
  summary["pass"] = pass;
  summary["elapsed_seconds"] = elapsed;
  std::string csv_text = csv.header;
  csv_text += '\n';
  for (const std::string& row : csv.rows) {
    csv_text += row;
    csv_text += '\n';
  }
  WriteTextFile(common.out + ".summary.json", summary.dump(2) + "\n");
  WriteTextFile(common.out + ".trials.csv", csv_text);
  std::printf("%s\n", results.dump(2).c_str());
  std::printf("%s: pass=%s; wrote %s.summary.json and %s.trials.csv\n", experiment.c_str(),
              pass ? "true" : "false", common.out.c_str(), common.out.c_str());
}

void ValidateTrials(std::size_t trials, const char* what = "trials") {
  if (trials == 0 || trials > kPhaseStride) {
    throw std::invalid_argument(std::string(what) + " must be in [1, 1000000]");
  }
}

double TotalVariation(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

std::string SignPatternString(std::uint64_t mask, std::size_t bits) {
  std::string s(bits, '-');
  for (std::size_t i = 0; i < bits; ++i) {
    if ((mask >> i) & 1) s[i] = '+';
  }
  return s;
}

// ---------------------------------------------------------------------------
// learn-parity
// ---------------------------------------------------------------------------

struct LearnParityOpts {
  std::size_t d = 8;
  double epsilon = 0.5;
  double alpha = 0.2;
  double beta = 0.1;
  std::size_t trials = 300;
  std::size_t n = 0;  // 0 = the mode's required sample size
  std::string mode = "amplified";
  double c = 20.0;
  double c_prime = 48.0;
  std::vector<double> sweep_factors;
  double sweep_c = 0.26;
  double sweep_c_prime = 1.0;
};

json LearnParityConfig(const LearnParityOpts& o) {
  return json{{"d", o.d},
              {"epsilon", o.epsilon},
              {"alpha", o.alpha},
              {"beta", o.beta},
              {"trials", o.trials},
              {"n", o.n},
              {"mode", o.mode},
              {"c", o.c},
              {"c_prime", o.c_prime},
              {"sweep_factors", o.sweep_factors},
              {"sweep_c", o.sweep_c},
              {"sweep_c_prime", o.sweep_c_prime}};
}

struct ParityTrialRecord {
  bool bot = false;
  double error = 1.0;
  bool success = false;
};

std::vector<ParityTrialRecord> RunParityPhase(const LearnParityOpts& opts, std::size_t n_run,
                                              const std::optional<AmplifiedParityConfig>& amplified,
                                              const std::optional<ParityConfig>& single,
                                              std::uint64_t seed, std::uint64_t phase_base,
                                              unsigned threads) {
  std::vector<ParityTrialRecord> records(opts.trials);
  ParallelTrials(opts.trials, threads, [&](std::size_t t) {
    Rng rng = Rng::Stream(seed, phase_base + t);
    const BitVector target = BitVector::Random(opts.d, rng);
    const LabeledDistribution dist = LabeledDistribution::FromConcept(
        InputDistribution::Uniform(opts.d), MakeParityConcept(target));
    const Database db = GenerateDatabase(dist, n_run, rng);
    std::optional<BitVector> released;
    if (amplified.has_value()) {
      released = LearnParityAmplified(db, *amplified, rng).r;
    } else {
      released = LearnParityOnce(db, *single, rng).r;
    }
    ParityTrialRecord rec;
    rec.bot = !released.has_value();
    rec.error = rec.bot ? 1.0 : TrueError(MakeParityConcept(*released), dist);
    rec.success = !rec.bot && rec.error <= opts.alpha + 1e-12;
    records[t] = rec;
  });
  return records;
}

json RunLearnParity(const LearnParityOpts& opts, std::uint64_t seed, std::uint64_t stream_base,
                    unsigned threads, CsvSink& csv, bool& pass) {
  ValidateTrials(opts.trials);
  if (opts.d == 0 || opts.d > 20) {
    throw std::invalid_argument("d must be in [1, 20] (true error is computed by enumeration)");
  }
  if (opts.mode != "amplified" && opts.mode != "single") {
    throw std::invalid_argument("mode must be 'amplified' or 'single'");
  }
  const bool amplified_mode = opts.mode == "amplified";
  if (!amplified_mode && !opts.sweep_factors.empty()) {
    throw std::invalid_argument("the sample-size sweep requires --mode amplified");
  }

  csv.header = "trial,phase,factor,n,bot,error,success";

  std::optional<AmplifiedParityConfig> amplified;
  std::optional<ParityConfig> single;
  std::size_t n_base = opts.n;
  if (amplified_mode) {
    amplified.emplace(opts.d, opts.epsilon, opts.alpha, opts.beta, opts.c, opts.c_prime);
    if (n_base == 0) n_base = amplified->MinimumDatabaseSize();
    if (n_base < amplified->MinimumDatabaseSize()) {
      throw std::invalid_argument(
          "n is below the amplified learner's minimum database size k*n' + s + 1");
    }
  } else {
    single.emplace(opts.epsilon);
    if (n_base == 0) n_base = ParitySingleShotSampleSize(opts.d, opts.epsilon, opts.alpha);
  }

  const std::vector<ParityTrialRecord> base =
      RunParityPhase(opts, n_base, amplified, single, seed, stream_base, threads);
  std::size_t successes = 0;
  std::size_t bots = 0;
  double error_sum = 0.0;
  for (std::size_t t = 0; t < base.size(); ++t) {
    const ParityTrialRecord& r = base[t];
    successes += r.success ? 1 : 0;
    bots += r.bot ? 1 : 0;
    error_sum += r.error;
    csv.rows.push_back(CsvLine(t, "base", "", n_base, r.bot, r.error, r.success));
  }
  const double rate = static_cast<double>(successes) / static_cast<double>(opts.trials);
  // The amplified learner succeeds with probability at least 1 - beta; the
  // single-shot learner only with probability at least 1/4 (it answers bot
  // half the time). Thresholds carry binomial 3-sigma slack of 0.03.
  const double threshold = amplified_mode ? 1.0 - opts.beta - 0.03 : 0.25 - 0.03;
  const bool base_pass = rate >= threshold;

  json results;
  results["base"] = json{{"mode", opts.mode},
                         {"n", n_base},
                         {"trials", opts.trials},
                         {"success_rate", rate},
                         {"bot_rate", static_cast<double>(bots) / static_cast<double>(opts.trials)},
                         {"mean_error", error_sum / static_cast<double>(opts.trials)},
                         {"success_threshold", threshold},
                         {"pass", base_pass}};

  bool sweep_pass = true;
  if (!opts.sweep_factors.empty()) {
    // The sweep scales calibrated constants (sweep_c, sweep_c_prime) instead
    // of the conservative defaults, so the empirical phase transition of the
    // success rate is comparable to the predicted sample size.
    const std::size_t predicted = RequiredSampleSizeAmplified(
        opts.d, opts.epsilon, opts.alpha, opts.beta, opts.sweep_c, opts.sweep_c_prime);
    json points = json::array();
    std::vector<std::pair<std::size_t, double>> curve;
    for (std::size_t fi = 0; fi < opts.sweep_factors.size(); ++fi) {
      const double factor = opts.sweep_factors[fi];
      if (!(factor > 0.0)) throw std::invalid_argument("sweep factors must be positive");
      std::optional<AmplifiedParityConfig> cfg;
      cfg.emplace(opts.d, opts.epsilon, opts.alpha, opts.beta, factor * opts.sweep_c,
                  factor * opts.sweep_c_prime);
      const std::size_t n_factor = cfg->MinimumDatabaseSize();
      const std::vector<ParityTrialRecord> recs = RunParityPhase(
          opts, n_factor, cfg, std::nullopt, seed, stream_base + (fi + 1) * kPhaseStride, threads);
      std::size_t ok = 0;
      for (std::size_t t = 0; t < recs.size(); ++t) {
        ok += recs[t].success ? 1 : 0;
        csv.rows.push_back(
            CsvLine(t, "sweep", factor, n_factor, recs[t].bot, recs[t].error, recs[t].success));
      }
      const double rate_factor = static_cast<double>(ok) / static_cast<double>(opts.trials);
      curve.emplace_back(n_factor, rate_factor);
      points.push_back(json{{"factor", factor}, {"n", n_factor}, {"success_rate", rate_factor}});
    }
    std::sort(curve.begin(), curve.end());
    const double want = 1.0 - opts.beta;
    std::optional<std::size_t> crossing;
    for (const auto& [n_factor, rate_factor] : curve) {
      if (rate_factor >= want) {
        crossing = n_factor;
        break;
      }
    }
    sweep_pass = crossing.has_value() &&
                 static_cast<double>(*crossing) >= static_cast<double>(predicted) / 2.0 &&
                 static_cast<double>(*crossing) <= 2.0 * static_cast<double>(predicted);
    json sweep = json{{"predicted_n", predicted},
                      {"target_rate", want},
                      {"calibration_c", opts.sweep_c},
                      {"calibration_c_prime", opts.sweep_c_prime},
                      {"points", points}};
    sweep["crossing_n"] = crossing.has_value() ? json(*crossing) : json(nullptr);
    sweep["pass"] = sweep_pass;
    results["sweep"] = sweep;
  }
  pass = base_pass && sweep_pass;
  return results;
}

// ---------------------------------------------------------------------------
// exp-mech
// ---------------------------------------------------------------------------

struct ExpMechOpts {
  std::size_t hypotheses = 16;
  double epsilon = 1.0;
  double alpha = 0.2;
  double beta = 0.1;
  std::size_t trials = 500;
  std::size_t n = 0;  // 0 = the agnostic-learning sample bound
  std::vector<double> opt_values = {0.0, 0.25};
};

json ExpMechConfig(const ExpMechOpts& o) {
  return json{{"hypotheses", o.hypotheses}, {"epsilon", o.epsilon}, {"alpha", o.alpha},
              {"beta", o.beta},             {"trials", o.trials},   {"n", o.n},
              {"opt_values", o.opt_values}};
}

json RunExpMech(const ExpMechOpts& opts, std::uint64_t seed, std::uint64_t stream_base,
                unsigned threads, CsvSink& csv, bool& pass) {
  ValidateTrials(opts.trials);
  const std::size_t h = opts.hypotheses;
  if (h < 2 || !std::has_single_bit(h) || h > 1024) {
    throw std::invalid_argument("hypotheses must be a power of two in [2, 1024]");
  }
  const std::size_t d = static_cast<std::size_t>(std::countr_zero(h));
  if (!(opts.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");

  std::vector<Concept> hypotheses;
  hypotheses.reserve(h);
  for (std::size_t v = 0; v < h; ++v) {
    hypotheses.push_back(MakeParityConcept(BitVector::FromInteger(v, d)));
  }
  const Concept target = MakeParityConcept(BitVector::FromInteger(1, d));

  // opt 0 is the realizable target; opt > 0 flips the labels of
  // round(opt * 2^d) weight-one points, so the best hypothesis error is
  // exactly that fraction.
  auto build_dist = [&](double opt_value) {
    if (opt_value == 0.0) {
      return LabeledDistribution::FromConcept(InputDistribution::Uniform(d), target);
    }
    const long m = std::lround(opt_value * static_cast<double>(h));
    if (m < 1 || static_cast<std::size_t>(m) > d) {
      throw std::invalid_argument(
          "opt value must satisfy 1 <= round(opt * 2^d) <= d "
          "(labels are flipped on weight-one points)");
    }
    std::vector<Example> points;
    points.reserve(h);
    std::vector<double> weights(h, 1.0 / static_cast<double>(h));
    for (std::size_t v = 0; v < h; ++v) {
      BitVector x = BitVector::FromInteger(v, d);
      int y = target(x);
      if (std::has_single_bit(v) && std::countr_zero(v) < static_cast<int>(m)) y ^= 1;
      points.push_back(Example{std::move(x), y});
    }
    return LabeledDistribution::Explicit(LabelKind::kBit, d, std::move(points),
                                         std::move(weights));
  };

  csv.header = "trial,phase,opt,chosen,error,success";
  json results;
  bool all_pass = true;

  struct TrialRec {
    std::size_t chosen = 0;
    double error = 0.0;
    bool success = false;
  };

  if (opts.epsilon == 0.0) {
    // Zero budget collapses the mechanism to the uniform distribution over
    // the hypothesis list; the run checks the output frequencies.
    const std::size_t n_run = opts.n > 0 ? opts.n : std::max<std::size_t>(16, h);
    const LabeledDistribution dist = build_dist(0.0);
    const double opt_actual = OptError(std::span<const Concept>(hypotheses), dist);
    std::vector<TrialRec> recs(opts.trials);
    ParallelTrials(opts.trials, threads, [&](std::size_t t) {
      Rng rng = Rng::Stream(seed, stream_base + kPhaseStride + t);
      const Database db = GenerateDatabase(dist, n_run, rng);
      const std::size_t idx = ExponentialMechanismSample(hypotheses, 0.0, db, rng);
      const double err = TrueError(hypotheses[idx], dist);
      recs[t] = TrialRec{idx, err, err <= opt_actual + opts.alpha + 1e-12};
    });
    std::vector<std::size_t> counts(h, 0);
    for (std::size_t t = 0; t < recs.size(); ++t) {
      ++counts[recs[t].chosen];
      csv.rows.push_back(
          CsvLine(t, "uniform", opt_actual, recs[t].chosen, recs[t].error, recs[t].success));
    }
    double max_dev = 0.0;
    for (std::size_t v = 0; v < h; ++v) {
      const double freq = static_cast<double>(counts[v]) / static_cast<double>(opts.trials);
      max_dev = std::max(max_dev, std::abs(freq - 1.0 / static_cast<double>(h)));
    }
    // Per-cell Hoeffding bound with a union over cells at level 0.001.
    const double bound = std::sqrt(std::log(2.0 * static_cast<double>(h) / 0.001) /
                                   (2.0 * static_cast<double>(opts.trials)));
    const bool uniform_pass = max_dev <= bound;
    results["uniform"] = json{{"n", n_run},
                              {"trials", opts.trials},
                              {"output_counts", counts},
                              {"max_abs_deviation", max_dev},
                              {"deviation_bound", bound},
                              {"pass", uniform_pass}};
    all_pass = uniform_pass;
  } else {
    if (opts.opt_values.empty()) throw std::invalid_argument("opt-values must not be empty");
    const std::size_t n_run =
        opts.n > 0 ? opts.n : RequiredSampleSizeAgnostic(h, opts.epsilon, opts.alpha, opts.beta);
    json phases = json::array();
    for (std::size_t pi = 0; pi < opts.opt_values.size(); ++pi) {
      const double opt_requested = opts.opt_values[pi];
      const LabeledDistribution dist = build_dist(opt_requested);
      const double opt_actual = OptError(std::span<const Concept>(hypotheses), dist);
      std::vector<TrialRec> recs(opts.trials);
      ParallelTrials(opts.trials, threads, [&](std::size_t t) {
        Rng rng = Rng::Stream(seed, stream_base + (pi + 1) * kPhaseStride + t);
        const Database db = GenerateDatabase(dist, n_run, rng);
        const std::size_t idx = ExponentialMechanismSample(hypotheses, opts.epsilon, db, rng);
        const double err = TrueError(hypotheses[idx], dist);
        recs[t] = TrialRec{idx, err, err <= opt_actual + opts.alpha + 1e-12};
      });
      std::size_t ok = 0;
      const std::string phase_label = FormatDouble(opt_requested);
      for (std::size_t t = 0; t < recs.size(); ++t) {
        ok += recs[t].success ? 1 : 0;
        csv.rows.push_back(
            CsvLine(t, phase_label, opt_actual, recs[t].chosen, recs[t].error, recs[t].success));
      }
      const double rate = static_cast<double>(ok) / static_cast<double>(opts.trials);
      const double threshold = 1.0 - opts.beta - 0.03;
      const bool phase_pass = rate >= threshold;
      phases.push_back(json{{"opt_requested", opt_requested},
                            {"opt_actual", opt_actual},
                            {"n", n_run},
                            {"trials", opts.trials},
                            {"success_rate", rate},
                            {"success_threshold", threshold},
                            {"pass", phase_pass}});
      all_pass = all_pass && phase_pass;
    }
    results["phases"] = phases;
  }
  pass = all_pass;
  return results;
}

// ---------------------------------------------------------------------------
// verify-dp
// ---------------------------------------------------------------------------

struct VerifyDpOpts {
  std::string target;
  std::size_t d = 0;  // 0 = the target's default
  std::size_t n = 0;  // 0 = the target's default
  std::size_t pairs = 40;
  std::vector<double> epsilons = {0.1, 0.25, 0.5};
  std::size_t mc_trials = 200000;
};

json VerifyDpConfig(const VerifyDpOpts& o) {
  return json{{"target", o.target}, {"d", o.d},
              {"n", o.n},           {"pairs", o.pairs},
              {"epsilon", o.epsilons}, {"mc_trials", o.mc_trials}};
}

double MaxRatioFromDists(const std::vector<double>& p, const std::vector<double>& q) {
  double max_ratio = 0.0;
  for (std::size_t w = 0; w < p.size(); ++w) {
    if (p[w] == 0.0 && q[w] == 0.0) continue;
    if (p[w] == 0.0 || q[w] == 0.0) return std::numeric_limits<double>::infinity();
    max_ratio = std::max(max_ratio, std::max(p[w] / q[w], q[w] / p[w]));
  }
  return max_ratio;
}

json VerifyParityLearner(const VerifyDpOpts& opts, std::uint64_t seed, unsigned threads,
                         CsvSink& csv, bool& pass) {
  const std::size_t max_d = opts.d > 0 ? opts.d : 4;
  const std::size_t max_n = opts.n > 0 ? opts.n : 6;
  if (max_d > 8) throw std::invalid_argument("d (maximum dimension) must be at most 8");
  if (max_n > 12) {
    throw std::invalid_argument("n (maximum database size) must be at most 12 for enumeration");
  }
  if (opts.pairs == 0 || opts.pairs > 500000) {
    throw std::invalid_argument("pairs must be in [1, 500000]");
  }
  if (opts.epsilons.empty()) throw std::invalid_argument("epsilon list must not be empty");

  struct PairRec {
    std::string kind;
    std::size_t d = 0;
    std::size_t n = 0;
    std::vector<double> ratios;
  };
  std::vector<PairRec> recs(opts.pairs);
  ParallelTrials(opts.pairs, threads, [&](std::size_t i) {
    Rng rng = Rng::Stream(seed, 7'000'000 + i);
    const std::size_t di = 1 + rng.Below(max_d);
    const std::size_t ni = 1 + rng.Below(max_n);
    static const char* kKinds[] = {"consistent", "inconsistent", "bot-heavy"};
    const std::size_t kind = i % 3;
    Database db{LabelKind::kBit, di, {}};
    db.entries.reserve(ni);
    if (kind == 0) {
      const Concept target = MakeParityConcept(BitVector::Random(di, rng));
      for (std::size_t j = 0; j < ni; ++j) {
        BitVector x = BitVector::Random(di, rng);
        const int y = target(x);
        db.entries.push_back(Example{std::move(x), y});
      }
    } else if (kind == 1) {
      for (std::size_t j = 0; j < ni; ++j) {
        db.entries.push_back(Example{BitVector::Random(di, rng), static_cast<int>(rng.Below(2))});
      }
    } else {
      // Unsatisfiable rows (x = 0, y = 1) force the all-bot branch.
      for (std::size_t j = 0; j < ni; ++j) db.entries.push_back(Example{BitVector(di), 1});
    }
    const std::size_t pos = rng.Below(ni);
    const Database neighbor =
        ReplaceEntry(db, pos, Example{BitVector::Random(di, rng), static_cast<int>(rng.Below(2))});
    PairRec rec{kKinds[kind], di, ni, {}};
    rec.ratios.reserve(opts.epsilons.size());
    for (double eps : opts.epsilons) {
      const FiniteMechanism<Database> mech = ParityLearnerAsFinite(ParityConfig(eps), di);
      rec.ratios.push_back(ExactPrivacyRatio(mech, db, neighbor).max_ratio);
    }
    recs[i] = std::move(rec);
  });

  csv.header = "pair,kind,d,n,epsilon,max_ratio,bound";
  std::vector<double> max_per_eps(opts.epsilons.size(), 0.0);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    for (std::size_t ei = 0; ei < opts.epsilons.size(); ++ei) {
      const double bound = std::exp(opts.epsilons[ei]);
      csv.rows.push_back(CsvLine(i, recs[i].kind, recs[i].d, recs[i].n, opts.epsilons[ei],
                                 recs[i].ratios[ei], bound));
      max_per_eps[ei] = std::max(max_per_eps[ei], recs[i].ratios[ei]);
    }
  }
  json per_epsilon = json::array();
  bool all_pass = true;
  for (std::size_t ei = 0; ei < opts.epsilons.size(); ++ei) {
    const double bound = std::exp(opts.epsilons[ei]);
    const bool ok = max_per_eps[ei] <= bound * (1.0 + 1e-12);
    per_epsilon.push_back(json{{"epsilon", opts.epsilons[ei]},
                               {"max_ratio", max_per_eps[ei]},
                               {"bound", bound},
                               {"pass", ok}});
    all_pass = all_pass && ok;
  }
  pass = all_pass;
  return json{{"pairs", opts.pairs},
              {"max_dimension", max_d},
              {"max_size", max_n},
              {"per_epsilon", per_epsilon}};
}

json VerifyExpMech(const VerifyDpOpts& opts, unsigned threads, CsvSink& csv, bool& pass) {
  const std::size_t dd = opts.d > 0 ? opts.d : 2;
  const std::size_t nn = opts.n > 0 ? opts.n : 3;
  if (dd < 1 || dd > 3) {
    throw std::invalid_argument("d must be in [1, 3] for the exhaustive neighbor enumeration");
  }
  if (nn < 1) throw std::invalid_argument("n must be at least 1");
  if (opts.epsilons.empty()) throw std::invalid_argument("epsilon list must not be empty");
  const std::size_t entry_count = std::size_t{1} << (dd + 1);
  double total_check = 1.0;
  for (std::size_t p = 0; p < nn; ++p) total_check *= static_cast<double>(entry_count);
  if (total_check > 200000.0) {
    throw std::invalid_argument("exhaustive enumeration too large: reduce d or n");
  }
  const auto total = static_cast<std::size_t>(total_check);

  const std::size_t hcount = std::size_t{1} << dd;
  std::vector<Concept> hypotheses;
  hypotheses.reserve(hcount);
  for (std::size_t v = 0; v < hcount; ++v) {
    hypotheses.push_back(MakeParityConcept(BitVector::FromInteger(v, dd)));
  }
  std::vector<Example> entries;
  entries.reserve(entry_count);
  for (std::size_t v = 0; v < (std::size_t{1} << dd); ++v) {
    for (int y = 0; y <= 1; ++y) entries.push_back(Example{BitVector::FromInteger(v, dd), y});
  }
  std::vector<std::size_t> pows(nn, 1);
  for (std::size_t p = 1; p < nn; ++p) pows[p] = pows[p - 1] * entry_count;

  auto db_from_index = [&](std::size_t idx) {
    Database db{LabelKind::kBit, dd, {}};
    db.entries.reserve(nn);
    std::size_t rem = idx;
    for (std::size_t p = 0; p < nn; ++p) {
      db.entries.push_back(entries[rem % entry_count]);
      rem /= entry_count;
    }
    return db;
  };

  csv.header = "epsilon,database,max_ratio,bound";
  json per_epsilon = json::array();
  bool all_pass = true;
  for (double eps : opts.epsilons) {
    if (!(eps >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    std::vector<std::vector<double>> dists(total);
    ParallelTrials(total, threads, [&](std::size_t idx) {
      dists[idx] = ExponentialMechanismDistribution(hypotheses, eps, db_from_index(idx));
    });
    const double bound = std::exp(eps);
    double global_max = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
      double db_max = 0.0;
      for (std::size_t p = 0; p < nn; ++p) {
        const std::size_t digit = (idx / pows[p]) % entry_count;
        for (std::size_t repl = 0; repl < entry_count; ++repl) {
          if (repl == digit) continue;
          const std::size_t nidx = idx - digit * pows[p] + repl * pows[p];
          db_max = std::max(db_max, MaxRatioFromDists(dists[idx], dists[nidx]));
        }
      }
      global_max = std::max(global_max, db_max);
      csv.rows.push_back(CsvLine(eps, idx, db_max, bound));
    }
    const bool ok = global_max <= bound * (1.0 + 1e-12);
    per_epsilon.push_back(
        json{{"epsilon", eps}, {"max_ratio", global_max}, {"bound", bound}, {"pass", ok}});
    all_pass = all_pass && ok;
  }
  pass = all_pass;
  return json{{"dimension", dd},
              {"database_size", nn},
              {"databases", total},
              {"hypotheses", hcount},
              {"per_epsilon", per_epsilon}};
}

json VerifyRandomizedResponse(const VerifyDpOpts& opts, std::uint64_t seed, CsvSink& csv,
                              bool& pass) {
  if (opts.epsilons.empty()) throw std::invalid_argument("epsilon list must not be empty");
  if (opts.mc_trials < 1000 || opts.mc_trials > 100000000) {
    throw std::invalid_argument("mc-trials must be in [1000, 100000000]");
  }
  csv.header = "epsilon,exact_ratio,mc_ratio,mc_inconclusive,bound";
  json rows = json::array();
  bool all_pass = true;
  for (std::size_t ei = 0; ei < opts.epsilons.size(); ++ei) {
    const double eps = opts.epsilons[ei];
    const FiniteRandomizer rr = MakeRandomizedResponse(eps);
    FiniteMechanism<int> mech;
    mech.outcome_count = 2;
    mech.exact_distribution = [rr](const int& z) {
      return std::vector<double>{rr.TransitionProb(static_cast<std::size_t>(z), 0),
                                 rr.TransitionProb(static_cast<std::size_t>(z), 1)};
    };
    mech.sample = [rr](const int& z, Rng& rng) {
      return rr.Apply(static_cast<std::size_t>(z), rng);
    };
    const PrivacyRatioResult exact = ExactPrivacyRatio(mech, 0, 1);
    Rng rng = Rng::Stream(seed, 7'500'000 + ei);
    const PrivacyRatioResult mc = MonteCarloPrivacyRatio(mech, 0, 1, opts.mc_trials, rng);
    const double bound = std::exp(eps);
    const bool exact_ok = std::abs(exact.max_ratio - bound) <= 1e-9 * std::max(1.0, bound);
    const bool mc_ok =
        !mc.inconclusive && mc.max_ratio >= bound / 1.2 && mc.max_ratio <= bound * 1.2;
    csv.rows.push_back(
        CsvLine(eps, exact.max_ratio, mc.max_ratio, mc.inconclusive, bound));
    rows.push_back(json{{"epsilon", eps},
                        {"exact_ratio", exact.max_ratio},
                        {"mc_ratio", mc.max_ratio},
                        {"mc_trials", opts.mc_trials},
                        {"mc_inconclusive", mc.inconclusive},
                        {"bound", bound},
                        {"pass", exact_ok && mc_ok}});
    all_pass = all_pass && exact_ok && mc_ok;
  }
  pass = all_pass;
  return json{{"per_epsilon", rows}};
}

json VerifyLaplaceInterval(const VerifyDpOpts& opts, CsvSink& csv, bool& pass) {
  if (opts.epsilons.empty()) throw std::invalid_argument("epsilon list must not be empty");
  csv.header = "epsilon,delta,max_ratio,bound";
  const std::vector<double> deltas = {0.25, 0.5, 1.0};
  auto laplace_cdf = [](double x, double mu, double scale) {
    return x < mu ? 0.5 * std::exp((x - mu) / scale) : 1.0 - 0.5 * std::exp(-(x - mu) / scale);
  };
  json rows = json::array();
  bool all_pass = true;
  for (double eps : opts.epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
    for (double delta : deltas) {
      const double scale = delta / eps;
      const int k = 40;
      const double lo = -5.0 * scale;
      const double hi = 5.0 * scale + delta;
      // Interval probabilities on neighboring centers 0 and delta, including
      // both tails.
      double max_ratio = 0.0;
      auto probe = [&](double a, double b) {
        const double p = laplace_cdf(b, 0.0, scale) - laplace_cdf(a, 0.0, scale);
        const double q = laplace_cdf(b, delta, scale) - laplace_cdf(a, delta, scale);
        max_ratio = std::max(max_ratio, std::max(p / q, q / p));
      };
      probe(-1e300, lo);
      for (int i = 0; i < k; ++i) {
        const double a = lo + (hi - lo) * static_cast<double>(i) / k;
        const double b = lo + (hi - lo) * static_cast<double>(i + 1) / k;
        probe(a, b);
      }
      probe(hi, 1e300);
      const double bound = std::exp(eps);
      const bool ok = max_ratio <= bound * (1.0 + 1e-12);
      csv.rows.push_back(CsvLine(eps, delta, max_ratio, bound));
      rows.push_back(json{
          {"epsilon", eps}, {"delta", delta}, {"max_ratio", max_ratio}, {"bound", bound},
          {"pass", ok}});
      all_pass = all_pass && ok;
    }
  }
  pass = all_pass;
  return json{{"cases", rows}};
}

json VerifyIdentities(std::uint64_t seed, CsvSink& csv, bool& pass) {
  csv.header = "check,case,value,bound,pass";
  json checks = json::array();
  bool all_pass = true;
  auto add_check = [&](const std::string& name, const std::string& case_label, double value,
                       double bound) {
    const bool ok = value <= bound;
    csv.rows.push_back(CsvLine(name, case_label, value, bound, ok));
    checks.push_back(json{
        {"check", name}, {"case", case_label}, {"value", value}, {"bound", bound}, {"pass", ok}});
    all_pass = all_pass && ok;
  };

  {
    // Two distinct parities disagree on exactly half the inputs; equal ones
    // on none.
    const std::size_t d = 4;
    const std::size_t count = std::size_t{1} << d;
    double max_dev = 0.0;
    for (std::size_t v1 = 0; v1 < count; ++v1) {
      const Concept c1 = MakeParityConcept(BitVector::FromInteger(v1, d));
      for (std::size_t v2 = 0; v2 < count; ++v2) {
        const Concept c2 = MakeParityConcept(BitVector::FromInteger(v2, d));
        std::size_t disagreements = 0;
        for (std::size_t x = 0; x < count; ++x) {
          const BitVector point = BitVector::FromInteger(x, d);
          if (c1(point) != c2(point)) ++disagreements;
        }
        const double expected = v1 == v2 ? 0.0 : 0.5;
        max_dev = std::max(max_dev, std::abs(static_cast<double>(disagreements) /
                                                 static_cast<double>(count) -
                                             expected));
      }
    }
    add_check("halving-dichotomy", "d=4, all 16x16 parity pairs", max_dev, 1e-9);
  }

  const MaskedParityDomain domain(2);
  const std::size_t point_count = std::size_t{1} << domain.point_bits();
  const std::size_t concept_count = std::size_t{1} << (domain.d() + 1);
  auto concept_from_index = [&](std::size_t ci) {
    return MaskedParityConcept{
        BitVector::FromInteger(ci & ((std::size_t{1} << domain.d()) - 1), domain.d()),
        static_cast<int>(ci >> domain.d())};
  };
  Rng query_rng = Rng::Stream(seed, 7'800'000);
  auto random_query = [&]() {
    std::vector<double> table(point_count * 2);
    for (double& cell : table) cell = 2.0 * query_rng.Uniform01() - 1.0;
    return PointLabelQuery([table](const BitVector& encoded, int y) {
      return table[encoded.ToInteger() * 2 + (y > 0 ? 1 : 0)];
    });
  };

  {
    // E[g(u, c(u))] decomposes into the constant piece plus the inner
    // products of the two label restrictions, exactly.
    double max_dev = 0.0;
    for (int qi = 0; qi < 6; ++qi) {
      const PointLabelQuery g = random_query();
      const FourierPieces pieces = FourierDecompose(domain, g);
      for (std::size_t ci = 0; ci < concept_count; ++ci) {
        const MaskedParityConcept target = concept_from_index(ci);
        const std::vector<double> table = ConceptTable(domain, target);
        double direct = 0.0;
        for (std::size_t p = 0; p < point_count; ++p) {
          direct += g(BitVector::FromInteger(p, domain.point_bits()), table[p] > 0.0 ? 1 : -1);
        }
        direct /= static_cast<double>(point_count);
        max_dev = std::max(max_dev, std::abs(QueryExpectation(domain, pieces, target) - direct));
      }
    }
    add_check("query-decomposition", "d=2, 6 random queries x 8 concepts", max_dev, 1e-9);
  }

  {
    // The b=0 restrictions of the concept labels are orthogonal across
    // distinct parities and have squared norm 1/2.
    std::vector<std::vector<double>> restricted(concept_count);
    for (std::size_t ci = 0; ci < concept_count; ++ci) {
      restricted[ci] = RestrictToB(domain, ConceptTable(domain, concept_from_index(ci)), 0);
    }
    double max_dev = 0.0;
    for (std::size_t i = 0; i < concept_count; ++i) {
      for (std::size_t j = 0; j < concept_count; ++j) {
        const MaskedParityConcept a = concept_from_index(i);
        const MaskedParityConcept b = concept_from_index(j);
        const double ip = InnerProductUniform(restricted[i], restricted[j]);
        const double expected = a.r == b.r ? (a.a == b.a ? 0.5 : -0.5) : 0.0;
        max_dev = std::max(max_dev, std::abs(ip - expected));
      }
    }
    add_check("restriction-orthogonality", "d=2, all 8x8 concept pairs", max_dev, 1e-9);
  }

  {
    const PointLabelQuery label_query = [](const BitVector&, int y) {
      return static_cast<double>(y);
    };
    const ParsevalResult pr = ParsevalCheck(domain, label_query);
    add_check("parseval-label-query", "d=2, g = y",
              std::max(std::abs(pr.sum - 1.0), pr.violation), 1e-9);
    double worst = 0.0;
    for (int qi = 0; qi < 4; ++qi) {
      const ParsevalResult r = ParsevalCheck(domain, random_query());
      worst = std::max(worst, std::max(r.violation, r.sum - 1.0));
    }
    add_check("parseval-random-queries", "d=2, 4 random bounded queries", worst, 1e-9);
  }

  {
    // Empirical tail frequencies never exceed the analytic bounds: value is
    // (frequency - bound), so the bound column is 0.
    const int reps = 3000;
    std::uint64_t stream = 7'810'000;
    struct ChernoffCase {
      std::size_t n;
      double mu;
      double phi;
    };
    for (const ChernoffCase& c : {ChernoffCase{300, 0.5, 0.2}, ChernoffCase{200, 0.3, 0.3},
                                  ChernoffCase{500, 0.2, 0.25}}) {
      Rng rng = Rng::Stream(seed, stream++);
      const std::pair<double, double> bounds = ChernoffMultiplicativeBound(c.n, c.mu, c.phi);
      int above = 0;
      int below = 0;
      for (int rep = 0; rep < reps; ++rep) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < c.n; ++i) ones += rng.Bernoulli(c.mu) ? 1 : 0;
        const double mean = static_cast<double>(ones) / static_cast<double>(c.n);
        if (mean >= c.mu * (1.0 + c.phi)) ++above;
        if (mean <= c.mu * (1.0 - c.phi)) ++below;
      }
      const double value =
          std::max(static_cast<double>(above) / reps - bounds.first,
                   static_cast<double>(below) / reps - bounds.second);
      add_check("chernoff-tail",
                "n=" + std::to_string(c.n) + " mu=" + FormatDouble(c.mu) +
                    " phi=" + FormatDouble(c.phi),
                value, 0.0);
    }
    struct HoeffdingCase {
      std::size_t n;
      double delta;
    };
    for (const HoeffdingCase& c : {HoeffdingCase{200, 0.2}, HoeffdingCase{400, 0.15}}) {
      Rng rng = Rng::Stream(seed, stream++);
      const double bound = HoeffdingBound(c.n, c.delta, -1.0, 1.0);
      int out = 0;
      for (int rep = 0; rep < reps; ++rep) {
        double sum = 0.0;
        for (std::size_t i = 0; i < c.n; ++i) sum += 2.0 * rng.Uniform01() - 1.0;
        if (std::abs(sum / static_cast<double>(c.n)) > c.delta) ++out;
      }
      add_check("hoeffding-tail",
                "n=" + std::to_string(c.n) + " delta=" + FormatDouble(c.delta) + " uniform[-1,1]",
                static_cast<double>(out) / reps - bound, 0.0);
    }
    struct LaplaceCase {
      std::size_t n;
      double delta;
      double scale;
    };
    for (const LaplaceCase& c : {LaplaceCase{50, 0.3, 1.0}, LaplaceCase{100, 0.25, 1.0}}) {
      Rng rng = Rng::Stream(seed, stream++);
      const double bound = LaplaceSumBound(c.n, c.delta, c.scale);
      int out = 0;
      for (int rep = 0; rep < reps; ++rep) {
        double sum = 0.0;
        for (std::size_t i = 0; i < c.n; ++i) sum += rng.Laplace(c.scale);
        if (std::abs(sum / static_cast<double>(c.n)) > c.delta) ++out;
      }
      add_check("laplace-tail",
                "n=" + std::to_string(c.n) + " delta=" + FormatDouble(c.delta) +
                    " scale=" + FormatDouble(c.scale),
                static_cast<double>(out) / reps - bound, 0.0);
    }
  }

  pass = all_pass;
  return json{{"checks", checks}};
}

json RunVerifyDp(const VerifyDpOpts& opts, std::uint64_t seed, unsigned threads, CsvSink& csv,
                 bool& pass) {
  if (opts.target == "parity-A") return VerifyParityLearner(opts, seed, threads, csv, pass);
  if (opts.target == "exp-mech") return VerifyExpMech(opts, threads, csv, pass);
  if (opts.target == "randomized-response") {
    return VerifyRandomizedResponse(opts, seed, csv, pass);
  }
  if (opts.target == "laplace-interval") return VerifyLaplaceInterval(opts, csv, pass);
  if (opts.target == "identities") return VerifyIdentities(seed, csv, pass);
  throw std::invalid_argument(
      "unknown target '" + opts.target +
      "' (expected parity-A, exp-mech, randomized-response, laplace-interval, or identities)");
}

// ---------------------------------------------------------------------------
// simulate-sq-by-local
// ---------------------------------------------------------------------------

struct SimulateSqOpts {
  std::size_t d = 2;
  double tau = 0.1;
  double beta = 0.05;
  double epsilon = 0.5;
  double b = 1.0;
  double c = 32.0;
  std::size_t trials = 2000;
};

json SimulateSqConfig(const SimulateSqOpts& o) {
  return json{{"d", o.d},     {"tau", o.tau}, {"beta", o.beta}, {"epsilon", o.epsilon},
              {"b", o.b},     {"c", o.c},     {"trials", o.trials}};
}

json RunSimulateSqByLocal(const SimulateSqOpts& opts, std::uint64_t seed,
                          std::uint64_t stream_base, unsigned threads, CsvSink& csv, bool& pass) {
  ValidateTrials(opts.trials);
  if (opts.d == 0 || opts.d > 20) throw std::invalid_argument("d must be in [1, 20]");
  if (!(opts.b >= 1.0)) {
    throw std::invalid_argument("b must be at least 1 (the label query has range [0, 1])");
  }
  const std::size_t slice = SqSimulationSliceSize(opts.b, opts.epsilon, opts.tau, opts.beta,
                                                  opts.c);
  struct TrialRec {
    double answer = 0.0;
    double deviation = 0.0;
    bool fail = false;
  };
  std::vector<TrialRec> recs(opts.trials);
  ParallelTrials(opts.trials, threads, [&](std::size_t t) {
    Rng rng = Rng::Stream(seed, stream_base + t);
    // A random nonzero parity target keeps the labels balanced, so the true
    // query mean is exactly 1/2.
    const std::uint64_t rv = 1 + rng.Below((std::uint64_t{1} << opts.d) - 1);
    const LabeledDistribution dist = LabeledDistribution::FromConcept(
        InputDistribution::Uniform(opts.d),
        MakeParityConcept(BitVector::FromInteger(rv, opts.d)));
    const Database db = GenerateDatabase(dist, slice, rng);
    ExampleOracle oracle(std::span<const Example>(db.entries), opts.epsilon);
    const LaplaceQueryRandomizer randomizer(
        "label-mean", opts.epsilon, opts.b,
        [](const Example& e) { return static_cast<double>(e.y); });
    const double answer = SimulateSqQueryByLocal(oracle, 0, slice, randomizer, rng);
    const double deviation = std::abs(answer - 0.5);
    recs[t] = TrialRec{answer, deviation, deviation > opts.tau};
  });
  csv.header = "trial,answer,abs_deviation,fail";
  std::size_t failures = 0;
  double dev_sum = 0.0;
  for (std::size_t t = 0; t < recs.size(); ++t) {
    failures += recs[t].fail ? 1 : 0;
    dev_sum += recs[t].deviation;
    csv.rows.push_back(CsvLine(t, recs[t].answer, recs[t].deviation, recs[t].fail));
  }
  const double failure_rate = static_cast<double>(failures) / static_cast<double>(opts.trials);
  pass = failure_rate <= opts.beta + 1e-12;
  return json{{"slice_size", slice},
              {"trials", opts.trials},
              {"expectation", 0.5},
              {"tau", opts.tau},
              {"failure_rate", failure_rate},
              {"failure_bound", opts.beta},
              {"mean_abs_deviation", dev_sum / static_cast<double>(opts.trials)},
              {"pass", pass}};
}

// ---------------------------------------------------------------------------
// simulate-local-by-sq
// ---------------------------------------------------------------------------

struct SimulateLocalOpts {
  std::string grid = "both";
  std::size_t t = 2;
  double beta = 0.2;
  double epsilon = 0.5;
  std::size_t trials = 20000;
};

json SimulateLocalConfig(const SimulateLocalOpts& o) {
  return json{
      {"grid", o.grid}, {"t", o.t}, {"beta", o.beta}, {"epsilon", o.epsilon},
      {"trials", o.trials}};
}

json RunSimulateLocalBySq(const SimulateLocalOpts& opts, std::uint64_t seed, unsigned threads,
                          CsvSink& csv, bool& pass) {
  ValidateTrials(opts.trials);
  if (opts.t == 0) throw std::invalid_argument("t must be at least 1");
  if (opts.grid != "bit" && opts.grid != "four" && opts.grid != "both") {
    throw std::invalid_argument("grid must be 'bit', 'four', or 'both'");
  }
  struct GridSpec {
    std::string name;
    FiniteRandomizer randomizer;
    std::vector<double> weights;
  };
  std::vector<GridSpec> grids;
  if (opts.grid == "bit" || opts.grid == "both") {
    grids.push_back(GridSpec{"bit", MakeRandomizedResponse(opts.epsilon), {0.3, 0.7}});
  }
  if (opts.grid == "four" || opts.grid == "both") {
    // Four-symbol randomized response: keep the symbol with probability
    // e^eps / (e^eps + 3), otherwise move to a specific other symbol with
    // probability 1 / (e^eps + 3). Row ratios are exactly e^eps.
    const double keep = std::exp(opts.epsilon) / (std::exp(opts.epsilon) + 3.0);
    const double off = 1.0 / (std::exp(opts.epsilon) + 3.0);
    std::vector<std::vector<double>> transition(4, std::vector<double>(4, off));
    for (std::size_t z = 0; z < 4; ++z) transition[z][z] = keep;
    grids.push_back(GridSpec{"four", FiniteRandomizer("rr4", opts.epsilon, transition),
                             {0.1, 0.2, 0.3, 0.4}});
  }

  const RejectionSimulator simulator(opts.t, opts.beta, opts.epsilon);
  const double tv_bound = opts.beta / static_cast<double>(opts.t) + 0.005;
  csv.header = "grid,trial,output,iterations";
  json grid_results = json::array();
  bool all_pass = true;

  for (std::size_t gi = 0; gi < grids.size(); ++gi) {
    const GridSpec& grid = grids[gi];
    const std::size_t outputs = grid.randomizer.output_count();
    std::vector<double> truth(outputs, 0.0);
    for (std::size_t w = 0; w < outputs; ++w) {
      for (std::size_t z = 0; z < grid.weights.size(); ++z) {
        truth[w] += grid.weights[z] * grid.randomizer.TransitionProb(z, w);
      }
    }

    const std::vector<double> exact_law =
        ExactRejectionOutputLaw(grid.randomizer, grid.weights, opts.t, opts.beta, opts.epsilon,
                                std::span<const double>());
    const double exact_tv = TotalVariation(exact_law, truth);
    const bool exact_pass = exact_tv <= tv_bound;

    // Worst case over every +-tau sign assignment the oracle could make.
    const double tau = simulator.tau();
    double worst_tv = 0.0;
    std::string worst_pattern;
    json patterns = json::array();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << outputs); ++mask) {
      std::vector<double> perturbations(outputs);
      for (std::size_t w = 0; w < outputs; ++w) {
        perturbations[w] = ((mask >> w) & 1) ? tau : -tau;
      }
      const std::vector<double> law = ExactRejectionOutputLaw(
          grid.randomizer, grid.weights, opts.t, opts.beta, opts.epsilon, perturbations);
      const double tv = TotalVariation(law, truth);
      const std::string pattern = SignPatternString(mask, outputs);
      patterns.push_back(json{{"pattern", pattern}, {"tv", tv}});
      if (tv > worst_tv) {
        worst_tv = tv;
        worst_pattern = pattern;
      }
    }
    const bool adversarial_pass = worst_tv <= tv_bound;

    const std::vector<std::pair<std::size_t, double>> support =
        SymbolSupport(std::span<const double>(grid.weights));
    struct SampleRec {
      std::size_t output = 0;
      std::size_t iterations = 0;
    };
    std::vector<SampleRec> recs(opts.trials);
    ParallelTrials(opts.trials, threads, [&](std::size_t tr) {
      Rng rng = Rng::Stream(seed, gi * 10 * kPhaseStride + tr);
      SymbolSqOracle oracle = SymbolSqOracle::Exact(support);
      RejectionSimulator local_simulator(opts.t, opts.beta, opts.epsilon);
      RejectionStats stats;
      const std::size_t w = local_simulator.SimulateNext(grid.randomizer, {}, oracle, rng, &stats);
      recs[tr] = SampleRec{w, stats.iterations};
    });
    std::vector<std::size_t> counts(outputs, 0);
    double iter_sum = 0.0;
    for (std::size_t tr = 0; tr < recs.size(); ++tr) {
      ++counts[recs[tr].output];
      iter_sum += static_cast<double>(recs[tr].iterations);
      csv.rows.push_back(CsvLine(grid.name, tr, recs[tr].output, recs[tr].iterations));
    }
    const double mean_iterations = iter_sum / static_cast<double>(opts.trials);
    double variance = 0.0;
    for (const SampleRec& r : recs) {
      const double diff = static_cast<double>(r.iterations) - mean_iterations;
      variance += diff * diff;
    }
    variance /= static_cast<double>(opts.trials > 1 ? opts.trials - 1 : 1);
    const double iteration_bound =
        2.0 * std::exp(opts.epsilon) +
        3.0 * std::sqrt(variance / static_cast<double>(opts.trials));
    const bool iteration_pass = mean_iterations <= iteration_bound;
    std::vector<double> sampled_law(outputs, 0.0);
    for (std::size_t w = 0; w < outputs; ++w) {
      sampled_law[w] = static_cast<double>(counts[w]) / static_cast<double>(opts.trials);
    }
    const double sampled_tv = TotalVariation(sampled_law, truth);

    all_pass = all_pass && exact_pass && adversarial_pass && iteration_pass;
    grid_results.push_back(
        json{{"grid", grid.name},
             {"outputs", outputs},
             {"truth", truth},
             {"exact", json{{"tv", exact_tv}, {"pass", exact_pass}}},
             {"adversarial", json{{"worst_tv", worst_tv},
                                  {"worst_pattern", worst_pattern},
                                  {"patterns", patterns},
                                  {"pass", adversarial_pass}}},
             {"sampled", json{{"trials", opts.trials},
                              {"mean_iterations", mean_iterations},
                              {"iteration_bound", iteration_bound},
                              {"sampled_tv", sampled_tv},
                              {"pass", iteration_pass}}}});
  }
  pass = all_pass;
  return json{{"tv_bound", tv_bound}, {"simulator_tau", simulator.tau()},
              {"simulator_phi", simulator.phi()}, {"grids", grid_results}};
}

// ---------------------------------------------------------------------------
// masked-parity-adaptive
// ---------------------------------------------------------------------------

struct MaskedAdaptiveOpts {
  std::vector<std::size_t> ds = {2, 4, 8};
  std::vector<std::size_t> pattern_ds = {2, 4};
};

json MaskedAdaptiveConfig(const MaskedAdaptiveOpts& o) {
  return json{{"ds", o.ds}, {"pattern_ds", o.pattern_ds}};
}

// Answers each learner query with its exact expectation by enumerating the
// uniform domain.
struct EnumeratedMaskedOracle {
  std::vector<Example> points;

  double Answer(const std::function<double(const Example&)>& g, double /*tau*/) {
    double sum = 0.0;
    for (const Example& e : points) sum += g(e);
    return sum / static_cast<double>(points.size());
  }
};

// Answers with the exact expectation shifted by the full tolerance in a fixed
// per-query direction: the worst oracle that still honors the tolerance.
struct PatternMaskedOracle {
  std::vector<Example> points;
  std::uint64_t sign_mask = 0;
  std::size_t next_query = 0;

  double Answer(const std::function<double(const Example&)>& g, double tau) {
    double sum = 0.0;
    for (const Example& e : points) sum += g(e);
    const double sigma = ((sign_mask >> next_query) & 1) ? 1.0 : -1.0;
    ++next_query;
    return sum / static_cast<double>(points.size()) + sigma * tau;
  }
};

json RunMaskedParityAdaptive(const MaskedAdaptiveOpts& opts, unsigned threads, CsvSink& csv,
                             bool& pass) {
  csv.header = "phase,d,concept,pattern,recovered";
  json exact_phase = json::array();
  json pattern_phase = json::array();
  bool all_pass = true;

  auto labeled_points = [](const MaskedParityDomain& domain, std::size_t concept_index) {
    const MaskedParityConcept hidden{
        BitVector::FromInteger(concept_index & ((std::size_t{1} << domain.d()) - 1), domain.d()),
        static_cast<int>(concept_index >> domain.d())};
    const std::vector<double> table = ConceptTable(domain, hidden);
    std::vector<Example> points;
    points.reserve(table.size());
    for (std::size_t p = 0; p < table.size(); ++p) {
      points.push_back(Example{BitVector::FromInteger(p, domain.point_bits()),
                               table[p] > 0.0 ? 1 : -1});
    }
    return std::make_pair(hidden, std::move(points));
  };

  for (std::size_t d : opts.ds) {
    if (d < 2 || d > 8) throw std::invalid_argument("ds entries must be powers of two in [2, 8]");
    const MaskedParityDomain domain(d);
    const std::size_t concepts = std::size_t{1} << (d + 1);
    std::vector<char> recovered(concepts, 0);
    ParallelTrials(concepts, threads, [&](std::size_t ci) {
      auto [hidden, points] = labeled_points(domain, ci);
      EnumeratedMaskedOracle oracle{std::move(points)};
      MaskedParityLearner learner(domain);
      const MaskedParityConcept got = RunSqLearner(learner, oracle);
      recovered[ci] = (got.r == hidden.r && got.a == hidden.a) ? 1 : 0;
    });
    std::size_t failures = 0;
    for (std::size_t ci = 0; ci < concepts; ++ci) {
      if (!recovered[ci]) ++failures;
      csv.rows.push_back(CsvLine("exact", d, ci, "", recovered[ci] != 0));
    }
    exact_phase.push_back(json{{"d", d},
                               {"concepts", concepts},
                               {"queries_per_run", d + 1},
                               {"failures", failures},
                               {"pass", failures == 0}});
    all_pass = all_pass && failures == 0;
  }

  for (std::size_t d : opts.pattern_ds) {
    if (d < 2 || d > 4) {
      throw std::invalid_argument(
          "pattern_ds entries must be powers of two in [2, 4] "
          "(the pattern set doubles per query)");
    }
    const MaskedParityDomain domain(d);
    const std::size_t concepts = std::size_t{1} << (d + 1);
    const std::size_t queries = d + 1;
    const std::size_t masks = std::size_t{1} << queries;
    const std::size_t total = concepts * masks;
    std::vector<char> recovered(total, 0);
    ParallelTrials(total, threads, [&](std::size_t idx) {
      const std::size_t ci = idx / masks;
      const std::uint64_t mask = idx % masks;
      auto [hidden, points] = labeled_points(domain, ci);
      PatternMaskedOracle oracle{std::move(points), mask, 0};
      MaskedParityLearner learner(domain);
      const MaskedParityConcept got = RunSqLearner(learner, oracle);
      recovered[idx] = (got.r == hidden.r && got.a == hidden.a) ? 1 : 0;
    });
    std::size_t failures = 0;
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (!recovered[idx]) ++failures;
      csv.rows.push_back(CsvLine("pattern", d, idx / masks,
                                 SignPatternString(idx % masks, queries), recovered[idx] != 0));
    }
    pattern_phase.push_back(json{{"d", d},
                                 {"concepts", concepts},
                                 {"patterns_per_concept", masks},
                                 {"failures", failures},
                                 {"pass", failures == 0}});
    all_pass = all_pass && failures == 0;
  }

  pass = all_pass;
  return json{{"exact", exact_phase}, {"adversarial_patterns", pattern_phase}};
}

// ---------------------------------------------------------------------------
// separation
// ---------------------------------------------------------------------------

struct SeparationOpts {
  std::size_t d = 8;
  std::size_t t = 16;
  std::size_t trials = 2000;
  std::string strategies = "all";
};

json SeparationConfig(const SeparationOpts& o) {
  return json{{"d", o.d}, {"t", o.t}, {"trials", o.trials}, {"strategies", o.strategies}};
}

json RunSeparation(const SeparationOpts& opts, std::uint64_t seed, CsvSink& csv, bool& pass) {
  ValidateTrials(opts.trials);
  if (opts.d < 2 || opts.d > 8) {
    throw std::invalid_argument("d must be a power of two in [2, 8]");
  }
  if (opts.t == 0) throw std::invalid_argument("t must be at least 1");
  std::vector<std::string> names;
  if (opts.strategies == "all") {
    names = {"max-likelihood", "round-one-plus-guess", "majority-of-three"};
  } else {
    std::string token;
    std::istringstream stream(opts.strategies);
    while (std::getline(stream, token, ',')) {
      if (!token.empty()) names.push_back(token);
    }
    for (const std::string& name : names) {
      if (name != "max-likelihood" && name != "round-one-plus-guess" &&
          name != "majority-of-three") {
        throw std::invalid_argument("unknown strategy '" + name + "'");
      }
    }
    if (names.empty()) throw std::invalid_argument("strategy list must not be empty");
  }

  const MaskedParityDomain domain(opts.d);
  csv.header = "strategy,trial,r,a,error,good";
  const double sigma = std::sqrt(0.25 / static_cast<double>(opts.trials));
  json strategy_results = json::array();
  bool all_pass = true;
  std::vector<SeparationTrialRecord> first_trials;

  for (std::size_t si = 0; si < names.size(); ++si) {
    Rng battery_rng = Rng::Stream(seed, 8'100'000 + si);
    SeparationStrategy strategy =
        names[si] == "max-likelihood"
            ? MakeMaxLikelihoodStrategy(domain, opts.t, battery_rng)
            : (names[si] == "round-one-plus-guess"
                   ? MakeRoundOnePlusGuessStrategy(domain)
                   : MakeMajorityOfThreeStrategy(domain, opts.t, battery_rng));
    Rng rng = Rng::Stream(seed, 8'200'000 + si);
    const SeparationResult result = RunSeparationExperiment(domain, strategy, opts.trials, rng);
    for (std::size_t ti = 0; ti < result.trials.size(); ++ti) {
      const SeparationTrialRecord& rec = result.trials[ti];
      csv.rows.push_back(CsvLine(names[si], ti, rec.r, rec.a, rec.err, rec.good));
    }
    const bool pass_good = result.good_freq >= result.good_bound - 3.0 * sigma;
    const bool pass_err = result.err_quarter_freq >= result.theorem_bound - 3.0 * sigma;
    strategy_results.push_back(json{{"strategy", names[si]},
                                    {"queries", strategy.queries.size()},
                                    {"trials", opts.trials},
                                    {"good_freq", result.good_freq},
                                    {"good_bound", result.good_bound},
                                    {"err_quarter_freq", result.err_quarter_freq},
                                    {"theorem_bound", result.theorem_bound},
                                    {"three_sigma", 3.0 * sigma},
                                    {"pass_good", pass_good},
                                    {"pass_err_quarter", pass_err},
                                    {"pass", pass_good && pass_err}});
    all_pass = all_pass && pass_good && pass_err;
    if (si == 0) first_trials = result.trials;
  }

  // The adaptive two-round learner, run against the adversarial oracle on the
  // same hidden concepts, must recover every one of them exactly.
  std::map<std::uint64_t, double> error_by_concept;
  for (const SeparationTrialRecord& rec : first_trials) {
    const std::uint64_t key = (static_cast<std::uint64_t>(rec.a) << opts.d) | rec.r;
    if (error_by_concept.count(key) > 0) continue;
    const MaskedParityConcept hidden{BitVector::FromInteger(rec.r, opts.d), rec.a};
    MaskedParityAdversarialOracle oracle(domain, hidden);
    MaskedParityLearner learner(domain);
    const MaskedParityConcept got = RunSqLearner(learner, oracle);
    double err = 0.0;
    if (!(got.r == hidden.r && got.a == hidden.a)) {
      const std::vector<double> want = ConceptTable(domain, hidden);
      const std::vector<double> have = ConceptTable(domain, got);
      std::size_t disagreements = 0;
      for (std::size_t p = 0; p < want.size(); ++p) {
        if (want[p] != have[p]) ++disagreements;
      }
      err = static_cast<double>(disagreements) / static_cast<double>(want.size());
    }
    error_by_concept[key] = err;
  }
  double adaptive_max_error = 0.0;
  for (const auto& [key, err] : error_by_concept) {
    adaptive_max_error = std::max(adaptive_max_error, err);
  }
  const bool adaptive_pass = adaptive_max_error == 0.0;
  all_pass = all_pass && adaptive_pass;

  pass = all_pass;
  return json{{"d", opts.d},
              {"t", opts.t},
              {"strategies", strategy_results},
              {"adaptive", json{{"distinct_concepts", error_by_concept.size()},
                                {"max_error", adaptive_max_error},
                                {"pass", adaptive_pass}}}};
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOpts {
  std::string experiment;
  std::string param;
  std::vector<double> values;
  std::optional<std::size_t> d;
  std::optional<std::size_t> n;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> hypotheses;
  std::optional<double> epsilon;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> tau;
  std::optional<double> b;
  std::optional<double> c;
  std::optional<double> c_prime;
};

json SweepConfig(const SweepOpts& o) {
  json config{{"experiment", o.experiment}, {"param", o.param}, {"values", o.values}};
  auto put = [&config](const char* key, const auto& opt) {
    if (opt.has_value()) config[key] = *opt;
  };
  put("d", o.d);
  put("n", o.n);
  put("trials", o.trials);
  put("hypotheses", o.hypotheses);
  put("epsilon", o.epsilon);
  put("alpha", o.alpha);
  put("beta", o.beta);
  put("tau", o.tau);
  put("b", o.b);
  put("c", o.c);
  put("c_prime", o.c_prime);
  return config;
}

std::size_t SweepIndexValue(double v, const std::string& name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw std::invalid_argument("sweep parameter '" + name + "' must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

json RunSweep(const SweepOpts& opts, std::uint64_t seed, unsigned threads, CsvSink& csv,
              bool& pass) {
  if (opts.values.empty()) throw std::invalid_argument("values must not be empty");

  auto keep = [](auto& field, const auto& maybe) {
    if (maybe.has_value()) field = *maybe;
  };

  using PointRunner = std::function<json(double value, std::uint64_t stream_base, CsvSink& sink,
                                         bool& point_pass)>;
  PointRunner run_point;

  if (opts.experiment == "learn-parity") {
    LearnParityOpts base;
    keep(base.d, opts.d);
    keep(base.n, opts.n);
    keep(base.trials, opts.trials);
    keep(base.epsilon, opts.epsilon);
    keep(base.alpha, opts.alpha);
    keep(base.beta, opts.beta);
    keep(base.c, opts.c);
    keep(base.c_prime, opts.c_prime);
    run_point = [base, &opts, seed, threads](double value, std::uint64_t stream_base,
                                             CsvSink& sink, bool& point_pass) {
      LearnParityOpts o = base;
      if (opts.param == "d") {
        o.d = SweepIndexValue(value, opts.param);
      } else if (opts.param == "epsilon") {
        o.epsilon = value;
      } else if (opts.param == "alpha") {
        o.alpha = value;
      } else if (opts.param == "beta") {
        o.beta = value;
      } else if (opts.param == "c") {
        o.c = value;
      } else if (opts.param == "c-prime") {
        o.c_prime = value;
      } else if (opts.param == "n") {
        o.n = SweepIndexValue(value, opts.param);
      } else if (opts.param == "trials") {
        o.trials = SweepIndexValue(value, opts.param);
      } else {
        throw std::invalid_argument("unknown sweep parameter '" + opts.param +
                                    "' for learn-parity");
      }
      return RunLearnParity(o, seed, stream_base, threads, sink, point_pass);
    };
  } else if (opts.experiment == "exp-mech") {
    ExpMechOpts base;
    keep(base.hypotheses, opts.hypotheses);
    keep(base.n, opts.n);
    keep(base.trials, opts.trials);
    keep(base.epsilon, opts.epsilon);
    keep(base.alpha, opts.alpha);
    keep(base.beta, opts.beta);
    run_point = [base, &opts, seed, threads](double value, std::uint64_t stream_base,
                                             CsvSink& sink, bool& point_pass) {
      ExpMechOpts o = base;
      if (opts.param == "hypotheses") {
        o.hypotheses = SweepIndexValue(value, opts.param);
      } else if (opts.param == "epsilon") {
        o.epsilon = value;
      } else if (opts.param == "alpha") {
        o.alpha = value;
      } else if (opts.param == "beta") {
        o.beta = value;
      } else if (opts.param == "n") {
        o.n = SweepIndexValue(value, opts.param);
      } else if (opts.param == "trials") {
        o.trials = SweepIndexValue(value, opts.param);
      } else {
        throw std::invalid_argument("unknown sweep parameter '" + opts.param + "' for exp-mech");
      }
      return RunExpMech(o, seed, stream_base, threads, sink, point_pass);
    };
  } else if (opts.experiment == "simulate-sq-by-local") {
    SimulateSqOpts base;
    keep(base.d, opts.d);
    keep(base.trials, opts.trials);
    keep(base.tau, opts.tau);
    keep(base.beta, opts.beta);
    keep(base.epsilon, opts.epsilon);
    keep(base.b, opts.b);
    keep(base.c, opts.c);
    run_point = [base, &opts, seed, threads](double value, std::uint64_t stream_base,
                                             CsvSink& sink, bool& point_pass) {
      SimulateSqOpts o = base;
      if (opts.param == "d") {
        o.d = SweepIndexValue(value, opts.param);
      } else if (opts.param == "tau") {
        o.tau = value;
      } else if (opts.param == "beta") {
        o.beta = value;
      } else if (opts.param == "epsilon") {
        o.epsilon = value;
      } else if (opts.param == "b") {
        o.b = value;
      } else if (opts.param == "c") {
        o.c = value;
      } else if (opts.param == "trials") {
        o.trials = SweepIndexValue(value, opts.param);
      } else {
        throw std::invalid_argument("unknown sweep parameter '" + opts.param +
                                    "' for simulate-sq-by-local");
      }
      return RunSimulateSqByLocal(o, seed, stream_base, threads, sink, point_pass);
    };
  } else {
    throw std::invalid_argument(
        "experiment must be learn-parity, exp-mech, or simulate-sq-by-local");
  }

  json points = json::array();
  bool all_pass = true;
  for (std::size_t vi = 0; vi < opts.values.size(); ++vi) {
    const double value = opts.values[vi];
    CsvSink inner;
    bool point_pass = false;
    const json results = run_point(value, (vi + 1) * kSweepStride, inner, point_pass);
    if (vi == 0) csv.header = "value," + inner.header;
    const std::string prefix = FormatDouble(value) + ",";
    for (const std::string& row : inner.rows) csv.rows.push_back(prefix + row);
    points.push_back(json{{"value", value}, {"results", results}, {"pass", point_pass}});
    all_pass = all_pass && point_pass;
  }
  pass = all_pass;
  return json{{"experiment", opts.experiment}, {"param", opts.param}, {"points", points}};
}

}  // namespace

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
  CLI::App app{
      "Experiment runner for private learning: exponential-mechanism and parity learners, "
      "privacy verification by enumeration, local-randomizer and statistical-query "
      "simulations, and the adaptive masked-parity experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "Optional key=value config file naming the subcommand's flags; "
                 "command-line flags override file values");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  LearnParityOpts learn_parity;
  CommonOpts learn_parity_common;
  CLI::App* lp = app.add_subcommand(
      "learn-parity", "Run the private parity learner and measure its success rate");
  AddCommonFlags(lp, learn_parity_common, "learn-parity");
  lp->add_option("--d", learn_parity.d, "Parity dimension")->capture_default_str();
  lp->add_option("--epsilon", learn_parity.epsilon, "Privacy budget")->capture_default_str();
  lp->add_option("--alpha", learn_parity.alpha, "Accuracy target")->capture_default_str();
  lp->add_option("--beta", learn_parity.beta, "Failure budget")->capture_default_str();
  lp->add_option("--trials", learn_parity.trials, "Trials per phase")->capture_default_str();
  lp->add_option("--n", learn_parity.n, "Database size (0 = the mode's required sample size)")
      ->capture_default_str();
  lp->add_option("--mode", learn_parity.mode, "'amplified' or 'single'")->capture_default_str();
  lp->add_option("--c", learn_parity.c, "Training-slice constant of the amplified learner")
      ->capture_default_str();
  lp->add_option("--c-prime", learn_parity.c_prime,
                 "Test-slice constant of the amplified learner")
      ->capture_default_str();
  lp->add_option("--sweep-factors", learn_parity.sweep_factors,
                 "Scale factors for the sample-size sweep (empty = no sweep)")
      ->delimiter(',');
  lp->add_option("--sweep-c", learn_parity.sweep_c,
                 "Calibrated training constant used by the sweep phases")
      ->capture_default_str();
  lp->add_option("--sweep-c-prime", learn_parity.sweep_c_prime,
                 "Calibrated test constant used by the sweep phases")
      ->capture_default_str();
  lp->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results =
        RunLearnParity(learn_parity, learn_parity_common.seed, 0,
                       ResolveThreads(learn_parity_common.threads), sink, pass);
    FinishRun(learn_parity_common, "learn-parity", LearnParityConfig(learn_parity), results, pass,
              sink, start);
  });

  ExpMechOpts exp_mech;
  CommonOpts exp_mech_common;
  CLI::App* em = app.add_subcommand(
      "exp-mech", "Run the exponential-mechanism learner over the parity hypothesis class");
  AddCommonFlags(em, exp_mech_common, "exp-mech");
  em->add_option("--hypotheses", exp_mech.hypotheses, "Hypothesis count (a power of two)")
      ->capture_default_str();
  em->add_option("--epsilon", exp_mech.epsilon, "Privacy budget (0 = uniform output check)")
      ->capture_default_str();
  em->add_option("--alpha", exp_mech.alpha, "Excess-error target")->capture_default_str();
  em->add_option("--beta", exp_mech.beta, "Failure budget")->capture_default_str();
  em->add_option("--trials", exp_mech.trials, "Trials per phase")->capture_default_str();
  em->add_option("--n", exp_mech.n, "Database size (0 = the agnostic sample bound)")
      ->capture_default_str();
  em->add_option("--opt-values", exp_mech.opt_values,
                 "Best-hypothesis error per phase (0 = realizable)")
      ->delimiter(',')
      ->capture_default_str();
  em->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results = RunExpMech(exp_mech, exp_mech_common.seed, 0,
                                    ResolveThreads(exp_mech_common.threads), sink, pass);
    FinishRun(exp_mech_common, "exp-mech", ExpMechConfig(exp_mech), results, pass, sink, start);
  });

  VerifyDpOpts verify_dp;
  CommonOpts verify_dp_common;
  CLI::App* vd = app.add_subcommand(
      "verify-dp", "Check privacy ratios and structural identities by exact enumeration");
  AddCommonFlags(vd, verify_dp_common, "verify-dp");
  vd->add_option("--target", verify_dp.target,
                 "parity-A | exp-mech | randomized-response | laplace-interval | identities")
      ->required();
  vd->add_option("--d", verify_dp.d, "Dimension bound (0 = the target's default)")
      ->capture_default_str();
  vd->add_option("--n", verify_dp.n, "Database-size bound (0 = the target's default)")
      ->capture_default_str();
  vd->add_option("--pairs", verify_dp.pairs, "Neighbor pairs for the parity-A target")
      ->capture_default_str();
  vd->add_option("--epsilon", verify_dp.epsilons, "Privacy budgets to check")
      ->delimiter(',')
      ->capture_default_str();
  vd->add_option("--mc-trials", verify_dp.mc_trials,
                 "Samples per input for the Monte-Carlo ratio check")
      ->capture_default_str();
  vd->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results = RunVerifyDp(verify_dp, verify_dp_common.seed,
                                     ResolveThreads(verify_dp_common.threads), sink, pass);
    FinishRun(verify_dp_common, "verify-dp", VerifyDpConfig(verify_dp), results, pass, sink,
              start);
  });

  SimulateSqOpts simulate_sq;
  CommonOpts simulate_sq_common;
  CLI::App* ss = app.add_subcommand(
      "simulate-sq-by-local",
      "Answer a statistical query with local-randomizer calls and measure the failure rate");
  AddCommonFlags(ss, simulate_sq_common, "simulate-sq-by-local");
  ss->add_option("--d", simulate_sq.d, "Input dimension of the example distribution")
      ->capture_default_str();
  ss->add_option("--tau", simulate_sq.tau, "Query tolerance")->capture_default_str();
  ss->add_option("--beta", simulate_sq.beta, "Allowed failure probability")
      ->capture_default_str();
  ss->add_option("--epsilon", simulate_sq.epsilon, "Per-entry privacy budget")
      ->capture_default_str();
  ss->add_option("--b", simulate_sq.b, "Query range bound")->capture_default_str();
  ss->add_option("--c", simulate_sq.c, "Slice-size constant")->capture_default_str();
  ss->add_option("--trials", simulate_sq.trials, "Trials")->capture_default_str();
  ss->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results =
        RunSimulateSqByLocal(simulate_sq, simulate_sq_common.seed, 0,
                             ResolveThreads(simulate_sq_common.threads), sink, pass);
    FinishRun(simulate_sq_common, "simulate-sq-by-local", SimulateSqConfig(simulate_sq), results,
              pass, sink, start);
  });

  SimulateLocalOpts simulate_local;
  CommonOpts simulate_local_common;
  CLI::App* sl = app.add_subcommand(
      "simulate-local-by-sq",
      "Replace local-randomizer invocations by rejection sampling against a statistical-query "
      "oracle and measure output fidelity");
  AddCommonFlags(sl, simulate_local_common, "simulate-local-by-sq");
  sl->add_option("--grid", simulate_local.grid, "'bit', 'four', or 'both'")
      ->capture_default_str();
  sl->add_option("--t", simulate_local.t, "Protocol invocation count the slack divides over")
      ->capture_default_str();
  sl->add_option("--beta", simulate_local.beta, "Total simulation slack")->capture_default_str();
  sl->add_option("--epsilon", simulate_local.epsilon, "Randomizer privacy budget")
      ->capture_default_str();
  sl->add_option("--trials", simulate_local.trials, "Sampling trials per grid")
      ->capture_default_str();
  sl->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results =
        RunSimulateLocalBySq(simulate_local, simulate_local_common.seed,
                             ResolveThreads(simulate_local_common.threads), sink, pass);
    FinishRun(simulate_local_common, "simulate-local-by-sq", SimulateLocalConfig(simulate_local),
              results, pass, sink, start);
  });

  MaskedAdaptiveOpts masked_adaptive;
  CommonOpts masked_adaptive_common;
  CLI::App* mp = app.add_subcommand(
      "masked-parity-adaptive",
      "Check exact recovery of every masked-parity concept by the two-round learner");
  AddCommonFlags(mp, masked_adaptive_common, "masked-parity-adaptive");
  mp->add_option("--ds", masked_adaptive.ds, "Dimensions for the exact-oracle phase")
      ->delimiter(',')
      ->capture_default_str();
  mp->add_option("--pattern-ds", masked_adaptive.pattern_ds,
                 "Dimensions for the adversarial sign-pattern phase")
      ->delimiter(',')
      ->capture_default_str();
  mp->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results = RunMaskedParityAdaptive(
        masked_adaptive, ResolveThreads(masked_adaptive_common.threads), sink, pass);
    FinishRun(masked_adaptive_common, "masked-parity-adaptive",
              MaskedAdaptiveConfig(masked_adaptive), results, pass, sink, start);
  });

  SeparationOpts separation;
  CommonOpts separation_common;
  CLI::App* sp = app.add_subcommand(
      "separation",
      "Compare nonadaptive query strategies against the adaptive learner under the adversarial "
      "oracle");
  AddCommonFlags(sp, separation_common, "separation");
  sp->add_option("--d", separation.d, "Masked-parity dimension (a power of two)")
      ->capture_default_str();
  sp->add_option("--t", separation.t, "Nonadaptive query budget")->capture_default_str();
  sp->add_option("--trials", separation.trials, "Hidden concepts drawn per strategy")
      ->capture_default_str();
  sp->add_option("--strategies", separation.strategies,
                 "'all' or a comma list of max-likelihood, round-one-plus-guess, "
                 "majority-of-three")
      ->capture_default_str();
  sp->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results = RunSeparation(separation, separation_common.seed, sink, pass);
    FinishRun(separation_common, "separation", SeparationConfig(separation), results, pass, sink,
              start);
  });

  SweepOpts sweep;
  CommonOpts sweep_common;
  CLI::App* sw = app.add_subcommand(
      "sweep", "Re-run an experiment over a list of values for one parameter");
  AddCommonFlags(sw, sweep_common, "sweep");
  sw->add_option("--experiment", sweep.experiment,
                 "learn-parity | exp-mech | simulate-sq-by-local")
      ->required();
  sw->add_option("--param", sweep.param, "Parameter to vary")->required();
  sw->add_option("--values", sweep.values, "Values to run")->delimiter(',')->required();
  sw->add_option("--d", sweep.d, "Fixed d (default: the experiment's default)");
  sw->add_option("--n", sweep.n, "Fixed n");
  sw->add_option("--trials", sweep.trials, "Fixed trial count");
  sw->add_option("--hypotheses", sweep.hypotheses, "Fixed hypothesis count");
  sw->add_option("--epsilon", sweep.epsilon, "Fixed epsilon");
  sw->add_option("--alpha", sweep.alpha, "Fixed alpha");
  sw->add_option("--beta", sweep.beta, "Fixed beta");
  sw->add_option("--tau", sweep.tau, "Fixed tau");
  sw->add_option("--b", sweep.b, "Fixed query range bound");
  sw->add_option("--c", sweep.c, "Fixed constant c");
  sw->add_option("--c-prime", sweep.c_prime, "Fixed constant c'");
  sw->callback([&]() {
    const auto start = std::chrono::steady_clock::now();
    CsvSink sink;
    bool pass = false;
    const json results = RunSweep(sweep, sweep_common.seed,
                                  ResolveThreads(sweep_common.threads), sink, pass);
    FinishRun(sweep_common, "sweep", SweepConfig(sweep), results, pass, sink, start);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
