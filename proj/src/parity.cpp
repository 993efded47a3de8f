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

#include "privlearn/parity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace privlearn {
namespace {

constexpr std::size_t kMaxExactDimension = 10;
constexpr std::size_t kMaxSubsetLimit = 20;

void CheckParityDatabase(const Database& db) {
  if (db.kind != LabelKind::kBit) {
    throw std::invalid_argument("parity learner requires {0,1} labels");
  }
  for (const Example& e : db.entries) {
    if (e.y != 0 && e.y != 1) throw std::invalid_argument("parity learner: label not 0/1");
    if (e.x.size() != db.dimension) {
      throw std::invalid_argument("parity learner: entry dimension mismatch");
    }
  }
}

ParityOutcome LearnOnceRange(const Database& db, std::size_t begin, std::size_t end,
                             const ParityConfig& config, Rng& rng) {
  ParityOutcome outcome;
  if (rng.Bernoulli(0.5)) return outcome;  // release bot, independent of data

  const double p = config.InclusionProbability();
  Gf2System system;
  system.dimension = db.dimension;
  for (std::size_t i = begin; i < end; ++i) {
    if (rng.Bernoulli(p)) {
      system.AddRow(db.entries[i].x, db.entries[i].y);
      ++outcome.subsample_size;
    }
  }

  const AffineSubspace solutions = GaussianEliminate(system);
  if (solutions.empty()) return outcome;  // contradictory subsample
  outcome.solution_count = solutions.Size();
  outcome.r = solutions.SampleUniform(rng);
  return outcome;
}

}  // namespace

ParityOutcome LearnParityOnce(const Database& db, const ParityConfig& config, Rng& rng) {
  CheckParityDatabase(db);
  return LearnOnceRange(db, 0, db.entries.size(), config, rng);
}

std::vector<double> ExactParityDistribution(const Database& db, const ParityConfig& config,
                                            std::size_t subset_limit) {
  CheckParityDatabase(db);
  if (subset_limit > kMaxSubsetLimit) {
    throw std::invalid_argument("ExactParityDistribution: subset limit too large");
  }
  if (db.entries.size() > subset_limit) {
    throw std::domain_error("ExactParityDistribution: database too large for enumeration");
  }
  if (db.dimension > kMaxExactDimension) {
    throw std::domain_error("ExactParityDistribution: dimension too large for enumeration");
  }

  const std::size_t n = db.entries.size();
  const std::size_t d = db.dimension;
  const std::size_t bot = std::size_t{1} << d;
  const double p = config.InclusionProbability();
  std::vector<double> probs(bot + 1, 0.0);

  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    Gf2System system;
    system.dimension = d;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1ULL) system.AddRow(db.entries[i].x, db.entries[i].y);
    }
    const int kept = std::popcount(mask);
    const double weight = std::pow(p, kept) * std::pow(1.0 - p, static_cast<int>(n) - kept);
    const AffineSubspace solutions = GaussianEliminate(system);
    if (solutions.empty()) {
      probs[bot] += weight;
      continue;
    }
    const double share = weight / static_cast<double>(solutions.Size());
    for (const BitVector& v : solutions.Enumerate()) probs[v.ToInteger()] += share;
  }

  for (double& q : probs) q *= 0.5;
  probs[bot] += 0.5;
  return probs;
}

FiniteMechanism<Database> ParityLearnerAsFinite(const ParityConfig& config,
                                                std::size_t dimension,
                                                std::size_t subset_limit) {
  FiniteMechanism<Database> m;
  const std::size_t bot = std::size_t{1} << dimension;
  m.outcome_count = bot + 1;
  m.exact_distribution = [config, subset_limit](const Database& db) {
    return ExactParityDistribution(db, config, subset_limit);
  };
  m.sample = [config, bot](const Database& db, Rng& rng) {
    const ParityOutcome outcome = LearnParityOnce(db, config, rng);
    return outcome.IsBot() ? bot : static_cast<std::size_t>(outcome.r->ToInteger());
  };
  return m;
}

std::size_t ParitySingleShotSampleSize(std::size_t dimension, double epsilon, double alpha) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ParitySingleShotSampleSize: epsilon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ParitySingleShotSampleSize: alpha outside (0,1)");
  const double bound = (8.0 / (epsilon * alpha)) *
                       (static_cast<double>(dimension) * std::log(2.0) + std::log(4.0));
  return static_cast<std::size_t>(std::ceil(bound));
}

AmplifiedParityConfig::AmplifiedParityConfig(std::size_t dim, double eps, double a, double b,
                                             double c_in, double c_prime_in)
    : dimension(dim), epsilon(eps), alpha(a), beta(b), c(c_in), c_prime(c_prime_in) {
  if (dim == 0) throw std::invalid_argument("AmplifiedParityConfig: dimension must be positive");
  ParityConfig check(eps);  // same epsilon range as the single-shot learner
  (void)check;
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("AmplifiedParityConfig: alpha outside (0,1)");
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("AmplifiedParityConfig: beta outside (0,1)");
  if (!(c_in > 0.0) || !(c_prime_in > 0.0)) {
    throw std::invalid_argument("AmplifiedParityConfig: constants must be positive");
  }
  beta_prime = b / 2.0;
  alpha_prime = a / 5.0;
  k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(std::log(1.0 / beta_prime) / std::log(4.0 / 3.0))));
  slice_size = static_cast<std::size_t>(
      std::ceil(c * static_cast<double>(dim) / (eps * alpha_prime)));
  test_size = static_cast<std::size_t>(
      std::ceil((c_prime * static_cast<double>(k) / (alpha_prime * eps)) *
                std::log(static_cast<double>(k) / beta_prime)));
}

std::size_t RequiredSampleSizeAmplified(std::size_t dimension, double epsilon, double alpha,
                                        double beta, double c, double c_prime) {
  return AmplifiedParityConfig(dimension, epsilon, alpha, beta, c, c_prime)
      .MinimumDatabaseSize();
}

double ParityErrorOnDatabase(const BitVector& r, const Database& db, std::size_t begin,
                             std::size_t end) {
  if (begin >= end || end > db.entries.size()) {
    throw std::invalid_argument("ParityErrorOnDatabase: bad range");
  }
  std::size_t wrong = 0;
  for (std::size_t i = begin; i < end; ++i) {
    if (InnerProduct(r, db.entries[i].x) != db.entries[i].y) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(end - begin);
}

AmplifiedOutcome LearnParityAmplified(const Database& db, const AmplifiedParityConfig& config,
                                      Rng& rng) {
  CheckParityDatabase(db);
  if (db.dimension != config.dimension) {
    throw std::invalid_argument("LearnParityAmplified: dimension mismatch");
  }
  const std::size_t needed = config.k * config.slice_size + config.test_size;
  if (db.entries.size() <= needed) {
    throw InsufficientSamplesError("amplified parity learner needs more than " +
                                   std::to_string(needed) + " entries, got " +
                                   std::to_string(db.entries.size()));
  }

  const ParityConfig single(config.epsilon);
  AmplifiedOutcome result;
  result.candidates.reserve(config.k);
  for (std::size_t j = 0; j < config.k; ++j) {
    const std::size_t begin = j * config.slice_size;
    result.candidates.push_back(
        LearnOnceRange(db, begin, begin + config.slice_size, single, rng));
  }

  const std::size_t test_begin = config.k * config.slice_size;
  const std::size_t test_end = test_begin + config.test_size;
  const double noise_scale =
      static_cast<double>(config.k) / (static_cast<double>(config.test_size) * config.epsilon);

  result.perturbed_errors.assign(config.k, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < config.k; ++j) {
    if (result.candidates[j].IsBot()) continue;
    const double err =
        ParityErrorOnDatabase(*result.candidates[j].r, db, test_begin, test_end);
    result.perturbed_errors[j] = err + LaplaceSample(noise_scale, rng);
  }

  std::size_t best = config.k;
  for (std::size_t j = 0; j < config.k; ++j) {
    if (best == config.k || result.perturbed_errors[j] < result.perturbed_errors[best]) {
      if (!result.candidates[j].IsBot()) best = j;
    }
  }
  if (best == config.k) return result;  // every slice came back bot

  result.selected_index = best;
  result.r = result.candidates[best].r;
  return result;
}

}  // namespace privlearn
