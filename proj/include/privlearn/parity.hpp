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
//
// Private learner for parity functions c_r(x) = <r, x> mod 2 under the
// uniform distribution.
//
// The single-shot learner releases bot with probability 1/2, independently
// keeps each entry with probability epsilon/4, solves the kept constraints
// over GF(2), and returns a uniform solution (bot when none exists). Privacy
// comes from the subsampling: one entry changes the output distribution by a
// factor of at most 1 + 2p/(1-p) <= exp(epsilon). Its success probability is
// only ~1/4, so the amplified wrapper runs it on k disjoint slices and
// privately selects the candidate with the smallest perturbed test error.

#ifndef PRIVLEARN_PARITY_HPP_
#define PRIVLEARN_PARITY_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "privlearn/dp.hpp"
#include "privlearn/gf2.hpp"
#include "privlearn/learning.hpp"
#include "privlearn/rng.hpp"

namespace privlearn {

// Single-shot configuration. Requires 0 < epsilon <= 1/2 so the inclusion
// probability epsilon/4 stays in the range where the privacy argument holds.
struct ParityConfig {
  explicit ParityConfig(double eps) : epsilon(eps) {
    if (!(eps > 0.0 && eps <= 0.5)) {
      throw std::invalid_argument("ParityConfig: epsilon must be in (0, 1/2]");
    }
  }
  double epsilon;
  double InclusionProbability() const { return epsilon / 4.0; }
};

// Result of one learner run: r is empty on bot. Diagnostics record what the
// run saw.
struct ParityOutcome {
  std::optional<BitVector> r;
  std::size_t subsample_size = 0;
  std::uint64_t solution_count = 0;  // |V_S| of the solved system; 0 when bot early

  bool IsBot() const { return !r.has_value(); }
};

// One run of the single-shot learner on a {0,1}-labeled database.
ParityOutcome LearnParityOnce(const Database& db, const ParityConfig& config, Rng& rng);

// Exact output distribution of the single-shot learner: index v in [0, 2^d)
// is the probability of releasing r = v (integer encoding), index 2^d is bot.
// Enumerates all 2^n subsets; requires db.size() <= subset_limit and
// dimension <= 10.
std::vector<double> ExactParityDistribution(const Database& db, const ParityConfig& config,
                                            std::size_t subset_limit = 12);

// The single-shot learner as a finite-outcome mechanism over the same outcome
// indexing, for privacy-ratio checks.
FiniteMechanism<Database> ParityLearnerAsFinite(const ParityConfig& config,
                                                std::size_t dimension,
                                                std::size_t subset_limit = 12);

// Smallest database size for which the single-shot learner's success bound
// applies: ceil((8 / (epsilon alpha)) * (d ln 2 + ln 4)).
std::size_t ParitySingleShotSampleSize(std::size_t dimension, double epsilon, double alpha);

// Amplified-learner configuration with its derived quantities:
//   beta' = beta/2, alpha' = alpha/5,
//   k  = max(1, ceil(ln(1/beta') / ln(4/3)))          candidates
//   n' = ceil(c d / (epsilon alpha'))                  per training slice
//   s  = ceil((c' k / (alpha' epsilon)) ln(k/beta'))   test slice
struct AmplifiedParityConfig {
  AmplifiedParityConfig(std::size_t dimension, double epsilon, double alpha, double beta,
                        double c = 20.0, double c_prime = 48.0);

  std::size_t dimension;
  double epsilon;
  double alpha;
  double beta;
  double c;
  double c_prime;

  double beta_prime;
  double alpha_prime;
  std::size_t k;
  std::size_t slice_size;  // n'
  std::size_t test_size;   // s

  std::size_t MinimumDatabaseSize() const { return k * slice_size + test_size + 1; }
};

// k * n' + s + 1 for the given parameters.
std::size_t RequiredSampleSizeAmplified(std::size_t dimension, double epsilon, double alpha,
                                        double beta, double c = 20.0, double c_prime = 48.0);

// Detail of one amplified run, for experiment reporting.
struct AmplifiedOutcome {
  std::optional<BitVector> r;
  std::vector<ParityOutcome> candidates;
  std::vector<double> perturbed_errors;  // +infinity for bot candidates
  std::size_t selected_index = 0;        // meaningful when r is set

  bool IsBot() const { return !r.has_value(); }
};

// Amplified learner: throws InsufficientSamplesError when
// db.size() <= k n' + s; runs the single-shot learner on k disjoint training
// slices (full epsilon each; the slices are disjoint), scores the non-bot
// candidates on the test slice with Laplace(k/(s epsilon)) noise, and returns
// the candidate with the smallest perturbed error (lowest index on ties).
// Returns bot only when every candidate is bot.
AmplifiedOutcome LearnParityAmplified(const Database& db, const AmplifiedParityConfig& config,
                                      Rng& rng);

// Misclassification rate of c_r against the database labels.
double ParityErrorOnDatabase(const BitVector& r, const Database& db, std::size_t begin,
                             std::size_t end);

}  // namespace privlearn

#endif  // PRIVLEARN_PARITY_HPP_
