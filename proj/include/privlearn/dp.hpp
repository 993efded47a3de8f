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
// Primitives shared by every mechanism in this library: Laplace noise,
// privacy-budget accounting, concentration-bound helpers used as test oracles,
// and an empirical checker that compares a mechanism's output distributions on
// neighboring inputs against the exp(epsilon) ratio.

#ifndef PRIVLEARN_DP_HPP_
#define PRIVLEARN_DP_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "privlearn/rng.hpp"

namespace privlearn {

// Privacy parameter epsilon. Zero is allowed (a degenerate, perfectly private
// budget); negative values are rejected.
struct PrivacyParams {
  explicit PrivacyParams(double eps) : epsilon(eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("PrivacyParams: epsilon must be >= 0");
  }
  double epsilon;
};

class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-index privacy-budget accounting: the sum of charges against one index
// may never exceed the cap. Instances are not thread-safe; mutation must be
// serialized per ledger.
class BudgetLedger {
 public:
  explicit BudgetLedger(double cap) : cap_(cap) {
    if (!(cap >= 0.0)) throw std::invalid_argument("BudgetLedger: cap must be >= 0");
  }

  // Throws BudgetExceededError when the accumulated charge would pass the cap
  // (with a 1e-12 absolute slack against float accumulation).
  void Charge(std::size_t index, double epsilon);

  double Charged(std::size_t index) const;
  double cap() const { return cap_; }

 private:
  double cap_;
  std::map<std::size_t, double> charged_;
};

// Laplace(scale) noise; density exp(-|x|/scale) / (2 scale).
double LaplaceSample(double scale, Rng& rng);

// value + Laplace(sensitivity / epsilon). A sensitivity of zero returns the
// value unperturbed; negative sensitivity or nonpositive epsilon throws.
double LaplaceMechanism(double value, double sensitivity, double epsilon, Rng& rng);

// Total budget of a sequence of mechanisms run on the same input.
double ComposeBudgets(const std::vector<double>& epsilons);

// Tail-bound helpers. These are loose closed forms used as oracles by the
// experiment harnesses; all results are clamped to [0, 1] and negative
// deviations throw.

// Multiplicative Chernoff bounds for the mean of n i.i.d. indicators with mean
// mu: {upper tail >= (1+phi) mu, lower tail <= (1-phi) mu}.
std::pair<double, double> ChernoffMultiplicativeBound(std::size_t n, double mu, double phi);

// Two-sided Hoeffding bound for the mean of n i.i.d. variables in [a, b]
// deviating by more than delta.
double HoeffdingBound(std::size_t n, double delta, double a, double b);

// Tail bound for the mean of n i.i.d. Laplace(scale) variables deviating by
// more than delta; valid in the small-deviation regime delta <= 2*scale.
double LaplaceSumBound(std::size_t n, double delta, double scale);

// A randomized mechanism with a finite outcome space, presented both as an
// exact distribution (for analytic ratio checks) and as a sampler (for
// Monte-Carlo checks). Either function may be empty if a mode is unused.
template <class Input>
struct FiniteMechanism {
  std::size_t outcome_count = 0;
  std::function<std::vector<double>(const Input&)> exact_distribution;
  std::function<std::size_t(const Input&, Rng&)> sample;
};

struct PrivacyRatioResult {
  double max_ratio = 0.0;
  // Monte-Carlo mode only: true when some outcome was observed fewer than 25
  // times on either input, making the ratio estimate unreliable.
  bool inconclusive = false;
  std::size_t trials = 0;
};

// Largest ratio Pr[M(z) = w] / Pr[M(z') = w] over outcomes w and both
// orderings of the pair, from the exact distributions. Outcomes with zero
// probability on both inputs are skipped; positive-vs-zero yields infinity.
template <class Input>
PrivacyRatioResult ExactPrivacyRatio(const FiniteMechanism<Input>& mechanism,
                                     const Input& z, const Input& z_prime) {
  if (!mechanism.exact_distribution) {
    throw std::invalid_argument("ExactPrivacyRatio: mechanism has no exact distribution");
  }
  const std::vector<double> p = mechanism.exact_distribution(z);
  const std::vector<double> q = mechanism.exact_distribution(z_prime);
  if (p.size() != q.size()) {
    throw std::invalid_argument("ExactPrivacyRatio: outcome spaces differ between neighbors");
  }
  PrivacyRatioResult result;
  for (std::size_t w = 0; w < p.size(); ++w) {
    if (p[w] == 0.0 && q[w] == 0.0) continue;
    if (p[w] == 0.0 || q[w] == 0.0) {
      result.max_ratio = std::numeric_limits<double>::infinity();
      continue;
    }
    const double r = p[w] > q[w] ? p[w] / q[w] : q[w] / p[w];
    if (r > result.max_ratio) result.max_ratio = r;
  }
  return result;
}

// Monte-Carlo estimate of the same ratio with add-one smoothing on the
// outcome counts of both runs.
template <class Input>
PrivacyRatioResult MonteCarloPrivacyRatio(const FiniteMechanism<Input>& mechanism,
                                          const Input& z, const Input& z_prime,
                                          std::size_t trials, Rng& rng) {
  if (!mechanism.sample) {
    throw std::invalid_argument("MonteCarloPrivacyRatio: mechanism has no sampler");
  }
  if (trials == 0) throw std::invalid_argument("MonteCarloPrivacyRatio: trials must be positive");
  const std::size_t k = mechanism.outcome_count;
  std::vector<std::uint64_t> count_z(k, 0), count_zp(k, 0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t w = mechanism.sample(z, rng);
    if (w >= k) throw std::logic_error("MonteCarloPrivacyRatio: outcome out of range");
    ++count_z[w];
  }
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t w = mechanism.sample(z_prime, rng);
    if (w >= k) throw std::logic_error("MonteCarloPrivacyRatio: outcome out of range");
    ++count_zp[w];
  }
  PrivacyRatioResult result;
  result.trials = trials;
  const double denom = static_cast<double>(trials + k);
  for (std::size_t w = 0; w < k; ++w) {
    if (count_z[w] < 25 || count_zp[w] < 25) result.inconclusive = true;
    const double p = static_cast<double>(count_z[w] + 1) / denom;
    const double q = static_cast<double>(count_zp[w] + 1) / denom;
    const double r = p > q ? p / q : q / p;
    if (r > result.max_ratio) result.max_ratio = r;
  }
  return result;
}

}  // namespace privlearn

#endif  // PRIVLEARN_DP_HPP_
