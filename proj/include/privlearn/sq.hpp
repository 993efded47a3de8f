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
// Statistical-query oracles and the reverse simulation: reproducing a local
// protocol's randomizer outputs from SQ answers alone, by rejection sampling.
// For a randomizer R invoked on a hidden entry distributed as D, the law of
// the output w is p(w) = E_D Pr[R(z) = w], which is within an exp(epsilon)
// factor of the reference law q(w) = Pr[R(0) = w]. The simulator proposes
// w ~ q, estimates p(w) through SQ queries built from R's transition
// probabilities, and accepts with probability ~ p(w) / (q(w) exp(epsilon)).

#ifndef PRIVLEARN_SQ_HPP_
#define PRIVLEARN_SQ_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "privlearn/learning.hpp"
#include "privlearn/local.hpp"
#include "privlearn/rng.hpp"

namespace privlearn {

// Oracle answering statistical queries g: T -> [-1, 1] about a distribution
// with finite support.
//   kExact:       returns E[g] exactly.
//   kAdversarial: returns E[g] + perturbation(query_index, tau), clamped
//                 nowhere -- the perturbation callback must stay in
//                 [-tau, tau] and a violation throws.
//   kSampled:     returns the mean of g over fresh draws (excluded from
//                 acceptance checks; provided for experiments).
template <class T>
class SqOracle {
 public:
  enum class Variant { kExact, kAdversarial, kSampled };

  static SqOracle Exact(std::vector<std::pair<T, double>> support) {
    return SqOracle(Variant::kExact, std::move(support), nullptr, 0, nullptr);
  }
  static SqOracle Adversarial(std::vector<std::pair<T, double>> support,
                              std::function<double(std::size_t, double)> perturbation) {
    if (!perturbation) throw std::invalid_argument("SqOracle: missing perturbation");
    return SqOracle(Variant::kAdversarial, std::move(support), std::move(perturbation), 0,
                    nullptr);
  }
  static SqOracle Sampled(std::vector<std::pair<T, double>> support,
                          std::size_t samples_per_query, Rng* rng) {
    if (samples_per_query == 0 || rng == nullptr) {
      throw std::invalid_argument("SqOracle: sampled variant needs samples and an rng");
    }
    return SqOracle(Variant::kSampled, std::move(support), nullptr, samples_per_query, rng);
  }

  Variant variant() const { return variant_; }
  std::size_t queries_asked() const { return queries_asked_; }
  const std::vector<std::pair<T, double>>& support() const { return support_; }

  double Answer(const std::function<double(const T&)>& g, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("SqOracle::Answer: tau must be positive");
    const std::size_t index = queries_asked_++;
    if (variant_ == Variant::kSampled) {
      double total = 0.0;
      for (std::size_t i = 0; i < samples_per_query_; ++i) {
        total += CheckRange(g(SampleSupport()));
      }
      return total / static_cast<double>(samples_per_query_);
    }
    double expectation = 0.0;
    for (const auto& [point, weight] : support_) {
      expectation += weight * CheckRange(g(point));
    }
    if (variant_ == Variant::kExact) return expectation;
    const double shift = perturbation_(index, tau);
    if (!(shift >= -tau && shift <= tau)) {
      throw std::logic_error("SqOracle: adversarial perturbation outside [-tau, tau]");
    }
    return expectation + shift;
  }

 private:
  SqOracle(Variant variant, std::vector<std::pair<T, double>> support,
           std::function<double(std::size_t, double)> perturbation,
           std::size_t samples_per_query, Rng* rng)
      : variant_(variant),
        support_(std::move(support)),
        perturbation_(std::move(perturbation)),
        samples_per_query_(samples_per_query),
        rng_(rng) {
    if (support_.empty()) throw std::invalid_argument("SqOracle: empty support");
    double total = 0.0;
    cumulative_.reserve(support_.size());
    for (const auto& [point, weight] : support_) {
      if (!(weight >= 0.0)) throw std::invalid_argument("SqOracle: negative weight");
      total += weight;
      cumulative_.push_back(total);
    }
    if (total < 1.0 - 1e-9 || total > 1.0 + 1e-9) {
      throw std::invalid_argument("SqOracle: weights must sum to 1");
    }
    cumulative_.back() = 1.0;
  }

  static double CheckRange(double value) {
    if (!(value >= -1.0 - 1e-12 && value <= 1.0 + 1e-12)) {
      throw std::domain_error("SqOracle: query value outside [-1, 1]");
    }
    return value;
  }

  const T& SampleSupport() {
    const double u = rng_->Uniform01();
    std::size_t lo = 0, hi = cumulative_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative_[mid] > u) hi = mid; else lo = mid + 1;
    }
    return support_[lo].first;
  }

  Variant variant_;
  std::vector<std::pair<T, double>> support_;
  std::vector<double> cumulative_;
  std::function<double(std::size_t, double)> perturbation_;
  std::size_t samples_per_query_ = 0;
  Rng* rng_ = nullptr;
  std::size_t queries_asked_ = 0;
};

using SymbolSqOracle = SqOracle<std::size_t>;
using ExampleSqOracle = SqOracle<Example>;

// Support of a labeled distribution, materialized for oracle construction.
std::vector<std::pair<Example, double>> MaterializeSupport(const LabeledDistribution& dist);

// Uniform-weight symbol support {0..count-1}, and an explicit-weight variant.
std::vector<std::pair<std::size_t, double>> SymbolSupport(std::span<const double> weights);

struct RejectionStats {
  std::size_t iterations = 0;
  std::size_t sq_queries = 0;
};

// Rejection-sampling simulator for the randomizer invocations a single run of
// a local protocol makes. t is the protocol's total invocation count and
// beta the allowed simulation slack; each simulated invocation uses SQ
// tolerance tau = beta / (3 exp(2 epsilon) t), giving estimates within a
// multiplicative (1 +- phi), phi = beta / (3t) <= 1/3 required.
class RejectionSimulator {
 public:
  struct HistoryItem {
    const FiniteRandomizer* randomizer;
    std::size_t answer;
  };

  RejectionSimulator(std::size_t t, double beta, double epsilon);

  double phi() const { return phi_; }
  double tau() const { return tau_; }
  double epsilon() const { return epsilon_; }

  // Simulates R applied to an entry with prior invocation history `history`
  // (same entry, in order). Empty history uses the single-query accept rule;
  // conditioned simulation estimates the numerator and denominator of the
  // conditional law with two queries per iteration. The reference input is
  // symbol 0. Precondition: the history randomizers' epsilons plus R's must
  // not exceed this simulator's epsilon -- the per-entry budget the protocol
  // driver enforces. Beyond it the normalized queries leave [-1, 1] and the
  // oracle rejects them.
  std::size_t SimulateNext(const FiniteRandomizer& randomizer,
                           std::span<const HistoryItem> history, SymbolSqOracle& oracle,
                           Rng& rng, RejectionStats* stats = nullptr);

 private:
  std::size_t t_;
  double beta_;
  double epsilon_;
  double phi_;
  double tau_;
};

// Convenience wrapper: one invocation with no history (the t = 1 case of the
// conditioned engine).
std::size_t RejectionSimulate(const FiniteRandomizer& randomizer, std::size_t t, double beta,
                              double epsilon, SymbolSqOracle& oracle, Rng& rng,
                              RejectionStats* stats = nullptr);

// Exact output law of the simulator for one unconditioned invocation under an
// oracle answering with the given perturbations (index-aligned with the
// proposal outcomes; empty = exact answers). Used by distribution-level
// tests; returns the probability of each output symbol.
std::vector<double> ExactRejectionOutputLaw(const FiniteRandomizer& randomizer,
                                            std::span<const double> weights, std::size_t t,
                                            double beta, double epsilon,
                                            std::span<const double> answer_perturbations);

struct LocalBySqResult {
  std::size_t output = 0;
  RejectionStats stats;
  QueryPlan plan{PlanMode::kNoninteractive};
};

// Runs a local protocol with every randomizer invocation replaced by
// SQ-driven rejection sampling against the entry distribution represented by
// `oracle`. Per-entry invocation budgets are enforced against epsilon.
LocalBySqResult SimulateLocalAlgorithmBySq(const LocalAlgorithm& algorithm, double beta,
                                           double epsilon, SymbolSqOracle& oracle, Rng& rng);

// Drives an SQ learner (same duck interface as SimulateSqLearnerByLocal)
// directly against an answer source with
//   double Answer(const std::function<double(const Example&)>&, double tau).
template <class Learner, class OracleT>
auto RunSqLearner(Learner& learner, OracleT& oracle, QueryPlan* plan_out = nullptr) {
  const std::size_t rounds = learner.Rounds();
  QueryPlan plan(rounds <= 1 ? PlanMode::kNoninteractive : PlanMode::kInteractive);
  std::vector<double> answers;
  for (std::size_t round = 0; round < rounds; ++round) {
    const std::vector<SqLearnerQuery> queries = learner.RoundQueries(round, answers);
    std::vector<std::size_t> positions;
    for (const SqLearnerQuery& q : queries) {
      positions.push_back(plan.DeclareQuery(q.id, q.tau, round));
    }
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const double v = oracle.Answer(queries[i].g, queries[i].tau);
      plan.RecordAnswer(positions[i], v);
      answers.push_back(v);
    }
  }
  if (plan_out != nullptr) *plan_out = std::move(plan);
  return learner.Finish(std::span<const double>(answers));
}

}  // namespace privlearn

#endif  // PRIVLEARN_SQ_HPP_
