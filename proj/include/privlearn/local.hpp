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
// Local protocols: each database entry is only ever touched through an
// epsilon-bounded randomizer, and a per-entry ledger enforces that the charges
// against any single entry never exceed the cap. On top of the oracle sits the
// reduction that answers statistical queries by averaging Laplace-noised
// per-entry responses over a fresh slice of the database.

#ifndef PRIVLEARN_LOCAL_HPP_
#define PRIVLEARN_LOCAL_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "privlearn/dp.hpp"
#include "privlearn/learning.hpp"
#include "privlearn/rng.hpp"

namespace privlearn {

// Randomizer over a finite input domain with a finite output alphabet, given
// by an explicit transition matrix (row u = output distribution on input u).
// Construction verifies transparency claims exhaustively: rows sum to 1
// within 1e-9 and every pair of rows is within a pointwise exp(epsilon)
// factor (zero-vs-zero allowed, positive-vs-zero is a violation).
class FiniteRandomizer {
 public:
  FiniteRandomizer(std::string id, double epsilon,
                   std::vector<std::vector<double>> transition);

  const std::string& id() const { return id_; }
  double epsilon() const { return epsilon_; }
  std::size_t input_count() const { return transition_.size(); }
  std::size_t output_count() const { return transition_.empty() ? 0 : transition_[0].size(); }

  double TransitionProb(std::size_t input, std::size_t output) const;

  // One draw from row `input`, by inverse CDF.
  std::size_t Apply(std::size_t input, Rng& rng) const;

 private:
  std::string id_;
  double epsilon_;
  std::vector<std::vector<double>> transition_;
  std::vector<std::vector<double>> cumulative_;
};

// Binary randomized response: keep the true bit with probability
// exp(epsilon) / (1 + exp(epsilon)).
FiniteRandomizer MakeRandomizedResponse(double epsilon, const std::string& id = "rr");

// Real-output randomizer R(u) = g(u) + Lap(2b / epsilon) for a query g with
// range [-b, b]. The sensitivity of g across inputs is at most 2b, so each
// application is epsilon-private for the entry it touches.
class LaplaceQueryRandomizer {
 public:
  LaplaceQueryRandomizer(std::string id, double epsilon, double b,
                         std::function<double(const Example&)> g);

  const std::string& id() const { return id_; }
  double epsilon() const { return epsilon_; }
  double b() const { return b_; }
  double NoiseScale() const { return 2.0 * b_ / epsilon_; }
  double Query(const Example& e) const;  // g alone, range-checked

  double Apply(const Example& e, Rng& rng) const;

 private:
  std::string id_;
  double epsilon_;
  double b_;
  std::function<double(const Example&)> g_;
};

enum class PlanMode : std::uint8_t { kNoninteractive, kInteractive };

// Record of the local-randomizer invocations and the query/answer stream of a
// protocol run. Noninteractive plans must declare every query before the
// first answer is recorded; a violation is a programming error and throws
// std::logic_error.
class QueryPlan {
 public:
  struct Invocation {
    std::size_t entry_index;
    std::string randomizer_id;
    double epsilon;
    std::size_t round;
    double output;
  };
  struct QueryRecord {
    std::string id;
    double tau;
    std::size_t round;
    bool answered = false;
    double answer = 0.0;
  };

  explicit QueryPlan(PlanMode mode) : mode_(mode) {}

  std::size_t DeclareQuery(const std::string& id, double tau, std::size_t round);
  // Per-invocation records are kept only when enabled; they can run to many
  // thousands per query slice.
  void set_record_invocations(bool enabled) { record_invocations_ = enabled; }
  bool record_invocations() const { return record_invocations_; }
  void RecordInvocation(Invocation invocation);
  void RecordAnswer(std::size_t query_position, double answer);

  PlanMode mode() const { return mode_; }
  const std::vector<Invocation>& invocations() const { return invocations_; }
  const std::vector<QueryRecord>& queries() const { return queries_; }

  // One JSON object per line: {"index","randomizer","epsilon","round","output"}.
  std::string InvocationsJsonLines() const;
  // One JSON object per line: {"query","tau","answer","round"}.
  std::string QueriesJsonLines() const;

 private:
  PlanMode mode_;
  bool answers_started_ = false;
  bool record_invocations_ = false;
  std::vector<Invocation> invocations_;
  std::vector<QueryRecord> queries_;
};

// Access to a database restricted to randomizer invocations, with per-entry
// budget enforcement.
template <class Entry>
class LocalOracle {
 public:
  LocalOracle(std::span<const Entry> entries, double epsilon_cap)
      : entries_(entries), ledger_(epsilon_cap) {}

  template <class Randomizer>
  auto Invoke(std::size_t index, const Randomizer& randomizer, Rng& rng) {
    if (index >= entries_.size()) throw std::out_of_range("LocalOracle::Invoke: index out of range");
    ledger_.Charge(index, randomizer.epsilon());
    return randomizer.Apply(entries_[index], rng);
  }

  std::size_t size() const { return entries_.size(); }
  const BudgetLedger& ledger() const { return ledger_; }

 private:
  std::span<const Entry> entries_;
  BudgetLedger ledger_;
};

using ExampleOracle = LocalOracle<Example>;
using SymbolOracle = LocalOracle<std::size_t>;

// A local protocol over a finite symbol domain, driven one randomizer
// invocation at a time. The protocol is a pure function of the answer
// history: NextStep(answers) names invocation number answers.size(), or
// nullopt when done. Interactive protocols may choose steps from answer
// values; noninteractive ones must not (the executor verifies this by
// planning all steps against placeholder answers first).
class LocalAlgorithm {
 public:
  struct Step {
    std::size_t entry_index;
    const FiniteRandomizer* randomizer;
  };

  virtual ~LocalAlgorithm() = default;
  virtual std::size_t TotalInvocations() const = 0;
  virtual bool Interactive() const = 0;
  virtual std::optional<Step> NextStep(std::span<const std::size_t> answers) const = 0;
  virtual std::size_t Output(std::span<const std::size_t> answers) const = 0;
};

// Executes the protocol against a real symbol database behind a
// budget-enforcing oracle with per-entry cap epsilon_cap.
std::size_t RunLocalAlgorithm(LocalAlgorithm& algorithm, std::span<const std::size_t> entries,
                              double epsilon_cap, Rng& rng, QueryPlan* plan_out = nullptr);

// Slice size that makes the noisy average below tau-accurate with probability
// 1 - beta_per_query: ceil(c * ln(1/beta_per_query) * b^2 / (epsilon^2 tau^2)).
std::size_t SqSimulationSliceSize(double b, double epsilon, double tau,
                                  double beta_per_query, double c = 32.0);

// Answer one statistical query from local randomizer calls: the mean of
// R_g over the fresh entries [begin, end). Every touched entry is charged the
// randomizer's full epsilon, so reusing a slice trips the budget ledger.
double SimulateSqQueryByLocal(ExampleOracle& oracle, std::size_t begin, std::size_t end,
                              const LaplaceQueryRandomizer& randomizer, Rng& rng,
                              QueryPlan* plan = nullptr, std::size_t round = 0,
                              double tau = 0.0);

// One statistical query of an SQ learner: g with range [-b, b], to be
// answered within tolerance tau.
struct SqLearnerQuery {
  std::string id;
  std::function<double(const Example&)> g;
  double b = 1.0;
  double tau = 0.0;
};

// Drives an SQ learner against a database using only local randomizer calls.
//
// Learner duck interface:
//   std::size_t TotalQueries() const;
//   std::size_t Rounds() const;
//   std::vector<SqLearnerQuery> RoundQueries(std::size_t round,
//                                            std::span<const double> answers);
//   Output Finish(std::span<const double> answers);
//
// Each query gets a fresh slice sized for per-query failure beta / t, so the
// whole run reproduces the SQ learner's output with probability >= 1 - beta.
// Throws InsufficientSamplesError when the database runs out.
template <class Learner>
auto SimulateSqLearnerByLocal(Learner& learner, const Database& db, double epsilon,
                              double beta, Rng& rng, QueryPlan* plan_out = nullptr,
                              double c = 32.0) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("SimulateSqLearnerByLocal: beta outside (0,1)");
  }
  const std::size_t t = learner.TotalQueries();
  if (t == 0) throw std::invalid_argument("SimulateSqLearnerByLocal: learner asks no queries");
  const double beta_per_query = beta / static_cast<double>(t);
  const std::size_t rounds = learner.Rounds();

  QueryPlan plan(rounds <= 1 ? PlanMode::kNoninteractive : PlanMode::kInteractive);
  ExampleOracle oracle(db.entries, epsilon);
  std::vector<double> answers;
  std::size_t cursor = 0;
  std::size_t asked = 0;

  for (std::size_t round = 0; round < rounds; ++round) {
    const std::vector<SqLearnerQuery> queries = learner.RoundQueries(round, answers);
    std::vector<std::size_t> positions;
    for (const SqLearnerQuery& q : queries) {
      positions.push_back(plan.DeclareQuery(q.id, q.tau, round));
    }
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const SqLearnerQuery& q = queries[i];
      if (++asked > t) throw std::logic_error("SimulateSqLearnerByLocal: learner exceeded its declared query count");
      const std::size_t slice = SqSimulationSliceSize(q.b, epsilon, q.tau, beta_per_query, c);
      if (cursor + slice > db.entries.size()) {
        throw InsufficientSamplesError(
            "SimulateSqLearnerByLocal: need " + std::to_string(cursor + slice) +
            " entries, have " + std::to_string(db.entries.size()));
      }
      LaplaceQueryRandomizer randomizer(q.id, epsilon, q.b, q.g);
      const double v = SimulateSqQueryByLocal(oracle, cursor, cursor + slice, randomizer,
                                              rng, &plan, round, q.tau);
      plan.RecordAnswer(positions[i], v);
      answers.push_back(v);
      cursor += slice;
    }
  }
  if (plan_out != nullptr) *plan_out = std::move(plan);
  return learner.Finish(std::span<const double>(answers));
}

}  // namespace privlearn

#endif  // PRIVLEARN_LOCAL_HPP_
