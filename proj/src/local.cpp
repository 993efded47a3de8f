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

#include "privlearn/local.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace privlearn {

FiniteRandomizer::FiniteRandomizer(std::string id, double epsilon,
                                   std::vector<std::vector<double>> transition)
    : id_(std::move(id)), epsilon_(epsilon), transition_(std::move(transition)) {
  if (!(epsilon_ >= 0.0)) throw std::invalid_argument("FiniteRandomizer: epsilon must be >= 0");
  if (transition_.empty()) throw std::invalid_argument("FiniteRandomizer: empty transition matrix");
  const std::size_t outputs = transition_[0].size();
  if (outputs == 0) throw std::invalid_argument("FiniteRandomizer: no outputs");
  const double bound = std::exp(epsilon_);

  for (const auto& row : transition_) {
    if (row.size() != outputs) throw std::invalid_argument("FiniteRandomizer: ragged transition matrix");
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw std::invalid_argument("FiniteRandomizer: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("FiniteRandomizer: row does not sum to 1");
    }
  }

  // Exhaustive pointwise ratio check across all input pairs.
  for (std::size_t u = 0; u < transition_.size(); ++u) {
    for (std::size_t v = 0; v < transition_.size(); ++v) {
      for (std::size_t w = 0; w < outputs; ++w) {
        const double pu = transition_[u][w];
        const double pv = transition_[v][w];
        if (pu == 0.0 && pv == 0.0) continue;
        if (pv == 0.0 || pu > bound * pv + 1e-12) {
          throw std::invalid_argument("FiniteRandomizer: transition violates the epsilon ratio");
        }
      }
    }
  }

  cumulative_.resize(transition_.size());
  for (std::size_t u = 0; u < transition_.size(); ++u) {
    cumulative_[u].resize(outputs);
    double run = 0.0;
    for (std::size_t w = 0; w < outputs; ++w) {
      run += transition_[u][w];
      cumulative_[u][w] = run;
    }
    cumulative_[u].back() = 1.0;
  }
}

double FiniteRandomizer::TransitionProb(std::size_t input, std::size_t output) const {
  if (input >= transition_.size() || output >= transition_[input].size()) {
    throw std::out_of_range("FiniteRandomizer::TransitionProb: out of range");
  }
  return transition_[input][output];
}

std::size_t FiniteRandomizer::Apply(std::size_t input, Rng& rng) const {
  if (input >= transition_.size()) throw std::out_of_range("FiniteRandomizer::Apply: input out of range");
  const double u = rng.Uniform01();
  const auto& cdf = cumulative_[input];
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
}

FiniteRandomizer MakeRandomizedResponse(double epsilon, const std::string& id) {
  const double keep = std::exp(epsilon) / (1.0 + std::exp(epsilon));
  return FiniteRandomizer(id, epsilon, {{keep, 1.0 - keep}, {1.0 - keep, keep}});
}

LaplaceQueryRandomizer::LaplaceQueryRandomizer(std::string id, double epsilon, double b,
                                               std::function<double(const Example&)> g)
    : id_(std::move(id)), epsilon_(epsilon), b_(b), g_(std::move(g)) {
  if (!(epsilon_ > 0.0)) throw std::invalid_argument("LaplaceQueryRandomizer: epsilon must be positive");
  if (!(b_ > 0.0)) throw std::invalid_argument("LaplaceQueryRandomizer: b must be positive");
  if (!g_) throw std::invalid_argument("LaplaceQueryRandomizer: missing query function");
}

double LaplaceQueryRandomizer::Query(const Example& e) const {
  const double value = g_(e);
  if (!(value >= -b_ - 1e-12 && value <= b_ + 1e-12)) {
    throw std::domain_error("LaplaceQueryRandomizer: query value outside [-b, b]");
  }
  return value;
}

double LaplaceQueryRandomizer::Apply(const Example& e, Rng& rng) const {
  return Query(e) + rng.Laplace(NoiseScale());
}

std::size_t QueryPlan::DeclareQuery(const std::string& id, double tau, std::size_t round) {
  if (mode_ == PlanMode::kNoninteractive && answers_started_) {
    throw std::logic_error("QueryPlan: noninteractive plan declared a query after an answer");
  }
  queries_.push_back({id, tau, round, false, 0.0});
  return queries_.size() - 1;
}

void QueryPlan::RecordInvocation(Invocation invocation) {
  if (record_invocations_) invocations_.push_back(std::move(invocation));
}

void QueryPlan::RecordAnswer(std::size_t query_position, double answer) {
  if (query_position >= queries_.size()) {
    throw std::out_of_range("QueryPlan::RecordAnswer: no such query");
  }
  answers_started_ = true;
  queries_[query_position].answered = true;
  queries_[query_position].answer = answer;
}

std::string QueryPlan::InvocationsJsonLines() const {
  std::ostringstream out;
  for (const Invocation& inv : invocations_) {
    nlohmann::json line = {{"index", inv.entry_index},
                           {"randomizer", inv.randomizer_id},
                           {"epsilon", inv.epsilon},
                           {"round", inv.round},
                           {"output", inv.output}};
    out << line.dump() << '\n';
  }
  return out.str();
}

std::string QueryPlan::QueriesJsonLines() const {
  std::ostringstream out;
  for (const QueryRecord& q : queries_) {
    nlohmann::json line = {{"query", q.id},
                           {"tau", q.tau},
                           {"answer", q.answered ? nlohmann::json(q.answer) : nlohmann::json()},
                           {"round", q.round}};
    out << line.dump() << '\n';
  }
  return out.str();
}

std::size_t SqSimulationSliceSize(double b, double epsilon, double tau,
                                  double beta_per_query, double c) {
  if (!(b > 0.0)) throw std::invalid_argument("SqSimulationSliceSize: b must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("SqSimulationSliceSize: epsilon must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("SqSimulationSliceSize: tau must be positive");
  if (!(beta_per_query > 0.0 && beta_per_query < 1.0)) {
    throw std::invalid_argument("SqSimulationSliceSize: beta outside (0,1)");
  }
  if (!(c > 0.0)) throw std::invalid_argument("SqSimulationSliceSize: c must be positive");
  const double n = c * std::log(1.0 / beta_per_query) * b * b / (epsilon * epsilon * tau * tau);
  return static_cast<std::size_t>(std::ceil(n));
}

std::size_t RunLocalAlgorithm(LocalAlgorithm& algorithm, std::span<const std::size_t> entries,
                              double epsilon_cap, Rng& rng, QueryPlan* plan_out) {
  QueryPlan plan(algorithm.Interactive() ? PlanMode::kInteractive : PlanMode::kNoninteractive);
  plan.set_record_invocations(true);
  SymbolOracle oracle(entries, epsilon_cap);
  std::vector<std::size_t> answers;

  if (!algorithm.Interactive()) {
    // A noninteractive protocol's steps cannot depend on answer values, so
    // the whole plan can be declared before any answer arrives. The
    // QueryPlan's state machine then enforces that no further query appears.
    std::vector<std::size_t> placeholder;
    while (auto step = algorithm.NextStep(placeholder)) {
      plan.DeclareQuery(step->randomizer->id(), 0.0, placeholder.size());
      placeholder.push_back(0);
    }
    for (std::size_t position = 0; position < placeholder.size(); ++position) {
      const auto step = algorithm.NextStep(answers);
      if (!step) throw std::logic_error("RunLocalAlgorithm: noninteractive plan shrank");
      const std::size_t w = oracle.Invoke(step->entry_index, *step->randomizer, rng);
      plan.RecordInvocation({step->entry_index, step->randomizer->id(),
                             step->randomizer->epsilon(), position, static_cast<double>(w)});
      plan.RecordAnswer(position, static_cast<double>(w));
      answers.push_back(w);
    }
  } else {
    std::size_t position = 0;
    while (auto step = algorithm.NextStep(answers)) {
      const std::size_t q = plan.DeclareQuery(step->randomizer->id(), 0.0, position);
      const std::size_t w = oracle.Invoke(step->entry_index, *step->randomizer, rng);
      plan.RecordInvocation({step->entry_index, step->randomizer->id(),
                             step->randomizer->epsilon(), position, static_cast<double>(w)});
      plan.RecordAnswer(q, static_cast<double>(w));
      answers.push_back(w);
      ++position;
    }
  }
  const std::size_t out = algorithm.Output(answers);
  if (plan_out != nullptr) *plan_out = std::move(plan);
  return out;
}

double SimulateSqQueryByLocal(ExampleOracle& oracle, std::size_t begin, std::size_t end,
                              const LaplaceQueryRandomizer& randomizer, Rng& rng,
                              QueryPlan* plan, std::size_t round, double tau) {
  if (begin >= end || end > oracle.size()) {
    throw std::invalid_argument("SimulateSqQueryByLocal: bad slice");
  }
  (void)tau;
  double total = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double w = oracle.Invoke(i, randomizer, rng);
    if (plan != nullptr) {
      plan->RecordInvocation({i, randomizer.id(), randomizer.epsilon(), round, w});
    }
    total += w;
  }
  return total / static_cast<double>(end - begin);
}

}  // namespace privlearn
