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

#include "privlearn/sq.hpp"

#include <cmath>

namespace privlearn {
namespace {

constexpr std::size_t kIterationCap = 10'000'000;

// Probability that the entry's invocation history comes out as observed when
// the entry is z, times (for the numerator) the probability that the next
// randomizer outputs w.
double HistoryLikelihood(std::size_t z, std::span<const RejectionSimulator::HistoryItem> history) {
  double product = 1.0;
  for (const auto& item : history) {
    product *= item.randomizer->TransitionProb(z, item.answer);
  }
  return product;
}

double CheckAcceptProbability(double accept) {
  if (!(accept >= -1e-9 && accept <= 1.0 + 1e-9)) {
    throw std::logic_error("rejection simulator: acceptance probability left [0,1]");
  }
  return std::min(1.0, std::max(0.0, accept));
}

}  // namespace

std::vector<std::pair<Example, double>> MaterializeSupport(const LabeledDistribution& dist) {
  std::vector<std::pair<Example, double>> support;
  dist.ForEachSupport([&](const Example& e, double w) { support.emplace_back(e, w); });
  return support;
}

std::vector<std::pair<std::size_t, double>> SymbolSupport(std::span<const double> weights) {
  std::vector<std::pair<std::size_t, double>> support;
  support.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) support.emplace_back(i, weights[i]);
  return support;
}

RejectionSimulator::RejectionSimulator(std::size_t t, double beta, double epsilon)
    : t_(t), beta_(beta), epsilon_(epsilon) {
  if (t == 0) throw std::invalid_argument("RejectionSimulator: t must be positive");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("RejectionSimulator: beta outside (0,1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("RejectionSimulator: epsilon must be positive");
  phi_ = beta / (3.0 * static_cast<double>(t));
  tau_ = beta / (3.0 * std::exp(2.0 * epsilon) * static_cast<double>(t));
  if (phi_ > 1.0 / 3.0) {
    throw std::invalid_argument("RejectionSimulator: phi = beta/(3t) must be <= 1/3");
  }
}

std::size_t RejectionSimulator::SimulateNext(const FiniteRandomizer& randomizer,
                                             std::span<const HistoryItem> history,
                                             SymbolSqOracle& oracle, Rng& rng,
                                             RejectionStats* stats) {
  const double spread = std::exp(epsilon_) - std::exp(-epsilon_);
  const double r2_ref = HistoryLikelihood(0, history);
  if (history.empty() == false && r2_ref == 0.0) {
    throw std::domain_error("RejectionSimulator: conditioning on an impossible history");
  }

  for (std::size_t iteration = 0; iteration < kIterationCap; ++iteration) {
    const std::size_t w = randomizer.Apply(0, rng);  // proposal from the reference row
    const double q = randomizer.TransitionProb(0, w);
    if (stats != nullptr) ++stats->iterations;

    double accept;
    if (history.empty()) {
      auto g = [&](const std::size_t& z) {
        return (randomizer.TransitionProb(z, w) - q) / (q * spread);
      };
      const double v = oracle.Answer(g, tau_);
      if (stats != nullptr) ++stats->sq_queries;
      const double p_tilde = v * q * spread + q;
      accept = p_tilde / (q * (1.0 + phi_) * std::exp(epsilon_));
    } else {
      const double r1_ref = q * r2_ref;
      auto g1 = [&](const std::size_t& z) {
        const double r1 = randomizer.TransitionProb(z, w) * HistoryLikelihood(z, history);
        return (r1 - r1_ref) / (r1_ref * spread);
      };
      auto g2 = [&](const std::size_t& z) {
        const double r2 = HistoryLikelihood(z, history);
        return (r2 - r2_ref) / (r2_ref * spread);
      };
      const double v1 = oracle.Answer(g1, tau_);
      const double v2 = oracle.Answer(g2, tau_);
      if (stats != nullptr) stats->sq_queries += 2;
      const double p1_hat = v1 * r1_ref * spread + r1_ref;
      const double p2_hat = v2 * r2_ref * spread + r2_ref;
      if (!(p1_hat > 0.0) || !(p2_hat > 0.0)) {
        throw std::logic_error("RejectionSimulator: conditional estimate not positive");
      }
      // Each estimate is within (1 +- phi) of its target, so the ratio is
      // within (1 +- 3 phi).
      accept = (p1_hat / p2_hat) / (q * (1.0 + 3.0 * phi_) * std::exp(epsilon_));
    }

    if (rng.Bernoulli(CheckAcceptProbability(accept))) return w;
  }
  throw std::runtime_error("RejectionSimulator: iteration cap reached");
}

std::size_t RejectionSimulate(const FiniteRandomizer& randomizer, std::size_t t, double beta,
                              double epsilon, SymbolSqOracle& oracle, Rng& rng,
                              RejectionStats* stats) {
  RejectionSimulator simulator(t, beta, epsilon);
  return simulator.SimulateNext(randomizer, {}, oracle, rng, stats);
}

std::vector<double> ExactRejectionOutputLaw(const FiniteRandomizer& randomizer,
                                            std::span<const double> weights, std::size_t t,
                                            double beta, double epsilon,
                                            std::span<const double> answer_perturbations) {
  if (weights.size() != randomizer.input_count()) {
    throw std::invalid_argument("ExactRejectionOutputLaw: weight count mismatch");
  }
  if (!answer_perturbations.empty() &&
      answer_perturbations.size() != randomizer.output_count()) {
    throw std::invalid_argument("ExactRejectionOutputLaw: perturbation count mismatch");
  }
  RejectionSimulator simulator(t, beta, epsilon);
  const double spread = std::exp(epsilon) - std::exp(-epsilon);

  const std::size_t outputs = randomizer.output_count();
  std::vector<double> accepted_mass(outputs, 0.0);
  double total = 0.0;
  for (std::size_t w = 0; w < outputs; ++w) {
    const double q = randomizer.TransitionProb(0, w);
    if (q == 0.0) continue;  // never proposed
    double p = 0.0;
    for (std::size_t z = 0; z < weights.size(); ++z) {
      p += weights[z] * randomizer.TransitionProb(z, w);
    }
    double v = (p - q) / (q * spread);
    if (!answer_perturbations.empty()) {
      if (std::abs(answer_perturbations[w]) > simulator.tau() + 1e-15) {
        throw std::invalid_argument("ExactRejectionOutputLaw: perturbation exceeds tau");
      }
      v += answer_perturbations[w];
    }
    const double p_tilde = v * q * spread + q;
    const double accept =
        CheckAcceptProbability(p_tilde / (q * (1.0 + simulator.phi()) * std::exp(epsilon)));
    accepted_mass[w] = q * accept;
    total += accepted_mass[w];
  }
  if (!(total > 0.0)) throw std::logic_error("ExactRejectionOutputLaw: nothing accepted");
  for (double& m : accepted_mass) m /= total;
  return accepted_mass;
}

LocalBySqResult SimulateLocalAlgorithmBySq(const LocalAlgorithm& algorithm, double beta,
                                           double epsilon, SymbolSqOracle& oracle, Rng& rng) {
  const std::size_t t = algorithm.TotalInvocations();
  RejectionSimulator simulator(t, beta, epsilon);
  BudgetLedger ledger(epsilon);

  LocalBySqResult result;
  result.plan = QueryPlan(algorithm.Interactive() ? PlanMode::kInteractive
                                                  : PlanMode::kNoninteractive);
  std::map<std::size_t, std::vector<RejectionSimulator::HistoryItem>> history;
  std::vector<std::size_t> answers;

  if (!algorithm.Interactive()) {
    std::vector<std::size_t> placeholder;
    while (auto step = algorithm.NextStep(placeholder)) {
      result.plan.DeclareQuery(step->randomizer->id(), simulator.tau(), placeholder.size());
      placeholder.push_back(0);
    }
  }

  std::size_t position = 0;
  while (auto step = algorithm.NextStep(answers)) {
    if (algorithm.Interactive()) {
      result.plan.DeclareQuery(step->randomizer->id(), simulator.tau(), position);
    }
    ledger.Charge(step->entry_index, step->randomizer->epsilon());
    auto& entry_history = history[step->entry_index];
    const std::size_t w = simulator.SimulateNext(
        *step->randomizer, entry_history, oracle, rng, &result.stats);
    entry_history.push_back({step->randomizer, w});
    result.plan.RecordAnswer(position, static_cast<double>(w));
    answers.push_back(w);
    ++position;
  }
  result.output = algorithm.Output(answers);
  return result;
}

}  // namespace privlearn
