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

#include "privlearn/exp_mech.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace privlearn {

std::int64_t MisclassificationScore(const Database& db, const Concept& h) {
  if (db.entries.empty()) return 0;
  if (h.kind() != db.kind) {
    throw std::invalid_argument("MisclassificationScore: label convention mismatch");
  }
  std::int64_t wrong = 0;
  for (const Example& e : db.entries) {
    if (h(e.x) != e.y) ++wrong;
  }
  return -wrong;
}

std::vector<double> ScoreDistribution(std::span<const std::int64_t> scores, double epsilon) {
  if (scores.empty()) throw std::invalid_argument("ScoreDistribution: no scores");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("ScoreDistribution: epsilon must be >= 0");
  const std::int64_t max_score = *std::max_element(scores.begin(), scores.end());
  std::vector<double> probs(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp(epsilon * static_cast<double>(scores[i] - max_score) / 2.0);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> ExponentialMechanismDistribution(std::span<const Concept> hypotheses,
                                                     double epsilon, const Database& db) {
  if (hypotheses.empty()) {
    throw std::invalid_argument("ExponentialMechanismDistribution: hypothesis list is empty");
  }
  std::vector<std::int64_t> scores(hypotheses.size());
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    scores[i] = MisclassificationScore(db, hypotheses[i]);
  }
  return ScoreDistribution(scores, epsilon);
}

std::size_t ExponentialMechanismSample(std::span<const Concept> hypotheses, double epsilon,
                                       const Database& db, Rng& rng) {
  const std::vector<double> probs = ExponentialMechanismDistribution(hypotheses, epsilon, db);
  const double u = rng.Uniform01();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return probs.size() - 1;
}

std::size_t RequiredSampleSizeAgnostic(std::size_t hypothesis_count, double epsilon,
                                       double alpha, double beta) {
  if (hypothesis_count == 0) {
    throw std::invalid_argument("RequiredSampleSizeAgnostic: hypothesis count must be positive");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("RequiredSampleSizeAgnostic: epsilon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("RequiredSampleSizeAgnostic: alpha outside (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("RequiredSampleSizeAgnostic: beta outside (0,1)");
  const double ln_terms = std::log(static_cast<double>(hypothesis_count)) + std::log(1.0 / beta);
  const double factor = std::max(1.0 / (epsilon * alpha), 1.0 / (alpha * alpha));
  return static_cast<std::size_t>(std::ceil(6.0 * ln_terms * factor));
}

FiniteMechanism<Database> ExponentialMechanismAsFinite(std::vector<Concept> hypotheses,
                                                       double epsilon) {
  if (hypotheses.empty()) {
    throw std::invalid_argument("ExponentialMechanismAsFinite: hypothesis list is empty");
  }
  FiniteMechanism<Database> m;
  m.outcome_count = hypotheses.size();
  auto shared = std::make_shared<std::vector<Concept>>(std::move(hypotheses));
  m.exact_distribution = [shared, epsilon](const Database& db) {
    return ExponentialMechanismDistribution(*shared, epsilon, db);
  };
  m.sample = [shared, epsilon](const Database& db, Rng& rng) {
    return ExponentialMechanismSample(*shared, epsilon, db, rng);
  };
  return m;
}

std::vector<Concept> RepresentativesPerLabeling(std::span<const Concept> concepts,
                                                std::span<const BitVector> domain_points) {
  std::vector<Concept> out;
  for (const auto& [labels, index] : DistinctLabelings(concepts, domain_points)) {
    out.push_back(concepts[index]);
  }
  return out;
}

}  // namespace privlearn
