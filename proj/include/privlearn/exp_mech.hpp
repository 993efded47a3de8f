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
// Generic private agnostic learner over a finite hypothesis list: output h
// with probability proportional to exp(epsilon * score(z, h) / 2), where
// score(z, h) = -(number of entries h misclassifies). Changing one entry moves
// every score by at most 1, which caps the output-distribution ratio between
// neighbors at exp(epsilon).

#ifndef PRIVLEARN_EXP_MECH_HPP_
#define PRIVLEARN_EXP_MECH_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "privlearn/dp.hpp"
#include "privlearn/learning.hpp"

namespace privlearn {

// -(misclassified count) of h on db; 0 on the empty database. Always in
// [-db.size(), 0].
std::int64_t MisclassificationScore(const Database& db, const Concept& h);

// exp(epsilon * q_i / 2) normalized, computed in log space with a max shift so
// that scores of any magnitude are safe. epsilon = 0 gives the uniform
// distribution. Invariant under shifting all scores by a constant.
std::vector<double> ScoreDistribution(std::span<const std::int64_t> scores, double epsilon);

// Exact output distribution of the mechanism on db over the hypothesis list.
std::vector<double> ExponentialMechanismDistribution(std::span<const Concept> hypotheses,
                                                     double epsilon, const Database& db);

// One draw from the mechanism, by inverse CDF over the exact distribution
// (single uniform draw, deterministic cumulative scan). Returns the chosen
// hypothesis index.
std::size_t ExponentialMechanismSample(std::span<const Concept> hypotheses, double epsilon,
                                       const Database& db, Rng& rng);

// Sample size at which the mechanism is an (alpha, beta)-agnostic learner for
// a hypothesis list of the given size:
//   ceil(6 (ln|H| + ln(1/beta)) * max{1/(epsilon alpha), 1/alpha^2}).
std::size_t RequiredSampleSizeAgnostic(std::size_t hypothesis_count, double epsilon,
                                       double alpha, double beta);

// The mechanism as a finite-outcome object for privacy-ratio checking;
// outcome w = hypothesis index.
FiniteMechanism<Database> ExponentialMechanismAsFinite(std::vector<Concept> hypotheses,
                                                       double epsilon);

// Hypothesis list with one representative concept per distinct labeling the
// class induces on the domain points. Feeding the mechanism this list is the
// finite-class reduction used for infinite classes over small domains.
std::vector<Concept> RepresentativesPerLabeling(std::span<const Concept> concepts,
                                                std::span<const BitVector> domain_points);

}  // namespace privlearn

#endif  // PRIVLEARN_EXP_MECH_HPP_
