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
// The masked-parity concept class and the machinery around it: a two-round
// learner that recovers the hidden (r, a) from d+1 statistical queries, the
// Fourier decomposition of queries over the uniform domain, an answering
// oracle that is truthful only when a query's correlation with the hidden
// mask is large, and the experiment showing that fixed (nonadaptive) query
// batteries fail against that oracle while the two-round learner succeeds.
//
// Domain points are triples (x, i, b) with x in {0,1}^d, i an index in
// [0, d), b a bit, packed into d + log2(d) + 1 bits: x first, then i (least
// significant bit first), then b. The concept labels a point
//   b = 0:  (-1)^(<r,x> + a)
//   b = 1:  (-1)^(r_i)
// so the b = 1 half leaks the bits of r one index at a time while the b = 0
// half hides a behind the parity.

#ifndef PRIVLEARN_MASKED_PARITY_HPP_
#define PRIVLEARN_MASKED_PARITY_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "privlearn/learning.hpp"
#include "privlearn/local.hpp"
#include "privlearn/rng.hpp"

namespace privlearn {

struct MaskedParityPoint {
  BitVector x;
  std::size_t i = 0;
  int b = 0;
};

class MaskedParityDomain {
 public:
  explicit MaskedParityDomain(std::size_t d);

  std::size_t d() const { return d_; }
  std::size_t index_bits() const { return index_bits_; }
  std::size_t point_bits() const { return d_ + index_bits_ + 1; }
  std::size_t size() const { return std::size_t{1} << point_bits(); }

  BitVector Encode(const MaskedParityPoint& point) const;
  MaskedParityPoint Decode(const BitVector& encoded) const;

  // Fast field access on encoded points.
  int BField(const BitVector& encoded) const { return encoded.Get(point_bits() - 1) ? 1 : 0; }
  std::size_t IField(const BitVector& encoded) const;

  InputDistribution UniformInputs() const { return InputDistribution::Uniform(point_bits()); }

 private:
  std::size_t d_;
  std::size_t index_bits_;
};

struct MaskedParityConcept {
  BitVector r;
  int a = 0;

  // Label in {+1, -1}.
  int Evaluate(const MaskedParityDomain& domain, const BitVector& encoded_point) const;
  Concept AsConcept(const MaskedParityDomain& domain) const;
};

// Uniform distribution over encoded points, labeled by the concept.
LabeledDistribution MaskedParityDistribution(const MaskedParityDomain& domain,
                                             const MaskedParityConcept& target);

// Two-round SQ learner. Round one asks, for each index j, how often
// (i = j, b = 1) points carry label -1; the answer is 1/(2d) when r_j = 1 and
// 0 otherwise, so tolerance 1/(4d+1) separates the cases across threshold
// 1/(4d). Round two asks how often the b = 0 half disagrees with the
// recovered parity; the answer is a/2, thresholded at 1/4 with tolerance 1/5.
class MaskedParityLearner {
 public:
  explicit MaskedParityLearner(MaskedParityDomain domain) : domain_(domain) {}

  std::size_t TotalQueries() const { return domain_.d() + 1; }
  std::size_t Rounds() const { return 2; }
  std::vector<SqLearnerQuery> RoundQueries(std::size_t round,
                                           std::span<const double> answers) const;
  MaskedParityConcept Finish(std::span<const double> answers) const;

  double RoundOneTau() const { return 1.0 / (4.0 * static_cast<double>(domain_.d()) + 1.0); }
  double RoundOneThreshold() const { return 1.0 / (4.0 * static_cast<double>(domain_.d())); }

  const MaskedParityDomain& domain() const { return domain_; }

 private:
  BitVector RecoverR(std::span<const double> answers) const;
  MaskedParityDomain domain_;
};

// A query for Fourier purposes: value on (encoded point, label). Bounded
// range [-1, 1].
using PointLabelQuery = std::function<double(const BitVector& encoded_point, int y)>;

// Wraps an Example-query as a PointLabelQuery and back.
PointLabelQuery FromExampleQuery(const std::function<double(const Example&)>& g);

// g(u, y) = C + f(u) * y with f(u) = (g(u,+1) - g(u,-1)) / 2 and
// C = E_u[(g(u,+1) + g(u,-1)) / 2]; tables are indexed by the integer
// encoding of the point.
struct FourierPieces {
  double constant = 0.0;
  std::vector<double> f;   // f(u)
  std::vector<double> f0;  // f restricted to b = 0 points, zero elsewhere
  std::vector<double> f1;  // f restricted to b = 1 points, zero elsewhere
};

FourierPieces FourierDecompose(const MaskedParityDomain& domain, const PointLabelQuery& g);

// E_{u uniform}[f(u) h(u)] for tables over the full domain.
double InnerProductUniform(std::span<const double> f, std::span<const double> h);

// +-1 label table of a concept, and its b-restrictions (zero off the half).
std::vector<double> ConceptTable(const MaskedParityDomain& domain,
                                 const MaskedParityConcept& target);
std::vector<double> RestrictToB(const MaskedParityDomain& domain, std::span<const double> table,
                                int b);

// True expectation E[g(u, c(u))] = C + <f0, c0> + <f1, c1>.
double QueryExpectation(const MaskedParityDomain& domain, const FourierPieces& pieces,
                        const MaskedParityConcept& target);

struct MaskedOracleAnswer {
  double answer = 0.0;
  bool truthful = false;  // false: the a-independent branch was used
  double ip0 = 0.0;       // <f0_g, c0> that decided the branch
};

// The answering oracle of the lower-bound argument: truthful only when the
// query's b = 0 Fourier coefficient at the hidden concept reaches tau;
// otherwise it answers C + <f1, c1>, which is independent of the mask a.
MaskedOracleAnswer AdversarialOracleAnswer(const MaskedParityDomain& domain,
                                           const MaskedParityConcept& hidden,
                                           const PointLabelQuery& g, double tau);

// Answer source driving MaskedParityLearner against the adversarial oracle.
class MaskedParityAdversarialOracle {
 public:
  MaskedParityAdversarialOracle(MaskedParityDomain domain, MaskedParityConcept hidden)
      : domain_(domain), hidden_(hidden) {}

  double Answer(const std::function<double(const Example&)>& g, double tau);
  std::size_t queries_asked() const { return queries_asked_; }

 private:
  MaskedParityDomain domain_;
  MaskedParityConcept hidden_;
  std::size_t queries_asked_ = 0;
};

struct ParsevalResult {
  double sum = 0.0;        // sum over all concepts (r, a) of 2 <f0, c0>^2
  double violation = 0.0;  // max(0, sum - 1)
};

// The b = 0 restrictions of the 2^(d+1) concepts form a redundant system in
// which every function's squared coefficients sum to at most its norm; for
// query tables bounded by 1 the sum is at most 1.
ParsevalResult ParsevalCheck(const MaskedParityDomain& domain, const PointLabelQuery& g);

// Number of concepts whose b = 0 coefficient against g reaches the
// threshold; at threshold 2^(-d/3) this is at most 2^(2d/3 - 1).
std::size_t CountLargeCoefficients(const MaskedParityDomain& domain, const PointLabelQuery& g,
                                   double threshold);

// A fixed query battery plus a rule turning its answers into a hypothesis
// labeling of the whole domain.
struct SeparationCache {
  std::size_t concept_count = 0;
  // Indexed [query][concept]; concept index = a * 2^d + r.
  std::vector<std::vector<double>> ip0;
  std::vector<std::vector<double>> expectation;
  std::vector<std::vector<double>> oracle_answer;
  // Indexed [concept][point]; +-1 labels.
  std::vector<std::vector<double>> concept_table;
};

struct SeparationStrategy {
  std::string name;
  std::vector<std::function<double(const Example&)>> queries;
  std::vector<double> taus;  // every entry must be >= 2^(-d/3)
  std::function<std::vector<double>(std::span<const double> answers, const SeparationCache&)>
      hypothesize;  // returns a +-1 labeling table over the domain
};

struct SeparationTrialRecord {
  std::uint64_t r = 0;
  int a = 0;
  double err = 0.0;
  bool good = false;  // every query's |<f0, c0>| stayed below 2^(-d/3)
};

struct SeparationResult {
  std::vector<SeparationTrialRecord> trials;
  double err_quarter_freq = 0.0;  // fraction of trials with err >= 1/4
  double good_freq = 0.0;
  double good_bound = 0.0;     // 1 - t / 2^(d/3 + 2)
  double theorem_bound = 0.0;  // (1/2) * good_bound
};

// Draws `trials` hidden concepts uniformly, answers the battery through the
// adversarial oracle, and measures the hypothesis error by enumeration.
// Requires every tolerance >= 2^(-d/3).
SeparationResult RunSeparationExperiment(const MaskedParityDomain& domain,
                                         const SeparationStrategy& strategy,
                                         std::size_t trials, Rng& rng);

// Builds the shared caches for a battery (exposed for strategy rules and
// direct tests).
SeparationCache BuildSeparationCache(const MaskedParityDomain& domain,
                                     const SeparationStrategy& strategy);

// Representative nonadaptive strategies.
// Random +-1 query battery; rule picks the concept whose predicted answers
// have the smallest squared distance to the observed ones.
SeparationStrategy MakeMaxLikelihoodStrategy(const MaskedParityDomain& domain, std::size_t t,
                                             Rng& rng);
// The learner's round-one queries (at the coarser tolerance the experiment
// requires) plus a fixed guess a = 0.
SeparationStrategy MakeRoundOnePlusGuessStrategy(const MaskedParityDomain& domain);
// Same battery as the max-likelihood strategy, but the hypothesis is the
// pointwise majority vote of the three best-scoring concepts.
SeparationStrategy MakeMajorityOfThreeStrategy(const MaskedParityDomain& domain, std::size_t t,
                                               Rng& rng);

}  // namespace privlearn

#endif  // PRIVLEARN_MASKED_PARITY_HPP_
