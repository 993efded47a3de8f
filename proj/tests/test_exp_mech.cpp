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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "privlearn/exp_mech.hpp"
#include "test_util.hpp"

namespace privlearn {
namespace {

std::vector<Concept> AllParities(std::size_t d) {
  std::vector<Concept> out;
  for (std::uint64_t rv = 0; rv < (std::uint64_t{1} << d); ++rv) {
    out.push_back(MakeParityConcept(BitVector::FromInteger(rv, d)));
  }
  return out;
}

TEST_SUITE("exp_mech") {

TEST_CASE("score is minus the misclassification count") {
  Database db;
  db.kind = LabelKind::kBit;
  db.dimension = 2;
  db.entries = {{BitVector::FromString("00"), 0},
                {BitVector::FromString("10"), 1},
                {BitVector::FromString("01"), 1},
                {BitVector::FromString("11"), 1}};
  // Parity 11 labels these 0,1,1,0: one disagreement (last row).
  CHECK(MisclassificationScore(db, MakeParityConcept(BitVector::FromString("11"))) == -1);
  // Parity 00 labels everything 0: three disagreements.
  CHECK(MisclassificationScore(db, MakeParityConcept(BitVector::FromString("00"))) == -3);
  Database empty;
  empty.kind = LabelKind::kBit;
  empty.dimension = 2;
  CHECK(MisclassificationScore(empty, MakeParityConcept(BitVector::FromString("11"))) == 0);
}

TEST_CASE("score distribution matches the closed form") {
  const std::vector<std::int64_t> scores = {0, -1};
  const std::vector<double> p = ScoreDistribution(scores, 2.0);
  // Weights 1 and exp(-1).
  const double expected0 = 1.0 / (1.0 + std::exp(-1.0));
  CHECK(p[0] == doctest::Approx(expected0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 - expected0).epsilon(1e-12));
}

TEST_CASE("zero epsilon yields the uniform distribution") {
  const std::vector<std::int64_t> scores = {0, -5, -100};
  const std::vector<double> p = ScoreDistribution(scores, 0.0);
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("score distribution is shift invariant and overflow safe") {
  const std::vector<std::int64_t> base = {-2, -7, 0, -4};
  const std::vector<double> p = ScoreDistribution(base, 0.7);
  std::vector<std::int64_t> shifted;
  for (std::int64_t q : base) shifted.push_back(q - 1000000);
  const std::vector<double> p_shift = ScoreDistribution(shifted, 0.7);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] == doctest::Approx(p_shift[i]).epsilon(1e-12));
    total += p[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // Extreme magnitudes stay finite and keep the pairwise ratio.
  const std::vector<std::int64_t> extreme_scores = {-1000000, -1000001};
  const std::vector<double> extreme = ScoreDistribution(extreme_scores, 1.0);
  CHECK(extreme[0] / extreme[1] == doctest::Approx(std::exp(0.5)).epsilon(1e-9));

  CHECK_THROWS_AS(ScoreDistribution(std::vector<std::int64_t>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ScoreDistribution(base, -0.5), std::invalid_argument);
}

TEST_CASE("mechanism distribution composes score and softmax") {
  const std::vector<Concept> hypotheses = AllParities(2);
  Database db;
  db.kind = LabelKind::kBit;
  db.dimension = 2;
  db.entries = {{BitVector::FromString("10"), 1}, {BitVector::FromString("01"), 0}};
  const std::vector<double> p = ExponentialMechanismDistribution(hypotheses, 1.0, db);
  std::vector<std::int64_t> scores;
  for (const Concept& h : hypotheses) scores.push_back(MisclassificationScore(db, h));
  const std::vector<double> expected = ScoreDistribution(scores, 1.0);
  REQUIRE(p.size() == expected.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("sampling follows the exact distribution") {
  const std::vector<Concept> hypotheses = AllParities(2);
  Database db;
  db.kind = LabelKind::kBit;
  db.dimension = 2;
  db.entries = {{BitVector::FromString("11"), 1},
                {BitVector::FromString("10"), 1},
                {BitVector::FromString("01"), 0}};
  const std::vector<double> p = ExponentialMechanismDistribution(hypotheses, 1.5, db);
  Rng rng(2718);
  std::vector<std::uint64_t> counts(hypotheses.size(), 0);
  const int trials = 30000;
  for (int t = 0; t < trials; ++t) {
    ++counts[ExponentialMechanismSample(hypotheses, 1.5, db, rng)];
  }
  CHECK(testutil::ChiSquarePValue(counts, p) > 1e-4);
}

TEST_CASE("required sample size evaluates the pinned formula") {
  // |H| = 2^10, epsilon 0.5, alpha 0.1, beta 0.05: the 1/alpha^2 branch wins.
  CHECK(RequiredSampleSizeAgnostic(1024, 0.5, 0.1, 0.05) == 5957);
  // Branch where 1/(epsilon alpha) wins: epsilon small relative to alpha.
  const std::size_t eps_branch = RequiredSampleSizeAgnostic(16, 0.05, 0.5, 0.1);
  const double expected =
      6.0 * (std::log(16.0) + std::log(10.0)) * (1.0 / (0.05 * 0.5));
  CHECK(eps_branch == static_cast<std::size_t>(std::ceil(expected)));
  // Smaller beta can only demand more samples.
  CHECK(RequiredSampleSizeAgnostic(64, 0.5, 0.2, 0.01) >=
        RequiredSampleSizeAgnostic(64, 0.5, 0.2, 0.1));
  CHECK_THROWS_AS(RequiredSampleSizeAgnostic(0, 0.5, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(RequiredSampleSizeAgnostic(16, 0.0, 0.1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(RequiredSampleSizeAgnostic(16, 0.5, 1.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(RequiredSampleSizeAgnostic(16, 0.5, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("neighboring databases keep the output ratio within the budget") {
  const double eps = 0.8;
  const FiniteMechanism<Database> mech = ExponentialMechanismAsFinite(AllParities(2), eps);
  Rng rng(5);
  const LabeledDistribution dist = LabeledDistribution::FromConcept(
      InputDistribution::Uniform(2), MakeParityConcept(BitVector::FromString("10")));
  const Database db = GenerateDatabase(dist, 3, rng);
  bool some_pair_nontrivial = false;
  for (std::size_t index = 0; index < db.size(); ++index) {
    for (std::uint64_t xv = 0; xv < 4; ++xv) {
      for (int y = 0; y <= 1; ++y) {
        const Database neighbor = ReplaceEntry(db, index, {BitVector::FromInteger(xv, 2), y});
        const PrivacyRatioResult r = ExactPrivacyRatio(mech, db, neighbor);
        CHECK(r.max_ratio <= std::exp(eps) + 1e-12);
        if (r.max_ratio > 1.0 + 1e-9) some_pair_nontrivial = true;
      }
    }
  }
  CHECK(some_pair_nontrivial);
}

TEST_CASE("representatives cover each labeling once") {
  std::vector<Concept> concepts = AllParities(2);
  concepts.push_back(MakeParityConcept(BitVector::FromString("11")));  // duplicate
  std::vector<BitVector> domain;
  for (std::uint64_t v = 0; v < 4; ++v) domain.push_back(BitVector::FromInteger(v, 2));
  const std::vector<Concept> reps = RepresentativesPerLabeling(concepts, domain);
  CHECK(reps.size() == 4);
  // All pairwise labelings distinct.
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      bool same = true;
      for (const BitVector& x : domain) {
        if (reps[i](x) != reps[j](x)) { same = false; break; }
      }
      CHECK_FALSE(same);
    }
  }
}

TEST_CASE("realizable learning succeeds at the required sample size") {
  const std::size_t d = 3;
  const std::vector<Concept> hypotheses = AllParities(d);
  const Concept target = MakeParityConcept(BitVector::FromString("110"));
  const LabeledDistribution dist =
      LabeledDistribution::FromConcept(InputDistribution::Uniform(d), target);
  const double alpha = 0.25, beta = 0.2, eps = 1.0;
  const std::size_t n = RequiredSampleSizeAgnostic(hypotheses.size(), eps, alpha, beta);
  Rng rng(31337);
  int successes = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const Database db = GenerateDatabase(dist, n, rng);
    const std::size_t w = ExponentialMechanismSample(hypotheses, eps, db, rng);
    if (TrueError(hypotheses[w], dist) <= alpha) ++successes;
  }
  CHECK(successes >= 95);
}

}  // TEST_SUITE

}  // namespace
}  // namespace privlearn
