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
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "privlearn/parity.hpp"
#include "test_util.hpp"

namespace privlearn {
namespace {

Database RealizableParityDatabase(const BitVector& r, std::size_t n, Rng& rng) {
  const LabeledDistribution dist = LabeledDistribution::FromConcept(
      InputDistribution::Uniform(r.size()), MakeParityConcept(r));
  return GenerateDatabase(dist, n, rng);
}

TEST_SUITE("parity") {

TEST_CASE("config validates the epsilon range") {
  CHECK(ParityConfig(0.5).InclusionProbability() == doctest::Approx(0.125));
  CHECK(ParityConfig(0.1).InclusionProbability() == doctest::Approx(0.025));
  CHECK_THROWS_AS(ParityConfig(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ParityConfig(0.6), std::invalid_argument);
  CHECK_THROWS_AS(ParityConfig(-0.1), std::invalid_argument);
}

TEST_CASE("exact distribution of a one-example database") {
  // Single constraint r = 0 in dimension 1, epsilon 1/2 (keep probability
  // 1/8). Kept: output 0. Dropped: uniform over {0, 1}. Plus the 1/2 bot coin.
  Database db;
  db.kind = LabelKind::kBit;
  db.dimension = 1;
  db.entries = {{BitVector::FromString("1"), 0}};
  const std::vector<double> p = ExactParityDistribution(db, ParityConfig(0.5));
  REQUIRE(p.size() == 3);
  CHECK(p[0] == doctest::Approx(0.28125).epsilon(1e-14));  // r = 0
  CHECK(p[1] == doctest::Approx(0.21875).epsilon(1e-14));  // r = 1
  CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-14));      // bot
}

TEST_CASE("exact distribution of an inconsistent pair") {
  // Both constraints on the same point with contradicting labels: keeping
  // both forces bot.
  Database db;
  db.kind = LabelKind::kBit;
  db.dimension = 1;
  db.entries = {{BitVector::FromString("1"), 0}, {BitVector::FromString("1"), 1}};
  const std::vector<double> p = ExactParityDistribution(db, ParityConfig(0.5));
  REQUIRE(p.size() == 3);
  const double keep = 0.125;
  CHECK(p[2] == doctest::Approx(0.5 + 0.5 * keep * keep).epsilon(1e-14));
  CHECK(p[0] == doctest::Approx(p[1]).epsilon(1e-14));  // symmetric in the label
  CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact distribution always reserves half the mass for bot") {
  Rng rng(61);
  for (int iteration = 0; iteration < 20; ++iteration) {
    const std::size_t d = 1 + rng.Below(3);
    const std::size_t n = 1 + rng.Below(6);
    const Database db = RealizableParityDatabase(BitVector::Random(d, rng), n, rng);
    const std::vector<double> p = ExactParityDistribution(db, ParityConfig(0.25));
    REQUIRE(p.size() == (std::size_t{1} << d) + 1);
    double total = 0.0;
    for (double v : p) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.back() >= 0.5 - 1e-12);
  }
  Database too_big;
  too_big.kind = LabelKind::kBit;
  too_big.dimension = 2;
  Rng fill(3);
  for (int i = 0; i < 13; ++i) too_big.entries.push_back({BitVector::Random(2, fill), 0});
  CHECK_THROWS_AS(ExactParityDistribution(too_big, ParityConfig(0.5), 12),
                  std::domain_error);
}

TEST_CASE("sampler agrees with the exact distribution") {
  Rng rng(72);
  const Database db = RealizableParityDatabase(BitVector::FromString("10"), 6, rng);
  const ParityConfig config(0.5);
  const std::vector<double> exact = ExactParityDistribution(db, config);
  std::vector<std::uint64_t> counts(exact.size(), 0);
  const int trials = 30000;
  for (int t = 0; t < trials; ++t) {
    const ParityOutcome out = LearnParityOnce(db, config, rng);
    if (out.IsBot()) {
      ++counts.back();
    } else {
      REQUIRE(out.r->size() == 2);
      ++counts[out.r->ToInteger()];
    }
  }
  CHECK(testutil::ChiSquarePValue(counts, exact) > 1e-4);
}

TEST_CASE("learner rejects label and dimension violations") {
  Database db;
  db.kind = LabelKind::kSign;
  db.dimension = 2;
  db.entries = {{BitVector::FromString("10"), 1}};
  Rng rng(1);
  CHECK_THROWS_AS(LearnParityOnce(db, ParityConfig(0.5), rng), std::invalid_argument);

  Database ragged;
  ragged.kind = LabelKind::kBit;
  ragged.dimension = 2;
  ragged.entries = {{BitVector::FromString("101"), 0}};
  CHECK_THROWS_AS(LearnParityOnce(ragged, ParityConfig(0.5), rng), std::invalid_argument);
}

TEST_CASE("neighboring databases keep the exact ratio within the budget") {
  // Seeded pairs at dimension 2, size 4, including consistent, inconsistent,
  // and contradiction-heavy databases.
  for (const double eps : {0.1, 0.25, 0.5}) {
    const FiniteMechanism<Database> mech = ParityLearnerAsFinite(ParityConfig(eps), 2, 12);
    Rng rng(810);
    const Database base = RealizableParityDatabase(BitVector::FromString("11"), 4, rng);
    int nontrivial = 0;
    for (std::size_t index = 0; index < base.size(); ++index) {
      for (std::uint64_t xv = 0; xv < 4; ++xv) {
        for (int y = 0; y <= 1; ++y) {
          const Database neighbor =
              ReplaceEntry(base, index, {BitVector::FromInteger(xv, 2), y});
          const PrivacyRatioResult r = ExactPrivacyRatio(mech, base, neighbor);
          CHECK(r.max_ratio <= std::exp(eps) + 1e-12);
          if (r.max_ratio > 1.0 + 1e-9) ++nontrivial;
        }
      }
    }
    CHECK(nontrivial > 0);
  }
}

TEST_CASE("single shot recovers the parity at its sample size") {
  const std::size_t d = 4;
  const double eps = 0.5, alpha = 0.2;
  const std::size_t n = ParitySingleShotSampleSize(d, eps, alpha);
  CHECK(n >= 100);
  const BitVector target = BitVector::FromString("1011");
  Rng rng(1234);
  int good = 0, bad_output = 0, bots = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const Database db = RealizableParityDatabase(target, n, rng);
    const ParityOutcome out = LearnParityOnce(db, ParityConfig(eps), rng);
    if (out.IsBot()) {
      ++bots;
    } else if (*out.r == target) {
      ++good;
    } else {
      ++bad_output;
    }
  }
  // The bot coin alone accounts for half the runs; conditioned on running,
  // ~40 kept constraints in dimension 4 pin the target almost surely.
  CHECK(static_cast<double>(good) / trials >= 0.4);
  CHECK(static_cast<double>(bad_output) / trials <= 0.02);
  CHECK(static_cast<double>(bots) / trials == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("amplified configuration pins its derived quantities") {
  const AmplifiedParityConfig config(8, 0.5, 0.2, 0.1);
  CHECK(config.beta_prime == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(config.alpha_prime == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(config.k == 11);
  CHECK(config.slice_size == 8000);
  CHECK(config.test_size == 142392);
  CHECK(config.MinimumDatabaseSize() == 230393);
  CHECK(RequiredSampleSizeAmplified(8, 0.5, 0.2, 0.1) == 230393);

  // One candidate suffices once beta' reaches 3/4 failure tolerance.
  const AmplifiedParityConfig loose(2, 0.5, 0.2, 0.9);
  CHECK(loose.k >= 1);
  CHECK_THROWS_AS(AmplifiedParityConfig(4, 0.7, 0.2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(AmplifiedParityConfig(4, 0.5, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(AmplifiedParityConfig(4, 0.5, 0.2, 1.0), std::invalid_argument);
}

TEST_CASE("amplified learner needs strictly more than the slice budget") {
  const AmplifiedParityConfig config(2, 0.5, 0.4, 0.5);
  const std::size_t boundary = config.k * config.slice_size + config.test_size;
  Rng rng(5150);
  const Database small =
      RealizableParityDatabase(BitVector::FromString("10"), boundary, rng);
  CHECK_THROWS_AS(LearnParityAmplified(small, config, rng), InsufficientSamplesError);
  const Database enough =
      RealizableParityDatabase(BitVector::FromString("10"), boundary + 1, rng);
  CHECK_NOTHROW(LearnParityAmplified(enough, config, rng));
}

TEST_CASE("amplified learner selects a low-error candidate") {
  const std::size_t d = 3;
  const AmplifiedParityConfig config(d, 0.5, 0.2, 0.5);
  const BitVector target = BitVector::FromString("110");
  Rng rng(777);
  const int trials = 40;
  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    const Database db =
        RealizableParityDatabase(target, config.MinimumDatabaseSize(), rng);
    const AmplifiedOutcome out = LearnParityAmplified(db, config, rng);
    REQUIRE(out.candidates.size() == config.k);
    REQUIRE(out.perturbed_errors.size() == config.k);
    for (std::size_t j = 0; j < config.k; ++j) {
      CHECK(out.candidates[j].IsBot() ==
            (out.perturbed_errors[j] == std::numeric_limits<double>::infinity()));
    }
    if (out.IsBot()) {
      for (const ParityOutcome& c : out.candidates) CHECK(c.IsBot());
      continue;
    }
    // The winner is a non-bot candidate with the smallest perturbed error;
    // earlier indices must have strictly larger values.
    const std::size_t w = out.selected_index;
    CHECK_FALSE(out.candidates[w].IsBot());
    for (std::size_t j = 0; j < config.k; ++j) {
      CHECK(out.perturbed_errors[w] <= out.perturbed_errors[j]);
      if (j < w) CHECK(out.perturbed_errors[w] < out.perturbed_errors[j]);
    }
    if (*out.r == target) ++successes;
  }
  CHECK(successes >= trials * 3 / 4);
}

TEST_CASE("amplified learner is deterministic per seed") {
  const AmplifiedParityConfig config(2, 0.5, 0.4, 0.5);
  Rng gen(88);
  const Database db = RealizableParityDatabase(BitVector::FromString("01"),
                                               config.MinimumDatabaseSize(), gen);
  Rng a(99), b(99);
  const AmplifiedOutcome out_a = LearnParityAmplified(db, config, a);
  const AmplifiedOutcome out_b = LearnParityAmplified(db, config, b);
  CHECK(out_a.IsBot() == out_b.IsBot());
  if (!out_a.IsBot()) {
    CHECK(*out_a.r == *out_b.r);
    CHECK(out_a.selected_index == out_b.selected_index);
  }
}

TEST_CASE("parity error on a database slice") {
  Database db;
  db.kind = LabelKind::kBit;
  db.dimension = 2;
  db.entries = {{BitVector::FromString("10"), 1},
                {BitVector::FromString("01"), 0},
                {BitVector::FromString("11"), 0},
                {BitVector::FromString("11"), 1}};
  const BitVector r = BitVector::FromString("10");
  // Labels of c_r on the four rows: 1, 0, 1, 1 -> disagreements at row 2.
  CHECK(ParityErrorOnDatabase(r, db, 0, 4) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ParityErrorOnDatabase(r, db, 2, 4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ParityErrorOnDatabase(r, db, 2, 3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(ParityErrorOnDatabase(r, db, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(ParityErrorOnDatabase(r, db, 0, 5), std::invalid_argument);
}

}  // TEST_SUITE

}  // namespace
}  // namespace privlearn
