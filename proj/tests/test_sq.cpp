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
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "privlearn/sq.hpp"
#include "test_util.hpp"

namespace privlearn {
namespace {

// Law of R(D) for a symbol distribution D given as weights.
std::vector<double> TrueOutputLaw(const FiniteRandomizer& r, std::span<const double> weights) {
  std::vector<double> p(r.output_count(), 0.0);
  for (std::size_t z = 0; z < weights.size(); ++z) {
    for (std::size_t w = 0; w < r.output_count(); ++w) {
      p[w] += weights[z] * r.TransitionProb(z, w);
    }
  }
  return p;
}

// Noninteractive protocol invoking the same entry twice; output packs both
// answers.
class RepeatEntryProtocol : public LocalAlgorithm {
 public:
  explicit RepeatEntryProtocol(double randomizer_eps)
      : rr_(MakeRandomizedResponse(randomizer_eps)) {}

  std::size_t TotalInvocations() const override { return 2; }
  bool Interactive() const override { return false; }
  std::optional<Step> NextStep(std::span<const std::size_t> answers) const override {
    if (answers.size() >= 2) return std::nullopt;
    return Step{0, &rr_};
  }
  std::size_t Output(std::span<const std::size_t> answers) const override {
    return 2 * answers[0] + answers[1];
  }

 private:
  FiniteRandomizer rr_;
};

// Majority over three distinct entries.
class ThreeEntryMajority : public LocalAlgorithm {
 public:
  explicit ThreeEntryMajority(double eps) : rr_(MakeRandomizedResponse(eps)) {}

  std::size_t TotalInvocations() const override { return 3; }
  bool Interactive() const override { return false; }
  std::optional<Step> NextStep(std::span<const std::size_t> answers) const override {
    if (answers.size() >= 3) return std::nullopt;
    return Step{answers.size(), &rr_};
  }
  std::size_t Output(std::span<const std::size_t> answers) const override {
    return answers[0] + answers[1] + answers[2] >= 2 ? 1 : 0;
  }

 private:
  FiniteRandomizer rr_;
};

// 4-symbol transparent randomizer with pointwise row ratio 1.5 <= e^0.5.
FiniteRandomizer FourSymbolRandomizer() {
  return FiniteRandomizer("four", 0.5,
                          {{0.30, 0.20, 0.25, 0.25},
                           {0.20, 0.30, 0.25, 0.25},
                           {0.25, 0.25, 0.30, 0.20},
                           {0.25, 0.25, 0.20, 0.30}});
}

struct MeanQueryLearner {
  std::size_t TotalQueries() const { return 1; }
  std::size_t Rounds() const { return 1; }
  std::vector<SqLearnerQuery> RoundQueries(std::size_t round,
                                           std::span<const double> answers) const {
    (void)round;
    (void)answers;
    return {{"label-mean", [](const Example& e) { return static_cast<double>(e.y); }, 1.0,
             0.125}};
  }
  double Finish(std::span<const double> answers) const { return answers[0]; }
};

TEST_SUITE("sq") {

TEST_CASE("exact oracle returns the expectation") {
  auto oracle = SymbolSqOracle::Exact(SymbolSupport(std::vector<double>{0.25, 0.75}));
  const double v = oracle.Answer(
      [](const std::size_t& z) { return z == 1 ? 1.0 : -1.0; }, 0.1);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(oracle.queries_asked() == 1);
  CHECK_THROWS_AS(oracle.Answer([](const std::size_t&) { return 0.0; }, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle.Answer([](const std::size_t&) { return 1.5; }, 0.1),
                  std::domain_error);
}

TEST_CASE("oracle support is validated") {
  CHECK_THROWS_AS(SymbolSqOracle::Exact({}), std::invalid_argument);
  CHECK_THROWS_AS(SymbolSqOracle::Exact({{0, 0.5}, {1, -0.1}, {2, 0.6}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SymbolSqOracle::Exact({{0, 0.5}, {1, 0.4}}), std::invalid_argument);
}

TEST_CASE("adversarial oracle shifts within the tolerance") {
  auto plus = SymbolSqOracle::Adversarial(
      SymbolSupport(std::vector<double>{0.5, 0.5}),
      [](std::size_t index, double tau) { (void)index; return tau; });
  const double v = plus.Answer([](const std::size_t& z) { return static_cast<double>(z); }, 0.1);
  CHECK(v == doctest::Approx(0.6).epsilon(1e-12));

  auto cheat = SymbolSqOracle::Adversarial(
      SymbolSupport(std::vector<double>{0.5, 0.5}),
      [](std::size_t index, double tau) { (void)index; return 2.0 * tau; });
  CHECK_THROWS_AS(
      cheat.Answer([](const std::size_t& z) { return static_cast<double>(z); }, 0.1),
      std::logic_error);
}

TEST_CASE("sampled oracle estimates the expectation") {
  Rng rng(92);
  auto oracle =
      SymbolSqOracle::Sampled(SymbolSupport(std::vector<double>{0.5, 0.5}), 20000, &rng);
  const double v =
      oracle.Answer([](const std::size_t& z) { return static_cast<double>(z); }, 0.1);
  CHECK(v == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("materialized support carries the labeled weights") {
  const LabeledDistribution dist = LabeledDistribution::FromConcept(
      InputDistribution::Uniform(2), MakeParityConcept(BitVector::FromString("11")));
  const auto support = MaterializeSupport(dist);
  REQUIRE(support.size() == 4);
  double total = 0.0;
  for (const auto& [example, weight] : support) {
    CHECK(weight == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(example.y == (example.x.Get(0) != example.x.Get(1) ? 1 : 0));
    total += weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simulator parameters follow the pinned formulas") {
  const RejectionSimulator sim(4, 0.2, 0.5);
  CHECK(sim.phi() == doctest::Approx(0.2 / 12.0).epsilon(1e-12));
  CHECK(sim.tau() == doctest::Approx(0.2 / (3.0 * std::exp(1.0) * 4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(RejectionSimulator(0, 0.2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RejectionSimulator(4, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RejectionSimulator(4, 0.2, 0.0), std::invalid_argument);
}

TEST_CASE("exact answers reproduce the output law exactly on the bit") {
  const double eps = 0.5;
  const FiniteRandomizer rr = MakeRandomizedResponse(eps);
  const std::vector<double> weights = {0.3, 0.7};
  const std::vector<double> truth = TrueOutputLaw(rr, weights);
  const std::vector<double> law = ExactRejectionOutputLaw(rr, weights, 1, 0.1, eps, {});
  REQUIRE(law.size() == 2);
  CHECK(testutil::TotalVariation(law, truth) <= 1e-12);
}

TEST_CASE("exact answers reproduce the output law exactly on four symbols") {
  const FiniteRandomizer four = FourSymbolRandomizer();
  const std::vector<double> weights = {0.1, 0.2, 0.3, 0.4};
  const std::vector<double> truth = TrueOutputLaw(four, weights);
  const std::vector<double> law = ExactRejectionOutputLaw(four, weights, 2, 0.15, 0.5, {});
  CHECK(testutil::TotalVariation(law, truth) <= 1e-12);
}

TEST_CASE("sampled runs agree with the exact law and meet the iteration bound") {
  const double eps = 0.5, beta = 0.1;
  const FiniteRandomizer rr = MakeRandomizedResponse(eps);
  const std::vector<double> weights = {0.3, 0.7};
  auto oracle = SymbolSqOracle::Exact(SymbolSupport(weights));
  Rng rng(111);
  const int trials = 20000;
  std::vector<std::uint64_t> counts(2, 0);
  RejectionStats stats;
  for (int t = 0; t < trials; ++t) {
    ++counts[RejectionSimulate(rr, 1, beta, eps, oracle, rng, &stats)];
  }
  const std::vector<double> truth = TrueOutputLaw(rr, weights);
  CHECK(testutil::ChiSquarePValue(counts, truth) > 1e-4);
  const double mean_iterations = static_cast<double>(stats.iterations) / trials;
  CHECK(mean_iterations <= 2.0 * std::exp(eps));
  CHECK(stats.sq_queries == stats.iterations);  // one query per proposal
}

TEST_CASE("adversarial sign patterns stay within the fidelity budget") {
  const double eps = 0.5;
  const std::size_t t = 2;
  const double beta = 0.2;
  const FiniteRandomizer four = FourSymbolRandomizer();
  const std::vector<double> weights = {0.1, 0.2, 0.3, 0.4};
  const std::vector<double> truth = TrueOutputLaw(four, weights);
  const RejectionSimulator sim(t, beta, eps);
  double worst = 0.0;
  for (std::size_t pattern = 0; pattern < 16; ++pattern) {
    std::vector<double> perturbations(4);
    for (std::size_t w = 0; w < 4; ++w) {
      perturbations[w] = ((pattern >> w) & 1u) ? sim.tau() : -sim.tau();
    }
    const std::vector<double> law =
        ExactRejectionOutputLaw(four, weights, t, beta, eps, perturbations);
    worst = std::max(worst, testutil::TotalVariation(law, truth));
  }
  CHECK(worst <= beta / static_cast<double>(t) + 1e-12);
  CHECK(worst > 0.0);  // the adversary does move the law
}

TEST_CASE("conditioned simulation matches the conditional law") {
  // The simulator budget must cover the history plus the next invocation, as
  // the ledger guarantees in the protocol path: two half-budget randomizers.
  const double cap = 0.5;
  const FiniteRandomizer rr = MakeRandomizedResponse(cap / 2.0);
  const std::vector<double> weights = {0.4, 0.6};
  auto oracle = SymbolSqOracle::Exact(SymbolSupport(weights));
  RejectionSimulator sim(2, 0.2, cap);
  Rng rng(222);

  for (std::size_t w1 = 0; w1 < 2; ++w1) {
    // Posterior over the entry given the first observed output.
    std::vector<double> posterior(2);
    double norm = 0.0;
    for (std::size_t z = 0; z < 2; ++z) {
      posterior[z] = weights[z] * rr.TransitionProb(z, w1);
      norm += posterior[z];
    }
    for (double& v : posterior) v /= norm;
    const std::vector<double> conditional = TrueOutputLaw(rr, posterior);

    const std::vector<RejectionSimulator::HistoryItem> history = {{&rr, w1}};
    std::vector<std::uint64_t> counts(2, 0);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
      ++counts[sim.SimulateNext(rr, history, oracle, rng)];
    }
    CHECK(testutil::ChiSquarePValue(counts, conditional) > 1e-4);
  }
}

TEST_CASE("repeated invocations of one entry reproduce the joint law") {
  const double cap = 0.5;
  const double randomizer_eps = 0.25;
  RepeatEntryProtocol protocol(randomizer_eps);
  const std::vector<double> weights = {0.4, 0.6};
  const FiniteRandomizer rr = MakeRandomizedResponse(randomizer_eps);

  // Joint law of two applications to the same hidden entry.
  std::vector<double> joint(4, 0.0);
  for (std::size_t z = 0; z < 2; ++z) {
    for (std::size_t w1 = 0; w1 < 2; ++w1) {
      for (std::size_t w2 = 0; w2 < 2; ++w2) {
        joint[2 * w1 + w2] +=
            weights[z] * rr.TransitionProb(z, w1) * rr.TransitionProb(z, w2);
      }
    }
  }

  auto oracle = SymbolSqOracle::Exact(SymbolSupport(weights));
  Rng rng(333);
  std::vector<std::uint64_t> counts(4, 0);
  const int trials = 20000;
  double total_queries = 0.0;
  for (int t = 0; t < trials; ++t) {
    const LocalBySqResult result =
        SimulateLocalAlgorithmBySq(protocol, 0.2, cap, oracle, rng);
    REQUIRE(result.output < 4);
    ++counts[result.output];
    total_queries += static_cast<double>(result.stats.sq_queries);
    if (t == 0) {
      CHECK(result.plan.mode() == PlanMode::kNoninteractive);
      REQUIRE(result.plan.queries().size() == 2);
      CHECK(result.plan.queries()[0].answered);
      CHECK(result.plan.queries()[1].answered);
    }
  }
  CHECK(testutil::ChiSquarePValue(counts, joint) > 1e-4);
  // Each invocation needs at most 2 e^eps proposals in expectation, with at
  // most two queries per proposal.
  CHECK(total_queries / trials <= 2.0 * 2.0 * 2.0 * std::exp(cap));
}

TEST_CASE("the sq simulation enforces the per-entry budget") {
  RepeatEntryProtocol protocol(0.5);  // two full-budget invocations of entry 0
  auto oracle = SymbolSqOracle::Exact(SymbolSupport(std::vector<double>{0.5, 0.5}));
  Rng rng(11);
  CHECK_THROWS_AS(SimulateLocalAlgorithmBySq(protocol, 0.2, 0.5, oracle, rng),
                  BudgetExceededError);
}

TEST_CASE("independent entries give independent answers") {
  const double eps = 0.5;
  ThreeEntryMajority protocol(eps);
  const std::vector<double> weights = {0.3, 0.7};
  const FiniteRandomizer rr = MakeRandomizedResponse(eps);
  const double p1 = TrueOutputLaw(rr, weights)[1];
  const double majority = 3.0 * p1 * p1 * (1.0 - p1) + p1 * p1 * p1;

  auto oracle = SymbolSqOracle::Exact(SymbolSupport(weights));
  Rng rng(444);
  std::vector<std::uint64_t> counts(2, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    ++counts[SimulateLocalAlgorithmBySq(protocol, 0.3, eps, oracle, rng).output];
  }
  const std::vector<double> expected = {1.0 - majority, majority};
  CHECK(testutil::ChiSquarePValue(counts, expected) > 1e-4);
}

TEST_CASE("sq learners run directly against an oracle") {
  const LabeledDistribution dist = LabeledDistribution::FromConcept(
      InputDistribution::Uniform(2), MakeParityConcept(BitVector::FromString("11")));
  auto exact = ExampleSqOracle::Exact(MaterializeSupport(dist));
  MeanQueryLearner learner;
  QueryPlan plan(PlanMode::kInteractive);
  const double v = RunSqLearner(learner, exact, &plan);
  CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(plan.mode() == PlanMode::kNoninteractive);
  REQUIRE(plan.queries().size() == 1);
  CHECK(plan.queries()[0].id == "label-mean");
  CHECK(plan.queries()[0].answer == doctest::Approx(0.5).epsilon(1e-12));

  // An adversarial oracle shifting every answer by +tau lands exactly at
  // E[g] + tau.
  auto adversarial = ExampleSqOracle::Adversarial(
      MaterializeSupport(dist), [](std::size_t, double tau) { return tau; });
  const double shifted = RunSqLearner(learner, adversarial);
  CHECK(shifted == doctest::Approx(0.5 + 0.125).epsilon(1e-12));
}

}  // TEST_SUITE

}  // namespace
}  // namespace privlearn
