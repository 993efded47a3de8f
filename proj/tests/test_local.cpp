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

#include <json.hpp>

#include "doctest.h"
#include "privlearn/local.hpp"
#include "test_util.hpp"

namespace privlearn {
namespace {

// Noninteractive protocol: one randomized-response call per entry, output the
// majority bit.
class MajorityProtocol : public LocalAlgorithm {
 public:
  MajorityProtocol(std::size_t n, double eps) : n_(n), rr_(MakeRandomizedResponse(eps)) {}

  std::size_t TotalInvocations() const override { return n_; }
  bool Interactive() const override { return false; }
  std::optional<Step> NextStep(std::span<const std::size_t> answers) const override {
    if (answers.size() >= n_) return std::nullopt;
    return Step{answers.size(), &rr_};
  }
  std::size_t Output(std::span<const std::size_t> answers) const override {
    std::size_t ones = 0;
    for (std::size_t a : answers) ones += a;
    return ones * 2 >= answers.size() ? 1 : 0;
  }

 private:
  std::size_t n_;
  FiniteRandomizer rr_;
};

// Interactive protocol: query entry 0, then use the answer to choose which
// entry to query next; output the second answer.
class FollowupProtocol : public LocalAlgorithm {
 public:
  explicit FollowupProtocol(double eps) : rr_(MakeRandomizedResponse(eps)) {}

  std::size_t TotalInvocations() const override { return 2; }
  bool Interactive() const override { return true; }
  std::optional<Step> NextStep(std::span<const std::size_t> answers) const override {
    if (answers.empty()) return Step{0, &rr_};
    if (answers.size() == 1) return Step{1 + answers[0], &rr_};
    return std::nullopt;
  }
  std::size_t Output(std::span<const std::size_t> answers) const override {
    return answers.back();
  }

 private:
  FiniteRandomizer rr_;
};

// Claims to be noninteractive but stops early when the first answer is 1.
// The constant randomizer always outputs 1, so the executor must detect the
// divergence from the planned step count.
class LyingProtocol : public LocalAlgorithm {
 public:
  LyingProtocol()
      : constant_("const-one", 0.1,
                  std::vector<std::vector<double>>{{0.0, 1.0}, {0.0, 1.0}}) {}

  std::size_t TotalInvocations() const override { return 3; }
  bool Interactive() const override { return false; }
  std::optional<Step> NextStep(std::span<const std::size_t> answers) const override {
    if (!answers.empty() && answers[0] == 1) return std::nullopt;
    if (answers.size() >= 3) return std::nullopt;
    return Step{answers.size(), &constant_};
  }
  std::size_t Output(std::span<const std::size_t> answers) const override {
    return answers.empty() ? 0 : answers[0];
  }

 private:
  FiniteRandomizer constant_;
};

// Invokes entry 0 twice at full budget.
class DoubleDipProtocol : public LocalAlgorithm {
 public:
  explicit DoubleDipProtocol(double eps) : rr_(MakeRandomizedResponse(eps)) {}

  std::size_t TotalInvocations() const override { return 2; }
  bool Interactive() const override { return false; }
  std::optional<Step> NextStep(std::span<const std::size_t> answers) const override {
    if (answers.size() >= 2) return std::nullopt;
    return Step{0, &rr_};
  }
  std::size_t Output(std::span<const std::size_t> answers) const override {
    return answers.back();
  }

 private:
  FiniteRandomizer rr_;
};

// One-round SQ learner asking for the label mean and the first-coordinate
// mean; its output is the raw answer vector.
struct TwoQueryLearner {
  std::size_t TotalQueries() const { return 2; }
  std::size_t Rounds() const { return 1; }
  std::vector<SqLearnerQuery> RoundQueries(std::size_t round,
                                           std::span<const double> answers) const {
    (void)answers;
    if (round != 0) throw std::invalid_argument("one round only");
    SqLearnerQuery label_mean{"label-mean",
                              [](const Example& e) { return static_cast<double>(e.y); }, 1.0,
                              0.25};
    SqLearnerQuery coord_mean{"coord-mean",
                              [](const Example& e) { return e.x.Get(0) ? 1.0 : 0.0; }, 1.0,
                              0.25};
    return {label_mean, coord_mean};
  }
  std::vector<double> Finish(std::span<const double> answers) const {
    return {answers.begin(), answers.end()};
  }
};

// Second round's query depends on the first answer.
struct AdaptiveLearner {
  std::size_t TotalQueries() const { return 2; }
  std::size_t Rounds() const { return 2; }
  std::vector<SqLearnerQuery> RoundQueries(std::size_t round,
                                           std::span<const double> answers) const {
    if (round == 0) {
      return {{"probe", [](const Example& e) { return static_cast<double>(e.y); }, 1.0, 0.3}};
    }
    const std::size_t coord = answers[0] > 0.5 ? 0 : 1;
    return {{"followup-" + std::to_string(coord),
             [coord](const Example& e) { return e.x.Get(coord) ? 1.0 : 0.0; }, 1.0, 0.3}};
  }
  std::vector<double> Finish(std::span<const double> answers) const {
    return {answers.begin(), answers.end()};
  }
};

// Declares one query but asks two.
struct OverdrawLearner {
  std::size_t TotalQueries() const { return 1; }
  std::size_t Rounds() const { return 1; }
  std::vector<SqLearnerQuery> RoundQueries(std::size_t round,
                                           std::span<const double> answers) const {
    (void)round;
    (void)answers;
    SqLearnerQuery q{"q", [](const Example& e) { return static_cast<double>(e.y); }, 1.0, 0.4};
    return {q, q};
  }
  int Finish(std::span<const double> answers) const { return static_cast<int>(answers.size()); }
};

Database UniformParityDatabase(std::size_t n, Rng& rng) {
  const LabeledDistribution dist = LabeledDistribution::FromConcept(
      InputDistribution::Uniform(2), MakeParityConcept(BitVector::FromString("11")));
  return GenerateDatabase(dist, n, rng);
}

TEST_SUITE("local") {

TEST_CASE("randomized response keeps the bit at the right rate") {
  const double eps = 1.0;
  const FiniteRandomizer rr = MakeRandomizedResponse(eps);
  const double keep = std::exp(eps) / (1.0 + std::exp(eps));
  CHECK(rr.epsilon() == eps);
  CHECK(rr.input_count() == 2);
  CHECK(rr.output_count() == 2);
  CHECK(rr.TransitionProb(0, 0) == doctest::Approx(keep).epsilon(1e-12));
  CHECK(rr.TransitionProb(1, 0) == doctest::Approx(1.0 - keep).epsilon(1e-12));

  Rng rng(14);
  std::vector<std::uint64_t> counts(2, 0);
  for (int t = 0; t < 20000; ++t) ++counts[rr.Apply(0, rng)];
  const std::vector<double> expected = {keep, 1.0 - keep};
  CHECK(testutil::ChiSquarePValue(counts, expected) > 1e-4);
}

TEST_CASE("transition matrices are vetted at construction") {
  // Ratio 4 between rows needs epsilon >= ln 4.
  const std::vector<std::vector<double>> skewed = {{0.8, 0.2}, {0.2, 0.8}};
  CHECK_THROWS_AS(FiniteRandomizer("bad", 1.0, skewed), std::invalid_argument);
  CHECK_NOTHROW(FiniteRandomizer("ok", std::log(4.0) + 0.01, skewed));

  // Positive vs zero cannot be repaired by any epsilon.
  CHECK_THROWS_AS(FiniteRandomizer("leaky", 5.0, {{1.0, 0.0}, {0.0, 1.0}}),
                  std::invalid_argument);
  // A column that is zero for every input is fine.
  CHECK_NOTHROW(FiniteRandomizer("padded", 0.5, {{0.45, 0.55, 0.0}, {0.55, 0.45, 0.0}}));

  CHECK_THROWS_AS(FiniteRandomizer("rowsum", 1.0, {{0.5, 0.4}, {0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FiniteRandomizer("ragged", 1.0, {{0.5, 0.5}, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteRandomizer("negative", 1.0, {{1.2, -0.2}, {0.5, 0.5}}),
                  std::invalid_argument);
  // Equal rows are perfectly private even at epsilon zero.
  CHECK_NOTHROW(FiniteRandomizer("constant", 0.0, {{0.3, 0.7}, {0.3, 0.7}}));
}

TEST_CASE("laplace query randomizer perturbs the query value") {
  const LaplaceQueryRandomizer r("mean", 0.5, 1.0,
                                 [](const Example& e) { return static_cast<double>(e.y); });
  CHECK(r.NoiseScale() == doctest::Approx(4.0));
  const Example e{BitVector::FromString("1"), 1};
  CHECK(r.Query(e) == 1.0);
  Rng rng(3);
  double sum = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) sum += r.Apply(e, rng);
  CHECK(sum / n == doctest::Approx(1.0).epsilon(0.1));

  const LaplaceQueryRandomizer out_of_range(
      "bad", 0.5, 1.0, [](const Example&) { return 2.0; });
  CHECK_THROWS_AS(out_of_range.Query(e), std::domain_error);
  CHECK_THROWS_AS(out_of_range.Apply(e, rng), std::domain_error);
  CHECK_THROWS_AS(LaplaceQueryRandomizer("bad", 0.0, 1.0, [](const Example&) { return 0.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(LaplaceQueryRandomizer("bad", 0.5, 0.0, [](const Example&) { return 0.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(LaplaceQueryRandomizer("bad", 0.5, 1.0, nullptr), std::invalid_argument);
}

TEST_CASE("noninteractive plans must declare everything upfront") {
  QueryPlan plan(PlanMode::kNoninteractive);
  const std::size_t q0 = plan.DeclareQuery("a", 0.1, 0);
  const std::size_t q1 = plan.DeclareQuery("b", 0.1, 0);
  plan.RecordAnswer(q0, 0.5);
  plan.RecordAnswer(q1, 0.25);
  CHECK_THROWS_AS(plan.DeclareQuery("late", 0.1, 0), std::logic_error);

  QueryPlan interactive(PlanMode::kInteractive);
  const std::size_t p0 = interactive.DeclareQuery("a", 0.1, 0);
  interactive.RecordAnswer(p0, 1.0);
  CHECK_NOTHROW(interactive.DeclareQuery("b", 0.1, 1));
  CHECK_THROWS_AS(interactive.RecordAnswer(7, 0.0), std::out_of_range);
}

TEST_CASE("plans serialize to json lines") {
  QueryPlan plan(PlanMode::kInteractive);
  plan.set_record_invocations(true);
  const std::size_t q = plan.DeclareQuery("label-mean", 0.2, 3);
  plan.DeclareQuery("unanswered", 0.1, 3);
  plan.RecordInvocation({7, "rr", 0.5, 3, 1.0});
  plan.RecordAnswer(q, 0.625);

  const std::string queries = plan.QueriesJsonLines();
  std::vector<nlohmann::json> lines;
  for (std::size_t start = 0; start < queries.size();) {
    const std::size_t nl = queries.find('\n', start);
    lines.push_back(nlohmann::json::parse(queries.substr(start, nl - start)));
    start = nl + 1;
  }
  REQUIRE(lines.size() == 2);
  CHECK(lines[0]["query"] == "label-mean");
  CHECK(lines[0]["tau"] == doctest::Approx(0.2));
  CHECK(lines[0]["answer"] == doctest::Approx(0.625));
  CHECK(lines[0]["round"] == 3);
  CHECK(lines[1]["answer"].is_null());

  const nlohmann::json inv = nlohmann::json::parse(
      plan.InvocationsJsonLines().substr(0, plan.InvocationsJsonLines().find('\n')));
  CHECK(inv["index"] == 7);
  CHECK(inv["randomizer"] == "rr");
  CHECK(inv["epsilon"] == doctest::Approx(0.5));
  CHECK(inv["output"] == doctest::Approx(1.0));
}

TEST_CASE("invocation records are opt in") {
  QueryPlan plan(PlanMode::kInteractive);
  plan.RecordInvocation({0, "rr", 0.5, 0, 1.0});
  CHECK(plan.invocations().empty());
  plan.set_record_invocations(true);
  plan.RecordInvocation({0, "rr", 0.5, 0, 1.0});
  CHECK(plan.invocations().size() == 1);
}

TEST_CASE("oracle charges the ledger per entry") {
  const std::vector<std::size_t> entries = {1, 0, 1};
  SymbolOracle oracle(entries, 0.5);
  const FiniteRandomizer rr = MakeRandomizedResponse(0.5);
  Rng rng(21);
  (void)oracle.Invoke(0, rr, rng);
  CHECK(oracle.ledger().Charged(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(oracle.Invoke(0, rr, rng), BudgetExceededError);
  CHECK_NOTHROW(oracle.Invoke(1, rr, rng));
  CHECK_THROWS_AS(oracle.Invoke(3, rr, rng), std::out_of_range);
}

TEST_CASE("noninteractive protocol runs against the oracle") {
  const std::vector<std::size_t> entries = {1, 1, 1, 0, 0};
  MajorityProtocol protocol(entries.size(), 1.0);
  Rng rng(37);
  QueryPlan plan(PlanMode::kNoninteractive);
  const std::size_t out = RunLocalAlgorithm(protocol, entries, 1.0, rng, &plan);
  CHECK((out == 0 || out == 1));
  CHECK(plan.mode() == PlanMode::kNoninteractive);
  CHECK(plan.queries().size() == 5);
  CHECK(plan.invocations().size() == 5);
  for (const auto& q : plan.queries()) CHECK(q.answered);
  for (const auto& inv : plan.invocations()) {
    CHECK(inv.randomizer_id == "rr");
    CHECK(inv.epsilon == doctest::Approx(1.0));
  }
}

TEST_CASE("interactive protocol chooses entries from answers") {
  const std::vector<std::size_t> entries = {1, 0, 1};
  FollowupProtocol protocol(0.8);
  Rng rng(44);
  QueryPlan plan(PlanMode::kInteractive);
  const std::size_t out = RunLocalAlgorithm(protocol, entries, 0.8, rng, &plan);
  CHECK((out == 0 || out == 1));
  CHECK(plan.mode() == PlanMode::kInteractive);
  CHECK(plan.invocations().size() == 2);
  // The second invocation's entry is 1 + the first answer.
  CHECK(plan.invocations()[1].entry_index ==
        1 + static_cast<std::size_t>(plan.invocations()[0].output));
}

TEST_CASE("noninteractive protocols cannot shrink after seeing answers") {
  const std::vector<std::size_t> entries = {0, 0, 0};
  LyingProtocol protocol;
  Rng rng(50);
  CHECK_THROWS_AS(RunLocalAlgorithm(protocol, entries, 1.0, rng), std::logic_error);
}

TEST_CASE("protocols cannot overspend an entry's budget") {
  const std::vector<std::size_t> entries = {1};
  DoubleDipProtocol protocol(1.0);
  Rng rng(51);
  CHECK_THROWS_AS(RunLocalAlgorithm(protocol, entries, 1.0, rng), BudgetExceededError);
}

TEST_CASE("slice size evaluates the pinned formula") {
  CHECK(SqSimulationSliceSize(1.0, 0.5, 0.1, 0.05) == 38346);
  CHECK(SqSimulationSliceSize(1.0, 1.0, 0.25, 0.1) == 1179);
  // More tolerance or budget shrinks the slice.
  CHECK(SqSimulationSliceSize(1.0, 0.5, 0.2, 0.05) < 38346);
  CHECK(SqSimulationSliceSize(1.0, 1.0, 0.1, 0.05) < 38346);
  CHECK_THROWS_AS(SqSimulationSliceSize(0.0, 0.5, 0.1, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(SqSimulationSliceSize(1.0, 0.0, 0.1, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(SqSimulationSliceSize(1.0, 0.5, 0.0, 0.05), std::invalid_argument);
  CHECK_THROWS_AS(SqSimulationSliceSize(1.0, 0.5, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("a simulated query averages noisy responses over its slice") {
  Rng rng(60);
  const Database db = UniformParityDatabase(1200, rng);
  ExampleOracle oracle(db.entries, 0.5);
  const LaplaceQueryRandomizer randomizer(
      "label-mean", 0.5, 1.0, [](const Example& e) { return static_cast<double>(e.y); });
  QueryPlan plan(PlanMode::kNoninteractive);
  plan.set_record_invocations(true);
  plan.DeclareQuery("label-mean", 0.25, 0);
  const double v = SimulateSqQueryByLocal(oracle, 0, 1000, randomizer, rng, &plan, 0, 0.25);
  CHECK(std::abs(v - 0.5) <= 0.6);  // noise scale 4 over 1000 entries
  CHECK(plan.invocations().size() == 1000);

  // The same slice cannot be touched again at full budget.
  CHECK_THROWS_AS(SimulateSqQueryByLocal(oracle, 0, 1000, randomizer, rng), BudgetExceededError);
  // A fresh slice can.
  CHECK_NOTHROW(SimulateSqQueryByLocal(oracle, 1000, 1200, randomizer, rng));
  CHECK_THROWS_AS(SimulateSqQueryByLocal(oracle, 5, 5, randomizer, rng), std::invalid_argument);
}

TEST_CASE("one round sq learner simulated from local calls") {
  Rng rng(61);
  const std::size_t slice = SqSimulationSliceSize(1.0, 1.0, 0.25, 0.1);
  const Database db = UniformParityDatabase(2 * slice, rng);
  TwoQueryLearner learner;
  QueryPlan plan(PlanMode::kInteractive);
  const std::vector<double> answers =
      SimulateSqLearnerByLocal(learner, db, 1.0, 0.2, rng, &plan);
  REQUIRE(answers.size() == 2);
  // True expectations are 1/2 for both queries.
  CHECK(std::abs(answers[0] - 0.5) <= 0.25);
  CHECK(std::abs(answers[1] - 0.5) <= 0.25);
  CHECK(plan.mode() == PlanMode::kNoninteractive);
  REQUIRE(plan.queries().size() == 2);
  CHECK(plan.queries()[0].id == "label-mean");
  CHECK(plan.queries()[0].answered);
  CHECK(plan.queries()[0].answer == answers[0]);
  CHECK(plan.invocations().empty());  // per-invocation records stay opt-in

  const Database small = UniformParityDatabase(2 * slice - 1, rng);
  CHECK_THROWS_AS(SimulateSqLearnerByLocal(learner, small, 1.0, 0.2, rng),
                  InsufficientSamplesError);
  CHECK_THROWS_AS(SimulateSqLearnerByLocal(learner, db, 1.0, 1.0, rng), std::invalid_argument);
}

TEST_CASE("adaptive learners get an interactive plan") {
  Rng rng(62);
  const std::size_t slice = SqSimulationSliceSize(1.0, 1.0, 0.3, 0.1);
  const Database db = UniformParityDatabase(2 * slice, rng);
  AdaptiveLearner learner;
  QueryPlan plan(PlanMode::kNoninteractive);
  const std::vector<double> answers =
      SimulateSqLearnerByLocal(learner, db, 1.0, 0.2, rng, &plan);
  REQUIRE(answers.size() == 2);
  CHECK(plan.mode() == PlanMode::kInteractive);
  REQUIRE(plan.queries().size() == 2);
  CHECK(plan.queries()[1].round == 1);
  // The follow-up query's identity depends on the first answer.
  const std::string expected =
      answers[0] > 0.5 ? "followup-0" : "followup-1";
  CHECK(plan.queries()[1].id == expected);
}

TEST_CASE("learners cannot exceed their declared query count") {
  Rng rng(63);
  const Database db = UniformParityDatabase(4000, rng);
  OverdrawLearner learner;
  CHECK_THROWS_AS(SimulateSqLearnerByLocal(learner, db, 1.0, 0.2, rng), std::logic_error);
}

TEST_CASE("simulated answers concentrate within the tolerance") {
  // Deviation experiment at desk scale: the slice is sized so that
  // |answer - E[g]| <= tau with failure probability well under beta.
  const double eps = 1.0, tau = 0.25, beta = 0.1;
  const std::size_t slice = SqSimulationSliceSize(1.0, eps, tau, beta);
  Rng rng(64);
  int failures = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    const Database db = UniformParityDatabase(slice, rng);
    ExampleOracle oracle(db.entries, eps);
    const LaplaceQueryRandomizer randomizer(
        "label-mean", eps, 1.0, [](const Example& e) { return static_cast<double>(e.y); });
    const double v = SimulateSqQueryByLocal(oracle, 0, slice, randomizer, rng);
    if (std::abs(v - 0.5) > tau) ++failures;
  }
  CHECK(static_cast<double>(failures) / trials <= beta);
}

}  // TEST_SUITE

}  // namespace
}  // namespace privlearn
