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
// Domain types for learning over {0,1}^d: labeled examples, databases,
// distributions, concepts, and the error measures connecting them. Two label
// conventions coexist ({0,1} and {+1,-1}); every labeled object is tagged
// with its convention and mixing them is an error.

#ifndef PRIVLEARN_LEARNING_HPP_
#define PRIVLEARN_LEARNING_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "privlearn/bitvec.hpp"
#include "privlearn/rng.hpp"

namespace privlearn {

// Raised by learners and simulators when the database is too small for the
// requested configuration. Distinct from any in-protocol failure output: the
// input never entered the mechanism.
class InsufficientSamplesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LabelKind : std::uint8_t { kBit, kSign };

// Convention conversions; bit 0 <-> sign +1, bit 1 <-> sign -1.
int SignFromBit(int bit);
int BitFromSign(int sign);
bool IsValidLabel(LabelKind kind, int label);

struct Example {
  BitVector x;
  int y = 0;
};

struct Database {
  LabelKind kind = LabelKind::kBit;
  std::size_t dimension = 0;
  std::vector<Example> entries;

  std::size_t size() const { return entries.size(); }
};

// Boolean concept with a declared output convention. Cheap to copy.
class Concept {
 public:
  Concept(LabelKind kind, std::string repr, std::function<int(const BitVector&)> eval)
      : kind_(kind), repr_(std::move(repr)), eval_(std::move(eval)) {}

  int operator()(const BitVector& x) const { return eval_(x); }
  LabelKind kind() const { return kind_; }
  const std::string& repr() const { return repr_; }

 private:
  LabelKind kind_;
  std::string repr_;
  std::function<int(const BitVector&)> eval_;
};

// c_r(x) = <r, x> mod 2, in the {0,1} convention.
Concept MakeParityConcept(const BitVector& r);

// Concept given by an explicit truth table indexed by the integer encoding of
// x; requires dimension <= 20 and table size 2^dimension.
Concept MakeTableConcept(LabelKind kind, std::size_t dimension, std::vector<int> table,
                         std::string repr);

// Distribution over {0,1}^dimension: either uniform or an explicit finite
// support with weights (nonnegative, summing to 1 within 1e-9).
class InputDistribution {
 public:
  static InputDistribution Uniform(std::size_t dimension);
  static InputDistribution Explicit(std::size_t dimension, std::vector<BitVector> points,
                                    std::vector<double> weights);

  std::size_t dimension() const { return dimension_; }
  BitVector Sample(Rng& rng) const;

  // Visits every support point with its probability. For the uniform
  // distribution this enumerates 2^dimension points and requires
  // dimension <= 20.
  void ForEachSupport(const std::function<void(const BitVector&, double)>& visit) const;

 private:
  InputDistribution() = default;
  bool uniform_ = true;
  std::size_t dimension_ = 0;
  std::vector<BitVector> points_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// Distribution over labeled examples: either an input distribution labeled by
// a concept, or an explicit finite support of labeled examples.
class LabeledDistribution {
 public:
  static LabeledDistribution FromConcept(InputDistribution input, Concept target);
  static LabeledDistribution Explicit(LabelKind kind, std::size_t dimension,
                                      std::vector<Example> points,
                                      std::vector<double> weights);

  LabelKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  Example Sample(Rng& rng) const;
  void ForEachSupport(const std::function<void(const Example&, double)>& visit) const;

 private:
  LabeledDistribution() = default;
  LabelKind kind_ = LabelKind::kBit;
  std::size_t dimension_ = 0;
  std::vector<InputDistribution> input_;  // empty or exactly one
  std::vector<Concept> concept_;          // empty or exactly one
  std::vector<Example> points_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

// n i.i.d. draws.
Database GenerateDatabase(const LabeledDistribution& dist, std::size_t n, Rng& rng);

// Misclassification probability of h under the distribution, by exact
// enumeration of the support.
double TrueError(const Concept& h, const LabeledDistribution& dist);

// Monte-Carlo estimate of the same quantity; opt-in, never silently replaces
// the exact path.
double TrueErrorMonteCarlo(const Concept& h, const LabeledDistribution& dist,
                           std::size_t samples, Rng& rng);

// Fraction of database entries misclassified by h; empty databases throw.
double TrainingError(const Concept& h, const Database& db);

// Smallest true error over a nonempty concept class.
double OptError(std::span<const Concept> concepts, const LabeledDistribution& dist);

// Distinct label vectors a concept class induces on a point list, each with
// the index of the first concept realizing it. Requires at most 2^16 points.
std::vector<std::pair<std::vector<int>, std::size_t>> DistinctLabelings(
    std::span<const Concept> concepts, std::span<const BitVector> points);

// Neighbor construction: copy of db with entry i replaced.
Database ReplaceEntry(const Database& db, std::size_t index, const Example& example);

// Number of positions where the databases differ.
std::size_t HammingDistance(const Database& a, const Database& b);

// CSV serialization: header "x,y", then one "bitstring,label" row per entry.
// Labels are written literally in the database's convention.
std::string DatabaseToCsv(const Database& db);
Database DatabaseFromCsv(const std::string& csv, LabelKind expected_kind);
void WriteDatabaseCsvFile(const Database& db, const std::string& path);
Database ReadDatabaseCsvFile(const std::string& path, LabelKind expected_kind);

}  // namespace privlearn

#endif  // PRIVLEARN_LEARNING_HPP_
