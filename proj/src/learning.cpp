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

#include "privlearn/learning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace privlearn {
namespace {

constexpr std::size_t kMaxEnumerationBits = 20;
constexpr std::size_t kMaxLabelingPoints = 1u << 16;

std::vector<double> BuildCumulative(const std::vector<double>& weights) {
  if (weights.empty()) throw std::invalid_argument("distribution support must be nonempty");
  double total = 0.0;
  std::vector<double> cumulative(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("distribution weights must be >= 0");
    total += weights[i];
    cumulative[i] = total;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("distribution weights must sum to 1");
  }
  cumulative.back() = 1.0;
  return cumulative;
}

std::size_t SampleIndex(const std::vector<double>& cumulative, Rng& rng) {
  const double u = rng.Uniform01();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

}  // namespace

int SignFromBit(int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("SignFromBit: bit must be 0 or 1");
  return 1 - 2 * bit;
}

int BitFromSign(int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("BitFromSign: sign must be +1 or -1");
  return (1 - sign) / 2;
}

bool IsValidLabel(LabelKind kind, int label) {
  return kind == LabelKind::kBit ? (label == 0 || label == 1) : (label == 1 || label == -1);
}

Concept MakeParityConcept(const BitVector& r) {
  return Concept(LabelKind::kBit, "parity(" + r.ToString() + ")",
                 [r](const BitVector& x) { return InnerProduct(r, x); });
}

Concept MakeTableConcept(LabelKind kind, std::size_t dimension, std::vector<int> table,
                         std::string repr) {
  if (dimension > kMaxEnumerationBits) {
    throw std::invalid_argument("MakeTableConcept: dimension too large");
  }
  if (table.size() != (std::size_t{1} << dimension)) {
    throw std::invalid_argument("MakeTableConcept: table size must be 2^dimension");
  }
  for (int v : table) {
    if (!IsValidLabel(kind, v)) throw std::invalid_argument("MakeTableConcept: bad label in table");
  }
  auto shared = std::make_shared<std::vector<int>>(std::move(table));
  return Concept(kind, std::move(repr),
                 [shared](const BitVector& x) { return (*shared)[x.ToInteger()]; });
}

InputDistribution InputDistribution::Uniform(std::size_t dimension) {
  InputDistribution d;
  d.uniform_ = true;
  d.dimension_ = dimension;
  return d;
}

InputDistribution InputDistribution::Explicit(std::size_t dimension,
                                              std::vector<BitVector> points,
                                              std::vector<double> weights) {
  if (points.size() != weights.size()) {
    throw std::invalid_argument("InputDistribution: points/weights size mismatch");
  }
  for (const BitVector& p : points) {
    if (p.size() != dimension) throw std::invalid_argument("InputDistribution: point dimension mismatch");
  }
  InputDistribution d;
  d.uniform_ = false;
  d.dimension_ = dimension;
  d.cumulative_ = BuildCumulative(weights);
  d.points_ = std::move(points);
  d.weights_ = std::move(weights);
  return d;
}

BitVector InputDistribution::Sample(Rng& rng) const {
  if (uniform_) return BitVector::Random(dimension_, rng);
  return points_[SampleIndex(cumulative_, rng)];
}

void InputDistribution::ForEachSupport(
    const std::function<void(const BitVector&, double)>& visit) const {
  if (uniform_) {
    if (dimension_ > kMaxEnumerationBits) {
      throw std::domain_error("InputDistribution: uniform support too large to enumerate");
    }
    const std::uint64_t count = 1ULL << dimension_;
    const double w = 1.0 / static_cast<double>(count);
    for (std::uint64_t v = 0; v < count; ++v) {
      visit(BitVector::FromInteger(v, dimension_), w);
    }
    return;
  }
  for (std::size_t i = 0; i < points_.size(); ++i) visit(points_[i], weights_[i]);
}

LabeledDistribution LabeledDistribution::FromConcept(InputDistribution input, Concept target) {
  LabeledDistribution d;
  d.kind_ = target.kind();
  d.dimension_ = input.dimension();
  d.input_.push_back(std::move(input));
  d.concept_.push_back(std::move(target));
  return d;
}

LabeledDistribution LabeledDistribution::Explicit(LabelKind kind, std::size_t dimension,
                                                  std::vector<Example> points,
                                                  std::vector<double> weights) {
  if (points.size() != weights.size()) {
    throw std::invalid_argument("LabeledDistribution: points/weights size mismatch");
  }
  for (const Example& e : points) {
    if (e.x.size() != dimension) {
      throw std::invalid_argument("LabeledDistribution: point dimension mismatch");
    }
    if (!IsValidLabel(kind, e.y)) {
      throw std::invalid_argument("LabeledDistribution: label does not match convention");
    }
  }
  LabeledDistribution d;
  d.kind_ = kind;
  d.dimension_ = dimension;
  d.cumulative_ = BuildCumulative(weights);
  d.points_ = std::move(points);
  d.weights_ = std::move(weights);
  return d;
}

Example LabeledDistribution::Sample(Rng& rng) const {
  if (!input_.empty()) {
    BitVector x = input_[0].Sample(rng);
    const int y = concept_[0](x);
    return {std::move(x), y};
  }
  return points_[SampleIndex(cumulative_, rng)];
}

void LabeledDistribution::ForEachSupport(
    const std::function<void(const Example&, double)>& visit) const {
  if (!input_.empty()) {
    const Concept& c = concept_[0];
    input_[0].ForEachSupport([&](const BitVector& x, double w) {
      visit(Example{x, c(x)}, w);
    });
    return;
  }
  for (std::size_t i = 0; i < points_.size(); ++i) visit(points_[i], weights_[i]);
}

Database GenerateDatabase(const LabeledDistribution& dist, std::size_t n, Rng& rng) {
  Database db;
  db.kind = dist.kind();
  db.dimension = dist.dimension();
  db.entries.reserve(n);
  for (std::size_t i = 0; i < n; ++i) db.entries.push_back(dist.Sample(rng));
  return db;
}

double TrueError(const Concept& h, const LabeledDistribution& dist) {
  if (h.kind() != dist.kind()) {
    throw std::invalid_argument("TrueError: label convention mismatch");
  }
  double err = 0.0;
  dist.ForEachSupport([&](const Example& e, double w) {
    if (h(e.x) != e.y) err += w;
  });
  return err;
}

double TrueErrorMonteCarlo(const Concept& h, const LabeledDistribution& dist,
                           std::size_t samples, Rng& rng) {
  if (h.kind() != dist.kind()) {
    throw std::invalid_argument("TrueErrorMonteCarlo: label convention mismatch");
  }
  if (samples == 0) throw std::invalid_argument("TrueErrorMonteCarlo: samples must be positive");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Example e = dist.Sample(rng);
    if (h(e.x) != e.y) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(samples);
}

double TrainingError(const Concept& h, const Database& db) {
  if (db.entries.empty()) throw std::invalid_argument("TrainingError: database is empty");
  if (h.kind() != db.kind) throw std::invalid_argument("TrainingError: label convention mismatch");
  std::size_t wrong = 0;
  for (const Example& e : db.entries) {
    if (h(e.x) != e.y) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(db.entries.size());
}

double OptError(std::span<const Concept> concepts, const LabeledDistribution& dist) {
  if (concepts.empty()) throw std::invalid_argument("OptError: concept class is empty");
  double best = 1.0;
  for (const Concept& c : concepts) best = std::min(best, TrueError(c, dist));
  return best;
}

std::vector<std::pair<std::vector<int>, std::size_t>> DistinctLabelings(
    std::span<const Concept> concepts, std::span<const BitVector> points) {
  if (points.size() > kMaxLabelingPoints) {
    throw std::domain_error("DistinctLabelings: too many points");
  }
  std::vector<std::pair<std::vector<int>, std::size_t>> out;
  std::map<std::vector<int>, std::size_t> seen;
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    std::vector<int> labels(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) labels[j] = concepts[i](points[j]);
    if (seen.emplace(labels, i).second) out.emplace_back(std::move(labels), i);
  }
  return out;
}

Database ReplaceEntry(const Database& db, std::size_t index, const Example& example) {
  if (index >= db.entries.size()) throw std::out_of_range("ReplaceEntry: index out of range");
  if (example.x.size() != db.dimension) {
    throw std::invalid_argument("ReplaceEntry: example dimension mismatch");
  }
  if (!IsValidLabel(db.kind, example.y)) {
    throw std::invalid_argument("ReplaceEntry: label does not match convention");
  }
  Database out = db;
  out.entries[index] = example;
  return out;
}

std::size_t HammingDistance(const Database& a, const Database& b) {
  if (a.entries.size() != b.entries.size()) {
    throw std::invalid_argument("HammingDistance: database sizes differ");
  }
  std::size_t distance = 0;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].x != b.entries[i].x || a.entries[i].y != b.entries[i].y) ++distance;
  }
  return distance;
}

std::string DatabaseToCsv(const Database& db) {
  std::ostringstream out;
  out << "x,y\n";
  for (const Example& e : db.entries) {
    out << e.x.ToString() << ',' << e.y << '\n';
  }
  return out.str();
}

Database DatabaseFromCsv(const std::string& csv, LabelKind expected_kind) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || (line != "x,y" && line != "x,y\r")) {
    throw std::invalid_argument("DatabaseFromCsv: missing x,y header");
  }
  Database db;
  db.kind = expected_kind;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("DatabaseFromCsv: row missing comma");
    BitVector x = BitVector::FromString(line.substr(0, comma));
    const int y = std::stoi(line.substr(comma + 1));
    if (!IsValidLabel(expected_kind, y)) {
      throw std::invalid_argument("DatabaseFromCsv: label does not match convention");
    }
    if (first) {
      db.dimension = x.size();
      first = false;
    } else if (x.size() != db.dimension) {
      throw std::invalid_argument("DatabaseFromCsv: inconsistent row dimension");
    }
    db.entries.push_back({std::move(x), y});
  }
  return db;
}

void WriteDatabaseCsvFile(const Database& db, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("WriteDatabaseCsvFile: cannot open " + path);
  out << DatabaseToCsv(db);
}

Database ReadDatabaseCsvFile(const std::string& path, LabelKind expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ReadDatabaseCsvFile: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return DatabaseFromCsv(buffer.str(), expected_kind);
}

}  // namespace privlearn
