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

#include "privlearn/masked_parity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace privlearn {
namespace {

bool IsPowerOfTwo(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::size_t Log2(std::size_t v) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < v) ++bits;
  return bits;
}

double CheckQueryValue(double v) {
  if (!(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12)) {
    throw std::domain_error("masked parity query value outside [-1, 1]");
  }
  return v;
}

// <f restricted to b = s, c restricted to b = s> for every concept at once,
// exploiting the concept structure: on the b = 0 half the label is
// (-1)^(<r,x> + a), on the b = 1 half it is (-1)^(r_i). Concept index is
// a * 2^d + r.
std::vector<double> AllRestrictedCoefficients(const MaskedParityDomain& domain,
                                              std::span<const double> f, int s) {
  const std::size_t d = domain.d();
  const std::size_t n = domain.size();
  const std::size_t concepts = std::size_t{1} << (d + 1);
  std::vector<double> out(concepts, 0.0);

  if (s == 0) {
    // Aggregate f over i: F(x) = sum_i f(x, i, 0).
    std::vector<double> by_x(std::size_t{1} << d, 0.0);
    for (std::uint64_t u = 0; u < n; ++u) {
      const BitVector point = BitVector::FromInteger(u, domain.point_bits());
      if (domain.BField(point) != 0) continue;
      by_x[u & ((std::uint64_t{1} << d) - 1)] += f[u];
    }
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << d); ++r) {
      double total = 0.0;
      for (std::uint64_t x = 0; x < by_x.size(); ++x) {
        const int parity = std::popcount(r & x) & 1;
        total += parity ? -by_x[x] : by_x[x];
      }
      const double ip = total / static_cast<double>(n);
      out[r] = ip;                             // a = 0
      out[(std::uint64_t{1} << d) + r] = -ip;  // a = 1 flips the b = 0 labels
    }
  } else {
    // Aggregate f over x: G(i) = sum_x f(x, i, 1).
    std::vector<double> by_i(d, 0.0);
    for (std::uint64_t u = 0; u < n; ++u) {
      const BitVector point = BitVector::FromInteger(u, domain.point_bits());
      if (domain.BField(point) != 1) continue;
      by_i[domain.IField(point)] += f[u];
    }
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << d); ++r) {
      double total = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        total += ((r >> i) & 1ULL) ? -by_i[i] : by_i[i];
      }
      const double ip = total / static_cast<double>(n);
      out[r] = ip;
      out[(std::uint64_t{1} << d) + r] = ip;  // b = 1 labels ignore a
    }
  }
  return out;
}

}  // namespace

MaskedParityDomain::MaskedParityDomain(std::size_t d) : d_(d), index_bits_(Log2(d)) {
  if (!IsPowerOfTwo(d)) {
    throw std::invalid_argument("MaskedParityDomain: d must be a power of two");
  }
  if (point_bits() > 20) {
    throw std::invalid_argument("MaskedParityDomain: domain too large");
  }
}

BitVector MaskedParityDomain::Encode(const MaskedParityPoint& point) const {
  if (point.x.size() != d_) throw std::invalid_argument("Encode: x has wrong dimension");
  if (point.i >= d_) throw std::invalid_argument("Encode: index out of range");
  if (point.b != 0 && point.b != 1) throw std::invalid_argument("Encode: b must be 0 or 1");
  BitVector encoded(point_bits());
  for (std::size_t j = 0; j < d_; ++j) encoded.Set(j, point.x.Get(j));
  for (std::size_t j = 0; j < index_bits_; ++j) {
    encoded.Set(d_ + j, (point.i >> j) & 1u);
  }
  encoded.Set(d_ + index_bits_, point.b != 0);
  return encoded;
}

MaskedParityPoint MaskedParityDomain::Decode(const BitVector& encoded) const {
  if (encoded.size() != point_bits()) throw std::invalid_argument("Decode: wrong width");
  MaskedParityPoint point;
  point.x = BitVector(d_);
  for (std::size_t j = 0; j < d_; ++j) point.x.Set(j, encoded.Get(j));
  point.i = IField(encoded);
  point.b = BField(encoded);
  return point;
}

std::size_t MaskedParityDomain::IField(const BitVector& encoded) const {
  std::size_t i = 0;
  for (std::size_t j = 0; j < index_bits_; ++j) {
    if (encoded.Get(d_ + j)) i |= std::size_t{1} << j;
  }
  return i;
}

int MaskedParityConcept::Evaluate(const MaskedParityDomain& domain,
                                  const BitVector& encoded_point) const {
  if (r.size() != domain.d()) throw std::invalid_argument("MaskedParityConcept: r has wrong dimension");
  if (a != 0 && a != 1) throw std::invalid_argument("MaskedParityConcept: a must be 0 or 1");
  if (domain.BField(encoded_point) == 1) {
    return SignFromBit(r.Get(domain.IField(encoded_point)) ? 1 : 0);
  }
  int parity = 0;
  for (std::size_t j = 0; j < domain.d(); ++j) {
    if (r.Get(j) && encoded_point.Get(j)) parity ^= 1;
  }
  return SignFromBit(parity ^ a);
}

Concept MaskedParityConcept::AsConcept(const MaskedParityDomain& domain) const {
  MaskedParityConcept copy = *this;
  return Concept(LabelKind::kSign,
                 "masked_parity(" + r.ToString() + "," + std::to_string(a) + ")",
                 [copy, domain](const BitVector& x) { return copy.Evaluate(domain, x); });
}

LabeledDistribution MaskedParityDistribution(const MaskedParityDomain& domain,
                                             const MaskedParityConcept& target) {
  return LabeledDistribution::FromConcept(domain.UniformInputs(), target.AsConcept(domain));
}

std::vector<SqLearnerQuery> MaskedParityLearner::RoundQueries(
    std::size_t round, std::span<const double> answers) const {
  const std::size_t d = domain_.d();
  std::vector<SqLearnerQuery> queries;
  if (round == 0) {
    for (std::size_t j = 0; j < d; ++j) {
      SqLearnerQuery q;
      q.id = "bit-" + std::to_string(j);
      q.b = 1.0;
      q.tau = RoundOneTau();
      const MaskedParityDomain domain = domain_;
      q.g = [domain, j](const Example& e) {
        return (domain.BField(e.x) == 1 && domain.IField(e.x) == j && e.y == -1) ? 1.0 : 0.0;
      };
      queries.push_back(std::move(q));
    }
    return queries;
  }
  if (round != 1) throw std::invalid_argument("MaskedParityLearner: no such round");

  // Pad the recovered r to the encoded width; the i and b fields meet zero
  // coefficients, so the inner product is <r_hat, x>.
  const BitVector r_hat = RecoverR(answers);
  BitVector padded(domain_.point_bits());
  for (std::size_t j = 0; j < d; ++j) padded.Set(j, r_hat.Get(j));
  const MaskedParityDomain domain = domain_;
  SqLearnerQuery q;
  q.id = "mask";
  q.b = 1.0;
  q.tau = 0.2;
  q.g = [domain, padded](const Example& e) {
    if (domain.BField(e.x) != 0) return 0.0;
    const int predicted = SignFromBit(InnerProduct(padded, e.x));
    return e.y != predicted ? 1.0 : 0.0;
  };
  queries.push_back(std::move(q));
  return queries;
}

BitVector MaskedParityLearner::RecoverR(std::span<const double> answers) const {
  const std::size_t d = domain_.d();
  if (answers.size() < d) {
    throw std::invalid_argument("MaskedParityLearner: round-one answers missing");
  }
  BitVector r_hat(d);
  for (std::size_t j = 0; j < d; ++j) {
    r_hat.Set(j, answers[j] > RoundOneThreshold());
  }
  return r_hat;
}

MaskedParityConcept MaskedParityLearner::Finish(std::span<const double> answers) const {
  const std::size_t d = domain_.d();
  if (answers.size() != d + 1) {
    throw std::invalid_argument("MaskedParityLearner: expected d+1 answers");
  }
  MaskedParityConcept target;
  target.r = RecoverR(answers);
  target.a = answers[d] > 0.25 ? 1 : 0;
  return target;
}

PointLabelQuery FromExampleQuery(const std::function<double(const Example&)>& g) {
  return [g](const BitVector& encoded_point, int y) { return g(Example{encoded_point, y}); };
}

FourierPieces FourierDecompose(const MaskedParityDomain& domain, const PointLabelQuery& g) {
  const std::size_t n = domain.size();
  FourierPieces pieces;
  pieces.f.resize(n);
  pieces.f0.assign(n, 0.0);
  pieces.f1.assign(n, 0.0);
  double constant = 0.0;
  for (std::uint64_t u = 0; u < n; ++u) {
    const BitVector point = BitVector::FromInteger(u, domain.point_bits());
    const double plus = CheckQueryValue(g(point, 1));
    const double minus = CheckQueryValue(g(point, -1));
    pieces.f[u] = (plus - minus) / 2.0;
    constant += (plus + minus) / 2.0;
    if (domain.BField(point) == 0) {
      pieces.f0[u] = pieces.f[u];
    } else {
      pieces.f1[u] = pieces.f[u];
    }
  }
  pieces.constant = constant / static_cast<double>(n);
  return pieces;
}

double InnerProductUniform(std::span<const double> f, std::span<const double> h) {
  if (f.size() != h.size()) throw std::invalid_argument("InnerProductUniform: size mismatch");
  if (f.empty()) throw std::invalid_argument("InnerProductUniform: empty tables");
  double total = 0.0;
  for (std::size_t u = 0; u < f.size(); ++u) total += f[u] * h[u];
  return total / static_cast<double>(f.size());
}

std::vector<double> ConceptTable(const MaskedParityDomain& domain,
                                 const MaskedParityConcept& target) {
  std::vector<double> table(domain.size());
  for (std::uint64_t u = 0; u < table.size(); ++u) {
    table[u] = target.Evaluate(domain, BitVector::FromInteger(u, domain.point_bits()));
  }
  return table;
}

std::vector<double> RestrictToB(const MaskedParityDomain& domain, std::span<const double> table,
                                int b) {
  if (table.size() != domain.size()) throw std::invalid_argument("RestrictToB: wrong table size");
  std::vector<double> out(table.size(), 0.0);
  for (std::uint64_t u = 0; u < table.size(); ++u) {
    const BitVector point = BitVector::FromInteger(u, domain.point_bits());
    if (domain.BField(point) == b) out[u] = table[u];
  }
  return out;
}

double QueryExpectation(const MaskedParityDomain& domain, const FourierPieces& pieces,
                        const MaskedParityConcept& target) {
  const std::vector<double> table = ConceptTable(domain, target);
  const std::vector<double> c0 = RestrictToB(domain, table, 0);
  const std::vector<double> c1 = RestrictToB(domain, table, 1);
  return pieces.constant + InnerProductUniform(pieces.f0, c0) +
         InnerProductUniform(pieces.f1, c1);
}

MaskedOracleAnswer AdversarialOracleAnswer(const MaskedParityDomain& domain,
                                           const MaskedParityConcept& hidden,
                                           const PointLabelQuery& g, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("AdversarialOracleAnswer: tau must be positive");
  const FourierPieces pieces = FourierDecompose(domain, g);
  const std::vector<double> table = ConceptTable(domain, hidden);
  const std::vector<double> c0 = RestrictToB(domain, table, 0);
  const std::vector<double> c1 = RestrictToB(domain, table, 1);
  MaskedOracleAnswer result;
  result.ip0 = InnerProductUniform(pieces.f0, c0);
  const double ip1 = InnerProductUniform(pieces.f1, c1);
  if (std::abs(result.ip0) < tau) {
    result.truthful = false;
    result.answer = pieces.constant + ip1;
  } else {
    result.truthful = true;
    result.answer = pieces.constant + result.ip0 + ip1;
  }
  return result;
}

double MaskedParityAdversarialOracle::Answer(const std::function<double(const Example&)>& g,
                                             double tau) {
  ++queries_asked_;
  return AdversarialOracleAnswer(domain_, hidden_, FromExampleQuery(g), tau).answer;
}

ParsevalResult ParsevalCheck(const MaskedParityDomain& domain, const PointLabelQuery& g) {
  const FourierPieces pieces = FourierDecompose(domain, g);
  const std::vector<double> coefficients = AllRestrictedCoefficients(domain, pieces.f0, 0);
  ParsevalResult result;
  for (double ip : coefficients) result.sum += 2.0 * ip * ip;
  result.violation = std::max(0.0, result.sum - 1.0);
  return result;
}

std::size_t CountLargeCoefficients(const MaskedParityDomain& domain, const PointLabelQuery& g,
                                   double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("CountLargeCoefficients: threshold must be positive");
  const FourierPieces pieces = FourierDecompose(domain, g);
  const std::vector<double> coefficients = AllRestrictedCoefficients(domain, pieces.f0, 0);
  std::size_t count = 0;
  for (double ip : coefficients) {
    if (std::abs(ip) >= threshold) ++count;
  }
  return count;
}

SeparationCache BuildSeparationCache(const MaskedParityDomain& domain,
                                     const SeparationStrategy& strategy) {
  if (strategy.queries.size() != strategy.taus.size()) {
    throw std::invalid_argument("separation strategy: query/tau count mismatch");
  }
  const double min_tau = std::pow(2.0, -static_cast<double>(domain.d()) / 3.0);
  for (double tau : strategy.taus) {
    if (tau < min_tau - 1e-12) {
      throw std::invalid_argument("separation strategy: tolerance below 2^(-d/3)");
    }
  }

  SeparationCache cache;
  const std::size_t d = domain.d();
  cache.concept_count = std::size_t{1} << (d + 1);

  cache.concept_table.resize(cache.concept_count);
  for (std::size_t index = 0; index < cache.concept_count; ++index) {
    MaskedParityConcept target;
    target.r = BitVector::FromInteger(index & ((std::uint64_t{1} << d) - 1), d);
    target.a = static_cast<int>(index >> d);
    cache.concept_table[index] = ConceptTable(domain, target);
  }

  for (std::size_t j = 0; j < strategy.queries.size(); ++j) {
    const FourierPieces pieces = FourierDecompose(domain, FromExampleQuery(strategy.queries[j]));
    std::vector<double> ip0 = AllRestrictedCoefficients(domain, pieces.f0, 0);
    std::vector<double> ip1 = AllRestrictedCoefficients(domain, pieces.f1, 1);
    std::vector<double> expectation(cache.concept_count);
    std::vector<double> oracle(cache.concept_count);
    for (std::size_t c = 0; c < cache.concept_count; ++c) {
      expectation[c] = pieces.constant + ip0[c] + ip1[c];
      oracle[c] = std::abs(ip0[c]) < strategy.taus[j] ? pieces.constant + ip1[c]
                                                      : expectation[c];
    }
    cache.ip0.push_back(std::move(ip0));
    cache.expectation.push_back(std::move(expectation));
    cache.oracle_answer.push_back(std::move(oracle));
  }
  return cache;
}

SeparationResult RunSeparationExperiment(const MaskedParityDomain& domain,
                                         const SeparationStrategy& strategy,
                                         std::size_t trials, Rng& rng) {
  if (trials == 0) throw std::invalid_argument("RunSeparationExperiment: trials must be positive");
  if (!strategy.hypothesize) throw std::invalid_argument("RunSeparationExperiment: strategy has no rule");
  const SeparationCache cache = BuildSeparationCache(domain, strategy);

  const std::size_t d = domain.d();
  const double threshold = std::pow(2.0, -static_cast<double>(d) / 3.0);
  const double t = static_cast<double>(strategy.queries.size());
  SeparationResult result;
  result.good_bound =
      std::max(0.0, 1.0 - t / std::pow(2.0, static_cast<double>(d) / 3.0 + 2.0));
  result.theorem_bound = 0.5 * result.good_bound;

  std::size_t err_quarter = 0;
  std::size_t good_count = 0;
  result.trials.reserve(trials);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t r = rng.Below(std::uint64_t{1} << d);
    const int a = static_cast<int>(rng.Below(2));
    const std::size_t index = (static_cast<std::size_t>(a) << d) | r;

    std::vector<double> answers(strategy.queries.size());
    bool good = true;
    for (std::size_t j = 0; j < strategy.queries.size(); ++j) {
      answers[j] = cache.oracle_answer[j][index];
      if (std::abs(cache.ip0[j][index]) >= threshold) good = false;
    }

    const std::vector<double> hypothesis = strategy.hypothesize(answers, cache);
    if (hypothesis.size() != domain.size()) {
      throw std::logic_error("separation strategy: hypothesis table has wrong size");
    }
    const std::vector<double>& truth = cache.concept_table[index];
    std::size_t wrong = 0;
    for (std::size_t u = 0; u < truth.size(); ++u) {
      if (hypothesis[u] != truth[u]) ++wrong;
    }
    const double err = static_cast<double>(wrong) / static_cast<double>(truth.size());

    if (err >= 0.25) ++err_quarter;
    if (good) ++good_count;
    result.trials.push_back({r, a, err, good});
  }
  result.err_quarter_freq = static_cast<double>(err_quarter) / static_cast<double>(trials);
  result.good_freq = static_cast<double>(good_count) / static_cast<double>(trials);
  return result;
}

namespace {

std::vector<std::size_t> BestConceptsByScore(std::span<const double> answers,
                                             const SeparationCache& cache, std::size_t top) {
  std::vector<double> scores(cache.concept_count, 0.0);
  for (std::size_t j = 0; j < answers.size(); ++j) {
    for (std::size_t c = 0; c < cache.concept_count; ++c) {
      const double diff = answers[j] - cache.expectation[j][c];
      scores[c] += diff * diff;
    }
  }
  std::vector<std::size_t> order(cache.concept_count);
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t lhs, std::size_t rhs) {
                      if (scores[lhs] != scores[rhs]) return scores[lhs] < scores[rhs];
                      return lhs < rhs;
                    });
  order.resize(top);
  return order;
}

std::vector<std::function<double(const Example&)>> RandomSignQueries(
    const MaskedParityDomain& domain, std::size_t t, Rng& rng) {
  std::vector<std::function<double(const Example&)>> queries;
  for (std::size_t j = 0; j < t; ++j) {
    auto table = std::make_shared<std::vector<double>>(domain.size() * 2);
    for (double& v : *table) v = rng.Bernoulli(0.5) ? 1.0 : -1.0;
    queries.push_back([table](const Example& e) {
      return (*table)[e.x.ToInteger() * 2 + (e.y == -1 ? 1 : 0)];
    });
  }
  return queries;
}

}  // namespace

SeparationStrategy MakeMaxLikelihoodStrategy(const MaskedParityDomain& domain, std::size_t t,
                                             Rng& rng) {
  SeparationStrategy strategy;
  strategy.name = "max-likelihood";
  strategy.queries = RandomSignQueries(domain, t, rng);
  strategy.taus.assign(t, std::pow(2.0, -static_cast<double>(domain.d()) / 3.0));
  strategy.hypothesize = [](std::span<const double> answers, const SeparationCache& cache) {
    return cache.concept_table[BestConceptsByScore(answers, cache, 1)[0]];
  };
  return strategy;
}

SeparationStrategy MakeRoundOnePlusGuessStrategy(const MaskedParityDomain& domain) {
  SeparationStrategy strategy;
  strategy.name = "round-one-plus-guess";
  const std::size_t d = domain.d();
  for (std::size_t j = 0; j < d; ++j) {
    strategy.queries.push_back([domain, j](const Example& e) {
      return (domain.BField(e.x) == 1 && domain.IField(e.x) == j && e.y == -1) ? 1.0 : 0.0;
    });
  }
  strategy.taus.assign(d, std::pow(2.0, -static_cast<double>(d) / 3.0));
  const double threshold = 1.0 / (4.0 * static_cast<double>(d));
  strategy.hypothesize = [d, threshold](std::span<const double> answers,
                                        const SeparationCache& cache) {
    std::uint64_t r_hat = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (answers[j] > threshold) r_hat |= std::uint64_t{1} << j;
    }
    return cache.concept_table[r_hat];  // guessed mask a = 0
  };
  return strategy;
}

SeparationStrategy MakeMajorityOfThreeStrategy(const MaskedParityDomain& domain, std::size_t t,
                                               Rng& rng) {
  SeparationStrategy strategy;
  strategy.name = "majority-of-three";
  strategy.queries = RandomSignQueries(domain, t, rng);
  strategy.taus.assign(t, std::pow(2.0, -static_cast<double>(domain.d()) / 3.0));
  strategy.hypothesize = [](std::span<const double> answers, const SeparationCache& cache) {
    const std::vector<std::size_t> best = BestConceptsByScore(answers, cache, 3);
    std::vector<double> vote(cache.concept_table[best[0]].size());
    for (std::size_t u = 0; u < vote.size(); ++u) {
      const double total = cache.concept_table[best[0]][u] + cache.concept_table[best[1]][u] +
                           cache.concept_table[best[2]][u];
      vote[u] = total > 0.0 ? 1.0 : -1.0;
    }
    return vote;
  };
  return strategy;
}

}  // namespace privlearn
