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

#include "privlearn/dp.hpp"

#include <algorithm>
#include <cmath>

namespace privlearn {

void BudgetLedger::Charge(std::size_t index, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("BudgetLedger::Charge: epsilon must be positive");
  double& slot = charged_[index];
  if (slot + epsilon > cap_ + 1e-12) {
    throw BudgetExceededError("privacy budget exceeded for entry " + std::to_string(index));
  }
  slot += epsilon;
}

double BudgetLedger::Charged(std::size_t index) const {
  const auto it = charged_.find(index);
  return it == charged_.end() ? 0.0 : it->second;
}

double LaplaceSample(double scale, Rng& rng) { return rng.Laplace(scale); }

double LaplaceMechanism(double value, double sensitivity, double epsilon, Rng& rng) {
  if (!(sensitivity >= 0.0)) {
    throw std::invalid_argument("LaplaceMechanism: sensitivity must be >= 0");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("LaplaceMechanism: epsilon must be positive");
  if (sensitivity == 0.0) return value;
  return value + LaplaceSample(sensitivity / epsilon, rng);
}

double ComposeBudgets(const std::vector<double>& epsilons) {
  double total = 0.0;
  for (double e : epsilons) {
    if (!(e >= 0.0)) throw std::invalid_argument("ComposeBudgets: negative budget");
    total += e;
  }
  return total;
}

std::pair<double, double> ChernoffMultiplicativeBound(std::size_t n, double mu, double phi) {
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("ChernoffMultiplicativeBound: mu outside (0,1)");
  if (!(phi >= 0.0)) throw std::invalid_argument("ChernoffMultiplicativeBound: phi must be >= 0");
  const double base = phi * phi * mu * static_cast<double>(n);
  return {std::min(1.0, std::exp(-base / 3.0)), std::min(1.0, std::exp(-base / 2.0))};
}

double HoeffdingBound(std::size_t n, double delta, double a, double b) {
  if (!(b > a)) throw std::invalid_argument("HoeffdingBound: interval must have b > a");
  if (!(delta >= 0.0)) throw std::invalid_argument("HoeffdingBound: delta must be >= 0");
  const double range = b - a;
  const double bound =
      2.0 * std::exp(-2.0 * delta * delta * static_cast<double>(n) / (range * range));
  return std::min(1.0, bound);
}

double LaplaceSumBound(std::size_t n, double delta, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("LaplaceSumBound: scale must be positive");
  if (!(delta >= 0.0)) throw std::invalid_argument("LaplaceSumBound: delta must be >= 0");
  const double bound =
      std::exp(-delta * delta * static_cast<double>(n) / (4.0 * scale * scale));
  return std::min(1.0, bound);
}

}  // namespace privlearn
