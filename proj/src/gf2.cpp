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

#include "privlearn/gf2.hpp"

#include <stdexcept>
#include <utility>

namespace privlearn {

void Gf2System::AddRow(const BitVector& coeffs, int rhs) {
  if (coeffs.size() != dimension) {
    throw std::invalid_argument("Gf2System::AddRow: coefficient length mismatch");
  }
  if (rhs != 0 && rhs != 1) {
    throw std::invalid_argument("Gf2System::AddRow: rhs must be 0 or 1");
  }
  rows.push_back({coeffs, rhs});
}

AffineSubspace AffineSubspace::Empty(std::size_t dimension) {
  AffineSubspace v;
  v.empty_ = true;
  v.dimension_ = dimension;
  return v;
}

AffineSubspace AffineSubspace::Full(std::size_t dimension) {
  Gf2System system;
  system.dimension = dimension;
  return GaussianEliminate(system);
}

const BitVector& AffineSubspace::particular() const {
  if (empty_) throw std::logic_error("AffineSubspace::particular: subspace is empty");
  return particular_;
}

std::uint64_t AffineSubspace::Size() const {
  if (empty_) return 0;
  if (basis_.size() >= 64) throw std::domain_error("AffineSubspace::Size: overflow");
  return 1ULL << basis_.size();
}

bool AffineSubspace::Contains(const BitVector& v) const {
  if (v.size() != dimension_) {
    throw std::invalid_argument("AffineSubspace::Contains: length mismatch");
  }
  if (empty_) return false;
  for (const Gf2Equation& row : reduced_rows_) {
    if (InnerProduct(row.coeffs, v) != row.rhs) return false;
  }
  return true;
}

BitVector AffineSubspace::SampleUniform(Rng& rng) const {
  if (empty_) throw std::logic_error("AffineSubspace::SampleUniform: subspace is empty");
  BitVector v = particular_;
  for (const BitVector& b : basis_) {
    if (rng.Bernoulli(0.5)) v.XorAssign(b);
  }
  return v;
}

std::vector<BitVector> AffineSubspace::Enumerate() const {
  if (empty_) return {};
  const std::uint64_t count = Size();
  std::vector<BitVector> out;
  out.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    BitVector v = particular_;
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      if ((mask >> j) & 1ULL) v.XorAssign(basis_[j]);
    }
    out.push_back(std::move(v));
  }
  return out;
}

AffineSubspace GaussianEliminate(const Gf2System& system) {
  const std::size_t d = system.dimension;
  std::vector<Gf2Equation> rows = system.rows;
  for (const Gf2Equation& row : rows) {
    if (row.coeffs.size() != d) {
      throw std::invalid_argument("GaussianEliminate: row length mismatch");
    }
  }

  // Reduce to RREF, pivoting on the lowest available column.
  std::vector<std::size_t> pivot_cols;
  std::size_t next_row = 0;
  for (std::size_t col = 0; col < d && next_row < rows.size(); ++col) {
    std::size_t pivot = next_row;
    while (pivot < rows.size() && !rows[pivot].coeffs.Get(col)) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[next_row], rows[pivot]);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k != next_row && rows[k].coeffs.Get(col)) {
        rows[k].coeffs.XorAssign(rows[next_row].coeffs);
        rows[k].rhs ^= rows[next_row].rhs;
      }
    }
    pivot_cols.push_back(col);
    ++next_row;
  }

  // A zero row with rhs 1 certifies inconsistency.
  for (std::size_t k = next_row; k < rows.size(); ++k) {
    if (rows[k].rhs == 1 && rows[k].coeffs.IsZero()) {
      return AffineSubspace::Empty(d);
    }
  }

  AffineSubspace v;
  v.dimension_ = d;
  v.particular_ = BitVector(d);

  std::vector<bool> is_pivot(d, false);
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    is_pivot[pivot_cols[i]] = true;
    // Free variables are zero in the particular solution, so each pivot
    // variable equals its row's rhs.
    v.particular_.Set(pivot_cols[i], rows[i].rhs != 0);
  }

  // One homogeneous basis vector per free column.
  for (std::size_t col = 0; col < d; ++col) {
    if (is_pivot[col]) continue;
    BitVector b(d);
    b.Set(col, true);
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
      if (rows[i].coeffs.Get(col)) b.Set(pivot_cols[i], true);
    }
    v.basis_.push_back(std::move(b));
  }

  v.reduced_rows_.assign(rows.begin(), rows.begin() + next_row);
  return v;
}

}  // namespace privlearn
