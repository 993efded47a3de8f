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

#ifndef PRIVLEARN_GF2_HPP_
#define PRIVLEARN_GF2_HPP_

#include <cstdint>
#include <vector>

#include "privlearn/bitvec.hpp"
#include "privlearn/rng.hpp"

namespace privlearn {

// One linear constraint <coeffs, v> = rhs over GF(2).
struct Gf2Equation {
  BitVector coeffs;
  int rhs = 0;  // 0 or 1
};

// System of equations over d unknowns.
struct Gf2System {
  std::size_t dimension = 0;
  std::vector<Gf2Equation> rows;

  void AddRow(const BitVector& coeffs, int rhs);
};

// Solution set of a GF(2) system: either empty, or the affine subspace
// particular + span(basis). The reduced row-echelon rows are kept so that
// membership can be checked against the originating constraints.
class AffineSubspace {
 public:
  static AffineSubspace Empty(std::size_t dimension);
  static AffineSubspace Full(std::size_t dimension);

  bool empty() const { return empty_; }
  std::size_t dimension() const { return dimension_; }
  const BitVector& particular() const;
  const std::vector<BitVector>& basis() const { return basis_; }

  // Number of solutions; 0 when empty, else 2^|basis|. Requires |basis| < 64.
  std::uint64_t Size() const;

  bool Contains(const BitVector& v) const;

  // Uniform solution: particular xor a random combination of basis vectors.
  BitVector SampleUniform(Rng& rng) const;

  // All solutions, in increasing order of the basis-combination index.
  // Requires Size() manageable by the caller.
  std::vector<BitVector> Enumerate() const;

  friend AffineSubspace GaussianEliminate(const Gf2System& system);

 private:
  AffineSubspace() = default;

  bool empty_ = false;
  std::size_t dimension_ = 0;
  BitVector particular_;
  std::vector<BitVector> basis_;
  std::vector<Gf2Equation> reduced_rows_;
};

// Row reduction with XOR updates. Pivots are chosen lowest column index first,
// so the reduced system and the emitted basis are deterministic functions of
// the input.
AffineSubspace GaussianEliminate(const Gf2System& system);

}  // namespace privlearn

#endif  // PRIVLEARN_GF2_HPP_
