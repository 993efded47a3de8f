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

#ifndef PRIVLEARN_BITVEC_HPP_
#define PRIVLEARN_BITVEC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "privlearn/rng.hpp"

namespace privlearn {

// Vector over GF(2), bit-packed into 64-bit words. Bit i of the vector is
// bit (i % 64) of word (i / 64). The string form writes bit 0 as the leftmost
// character.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  static BitVector FromString(const std::string& bits);
  static BitVector Random(std::size_t size, Rng& rng);
  // Bits of `value`, LSB first, widened to `size`.
  static BitVector FromInteger(std::uint64_t value, std::size_t size);

  std::size_t size() const { return size_; }
  bool Get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1ULL; }
  void Set(std::size_t i, bool value) {
    const std::uint64_t mask = 1ULL << (i % 64);
    if (value) words_[i / 64] |= mask; else words_[i / 64] &= ~mask;
  }

  void XorAssign(const BitVector& other);
  bool IsZero() const;
  std::uint64_t ToInteger() const;  // requires size() <= 64
  std::string ToString() const;

  bool operator==(const BitVector& other) const {
    return size_ == other.size_ && words_ == other.words_;
  }
  bool operator!=(const BitVector& other) const { return !(*this == other); }

  friend int InnerProduct(const BitVector& a, const BitVector& b);

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Parity of the AND of two equal-length vectors: <a,b> over GF(2).
int InnerProduct(const BitVector& a, const BitVector& b);

}  // namespace privlearn

#endif  // PRIVLEARN_BITVEC_HPP_
