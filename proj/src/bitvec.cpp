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

#include "privlearn/bitvec.hpp"

#include <bit>
#include <stdexcept>

namespace privlearn {

BitVector BitVector::FromString(const std::string& bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.Set(i, true);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("BitVector::FromString: character not 0/1");
    }
  }
  return v;
}

BitVector BitVector::Random(std::size_t size, Rng& rng) {
  BitVector v(size);
  for (auto& word : v.words_) word = rng.Next();
  if (size % 64 != 0 && !v.words_.empty()) {
    v.words_.back() &= (1ULL << (size % 64)) - 1;
  }
  return v;
}

BitVector BitVector::FromInteger(std::uint64_t value, std::size_t size) {
  if (size > 64) throw std::invalid_argument("BitVector::FromInteger: size > 64");
  if (size < 64 && (value >> size) != 0) {
    throw std::invalid_argument("BitVector::FromInteger: value does not fit");
  }
  BitVector v(size);
  if (!v.words_.empty()) v.words_[0] = value;
  return v;
}

void BitVector::XorAssign(const BitVector& other) {
  if (size_ != other.size_) throw std::invalid_argument("XorAssign: length mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
}

bool BitVector::IsZero() const {
  for (std::uint64_t w : words_) {
    if (w != 0) return false;
  }
  return true;
}

std::uint64_t BitVector::ToInteger() const {
  if (size_ > 64) throw std::invalid_argument("ToInteger: size > 64");
  return words_.empty() ? 0 : words_[0];
}

std::string BitVector::ToString() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (Get(i)) s[i] = '1';
  }
  return s;
}

int InnerProduct(const BitVector& a, const BitVector& b) {
  if (a.size_ != b.size_) throw std::invalid_argument("InnerProduct: length mismatch");
  int parity = 0;
  for (std::size_t w = 0; w < a.words_.size(); ++w) {
    parity ^= std::popcount(a.words_[w] & b.words_[w]) & 1;
  }
  return parity;
}

}  // namespace privlearn
