// Copyright 2026 The Geomask Authors
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

#ifndef GEOMASK_TESTS_RATIONAL_H_
#define GEOMASK_TESTS_RATIONAL_H_

#include <cstdint>
#include <numeric>
#include <ostream>

namespace geomask::testing {

// Small exact fraction for hand-computed oracles. Values stay tiny in the
// fixtures, so int64 never overflows.
struct Q {
  int64_t num = 0;
  int64_t den = 1;

  Q(int64_t n = 0, int64_t d = 1) : num(n), den(d) { Normalize(); }

  void Normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double ToDouble() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Q operator+(Q a, Q b) { return Q(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Q operator-(Q a, Q b) { return Q(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Q operator*(Q a, Q b) { return Q(a.num * b.num, a.den * b.den); }
  friend Q operator/(Q a, Q b) { return Q(a.num * b.den, a.den * b.num); }
  friend bool operator==(Q a, Q b) { return a.num == b.num && a.den == b.den; }
  friend std::ostream& operator<<(std::ostream& o, Q q) { return o << q.num << '/' << q.den; }
};

// True when `v` is exactly the binary value of `q` (requires a dyadic q).
inline bool ExactlyEquals(double v, Q q) {
  return v * static_cast<double>(q.den) == static_cast<double>(q.num) &&
         q.ToDouble() == v;
}

}  // namespace geomask::testing

#endif  // GEOMASK_TESTS_RATIONAL_H_
