// Copyright 2026 The hysched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HYSCHED_SIM_TIME_H_
#define HYSCHED_SIM_TIME_H_

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

namespace hysched {

// Simulated time in integer microseconds since the start of a run. 64 bits
// cover ~2.9e5 years, far beyond 1e7 tasks x 1e4 s of accumulated service.
class SimTime {
 public:
  constexpr SimTime() = default;
  constexpr explicit SimTime(int64_t us) : us_(us) {}

  static constexpr SimTime Zero() { return SimTime(0); }
  // Stand-in for "never": saturates instead of overflowing on addition.
  static constexpr SimTime Infinite() {
    return SimTime(std::numeric_limits<int64_t>::max());
  }

  constexpr int64_t micros() const { return us_; }
  constexpr double millis() const { return static_cast<double>(us_) / 1e3; }
  constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }
  constexpr bool is_infinite() const { return *this == Infinite(); }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime& operator+=(SimTime o) {
    *this = *this + o;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    us_ -= o.us_;
    return *this;
  }

  friend constexpr SimTime operator+(SimTime a, SimTime b) {
    if (a.is_infinite() || b.is_infinite()) return Infinite();
    if (b.us_ > 0 && a.us_ > Infinite().us_ - b.us_) return Infinite();
    return SimTime(a.us_ + b.us_);
  }
  friend constexpr SimTime operator-(SimTime a, SimTime b) {
    return SimTime(a.us_ - b.us_);
  }

 private:
  int64_t us_ = 0;
};

constexpr SimTime Micros(int64_t us) { return SimTime(us); }
constexpr SimTime Millis(int64_t ms) { return SimTime(ms * 1000); }
constexpr SimTime Seconds(int64_t s) { return SimTime(s * 1000000); }

inline std::ostream& operator<<(std::ostream& os, SimTime t) {
  if (t.is_infinite()) return os << "inf";
  return os << t.micros() << "us";
}

}  // namespace hysched

#endif  // HYSCHED_SIM_TIME_H_
