// Copyright 2026 The excitonsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace excitonsim {

/// Raised when an integrator or propagator violates one of its numerical
/// audits (norm drift, trace drift, non-decaying integrand).
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

/// Audit message with the offending value in scientific notation.
inline std::string audit_message(const char* what, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", value);
  return std::string(what) + " " + buf;
}

}  // namespace detail
}  // namespace excitonsim
