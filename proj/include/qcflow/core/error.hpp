// Copyright 2026 The qcflow Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qcflow {

/// Raised for every contract violation and runtime failure in the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when a simulation would exceed the configured qubit budget.
class ResourceError : public Error {
  public:
    using Error::Error;
};

#define QCFLOW_REQUIRE(cond, msg)                                              \
    do {                                                                       \
        if (!(cond)) {                                                         \
            throw ::qcflow::Error(msg);                                        \
        }                                                                      \
    } while (0)

} // namespace qcflow
