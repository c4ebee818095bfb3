// Copyright 2026 The polyvec Authors.
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

#include <stdexcept>
#include <string>

namespace polyvec {

/// Base class for all polyvec errors.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Incompatible tensor/matrix shapes.
class dimension_error : public error {
 public:
  explicit dimension_error(const std::string& msg) : error(msg) {}
};

/// Invalid configuration or argument value.
class parameter_error : public error {
 public:
  explicit parameter_error(const std::string& msg) : error(msg) {}
};

/// Malformed or inconsistent input data.
class data_error : public error {
 public:
  explicit data_error(const std::string& msg) : error(msg) {}
};

/// Operation applied in the wrong object state (e.g. wrong coordinate frame).
class state_error : public error {
 public:
  explicit state_error(const std::string& msg) : error(msg) {}
};

/// API contract violation (e.g. backward on a non-scalar loss).
class contract_error : public error {
 public:
  explicit contract_error(const std::string& msg) : error(msg) {}
};

/// File system / serialization failure.
class file_error : public error {
 public:
  explicit file_error(const std::string& msg) : error(msg) {}
};

}  // namespace polyvec
