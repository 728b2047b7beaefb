/*
   Copyright 2026 The polycond Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef POLYCOND_ERRORS_HPP
#define POLYCOND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polycond {

// Each error class maps onto one status code of the C API.

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A mathematical invariant the library asserts failed on real data.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AllocationCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polycond

#endif  // POLYCOND_ERRORS_HPP
