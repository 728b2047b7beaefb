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

#ifndef POLYCOND_TENSOR_IO_HPP
#define POLYCOND_TENSOR_IO_HPP

#include <iosfwd>
#include <string>

#include "system.hpp"

namespace polycond {

// Binary layout: one line of JSON
//   {"n":..,"d":..,"m":..,"layout":"row-major","dtype":"f64"}
// terminated by '\n', followed by m*n^d little-endian IEEE-754 doubles.
// The JSON layout is the same header object with an extra "data" array.

enum class TensorFormat { Binary, Json };

void write_tensor(std::ostream& out, const CoefficientTensor& t, TensorFormat format);
CoefficientTensor read_tensor(std::istream& in, std::size_t cap = kDefaultEntryCap);

void save_tensor(const std::string& path, const CoefficientTensor& t, TensorFormat format);
/// Format is detected from the content.
CoefficientTensor load_tensor(const std::string& path, std::size_t cap = kDefaultEntryCap);

}  // namespace polycond

#endif  // POLYCOND_TENSOR_IO_HPP
