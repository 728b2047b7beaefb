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

#include "tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace polycond {
namespace {

using nlohmann::json;

json header_of(const CoefficientTensor& t) {
  return json{{"n", t.shape().n},
              {"d", t.shape().d},
              {"m", t.shape().m()},
              {"layout", "row-major"},
              {"dtype", "f64"}};
}

SystemShape shape_of(const json& h, std::size_t cap) {
  try {
    if (h.at("layout").get<std::string>() != "row-major")
      throw IoError("tensor file: unsupported layout");
    if (h.at("dtype").get<std::string>() != "f64") throw IoError("tensor file: unsupported dtype");
    const SystemShape shape = SystemShape::make(h.at("n").get<int>(), h.at("d").get<int>());
    if (h.at("m").get<int>() != shape.m()) throw IoError("tensor file: m must equal n-1");
    shape.check_cap(cap);
    return shape;
  } catch (const json::exception& e) {
    throw IoError(std::string("tensor file: malformed header: ") + e.what());
  }
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFF) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

void write_tensor(std::ostream& out, const CoefficientTensor& t, TensorFormat format) {
  json h = header_of(t);
  if (format == TensorFormat::Json) {
    h["data"] = std::vector<double>(t.data().begin(), t.data().end());
    out << h.dump() << '\n';
  } else {
    out << h.dump() << '\n';
    for (double v : t.data()) {
      const std::uint64_t le = to_little(std::bit_cast<std::uint64_t>(v));
      char bytes[8];
      std::memcpy(bytes, &le, 8);
      out.write(bytes, 8);
    }
  }
  if (!out) throw IoError("tensor write failed");
}

CoefficientTensor read_tensor(std::istream& in, std::size_t cap) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("tensor file: missing header");
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError(std::string("tensor file: header is not JSON: ") + e.what());
  }
  const SystemShape shape = shape_of(h, cap);
  std::vector<double> data;
  if (h.contains("data")) {
    try {
      data = h.at("data").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw IoError(std::string("tensor file: bad data array: ") + e.what());
    }
  } else {
    data.resize(shape.entries());
    for (auto& v : data) {
      char bytes[8];
      if (!in.read(bytes, 8)) throw IoError("tensor file: truncated payload");
      std::uint64_t le = 0;
      std::memcpy(&le, bytes, 8);
      v = std::bit_cast<double>(to_little(le));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw IoError("tensor file: trailing bytes");
  }
  try {
    return CoefficientTensor(shape, std::move(data));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("tensor file: ") + e.what());
  }
}

void save_tensor(const std::string& path, const CoefficientTensor& t, TensorFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_tensor(out, t, format);
}

CoefficientTensor load_tensor(const std::string& path, std::size_t cap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_tensor(in, cap);
}

}  // namespace polycond
