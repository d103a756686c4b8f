// Copyright 2026 The armreach Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian primitive encoding for checkpoint and training-state files.

#ifndef ARMREACH_BINARY_IO_HPP
#define ARMREACH_BINARY_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace armreach {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put_array(std::span<const T> values) {
    out_.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  }

  void put_bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }

  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

  /// Any type with a textual stream representation, e.g. std::mt19937_64.
  template <typename T>
  void put_streamed(const T& value) {
    std::ostringstream os;
    os << value;
    put_string(os.str());
  }

  bool good() const { return static_cast<bool>(out_); }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value{};
    read_exact(&value, sizeof(T));
    return value;
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void get_array(std::span<T> values) {
    read_exact(values.data(), values.size_bytes());
  }

  void get_bytes(void* data, std::size_t n) { read_exact(data, n); }

  std::string get_string(std::uint64_t max_length = 1u << 26) {
    const auto n = get<std::uint64_t>();
    if (n > max_length) throw FormatError("string length " + std::to_string(n) + " exceeds limit");
    std::string s(n, '\0');
    read_exact(s.data(), n);
    return s;
  }

  template <typename T>
  void get_streamed(T& value) {
    std::istringstream is(get_string());
    is >> value;
    if (!is) throw FormatError("malformed streamed value");
  }

 private:
  void read_exact(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("unexpected end of file");
  }

  std::istream& in_;
};

}  // namespace armreach

#endif  // ARMREACH_BINARY_IO_HPP
