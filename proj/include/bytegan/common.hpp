/*
 Copyright 2026 The bytegan Authors.
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bytegan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or image dimensions do not match what an operation expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A byteplot image holds a pixel that cannot be mapped back to a symbol.
class CorruptByteplot : public Error {
 public:
  CorruptByteplot() : Error("corrupt byteplot") {}
  explicit CorruptByteplot(const std::string& detail) : Error("corrupt byteplot: " + detail) {}
};

/// A one-class or partition invariant was broken; never recoverable.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

enum class Label : std::uint8_t { benign, malicious };

inline std::string_view to_string(Label label) {
  return label == Label::benign ? "benign" : "malicious";
}

inline Label parse_label(std::string_view text) {
  if (text == "benign") return Label::benign;
  if (text == "malicious") return Label::malicious;
  throw Error("unknown label '" + std::string(text) + "'");
}

}  // namespace bytegan
