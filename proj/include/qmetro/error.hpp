// Copyright 2026 The qmetro Authors
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
#include <string_view>

namespace qmetro {

enum class ErrorKind {
  cutoff,
  resource,
  degenerate_superposition,
  normalization,
  mode_mismatch,
  index_out_of_range,
  invalid_argument,
  non_identifiable,
  no_information,
  singular_matrix,
  asymmetric_state,
  mandel_undefined,
  unreachable,
  config,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::cutoff: return "cutoff_error";
    case ErrorKind::resource: return "resource_error";
    case ErrorKind::degenerate_superposition: return "degenerate_superposition";
    case ErrorKind::normalization: return "normalization_error";
    case ErrorKind::mode_mismatch: return "mode_mismatch";
    case ErrorKind::index_out_of_range: return "index_out_of_range";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::non_identifiable: return "non_identifiable";
    case ErrorKind::no_information: return "no_information";
    case ErrorKind::singular_matrix: return "singular_matrix";
    case ErrorKind::asymmetric_state: return "asymmetric_state";
    case ErrorKind::mandel_undefined: return "mandel_undefined";
    case ErrorKind::unreachable: return "unreachable";
    case ErrorKind::config: return "config_error";
  }
  return "unknown_error";
}

/// Every failure raised by the library carries a kind so front-ends can map
/// it to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace qmetro
