// Copyright 2026 The sdcagg Authors
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

#ifndef SDCAGG_CORE_ERROR_HPP_
#define SDCAGG_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sdcagg {

// Broad failure categories. The C API and the CLI map these onto status
// codes and process exit codes.
enum class ErrorKind {
  kInvalidArgument,  // caller passed something that violates a precondition
  kIo,               // file missing, unreadable or unwritable
  kData,             // malformed table, schema mismatch, degenerate column
  kMethod,           // the anonymization method cannot satisfy the request
  kSpec,             // malformed sweep specification
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sdcagg

#endif  // SDCAGG_CORE_ERROR_HPP_
