/*
 * Copyright 2026 The privloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVLOC_STATUS_H_
#define PRIVLOC_STATUS_H_

#include <stdexcept>
#include <string>

namespace privloc {

enum class ErrorCode {
  kInvalidArgument,
  kDomain,              // plaintext outside Z_n
  kRange,               // fixed-point magnitude overflow
  kKeyMismatch,
  kCorruptCiphertext,
  kDimensionMismatch,
  kUnderdetermined,
  kDegenerateGeometry,
  kProtocolIncomplete,
  kConfig,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; callers
// switch on code() when they need to distinguish failure classes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }
  // Message without the code prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Degenerate-geometry failures carry the condition estimate that tripped them.
class GeometryError : public Error {
 public:
  GeometryError(const std::string& message, double condition)
      : Error(ErrorCode::kDegenerateGeometry, message), condition_(condition) {}

  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace privloc

#endif  // PRIVLOC_STATUS_H_
