//
// Copyright 2026 The qobf Authors
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
//

#ifndef QOBF_ERROR_HPP_
#define QOBF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace qobf {

// Mirrors qobf_status in the C API; values must stay in sync.
enum class ErrorCode {
  kOk = 0,
  kInvalidArgument = 1,
  kParse = 2,
  kOutOfVocabulary = 3,
  kDuplicate = 4,
  kIo = 5,
  kUndefinedMetric = 6,
  kInternal = 7,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace qobf

#endif  // QOBF_ERROR_HPP_
