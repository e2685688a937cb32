/*
 * Copyright 2026 The bbev Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BBEV_ERRORS_H_
#define BBEV_ERRORS_H_

#include <stdexcept>
#include <string>

namespace bbev {

enum class ErrorKind {
  kIo,
  kMalformed,
  kParse,
  kInvalidParameter,
  kEmptyCloud,
  kEmptyDescriptor,
  kShapeMismatch,
  kDegenerate,
  kEmptyUnion,
};

const char* ToString(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bbev

#endif  // BBEV_ERRORS_H_
