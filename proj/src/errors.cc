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

#include "bbev/errors.h"

namespace bbev {

const char* ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kMalformed:
      return "malformed";
    case ErrorKind::kParse:
      return "parse";
    case ErrorKind::kInvalidParameter:
      return "invalid-parameter";
    case ErrorKind::kEmptyCloud:
      return "empty-cloud";
    case ErrorKind::kEmptyDescriptor:
      return "empty-descriptor";
    case ErrorKind::kShapeMismatch:
      return "shape-mismatch";
    case ErrorKind::kDegenerate:
      return "degenerate";
    case ErrorKind::kEmptyUnion:
      return "empty-union";
  }
  return "unknown";
}

}  // namespace bbev
