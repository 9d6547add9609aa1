// Copyright 2026 The QViT Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace qvit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Shape mismatch or out-of-range index.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Input violates a numerical precondition (non-unit vector, NaN, zero norm).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Input failed a validation check (non-orthogonal matrix, corrupt file).
class ValidationError : public Error {
  public:
    using Error::Error;
};

class NotOrthogonalError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// Orthogonal input with determinant -1; pyramid layers only reach SO(n).
class NegativeDeterminantError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// On-disk data that parsed but is inconsistent (truncated blob, bad manifest).
class FormatError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace qvit
