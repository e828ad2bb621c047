// Copyright 2026 The degroup Authors
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

namespace degroup {

enum class ErrorKind {
  kShape,
  kFile,
  kFormat,
  kValidation,
  kConfig,
  kCoverage,
  kData,
  kFit,
  kBudget,
};

std::string_view to_string(ErrorKind kind);

/// Base for every error the toolkit raises; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define DEGROUP_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(Kind, message) {}  \
  };

DEGROUP_DEFINE_ERROR(ShapeError, ErrorKind::kShape)
DEGROUP_DEFINE_ERROR(FileError, ErrorKind::kFile)
DEGROUP_DEFINE_ERROR(FormatError, ErrorKind::kFormat)
DEGROUP_DEFINE_ERROR(ValidationError, ErrorKind::kValidation)
DEGROUP_DEFINE_ERROR(ConfigError, ErrorKind::kConfig)
DEGROUP_DEFINE_ERROR(CoverageError, ErrorKind::kCoverage)
DEGROUP_DEFINE_ERROR(DataError, ErrorKind::kData)
DEGROUP_DEFINE_ERROR(FitError, ErrorKind::kFit)
DEGROUP_DEFINE_ERROR(BudgetError, ErrorKind::kBudget)

#undef DEGROUP_DEFINE_ERROR

/// Process exit code for an error kind: 2 config, 3 data, 4 budget.
int exit_code_for(ErrorKind kind);

}  // namespace degroup
