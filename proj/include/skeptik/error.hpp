// Copyright 2026 The Skeptik Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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

namespace skeptik {

enum class ErrorCode {
  // extraction
  NoContent,
  MalformedInput,
  // taxonomy
  DuplicateCode,
  InvalidEntry,
  UnknownCode,
  // llm gateway
  EmptyArticle,
  EmptyRegistry,
  ProviderUnavailable,
  Timeout,
  AuthFailure,
  PreconditionViolation,
  SessionNotFound,
  // analysis
  MalformedJson,
  SchemaViolation,
  EmptyAfterFiltering,
  AnalysisFailed,
  InconsistentInput,
  // metrics
  DegenerateInput,
  SingularDesign,
  InsufficientData,
  // plumbing
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as this exception. `detail` carries a JSON
// path for schema violations and is empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoContent: return "NoContent";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DuplicateCode: return "DuplicateCode";
    case ErrorCode::InvalidEntry: return "InvalidEntry";
    case ErrorCode::UnknownCode: return "UnknownCode";
    case ErrorCode::EmptyArticle: return "EmptyArticle";
    case ErrorCode::EmptyRegistry: return "EmptyRegistry";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::EmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::AnalysisFailed: return "AnalysisFailed";
    case ErrorCode::InconsistentInput: return "InconsistentInput";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace skeptik
