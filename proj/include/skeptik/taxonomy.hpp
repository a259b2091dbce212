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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace skeptik {

inline constexpr int kColorCount = 8;

struct FallacyType {
  std::string code;  // short uppercase identifier, e.g. "CP"
  std::string name;
  std::string definition;
  std::string example;
  int group_id = 0;
  int color_index = 0;  // 0..7, shared by every entry of a group
  bool context_needed = false;
  // English Wikipedia article title, underscores for spaces. Empty means
  // derive it from the display name.
  std::string wikipedia_title;

  bool operator==(const FallacyType&) const = default;
};

// Throws Error(InvalidEntry) if `entry` breaks a FallacyType invariant.
void validate_fallacy(const FallacyType& entry);

// An immutable, insertion-ordered set of fallacy types with unique codes.
class FallacyRegistry {
 public:
  FallacyRegistry() = default;
  // Validates every entry; throws InvalidEntry or DuplicateCode.
  FallacyRegistry(std::vector<FallacyType> entries, std::string version);

  const std::vector<FallacyType>& entries() const noexcept { return entries_; }
  const std::string& version() const noexcept { return version_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  const FallacyType* find(std::string_view code) const noexcept;
  bool contains(std::string_view code) const noexcept {
    return find(code) != nullptr;
  }
  // Throws Error(UnknownCode).
  const FallacyType& at(std::string_view code) const;
  // Position in registry order; throws Error(UnknownCode).
  std::size_t index_of(std::string_view code) const;

  // Registry holding only `code`, used for single-fallacy regeneration.
  FallacyRegistry restricted_to(std::string_view code) const;

  bool operator==(const FallacyRegistry&) const = default;

 private:
  std::vector<FallacyType> entries_;
  std::string version_;
};

// The nine fallacies of the detection prompt, with their definitions and
// examples verbatim.
FallacyRegistry registry_default();

// Returns a new registry with `entry` appended. Throws DuplicateCode or
// InvalidEntry.
FallacyRegistry register_fallacy(const FallacyRegistry& registry,
                                 FallacyType entry);

// Throws Error(UnknownCode).
int color_for(const FallacyRegistry& registry, std::string_view code);

// "https://en.wikipedia.org/wiki/<title>" for the entry.
std::string wikipedia_link(const FallacyType& entry);

// Registry configuration file (JSON):
//
//   {
//     "version": "newsroom-2",
//     "fallacies": [
//       {"code": "CP", "name": "Cherry Picking", "definition": "...",
//        "example": "...", "group_id": 2, "context_needed": true,
//        "color_index": 2, "wikipedia_title": "Cherry_picking"}
//     ]
//   }
//
// color_index and wikipedia_title are optional. A missing color_index takes
// the color of an earlier entry in the same group, else group_id mod 8.
nlohmann::json registry_to_json(const FallacyRegistry& registry);
FallacyRegistry registry_from_json(const nlohmann::json& doc);
FallacyRegistry load_registry(const std::filesystem::path& path);
void save_registry(const FallacyRegistry& registry,
                   const std::filesystem::path& path);

}  // namespace skeptik
