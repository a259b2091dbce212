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

#include "skeptik/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "skeptik/error.hpp"

namespace skeptik {

namespace {

bool is_valid_code(std::string_view code) {
  return !code.empty() &&
         std::all_of(code.begin(), code.end(), [](unsigned char c) {
           return std::isupper(c) || std::isdigit(c);
         });
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

void check_group_colors(const std::vector<FallacyType>& entries) {
  std::map<int, int> group_color;
  for (const auto& e : entries) {
    auto [it, inserted] = group_color.emplace(e.group_id, e.color_index);
    if (!inserted && it->second != e.color_index) {
      throw Error(ErrorCode::InvalidEntry,
                  "entries of group " + std::to_string(e.group_id) +
                      " disagree on color_index");
    }
  }
}

}  // namespace

void validate_fallacy(const FallacyType& entry) {
  if (!is_valid_code(entry.code)) {
    throw Error(ErrorCode::InvalidEntry,
                "code must be non-empty uppercase alphanumeric: '" +
                    entry.code + "'");
  }
  if (is_blank(entry.name)) {
    throw Error(ErrorCode::InvalidEntry, entry.code + ": empty name");
  }
  if (is_blank(entry.definition)) {
    throw Error(ErrorCode::InvalidEntry, entry.code + ": empty definition");
  }
  if (is_blank(entry.example)) {
    throw Error(ErrorCode::InvalidEntry, entry.code + ": empty example");
  }
  if (entry.color_index < 0 || entry.color_index >= kColorCount) {
    throw Error(ErrorCode::InvalidEntry,
                entry.code + ": color_index outside 0..7");
  }
}

FallacyRegistry::FallacyRegistry(std::vector<FallacyType> entries,
                                 std::string version)
    : version_(std::move(version)) {
  for (auto& e : entries) {
    validate_fallacy(e);
    if (find(e.code) != nullptr) {
      throw Error(ErrorCode::DuplicateCode, "duplicate code " + e.code);
    }
    entries_.push_back(std::move(e));
  }
  check_group_colors(entries_);
}

const FallacyType* FallacyRegistry::find(std::string_view code) const noexcept {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const FallacyType& e) { return e.code == code; });
  return it == entries_.end() ? nullptr : &*it;
}

const FallacyType& FallacyRegistry::at(std::string_view code) const {
  if (const auto* e = find(code)) return *e;
  throw Error(ErrorCode::UnknownCode, "unknown fallacy code " + std::string(code));
}

std::size_t FallacyRegistry::index_of(std::string_view code) const {
  return static_cast<std::size_t>(&at(code) - entries_.data());
}

FallacyRegistry FallacyRegistry::restricted_to(std::string_view code) const {
  return FallacyRegistry({at(code)}, version_ + "/" + std::string(code));
}

FallacyRegistry registry_default() {
  std::vector<FallacyType> entries = {
      {"EBP", "Evading the Burden of Proof",
       "This fallacy occurs when someone makes a claim but refuses to provide "
       "evidence to support it, shifting the burden of proof to others.",
       "A politician claims that a new policy will improve the economy but "
       "does not provide any data or reasoning to support this claim.",
       0, 0, false, "Burden_of_proof_(philosophy)"},
      {"ST", "Strawman",
       "Misrepresenting someone's argument to make it easier to refute than "
       "the original argument.",
       "Person A says we should have stricter gun control. Person B responds "
       "by saying Person A wants to take away all guns, which is a distortion "
       "of the original argument.",
       1, 1, false, "Straw_man"},
      {"RH", "Red Herring",
       "Diverting attention from the real issue by introducing an irrelevant "
       "topic.",
       "During a debate on environmental policies, a politician digresses to "
       "the opponent's personal life instead of addressing the policy issue.",
       1, 1, false, "Red_herring"},
      {"CP", "Cherry Picking",
       "Selectively presenting evidence that supports one's argument while "
       "ignoring evidence that contradicts it.",
       "A report on climate change highlights only data supporting global "
       "warming, ignoring data that suggests otherwise.",
       2, 2, true, "Cherry_picking"},
      {"FA", "False Analogy",
       "Making a misleading comparison between two things that are not truly "
       "comparable.",
       "Comparing the job of a teacher to that of a babysitter, implying they "
       "require similar skills and should therefore be compensated similarly.",
       3, 3, false, "False_analogy"},
      {"HG", "Hasty Generalization",
       "Making a generalized statement based on a small or unrepresentative "
       "sample.",
       "Meeting three aggressive dogs and concluding that all dogs are "
       "aggressive.",
       3, 3, true, "Faulty_generalization"},
      {"PH", "Post Hoc",
       "If because one event followed another, the first event caused the "
       "second.",
       "Believing that carrying a lucky charm resulted in winning a game, just "
       "because the win came after starting to carry the charm.",
       4, 4, true, "Post_hoc_ergo_propter_hoc"},
      {"FC", "False Cause",
       "Mistaking correlation for causation, if because two events occur "
       "together, one causes the other.",
       "Asserting that ice cream consumption causes drowning because both "
       "increase during the summer.",
       4, 4, true, "Questionable_cause"},
      {"VAG", "Vagueness",
       "Using imprecise, unclear, or ambiguous language in an argument.",
       "A politician says they will \"make the economy better\" without "
       "specifying any actual policies or steps.",
       2, 2, false, "Vagueness"},
  };
  return FallacyRegistry(std::move(entries), "default-9");
}

FallacyRegistry register_fallacy(const FallacyRegistry& registry,
                                 FallacyType entry) {
  if (registry.contains(entry.code)) {
    throw Error(ErrorCode::DuplicateCode, "duplicate code " + entry.code);
  }
  auto entries = registry.entries();
  std::string version = registry.version() + "+" + entry.code;
  entries.push_back(std::move(entry));
  return FallacyRegistry(std::move(entries), std::move(version));
}

int color_for(const FallacyRegistry& registry, std::string_view code) {
  return registry.at(code).color_index;
}

std::string wikipedia_link(const FallacyType& entry) {
  std::string title = entry.wikipedia_title;
  if (title.empty()) {
    // Wikipedia titles are sentence case with underscores.
    bool first = true;
    for (char c : entry.name) {
      if (c == ' ') {
        title += '_';
      } else {
        title += first ? c
                       : static_cast<char>(
                             std::tolower(static_cast<unsigned char>(c)));
        first = false;
      }
    }
  }
  return "https://en.wikipedia.org/wiki/" + title;
}

nlohmann::json registry_to_json(const FallacyRegistry& registry) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : registry.entries()) {
    nlohmann::json item = {
        {"code", e.code},
        {"name", e.name},
        {"definition", e.definition},
        {"example", e.example},
        {"group_id", e.group_id},
        {"color_index", e.color_index},
        {"context_needed", e.context_needed},
    };
    if (!e.wikipedia_title.empty()) item["wikipedia_title"] = e.wikipedia_title;
    list.push_back(std::move(item));
  }
  return {{"version", registry.version()}, {"fallacies", std::move(list)}};
}

FallacyRegistry registry_from_json(const nlohmann::json& doc) {
  try {
    std::vector<FallacyType> entries;
    std::map<int, int> group_color;
    for (const auto& item : doc.at("fallacies")) {
      FallacyType e;
      try {
        e.code = item.at("code").get<std::string>();
        e.name = item.at("name").get<std::string>();
        e.definition = item.at("definition").get<std::string>();
        e.example = item.at("example").get<std::string>();
        e.group_id = item.at("group_id").get<int>();
        e.context_needed = item.value("context_needed", false);
        e.wikipedia_title = item.value("wikipedia_title", std::string());
        if (item.contains("color_index")) {
          e.color_index = item.at("color_index").get<int>();
        } else if (auto it = group_color.find(e.group_id); it != group_color.end()) {
          e.color_index = it->second;
        } else {
          e.color_index = ((e.group_id % kColorCount) + kColorCount) % kColorCount;
        }
      } catch (const nlohmann::json::exception& ex) {
        throw Error(ErrorCode::InvalidEntry,
                    "fallacy entry " + std::to_string(entries.size()) + ": " + ex.what());
      }
      group_color.emplace(e.group_id, e.color_index);
      entries.push_back(std::move(e));
    }
    return FallacyRegistry(std::move(entries),
                           doc.value("version", std::string("custom")));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("registry file: ") + ex.what());
  }
}

FallacyRegistry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open registry file " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidConfig,
                path.string() + ": " + std::string(ex.what()));
  }
  return registry_from_json(doc);
}

void save_registry(const FallacyRegistry& registry,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write registry file " + path.string());
  }
  out << registry_to_json(registry).dump(2) << '\n';
}

}  // namespace skeptik
