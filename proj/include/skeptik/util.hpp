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

#include <string>
#include <string_view>

namespace skeptik {

// UTC, second precision: "2026-10-18T09:30:00Z".
std::string now_iso8601();

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// 128 random bits as 32 hex characters.
std::string random_hex_id();

// application/x-www-form-urlencoded encoding: spaces become '+'.
std::string form_encode(std::string_view text);
std::string form_decode(std::string_view text);

std::string ascii_lower(std::string_view text);

}  // namespace skeptik
