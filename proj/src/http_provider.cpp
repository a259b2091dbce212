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

#include "httplib.h"
#include "json.hpp"
#include "skeptik/error.hpp"
#include "skeptik/llm.hpp"

namespace skeptik {

HttpChatProvider::HttpChatProvider(std::string id, std::string base_url,
                                   std::string api_key)
    : id_(std::move(id)), base_url_(std::move(base_url)), api_key_(std::move(api_key)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string HttpChatProvider::complete(std::span<const Message> messages,
                                       const ProviderConfig& config) {
  nlohmann::json body = {{"model", config.model_name},
                         {"temperature", config.temperature},
                         {"messages", nlohmann::json::array()}};
  for (const auto& m : messages) {
    body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.text}});
  }

  httplib::Client client(base_url_);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw Error(ErrorCode::Timeout, id_ + ": request timed out");
    }
    throw Error(ErrorCode::ProviderUnavailable, id_ + ": " + httplib::to_string(err));
  }
  if (res->status == 401 || res->status == 403) {
    throw Error(ErrorCode::AuthFailure, id_ + ": credentials rejected");
  }
  if (res->status == 408 || res->status == 504) {
    throw Error(ErrorCode::Timeout, id_ + ": upstream timeout");
  }
  if (res->status != 200) {
    throw Error(ErrorCode::ProviderUnavailable,
                id_ + ": HTTP " + std::to_string(res->status));
  }
  try {
    auto doc = nlohmann::json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::ProviderUnavailable, id_ + ": unexpected response shape");
  }
}

}  // namespace skeptik
