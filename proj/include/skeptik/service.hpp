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

// HTTP backend for the reader overlay: analysis cache, chat sessions,
// configuration and page fetching.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skeptik/analysis.hpp"
#include "skeptik/error.hpp"
#include "skeptik/llm.hpp"
#include "skeptik/taxonomy.hpp"

namespace httplib {
class Server;
}

namespace skeptik {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  ProviderConfig provider;
  double chat_temperature = kChatTemperature;
  // Base URL for OpenAI-compatible providers.
  std::string provider_base_url = "https://api.openai.com";
  // Origins allowed to call the API cross-origin; "*" allows any.
  std::vector<std::string> allowed_origins;
  // When set, API calls must carry it in the X-Skeptik-Token header.
  std::string auth_token;
  std::filesystem::path cache_dir = ".skeptik-cache";
  std::optional<std::filesystem::path> registry_path;
  ParseMode parse_mode = ParseMode::Lenient;
  int parse_retries = 2;
  ExtractionConfig extraction;
  PromptOptions prompt;
  // Enables GET /api/session/{id} for inspecting chat history.
  bool expose_sessions = false;

  // Throws InvalidConfig; creates cache_dir and checks it is writable.
  void validate() const;
};

// JSON config file; every key is optional:
//   {"host", "port", "provider": {"id", "model", "temperature",
//    "max_retries", "timeout_ms", "base_url"}, "chat_temperature",
//   "allowed_origins", "auth_token", "cache_dir", "registry_path",
//   "parse_mode", "parse_retries", "expose_sessions",
//   "extraction": {"min_paragraph_words", "min_cluster_paragraphs",
//    "link_density_max"}, "sentence_cap"}
ServiceConfig service_config_from_json(const nlohmann::json& doc);
ServiceConfig load_service_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
std::optional<std::string> process_env(const char* name);

// Applies SKEPTIK_PROVIDER, SKEPTIK_MODEL, SKEPTIK_TEMPERATURE and
// SKEPTIK_CACHE_DIR. The API key (SKEPTIK_API_KEY) is read only when the
// gateway is built and is never stored in the config.
void apply_env_overrides(ServiceConfig& config, const EnvLookup& env = process_env);

// Registers the mock provider, plus an HTTP provider under
// config.provider.provider_id when that is not "mock".
std::shared_ptr<LlmGateway> build_gateway(const ServiceConfig& config,
                                          const EnvLookup& env = process_env);

FallacyRegistry load_active_registry(const ServiceConfig& config);

// HTTPS GET with a browser-like user agent, 10 s timeout, 5 MB body cap
// and up to 5 redirects. Throws ProviderUnavailable on failure.
std::string fetch_url(const std::string& url);

nlohmann::ordered_json article_to_json(const Article& article);
Article article_from_json(const nlohmann::json& doc);

// Key of an analysis: SHA-256 over the normalized article text, registry
// version and model name.
std::string cache_key(const Article& article, const FallacyRegistry& registry,
                      std::string_view model_name);
bool is_cache_key(std::string_view text);

struct CacheEntry {
  std::string key;
  AnalysisResult result;
  Article article;
  std::string stored_at;
  std::uint64_t version = 1;
};

// Analysis store backed by one JSON file per key in a directory. Readers
// run concurrently; writes are exclusive and atomic (temp file + rename).
class AnalysisCache {
 public:
  AnalysisCache(std::filesystem::path dir, FallacyRegistry registry);

  std::optional<CacheEntry> get(const std::string& key) const;
  void put(const CacheEntry& entry);

 private:
  std::filesystem::path file_for(const std::string& key) const;

  std::filesystem::path dir_;
  FallacyRegistry registry_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, CacheEntry> memory_;
};

// Chat sessions with one lock per session so turns on a session queue up
// while different sessions proceed in parallel.
class SessionStore {
 public:
  struct Slot {
    std::mutex turn_mutex;
    ChatSession session;
    std::string analysis_id;
  };

  std::shared_ptr<Slot> create(ChatSession session, std::string analysis_id);
  std::shared_ptr<Slot> find(const std::string& session_id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
  std::map<std::string, std::string> headers;
};

// Endpoint logic, independent of the HTTP transport.
class Service {
 public:
  using Fetcher = std::function<std::string(const std::string&)>;

  Service(ServiceConfig config, FallacyRegistry registry,
          std::shared_ptr<LlmGateway> gateway, Fetcher fetcher = fetch_url);

  ApiResponse analyze(const std::string& body);
  ApiResponse get_analysis(const std::string& id) const;
  ApiResponse chat(const std::string& body);
  ApiResponse regenerate(const std::string& body);
  ApiResponse fallacies() const;
  ApiResponse session(const std::string& id) const;

  const ServiceConfig& config() const noexcept { return config_; }
  const FallacyRegistry& registry() const noexcept { return registry_; }

 private:
  std::string render(const CacheEntry& entry) const;
  AnalyzeOptions analyze_options() const;

  ServiceConfig config_;
  FallacyRegistry registry_;
  std::shared_ptr<LlmGateway> gateway_;
  Fetcher fetcher_;
  AnalysisCache cache_;
  SessionStore sessions_;
  // Serializes regenerate's read-modify-write of cache entries.
  std::mutex regenerate_mutex_;
};

// Binds the Service to an HTTP/1.1 server (CORS, token check, /healthz).
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<Service> service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();
  bool is_running() const;

 private:
  std::shared_ptr<Service> service_;
  std::unique_ptr<httplib::Server> server_;
};

int http_status_for(ErrorCode code);

}  // namespace skeptik
