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

#include "skeptik/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "skeptik/util.hpp"

namespace skeptik {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxFetchBytes = 5 * 1024 * 1024;
constexpr const char* kUserAgent =
    "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) "
    "Chrome/126.0 Safari/537.36";

ApiResponse json_response(int status, const ordered_json& body) {
  return {status, body.dump(), {}};
}

ApiResponse error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, {{"error", code}, {"message", message}});
}

ApiResponse error_response(const Error& err) {
  ordered_json body = {{"error", to_string(err.code())}, {"message", err.what()}};
  if (!err.detail().empty()) body["path"] = err.detail();
  return json_response(http_status_for(err.code()), body);
}

std::optional<json> parse_body(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  return doc;
}

std::optional<std::string> string_field(const json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) return std::string();
  return it->get<std::string>();
}

ordered_json instance_to_json(const FallacyInstance& instance) {
  ordered_json annotations = ordered_json::object();
  for (const auto& layer : instance.layers) {
    ordered_json entry = {{"explanation", layer.explanation}, {"sentence", layer.sentence_span}};
    if (layer.link) entry["link"] = *layer.link;
    annotations[std::string(to_string(layer.level))] = ordered_json::array({entry});
  }
  return {{"code", instance.code},
          {"sentences", instance.sentence_indices},
          {"annotations", std::move(annotations)}};
}

bool is_https_url(std::string_view url) {
  return ascii_lower(url.substr(0, 8)) == "https://" && url.size() > 8;
}

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoContent:
    case ErrorCode::MalformedInput:
      return 422;
    case ErrorCode::PreconditionViolation:
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnknownCode:
    case ErrorCode::EmptyArticle:
      return 400;
    case ErrorCode::SessionNotFound:
      return 404;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::AuthFailure:
    case ErrorCode::AnalysisFailed:
      return 502;
    case ErrorCode::Timeout:
      return 504;
    default:
      return 500;
  }
}

void ServiceConfig::validate() const {
  if (host.empty() || port < 0 || port > 65535) {
    throw Error(ErrorCode::InvalidConfig, "invalid listen address");
  }
  provider.validate();
  if (!(chat_temperature >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "chat_temperature must be >= 0");
  }
  if (parse_retries < 0) throw Error(ErrorCode::InvalidConfig, "parse_retries must be >= 0");
  extraction.validate();
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  auto probe = cache_dir / (".probe-" + random_hex_id());
  {
    std::ofstream out(probe);
    if (!out) {
      throw Error(ErrorCode::InvalidConfig,
                  "cache directory is not writable: " + cache_dir.string());
    }
  }
  std::filesystem::remove(probe, ec);
}

ServiceConfig service_config_from_json(const json& doc) {
  ServiceConfig c;
  try {
    c.host = doc.value("host", c.host);
    c.port = doc.value("port", c.port);
    if (auto p = doc.find("provider"); p != doc.end()) {
      c.provider.provider_id = p->value("id", c.provider.provider_id);
      c.provider.model_name = p->value("model", c.provider.model_name);
      c.provider.temperature = p->value("temperature", c.provider.temperature);
      c.provider.max_retries = p->value("max_retries", c.provider.max_retries);
      c.provider.timeout =
          std::chrono::milliseconds(p->value("timeout_ms", c.provider.timeout.count()));
      c.provider.retry_base_delay = std::chrono::milliseconds(
          p->value("retry_base_delay_ms", c.provider.retry_base_delay.count()));
      c.provider_base_url = p->value("base_url", c.provider_base_url);
    }
    c.chat_temperature = doc.value("chat_temperature", c.chat_temperature);
    c.allowed_origins = doc.value("allowed_origins", c.allowed_origins);
    c.auth_token = doc.value("auth_token", c.auth_token);
    c.cache_dir = doc.value("cache_dir", c.cache_dir.string());
    if (doc.contains("registry_path") && !doc["registry_path"].is_null()) {
      c.registry_path = doc["registry_path"].get<std::string>();
    }
    c.parse_mode = parse_mode_from_string(doc.value("parse_mode", std::string("lenient")));
    c.parse_retries = doc.value("parse_retries", c.parse_retries);
    c.expose_sessions = doc.value("expose_sessions", c.expose_sessions);
    if (auto e = doc.find("extraction"); e != doc.end()) {
      c.extraction.min_paragraph_words =
          e->value("min_paragraph_words", c.extraction.min_paragraph_words);
      c.extraction.min_cluster_paragraphs =
          e->value("min_cluster_paragraphs", c.extraction.min_cluster_paragraphs);
      c.extraction.link_density_max = e->value("link_density_max", c.extraction.link_density_max);
    }
    c.prompt.sentence_cap = doc.value("sentence_cap", c.prompt.sentence_cap);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidConfig, std::string("service config: ") + ex.what());
  }
  return c;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::InvalidConfig, path.string() + " is not a JSON object");
  }
  ServiceConfig config = service_config_from_json(doc);
  if (config.registry_path && config.registry_path->is_relative()) {
    config.registry_path = path.parent_path() / *config.registry_path;
  }
  return config;
}

std::optional<std::string> process_env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

void apply_env_overrides(ServiceConfig& config, const EnvLookup& env) {
  if (auto v = env("SKEPTIK_PROVIDER")) config.provider.provider_id = *v;
  if (auto v = env("SKEPTIK_MODEL")) config.provider.model_name = *v;
  if (auto v = env("SKEPTIK_TEMPERATURE")) {
    try {
      config.provider.temperature = std::stod(*v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "SKEPTIK_TEMPERATURE is not a number");
    }
  }
  if (auto v = env("SKEPTIK_CACHE_DIR")) config.cache_dir = *v;
}

std::shared_ptr<LlmGateway> build_gateway(const ServiceConfig& config, const EnvLookup& env) {
  auto gateway = std::make_shared<LlmGateway>();
  gateway->register_provider(std::make_shared<MockProvider>());
  if (config.provider.provider_id != "mock") {
    gateway->register_provider(std::make_shared<HttpChatProvider>(
        config.provider.provider_id, config.provider_base_url,
        env("SKEPTIK_API_KEY").value_or("")));
  }
  return gateway;
}

FallacyRegistry load_active_registry(const ServiceConfig& config) {
  return config.registry_path ? load_registry(*config.registry_path) : registry_default();
}

std::string fetch_url(const std::string& url) {
  if (!is_https_url(url)) {
    throw Error(ErrorCode::PreconditionViolation, "only https:// URLs can be fetched");
  }
  auto path_pos = url.find('/', 8);
  std::string origin = path_pos == std::string::npos ? url : url.substr(0, path_pos);
  std::string path = path_pos == std::string::npos ? "/" : url.substr(path_pos);
  auto fragment = path.find('#');
  if (fragment != std::string::npos) path.erase(fragment);

  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(10, 0);
  client.set_write_timeout(10, 0);
  httplib::Headers headers = {{"User-Agent", kUserAgent},
                              {"Accept", "text/html,application/xhtml+xml"}};
  std::string body;
  bool too_large = false;
  auto res = client.Get(path, headers, [&](const char* data, std::size_t len) {
    if (body.size() + len > kMaxFetchBytes) {
      too_large = true;
      return false;
    }
    body.append(data, len);
    return true;
  });
  if (too_large) throw Error(ErrorCode::ProviderUnavailable, "page exceeds 5 MB");
  if (!res) {
    throw Error(ErrorCode::ProviderUnavailable, "fetch failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::ProviderUnavailable, "fetch returned HTTP " + std::to_string(res->status));
  }
  return body;
}

ordered_json article_to_json(const Article& article) {
  ordered_json doc = {{"paragraphs", article.paragraphs}};
  if (article.title) doc["title"] = *article.title;
  if (article.source_url) doc["source_url"] = *article.source_url;
  return doc;
}

Article article_from_json(const json& doc) {
  std::optional<std::string> title, url;
  if (doc.contains("title")) title = doc["title"].get<std::string>();
  if (doc.contains("source_url")) url = doc["source_url"].get<std::string>();
  return make_article(doc.at("paragraphs").get<std::vector<std::string>>(), url, title);
}

std::string cache_key(const Article& article, const FallacyRegistry& registry,
                      std::string_view model_name) {
  return sha256_hex(content_hash(article) + "\n" + registry.version() + "\n" +
                    std::string(model_name));
}

bool is_cache_key(std::string_view text) {
  return text.size() == 64 && std::all_of(text.begin(), text.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

AnalysisCache::AnalysisCache(std::filesystem::path dir, FallacyRegistry registry)
    : dir_(std::move(dir)), registry_(std::move(registry)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path AnalysisCache::file_for(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<CacheEntry> AnalysisCache::get(const std::string& key) const {
  if (!is_cache_key(key)) return std::nullopt;
  {
    std::shared_lock lock(mutex_);
    if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  }
  std::ifstream in(file_for(key));
  if (!in) return std::nullopt;
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  try {
    CacheEntry entry;
    entry.key = key;
    entry.article = article_from_json(doc.at("article"));
    entry.stored_at = doc.value("stored_at", std::string());
    entry.version = doc.value("version", std::uint64_t{1});
    entry.result = parse_llm_response(doc.at("result").dump(), registry_,
                                      std::max<std::size_t>(1, entry.article.sentence_count()),
                                      ParseMode::Strict)
                       .result;
    std::unique_lock lock(mutex_);
    memory_.emplace(key, entry);
    return entry;
  } catch (const std::exception&) {
    // Unreadable entries count as misses and get rewritten.
    return std::nullopt;
  }
}

void AnalysisCache::put(const CacheEntry& entry) {
  ordered_json doc = {{"key", entry.key},
                      {"stored_at", entry.stored_at},
                      {"version", entry.version},
                      {"article", article_to_json(entry.article)},
                      {"result", result_to_json(entry.result)}};
  std::unique_lock lock(mutex_);
  auto target = file_for(entry.key);
  auto temp = dir_ / (entry.key + ".tmp-" + random_hex_id());
  {
    std::ofstream out(temp);
    if (!out) throw Error(ErrorCode::Io, "cannot write cache file " + temp.string());
    out << doc.dump();
  }
  std::filesystem::rename(temp, target);
  memory_[entry.key] = entry;
}

std::shared_ptr<SessionStore::Slot> SessionStore::create(ChatSession session,
                                                         std::string analysis_id) {
  auto slot = std::make_shared<Slot>();
  slot->session = std::move(session);
  slot->analysis_id = std::move(analysis_id);
  std::lock_guard lock(mutex_);
  slots_[slot->session.session_id] = slot;
  return slot;
}

std::shared_ptr<SessionStore::Slot> SessionStore::find(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = slots_.find(session_id);
  return it == slots_.end() ? nullptr : it->second;
}

Service::Service(ServiceConfig config, FallacyRegistry registry,
                 std::shared_ptr<LlmGateway> gateway, Fetcher fetcher)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      gateway_(std::move(gateway)),
      fetcher_(std::move(fetcher)),
      cache_(config_.cache_dir, registry_) {}

AnalyzeOptions Service::analyze_options() const {
  AnalyzeOptions options;
  options.mode = config_.parse_mode;
  options.parse_retries = config_.parse_retries;
  options.prompt = config_.prompt;
  options.extraction = config_.extraction;
  options.fetcher = fetcher_;
  return options;
}

std::string Service::render(const CacheEntry& entry) const {
  ordered_json body = {
      {"analysis_id", entry.key},
      {"version", entry.version},
      {"result", result_to_json(entry.result, &entry.article)},
      {"payload", payload_to_json(overlay_payload(entry.result, entry.article, registry_))}};
  return body.dump();
}

ApiResponse Service::analyze(const std::string& body) {
  auto doc = parse_body(body);
  if (!doc) return error_response(400, "BadRequest", "body must be a JSON object");
  auto url = string_field(*doc, "url");
  auto html = string_field(*doc, "html");
  auto text = string_field(*doc, "text");
  int present = int(url.has_value()) + int(html.has_value()) + int(text.has_value());
  if (present != 1) {
    return error_response(400, "BadRequest", "exactly one of url, html or text is required");
  }
  AnalysisInput input;
  if (url) {
    if (!is_https_url(*url)) return error_response(400, "BadRequest", "url must be https://");
    input = {AnalysisInput::Kind::Url, *url};
  } else if (html) {
    input = {AnalysisInput::Kind::Html, *html};
  } else {
    input = {AnalysisInput::Kind::Text, *text};
  }
  if (input.value.find_first_not_of(" \t\r\n") == std::string::npos) {
    return error_response(400, "BadRequest", "input is empty");
  }

  try {
    AnalyzeOptions options = analyze_options();
    Article article = prepare_article(input, options);
    std::string key = cache_key(article, registry_, config_.provider.model_name);
    if (auto hit = cache_.get(key)) {
      ApiResponse response{200, render(*hit), {}};
      response.headers["X-Skeptik-Cache"] = "hit";
      return response;
    }
    ProviderConfig provider = config_.provider;
    AnalyzeOutcome outcome =
        analyze_article(std::move(article), registry_, *gateway_, provider, options);
    CacheEntry entry{key, std::move(outcome.result), std::move(outcome.article), now_iso8601(), 1};
    cache_.put(entry);
    ApiResponse response{200, render(entry), {}};
    response.headers["X-Skeptik-Cache"] = "miss";
    return response;
  } catch (const Error& err) {
    return error_response(err);
  }
}

ApiResponse Service::get_analysis(const std::string& id) const {
  if (!is_cache_key(id)) return error_response(400, "BadRequest", "malformed analysis id");
  auto entry = cache_.get(id);
  if (!entry) return error_response(404, "NotFound", "unknown analysis id");
  return {200, render(*entry), {}};
}

ApiResponse Service::chat(const std::string& body) {
  auto doc = parse_body(body);
  if (!doc) return error_response(400, "BadRequest", "body must be a JSON object");
  auto analysis_id = string_field(*doc, "analysis_id");
  auto code = string_field(*doc, "fallacy_code");
  auto session_id = string_field(*doc, "session_id");
  auto message = string_field(*doc, "message");
  if (!message || message->find_first_not_of(" \t\r\n") == std::string::npos) {
    return error_response(400, "BadRequest", "message must be non-empty");
  }
  if (!analysis_id || !is_cache_key(*analysis_id)) {
    return error_response(400, "BadRequest", "malformed analysis id");
  }
  if (!code || code->empty()) return error_response(400, "BadRequest", "fallacy_code is required");
  auto entry = cache_.get(*analysis_id);
  if (!entry) return error_response(404, "NotFound", "unknown analysis id");
  const FallacyInstance* instance = entry->result.find(*code);
  if (instance == nullptr) {
    return error_response(409, "Conflict", *code + " was not detected in this analysis");
  }

  ProviderConfig chat_config = config_.provider;
  chat_config.temperature = config_.chat_temperature;
  try {
    std::shared_ptr<SessionStore::Slot> slot;
    if (session_id) {
      slot = sessions_.find(*session_id);
      if (!slot) return error_response(404, "NotFound", "unknown session id");
      if (slot->analysis_id != *analysis_id || slot->session.fallacy_code != *code) {
        return error_response(409, "Conflict", "session belongs to another analysis or fallacy");
      }
      std::lock_guard turn(slot->turn_mutex);
      ChatReply reply = chat_turn(slot->session, *message, chat_config, *gateway_);
      slot->session = std::move(reply.session);
      return json_response(200, {{"session_id", slot->session.session_id}, {"reply", reply.reply}});
    }
    std::vector<std::string> flagged;
    for (std::size_t i : instance->sentence_indices) flagged.push_back(entry->article.sentence(i));
    std::vector<std::string> interventions;
    for (const auto& layer : instance->layers) interventions.push_back(layer.explanation);
    ChatSession fresh = start_chat_session(registry_.at(*code), std::move(flagged), interventions);
    ChatReply reply = chat_turn(fresh, *message, chat_config, *gateway_);
    auto created = sessions_.create(std::move(reply.session), *analysis_id);
    return json_response(200, {{"session_id", created->session.session_id}, {"reply", reply.reply}});
  } catch (const Error& err) {
    return error_response(err);
  }
}

ApiResponse Service::regenerate(const std::string& body) {
  auto doc = parse_body(body);
  if (!doc) return error_response(400, "BadRequest", "body must be a JSON object");
  auto analysis_id = string_field(*doc, "analysis_id");
  auto code = string_field(*doc, "fallacy_code");
  if (!analysis_id || !is_cache_key(*analysis_id)) {
    return error_response(400, "BadRequest", "malformed analysis id");
  }
  if (!code || !registry_.contains(*code)) {
    return error_response(400, "BadRequest", "fallacy_code is not in the registry");
  }
  std::lock_guard lock(regenerate_mutex_);
  auto entry = cache_.get(*analysis_id);
  if (!entry) return error_response(404, "NotFound", "unknown analysis id");
  auto existing = std::find_if(entry->result.detected.begin(), entry->result.detected.end(),
                               [&](const FallacyInstance& f) { return f.code == *code; });
  if (existing == entry->result.detected.end()) {
    return error_response(409, "Conflict", *code + " was not detected in this analysis");
  }
  try {
    FallacyInstance fresh = regenerate_instance(entry->article, registry_, *code, *gateway_,
                                                config_.provider, analyze_options());
    *existing = fresh;
    ++entry->version;
    cache_.put(*entry);
    return json_response(200, {{"analysis_id", entry->key},
                               {"version", entry->version},
                               {"instance", instance_to_json(fresh)}});
  } catch (const Error& err) {
    return error_response(err);
  }
}

ApiResponse Service::fallacies() const {
  ordered_json list = ordered_json::array();
  for (const auto& f : registry_.entries()) {
    list.push_back({{"code", f.code},
                    {"name", f.name},
                    {"definition", f.definition},
                    {"example", f.example},
                    {"group_id", f.group_id},
                    {"color_index", f.color_index},
                    {"context_needed", f.context_needed},
                    {"wikipedia_link", wikipedia_link(f)}});
  }
  return json_response(200, {{"version", registry_.version()}, {"fallacies", std::move(list)}});
}

ApiResponse Service::session(const std::string& id) const {
  if (!config_.expose_sessions) return error_response(404, "NotFound", "not found");
  auto slot = sessions_.find(id);
  if (!slot) return error_response(404, "NotFound", "unknown session id");
  std::lock_guard turn(slot->turn_mutex);
  ordered_json history = ordered_json::array();
  for (const auto& m : slot->session.history) {
    history.push_back({{"role", to_string(m.role)}, {"text", m.text}});
  }
  return json_response(200, {{"session_id", slot->session.session_id},
                             {"analysis_id", slot->analysis_id},
                             {"fallacy_code", slot->session.fallacy_code},
                             {"created_at", slot->session.created_at},
                             {"history", std::move(history)}});
}

HttpServer::HttpServer(std::shared_ptr<Service> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  auto send = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    for (const auto& [name, value] : api.headers) res.set_header(name, value);
    res.set_content(api.body, "application/json");
  };
  const ServiceConfig& config = service_->config();

  auto origin_allowed = [origins = config.allowed_origins](const std::string& origin) {
    return std::find(origins.begin(), origins.end(), "*") != origins.end() ||
           std::find(origins.begin(), origins.end(), origin) != origins.end();
  };

  server_->set_pre_routing_handler(
      [origin_allowed, token = config.auth_token](const httplib::Request& req,
                                                  httplib::Response& res) {
        if (req.has_header("Origin")) {
          auto origin = req.get_header_value("Origin");
          if (origin_allowed(origin)) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Vary", "Origin");
          } else if (req.method == "OPTIONS") {
            res.status = 403;
            return httplib::Server::HandlerResponse::Handled;
          }
        }
        if (req.method == "OPTIONS") {
          res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
          res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Skeptik-Token");
          res.status = 204;
          return httplib::Server::HandlerResponse::Handled;
        }
        if (!token.empty() && req.path.rfind("/api/", 0) == 0 &&
            req.get_header_value("X-Skeptik-Token") != token) {
          res.status = 401;
          res.set_content(R"({"error":"Unauthorized","message":"missing or wrong token"})",
                          "application/json");
          return httplib::Server::HandlerResponse::Handled;
        }
        return httplib::Server::HandlerResponse::Unhandled;
      });

  auto svc = service_;
  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  server_->Post("/api/analyze", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->analyze(req.body));
  });
  server_->Get(R"(/api/analysis/([^/]+))",
               [svc, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, svc->get_analysis(req.matches[1]));
               });
  server_->Post("/api/chat", [svc, send](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->chat(req.body));
  });
  server_->Post("/api/regenerate",
                [svc, send](const httplib::Request& req, httplib::Response& res) {
                  send(res, svc->regenerate(req.body));
                });
  server_->Get("/api/fallacies", [svc, send](const httplib::Request&, httplib::Response& res) {
    send(res, svc->fallacies());
  });
  server_->Get(R"(/api/session/([^/]+))",
               [svc, send](const httplib::Request& req, httplib::Response& res) {
                 send(res, svc->session(req.matches[1]));
               });
  server_->set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& ex) {
          message = ex.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(ordered_json{{"error", "Internal"}, {"message", message}}.dump(),
                        "application/json");
      });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::InvalidConfig,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::is_running() const { return server_->is_running(); }

}  // namespace skeptik
