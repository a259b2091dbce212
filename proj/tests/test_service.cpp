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

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "skeptik/error.hpp"
#include "skeptik/service.hpp"
#include "test_support.hpp"

namespace skeptik {
namespace {

using nlohmann::json;

std::filesystem::path fresh_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("skeptik_" + name + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  return dir;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    cache_dir = fresh_dir("cache");
    config.cache_dir = cache_dir;
    config.expose_sessions = true;
    config.allowed_origins = {"https://news.example"};
  }

  void start(FallacyRegistry registry = registry_default()) {
    auto gateway = std::make_shared<LlmGateway>();
    gateway->register_provider(mock);
    service = std::make_shared<Service>(config, std::move(registry), gateway,
                                        [](const std::string&) -> std::string {
                                          return testing::read_fixture("articles/planted_04.html");
                                        });
    server = std::make_unique<HttpServer>(service);
    port = server->bind("127.0.0.1", 0);
    ASSERT_GT(port, 0);
    thread = std::thread([this] { server->listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    for (int i = 0; i < 200 && !server->is_running(); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }

  void TearDown() override {
    if (server) server->stop();
    if (thread.joinable()) thread.join();
    std::filesystem::remove_all(cache_dir);
  }

  httplib::Result post(const std::string& path, const json& body, httplib::Headers headers = {}) {
    return client->Post(path, headers, body.dump(), "application/json");
  }

  std::string analyze_text(const std::string& fixture) {
    auto res = post("/api/analyze", {{"text", testing::read_fixture(fixture)}});
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    return json::parse(res->body)["analysis_id"].get<std::string>();
  }

  std::filesystem::path cache_dir;
  ServiceConfig config;
  std::shared_ptr<MockProvider> mock = std::make_shared<MockProvider>();
  std::shared_ptr<Service> service;
  std::unique_ptr<HttpServer> server;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
  int port = 0;
};

TEST_F(ServiceTest, Healthz) {
  start();
  auto res = client->Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["status"], "ok");
}

TEST_F(ServiceTest, AnalyzeReturnsResultAndPayload) {
  start();
  auto res = post("/api/analyze", {{"text", testing::read_fixture("articles/planted_01.txt")}});
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto body = json::parse(res->body);
  EXPECT_TRUE(is_cache_key(body["analysis_id"].get<std::string>()));
  EXPECT_EQ(body["version"], 1);
  EXPECT_EQ(body["result"]["cases"][0]["fallacies"]["logical_fallacies"],
            json::array({"EBP", "ST", "CP"}));
  EXPECT_EQ(body["payload"]["spans"]["3"], json::array({"EBP"}));
  EXPECT_EQ(res->get_header_value("X-Skeptik-Cache"), "miss");
}

TEST_F(ServiceTest, CacheHitIsByteIdenticalWithoutProviderCall) {
  start();
  const json request = {{"text", testing::read_fixture("articles/planted_03.txt")}};
  auto first = post("/api/analyze", request);
  ASSERT_TRUE(first);
  const auto calls = mock->call_count();
  auto second = post("/api/analyze", request);
  ASSERT_TRUE(second);
  EXPECT_EQ(second->status, 200);
  EXPECT_EQ(second->body, first->body);
  EXPECT_EQ(second->get_header_value("X-Skeptik-Cache"), "hit");
  EXPECT_EQ(mock->call_count(), calls);

  auto id = json::parse(first->body)["analysis_id"].get<std::string>();
  auto fetched = client->Get("/api/analysis/" + id);
  ASSERT_TRUE(fetched);
  EXPECT_EQ(fetched->body, first->body);
}

TEST_F(ServiceTest, CacheSurvivesRestart) {
  start();
  const json request = {{"text", testing::read_fixture("articles/planted_05.txt")}};
  auto first = post("/api/analyze", request);
  ASSERT_TRUE(first);
  server->stop();
  thread.join();
  mock = std::make_shared<MockProvider>();
  start();
  auto second = post("/api/analyze", request);
  ASSERT_TRUE(second);
  EXPECT_EQ(second->body, first->body);
  EXPECT_EQ(mock->call_count(), 0u);
}

TEST_F(ServiceTest, UrlInputUsesFetcher) {
  start();
  auto res = post("/api/analyze", {{"url", "https://news.example/senate"}});
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto body = json::parse(res->body);
  EXPECT_EQ(body["result"]["cases"][0]["fallacies"]["logical_fallacies"], json::array({"ST", "CP"}));
}

TEST_F(ServiceTest, BadRequests) {
  start();
  auto status = [&](const std::string& path, const std::string& raw) {
    auto res = client->Post(path, raw, "application/json");
    return res ? res->status : -1;
  };
  EXPECT_EQ(status("/api/analyze", "not json"), 400);
  EXPECT_EQ(status("/api/analyze", "{}"), 400);
  EXPECT_EQ(status("/api/analyze", R"({"text":"a","html":"b"})"), 400);
  EXPECT_EQ(status("/api/analyze", R"({"url":"http://news.example/x"})"), 400);
  EXPECT_EQ(status("/api/analyze", R"({"text":"   "})"), 400);
  EXPECT_EQ(status("/api/analyze", R"({"html":"<html><body><nav>menu</nav></body></html>"})"), 422);
  auto res = client->Get("/api/analysis/not-a-key");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = client->Get("/api/analysis/" + std::string(64, 'a'));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(json::parse(res->body)["error"], "NotFound");
}

TEST_F(ServiceTest, ChatFlow) {
  start();
  auto id = analyze_text("articles/planted_01.txt");
  auto res = post("/api/chat", {{"analysis_id", id}, {"fallacy_code", "CP"}, {"message", "Why?"}});
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto body = json::parse(res->body);
  auto session_id = body["session_id"].get<std::string>();
  EXPECT_NE(body["reply"].get<std::string>().find("Cherry Picking"), std::string::npos);

  auto history = [&] {
    auto r = client->Get("/api/session/" + session_id);
    EXPECT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    return json::parse(r->body)["history"];
  };
  EXPECT_EQ(history().size(), 2u);
  res = post("/api/chat", {{"analysis_id", id}, {"fallacy_code", "CP"}, {"session_id", session_id},
                           {"message", "Which figures?"}});
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["session_id"], session_id);
  auto h = history();
  ASSERT_EQ(h.size(), 4u);
  EXPECT_EQ(h[2]["role"], "user");
  EXPECT_EQ(h[2]["text"], "Which figures?");
}

TEST_F(ServiceTest, ChatErrors) {
  start();
  auto id = analyze_text("articles/planted_01.txt");
  auto status = [&](const json& body) {
    auto r = post("/api/chat", body);
    return r ? r->status : -1;
  };
  EXPECT_EQ(status({{"analysis_id", id}, {"fallacy_code", "CP"}, {"message", "  "}}), 400);
  EXPECT_EQ(status({{"analysis_id", "x"}, {"fallacy_code", "CP"}, {"message", "hi"}}), 400);
  EXPECT_EQ(status({{"analysis_id", std::string(64, 'b')}, {"fallacy_code", "CP"}, {"message", "hi"}}), 404);
  EXPECT_EQ(status({{"analysis_id", id}, {"fallacy_code", "FA"}, {"message", "hi"}}), 409);
  EXPECT_EQ(status({{"analysis_id", id}, {"fallacy_code", "CP"}, {"session_id", "nope"}, {"message", "hi"}}),
            404);
}

TEST_F(ServiceTest, SessionsHiddenUnlessExposed) {
  config.expose_sessions = false;
  start();
  auto id = analyze_text("articles/planted_01.txt");
  auto res = post("/api/chat", {{"analysis_id", id}, {"fallacy_code", "CP"}, {"message", "Why?"}});
  ASSERT_TRUE(res);
  auto session_id = json::parse(res->body)["session_id"].get<std::string>();
  auto r = client->Get("/api/session/" + session_id);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
}

TEST_F(ServiceTest, RegenerateBumpsVersion) {
  start();
  auto id = analyze_text("articles/planted_01.txt");
  auto res = post("/api/regenerate", {{"analysis_id", id}, {"fallacy_code", "CP"}});
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  auto body = json::parse(res->body);
  EXPECT_EQ(body["version"], 2);
  EXPECT_EQ(body["instance"]["code"], "CP");
  EXPECT_EQ(body["instance"]["sentences"], json::array({7}));
  auto fetched = client->Get("/api/analysis/" + id);
  ASSERT_TRUE(fetched);
  EXPECT_EQ(json::parse(fetched->body)["version"], 2);

  auto status = [&](const json& b) {
    auto r = post("/api/regenerate", b);
    return r ? r->status : -1;
  };
  EXPECT_EQ(status({{"analysis_id", id}, {"fallacy_code", "ZZ"}}), 400);
  EXPECT_EQ(status({{"analysis_id", id}, {"fallacy_code", "HG"}}), 409);
  EXPECT_EQ(status({{"analysis_id", std::string(64, 'c')}, {"fallacy_code", "CP"}}), 404);
}

TEST_F(ServiceTest, FallaciesListsRegistry) {
  start();
  auto res = client->Get("/api/fallacies");
  ASSERT_TRUE(res);
  auto body = json::parse(res->body);
  ASSERT_EQ(body["fallacies"].size(), 9u);
  EXPECT_EQ(body["fallacies"][3]["code"], "CP");
  EXPECT_EQ(body["fallacies"][3]["wikipedia_link"], "https://en.wikipedia.org/wiki/Cherry_picking");
  EXPECT_EQ(body["version"], registry_default().version());
}

TEST_F(ServiceTest, ExtendedRegistryFromConfig) {
  config.registry_path = testing::fixture_path("../../config/registry.extended.json");
  start(load_active_registry(config));
  auto res = client->Get("/api/fallacies");
  ASSERT_TRUE(res);
  auto body = json::parse(res->body);
  ASSERT_EQ(body["fallacies"].size(), 10u);
  EXPECT_EQ(body["fallacies"][9]["code"], "FB");
}

TEST_F(ServiceTest, CorsPreflight) {
  start();
  httplib::Headers allowed = {{"Origin", "https://news.example"}};
  auto res = client->Options("/api/analyze", allowed);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "https://news.example");
  res = client->Options("/api/analyze", httplib::Headers{{"Origin", "https://evil.example"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 403);
  res = client->Get("/api/fallacies", allowed);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "https://news.example");
}

TEST_F(ServiceTest, TokenRequiredWhenConfigured) {
  config.auth_token = "s3cret";
  start();
  auto res = client->Get("/api/fallacies");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 401);
  res = client->Get("/api/fallacies", httplib::Headers{{"X-Skeptik-Token", "s3cret"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client->Get("/healthz");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
}

TEST(ServiceConfigTest, EnvOverrides) {
  std::map<std::string, std::string> env = {{"SKEPTIK_PROVIDER", "openai"},
                                            {"SKEPTIK_MODEL", "gpt-x"},
                                            {"SKEPTIK_TEMPERATURE", "0.3"},
                                            {"SKEPTIK_CACHE_DIR", "/tmp/sk"}};
  auto lookup = [&](const char* name) -> std::optional<std::string> {
    auto it = env.find(name);
    return it == env.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  ServiceConfig config;
  apply_env_overrides(config, lookup);
  EXPECT_EQ(config.provider.provider_id, "openai");
  EXPECT_EQ(config.provider.model_name, "gpt-x");
  EXPECT_DOUBLE_EQ(config.provider.temperature, 0.3);
  EXPECT_EQ(config.cache_dir, "/tmp/sk");
  env["SKEPTIK_TEMPERATURE"] = "warm";
  try {
    apply_env_overrides(config, lookup);
    FAIL() << "expected InvalidConfig";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

TEST(ServiceConfigTest, LoadsFileAndResolvesRegistry) {
  auto config = load_service_config(testing::fixture_path("../../config/skeptik.example.json"));
  EXPECT_EQ(config.port, 8080);
  EXPECT_EQ(config.provider.provider_id, "mock");
  EXPECT_EQ(config.parse_mode, ParseMode::Lenient);
  ASSERT_TRUE(config.registry_path.has_value());
  EXPECT_TRUE(std::filesystem::exists(*config.registry_path));
  EXPECT_EQ(load_active_registry(config).size(), 10u);
}

TEST(ServiceConfigTest, RejectsBadConfigs) {
  auto code_of = [](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code_of([] { service_config_from_json(json{{"port", "eighty"}}); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { service_config_from_json(json{{"parse_mode", "loose"}}); }),
            ErrorCode::InvalidConfig);
  ServiceConfig config;
  config.port = 70000;
  EXPECT_EQ(code_of([&] { config.validate(); }), ErrorCode::InvalidConfig);
  config = ServiceConfig{};
  config.provider.temperature = -1;
  EXPECT_EQ(code_of([&] { config.validate(); }), ErrorCode::InvalidConfig);
}

TEST(CacheKey, DependsOnContentRegistryAndModel) {
  Article a = make_article({"One sentence here."});
  auto k = cache_key(a, registry_default(), "m1");
  EXPECT_TRUE(is_cache_key(k));
  EXPECT_EQ(k, cache_key(make_article({"One   sentence here."}), registry_default(), "m1"));
  EXPECT_NE(k, cache_key(a, registry_default(), "m2"));
  EXPECT_NE(k, cache_key(a, registry_default().restricted_to("CP"), "m1"));
  EXPECT_FALSE(is_cache_key("../../etc/passwd"));
  EXPECT_FALSE(is_cache_key(std::string(64, 'G')));
}

TEST(ArticleJson, RoundTrip) {
  Article a = make_article({"First para. Second sentence.", "Third."}, "https://x.example", "T");
  EXPECT_EQ(article_from_json(json::parse(article_to_json(a).dump())), a);
}

TEST(StatusMapping, ErrorCodes) {
  EXPECT_EQ(http_status_for(ErrorCode::NoContent), 422);
  EXPECT_EQ(http_status_for(ErrorCode::UnknownCode), 400);
  EXPECT_EQ(http_status_for(ErrorCode::ProviderUnavailable), 502);
  EXPECT_EQ(http_status_for(ErrorCode::Timeout), 504);
  EXPECT_EQ(http_status_for(ErrorCode::SchemaViolation), 500);
}

}  // namespace
}  // namespace skeptik
