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

#include <chrono>
#include <memory>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "skeptik/error.hpp"
#include "skeptik/extraction.hpp"
#include "skeptik/llm.hpp"
#include "skeptik/taxonomy.hpp"
#include "test_support.hpp"

namespace skeptik {
namespace {

using namespace std::chrono_literals;

Article ten_sentence_article() {
  std::vector<std::string> paragraphs;
  for (int p = 0; p < 2; ++p) {
    std::string text;
    for (int s = 1; s <= 5; ++s) {
      text += "Sentence " + std::to_string(p * 5 + s) + " says something plain. ";
    }
    paragraphs.push_back(text);
  }
  Article article = make_article(paragraphs, "https://news.example/a", "Plain Title");
  EXPECT_EQ(article.sentence_count(), 10u);
  return article;
}

std::vector<std::size_t> numbered_sentences(const std::string& prompt) {
  auto start = prompt.find(std::string(kArticleSentencesMarker) + "\n");
  std::vector<std::size_t> out;
  if (start == std::string::npos) return out;
  static const std::regex kLine(R"(^\[(\d+)\] .*$)");
  std::istringstream in(prompt.substr(start));
  for (std::string line; std::getline(in, line);) {
    std::smatch m;
    if (std::regex_match(line, m, kLine)) out.push_back(std::stoul(m[1].str()));
  }
  return out;
}

ErrorCode error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected skeptik::Error";
  return ErrorCode::Io;
}

// Fails with `code` for the first `failures` calls, then answers "ok".
class FlakyProvider final : public Provider {
 public:
  FlakyProvider(int failures, ErrorCode code) : failures_(failures), code_(code) {}
  std::string id() const override { return "flaky"; }
  std::string complete(std::span<const Message>, const ProviderConfig&) override {
    ++calls;
    if (calls <= failures_) throw Error(code_, "stub failure");
    return "ok";
  }
  int calls = 0;

 private:
  int failures_;
  ErrorCode code_;
};

ProviderConfig flaky_config(int max_retries) {
  ProviderConfig config;
  config.provider_id = "flaky";
  config.max_retries = max_retries;
  return config;
}

TEST(DetectionPrompt, DefaultRegistryTenSentences) {
  auto prompt = build_detection_prompt(ten_sentence_article(), registry_default());
  EXPECT_EQ(testing::definition_block_codes(prompt.text),
            (std::vector<std::string>{"EBP", "ST", "RH", "CP", "FA", "HG", "PH", "FC", "VAG"}));
  EXPECT_EQ(numbered_sentences(prompt.text),
            (std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_EQ(prompt.article_sentence_count, 10u);
  EXPECT_EQ(prompt.registry_version, registry_default().version());
  EXPECT_FALSE(prompt.restricted_code.has_value());
  EXPECT_NE(prompt.text.find("Here are 9 fallacies."), std::string::npos);
}

TEST(DetectionPrompt, SectionsAppearInOrder) {
  auto text = build_detection_prompt(ten_sentence_article(), registry_default()).text;
  auto preamble = text.find("expert skilled in detecting logical fallacies");
  auto first_block = text.find("(EBP): ");
  auto instruction = text.find("Please state all logical fallacies");
  auto schema = text.find("{\"cases\": [{");
  auto levels = text.find("Level 1 (L1) focuses on immediate correction");
  auto links = text.find("Please only use Google or Bing");
  auto sentences = text.find("[1] Sentence 1");
  ASSERT_NE(preamble, std::string::npos);
  ASSERT_NE(sentences, std::string::npos);
  EXPECT_LT(preamble, first_block);
  EXPECT_LT(first_block, instruction);
  EXPECT_LT(instruction, schema);
  EXPECT_LT(schema, levels);
  EXPECT_LT(levels, links);
  EXPECT_LT(links, sentences);
}

TEST(DetectionPrompt, ExtendedRegistryHasTenBlocks) {
  auto registry = register_fallacy(
      registry_default(), {"FB", "False Balance", "Treating unequal evidence as equal.",
                           "One expert against one crank.", 5, 5, false, ""});
  auto prompt = build_detection_prompt(ten_sentence_article(), registry);
  EXPECT_EQ(testing::definition_block_codes(prompt.text).size(), 10u);
}

TEST(DetectionPrompt, Errors) {
  EXPECT_EQ(error_code_of([] { build_detection_prompt(make_article({}), registry_default()); }),
            ErrorCode::EmptyArticle);
  EXPECT_EQ(error_code_of([] { build_detection_prompt(ten_sentence_article(), FallacyRegistry{}); }),
            ErrorCode::EmptyRegistry);
}

TEST(DetectionPrompt, Deterministic) {
  auto article = ten_sentence_article();
  EXPECT_EQ(build_detection_prompt(article, registry_default()).text,
            build_detection_prompt(article, registry_default()).text);
}

TEST(DetectionPrompt, SentenceCapTruncates) {
  PromptOptions options;
  options.sentence_cap = 4;
  auto prompt = build_detection_prompt(ten_sentence_article(), registry_default(), options);
  EXPECT_EQ(numbered_sentences(prompt.text), (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_EQ(prompt.article_sentence_count, 4u);
}

TEST(RegenerationPrompt, OnlyNamedBlock) {
  auto prompt = build_regeneration_prompt(ten_sentence_article(), registry_default(), "CP");
  EXPECT_EQ(testing::definition_block_codes(prompt.text), (std::vector<std::string>{"CP"}));
  EXPECT_EQ(prompt.restricted_code, "CP");
  EXPECT_NE(prompt.text.find("Cherry Picking (CP)"), std::string::npos);
  EXPECT_EQ(prompt.text.find("Red Herring"), std::string::npos);
  EXPECT_EQ(numbered_sentences(prompt.text).size(), 10u);
  EXPECT_EQ(error_code_of([] {
              build_regeneration_prompt(ten_sentence_article(), registry_default(), "ZZ");
            }),
            ErrorCode::UnknownCode);
}

TEST(Gateway, MockIsDeterministic) {
  LlmGateway gateway;
  auto mock = std::make_shared<MockProvider>();
  gateway.register_provider(mock);
  Article article = make_article({"Trust me, it works. All of them agree."});
  auto prompt = build_detection_prompt(article, registry_default());
  ProviderConfig config;
  auto first = gateway.complete(prompt, config);
  EXPECT_EQ(first, gateway.complete(prompt, config));
  EXPECT_EQ(mock->call_count(), 2u);
  EXPECT_NE(first.find("\"EBP\""), std::string::npos);
  EXPECT_NE(first.find("\"HG\""), std::string::npos);
}

TEST(Gateway, RegenerationThroughMockIsDeterministic) {
  LlmGateway gateway;
  gateway.register_provider(std::make_shared<MockProvider>());
  Article article = make_article({"Only the figures from May were shown. Trust me on this."});
  auto prompt = build_regeneration_prompt(article, registry_default(), "CP");
  ProviderConfig config;
  auto first = gateway.complete(prompt, config);
  EXPECT_EQ(first, gateway.complete(prompt, config));
  EXPECT_NE(first.find("\"CP\""), std::string::npos);
  EXPECT_EQ(first.find("\"EBP\""), std::string::npos);
}

TEST(Gateway, UnregisteredProvider) {
  LlmGateway gateway;
  ProviderConfig config;
  config.provider_id = "nobody";
  DetectionPrompt prompt{"hi", "v", 1, std::nullopt};
  EXPECT_EQ(error_code_of([&] { gateway.complete(prompt, config); }),
            ErrorCode::ProviderUnavailable);
}

TEST(Gateway, NoRetryWhenMaxRetriesZero) {
  LlmGateway gateway;
  auto flaky = std::make_shared<FlakyProvider>(1, ErrorCode::ProviderUnavailable);
  gateway.register_provider(flaky);
  std::vector<std::chrono::milliseconds> sleeps;
  gateway.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  DetectionPrompt prompt{"hi", "v", 1, std::nullopt};
  EXPECT_EQ(error_code_of([&] { gateway.complete(prompt, flaky_config(0)); }),
            ErrorCode::ProviderUnavailable);
  EXPECT_EQ(flaky->calls, 1);
  EXPECT_TRUE(sleeps.empty());
}

TEST(Gateway, RetriesWithExponentialJitteredBackoff) {
  LlmGateway gateway;
  auto flaky = std::make_shared<FlakyProvider>(3, ErrorCode::Timeout);
  gateway.register_provider(flaky);
  std::vector<std::chrono::milliseconds> sleeps;
  gateway.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  DetectionPrompt prompt{"hi", "v", 1, std::nullopt};
  EXPECT_EQ(gateway.complete(prompt, flaky_config(3)), "ok");
  EXPECT_EQ(flaky->calls, 4);
  ASSERT_EQ(sleeps.size(), 3u);
  for (std::size_t i = 0; i < sleeps.size(); ++i) {
    const auto full = 500ms * (1 << i);
    EXPECT_GE(sleeps[i], full / 2) << i;
    EXPECT_LE(sleeps[i], full) << i;
  }
}

TEST(Gateway, RetriesExhausted) {
  LlmGateway gateway;
  auto flaky = std::make_shared<FlakyProvider>(10, ErrorCode::ProviderUnavailable);
  gateway.register_provider(flaky);
  gateway.set_sleeper([](std::chrono::milliseconds) {});
  DetectionPrompt prompt{"hi", "v", 1, std::nullopt};
  EXPECT_EQ(error_code_of([&] { gateway.complete(prompt, flaky_config(2)); }),
            ErrorCode::ProviderUnavailable);
  EXPECT_EQ(flaky->calls, 3);
}

TEST(Gateway, AuthFailureIsNotRetried) {
  LlmGateway gateway;
  auto flaky = std::make_shared<FlakyProvider>(1, ErrorCode::AuthFailure);
  gateway.register_provider(flaky);
  gateway.set_sleeper([](std::chrono::milliseconds) {});
  DetectionPrompt prompt{"hi", "v", 1, std::nullopt};
  EXPECT_EQ(error_code_of([&] { gateway.complete(prompt, flaky_config(5)); }),
            ErrorCode::AuthFailure);
  EXPECT_EQ(flaky->calls, 1);
}

TEST(Gateway, InvalidConfigRejected) {
  LlmGateway gateway;
  gateway.register_provider(std::make_shared<MockProvider>());
  ProviderConfig config;
  config.temperature = -0.1;
  DetectionPrompt prompt{"hi", "v", 1, std::nullopt};
  EXPECT_EQ(error_code_of([&] { gateway.complete(prompt, config); }), ErrorCode::InvalidConfig);
  config = {};
  config.max_retries = -1;
  EXPECT_EQ(error_code_of([&] { gateway.complete(prompt, config); }), ErrorCode::InvalidConfig);
}

TEST(Gateway, TemperatureDefaults) {
  EXPECT_EQ(ProviderConfig{}.temperature, kDetectionTemperature);
  EXPECT_EQ(kDetectionTemperature, 0.0);
  EXPECT_EQ(kChatTemperature, 0.7);
}

class ChatTest : public ::testing::Test {
 protected:
  void SetUp() override {
    gateway.register_provider(mock);
    config.temperature = kChatTemperature;
    const std::vector<std::string> layers = {"short note", "longer note", "context note"};
    session = start_chat_session(registry_default().at("CP"),
                                 {"Only the figures from May were shown."}, layers);
  }
  LlmGateway gateway;
  std::shared_ptr<MockProvider> mock = std::make_shared<MockProvider>();
  ProviderConfig config;
  ChatSession session;
};

TEST_F(ChatTest, FreshSessionSeededWithContext) {
  EXPECT_EQ(session.fallacy_code, "CP");
  EXPECT_TRUE(session.history.empty());
  EXPECT_EQ(session.session_id.size(), 32u);
  EXPECT_NE(session.preamble.find("Cherry Picking (CP)"), std::string::npos);
  EXPECT_NE(session.preamble.find("Only the figures from May were shown."), std::string::npos);
  EXPECT_NE(session.preamble.find("L3: context note"), std::string::npos);
  EXPECT_FALSE(session.created_at.empty());
}

TEST_F(ChatTest, OneTurnAppendsTwoMessages) {
  auto reply = chat_turn(session, "why is this cherry picking?", config, gateway);
  ASSERT_EQ(reply.session.history.size(), 2u);
  EXPECT_EQ(reply.session.history[0], (Message{Role::User, "why is this cherry picking?"}));
  EXPECT_EQ(reply.session.history[1].role, Role::Assistant);
  EXPECT_EQ(reply.session.history[1].text, reply.reply);
  EXPECT_NE(reply.reply.find("Cherry Picking (CP)"), std::string::npos);
  EXPECT_EQ(reply.session.session_id, session.session_id);
}

TEST_F(ChatTest, ThreeTurnsAlternateRoles) {
  ChatSession s = session;
  for (int i = 1; i <= 3; ++i) {
    auto reply = chat_turn(s, "question " + std::to_string(i), config, gateway);
    EXPECT_EQ(reply.reply.rfind("Turn " + std::to_string(i) + ":", 0), 0u);
    s = reply.session;
  }
  ASSERT_EQ(s.history.size(), 6u);
  for (std::size_t i = 0; i < s.history.size(); ++i) {
    EXPECT_EQ(s.history[i].role, i % 2 == 0 ? Role::User : Role::Assistant);
  }
}

TEST_F(ChatTest, EmptyMessageRejectedAndSessionUnchanged) {
  ChatSession before = session;
  EXPECT_EQ(error_code_of([&] { chat_turn(session, "  \n", config, gateway); }),
            ErrorCode::PreconditionViolation);
  EXPECT_EQ(session.history, before.history);
  EXPECT_EQ(mock->call_count(), 0u);
}

TEST_F(ChatTest, ProviderFailureLeavesHistoryUnchanged) {
  ProviderConfig broken = config;
  broken.provider_id = "missing";
  auto s = chat_turn(session, "first", config, gateway).session;
  EXPECT_EQ(error_code_of([&] { chat_turn(s, "second", broken, gateway); }),
            ErrorCode::ProviderUnavailable);
  EXPECT_EQ(s.history.size(), 2u);
}

// A local OpenAI-compatible endpoint exercising the HTTP provider.
class HttpProviderTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_auth = req.get_header_value("Authorization");
      last_body = req.body;
      if (status != 200) {
        res.status = status;
        return;
      }
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
      res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"hello back"}}]})",
                      "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  void TearDown() override {
    server.stop();
    thread.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }

  httplib::Server server;
  std::thread thread;
  int port = 0;
  int status = 200;
  std::chrono::milliseconds delay{0};
  std::string last_auth;
  std::string last_body;
};

TEST_F(HttpProviderTest, SendsChatCompletionRequest) {
  HttpChatProvider provider("openai", base(), "sk-test");
  ProviderConfig config;
  config.provider_id = "openai";
  config.model_name = "gpt-test";
  config.temperature = 0.7;
  std::vector<Message> messages = {{Role::System, "be brief"}, {Role::User, "hi"}};
  EXPECT_EQ(provider.complete(messages, config), "hello back");
  EXPECT_EQ(last_auth, "Bearer sk-test");
  auto body = nlohmann::json::parse(last_body);
  EXPECT_EQ(body["model"], "gpt-test");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.7);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "hi");
}

TEST_F(HttpProviderTest, MapsStatusCodes) {
  HttpChatProvider provider("openai", base(), "k");
  ProviderConfig config;
  std::vector<Message> messages = {{Role::User, "hi"}};
  status = 401;
  EXPECT_EQ(error_code_of([&] { provider.complete(messages, config); }), ErrorCode::AuthFailure);
  status = 504;
  EXPECT_EQ(error_code_of([&] { provider.complete(messages, config); }), ErrorCode::Timeout);
  status = 503;
  EXPECT_EQ(error_code_of([&] { provider.complete(messages, config); }),
            ErrorCode::ProviderUnavailable);
}

TEST_F(HttpProviderTest, ReadTimeout) {
  HttpChatProvider provider("openai", base(), "k");
  ProviderConfig config;
  config.timeout = 100ms;
  delay = 600ms;
  std::vector<Message> messages = {{Role::User, "hi"}};
  EXPECT_EQ(error_code_of([&] { provider.complete(messages, config); }), ErrorCode::Timeout);
}

TEST(HttpProvider, UnreachableHost) {
  HttpChatProvider provider("openai", "http://127.0.0.1:1", "k");
  ProviderConfig config;
  config.timeout = 500ms;
  std::vector<Message> messages = {{Role::User, "hi"}};
  EXPECT_EQ(error_code_of([&] { provider.complete(messages, config); }),
            ErrorCode::ProviderUnavailable);
}

}  // namespace
}  // namespace skeptik
