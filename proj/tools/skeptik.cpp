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

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "skeptik/analysis.hpp"
#include "skeptik/error.hpp"
#include "skeptik/metrics.hpp"
#include "skeptik/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

skeptik::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

std::string read_input_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw skeptik::Error(skeptik::ErrorCode::Io, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

skeptik::ServiceConfig base_config(const std::optional<std::string>& config_path) {
  skeptik::ServiceConfig config =
      config_path ? skeptik::load_service_config(*config_path) : skeptik::ServiceConfig{};
  skeptik::apply_env_overrides(config);
  return config;
}

skeptik::AnalyzeOptions analyze_options(const skeptik::ServiceConfig& config) {
  skeptik::AnalyzeOptions options;
  options.mode = config.parse_mode;
  options.parse_retries = config.parse_retries;
  options.prompt = config.prompt;
  options.extraction = config.extraction;
  options.fetcher = skeptik::fetch_url;
  return options;
}

int run_analyze(const std::string& target, bool pretty,
                const std::optional<std::string>& config_path) {
  auto config = base_config(config_path);
  config.provider.validate();
  auto registry = skeptik::load_active_registry(config);
  auto gateway = skeptik::build_gateway(config);

  skeptik::AnalysisInput input;
  if (target.rfind("https://", 0) == 0 || target.rfind("http://", 0) == 0) {
    input.kind = skeptik::AnalysisInput::Kind::Url;
    input.value = target;
  } else {
    input.value = read_input_file(target);
    input.kind = skeptik::looks_like_html(input.value) ? skeptik::AnalysisInput::Kind::Html
                                                       : skeptik::AnalysisInput::Kind::Text;
  }
  auto outcome = skeptik::analyze(input, registry, *gateway, config.provider,
                                  analyze_options(config));
  for (const auto& warning : outcome.warnings) std::cerr << "warning: " << warning << "\n";
  auto doc = skeptik::result_to_json(outcome.result, &outcome.article);
  std::cout << (pretty ? doc.dump(2) : doc.dump()) << "\n";
  return kExitOk;
}

int run_metrics(const std::string& corpus, const std::string& out, std::size_t k,
                std::uint64_t seed, const std::optional<std::string>& config_path) {
  auto config = base_config(config_path);
  auto registry = skeptik::load_active_registry(config);
  auto records = skeptik::load_corpus(corpus, registry);
  bool needs_analysis = false;
  for (const auto& r : records) needs_analysis = needs_analysis || (!r.analysis && !r.features);
  if (needs_analysis) {
    config.provider.validate();
    auto gateway = skeptik::build_gateway(config);
    skeptik::analyze_corpus(records, registry, *gateway, config.provider,
                            analyze_options(config));
  }
  skeptik::StudyOptions options;
  options.k = k;
  options.seed = seed;
  auto report = skeptik::run_study(std::move(records), options);

  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw skeptik::Error(skeptik::ErrorCode::Io, "cannot write " + out);
  file << skeptik::report_to_json(report).dump(2) << "\n";
  if (!file) throw skeptik::Error(skeptik::ErrorCode::Io, "write failed: " + out);
  std::cout << skeptik::report_to_text(report);
  return kExitOk;
}

int run_serve(const std::optional<std::string>& config_path, std::optional<int> port) {
  auto config = base_config(config_path);
  if (port) config.port = *port;
  config.validate();
  auto registry = skeptik::load_active_registry(config);
  auto gateway = skeptik::build_gateway(config);
  auto service = std::make_shared<skeptik::Service>(config, registry, gateway);
  skeptik::HttpServer server(service);
  int bound = server.bind(config.host, config.port);
  std::cerr << "skeptik listening on http://" << config.host << ":" << bound
            << " (provider " << config.provider.provider_id << ", model "
            << config.provider.model_name << ")\n";
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logical fallacy detection for news articles"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "Service config file (JSON)")->check(CLI::ExistingFile);

  auto* analyze = app.add_subcommand("analyze", "Analyze an article URL or file");
  std::string target;
  bool as_json = false;
  bool pretty = false;
  analyze->add_option("target", target, "https URL, HTML file or plain-text file")->required();
  auto* json_flag = analyze->add_flag("--json", as_json, "Compact canonical JSON (default)");
  analyze->add_flag("--pretty", pretty, "Indented JSON")->excludes(json_flag);

  auto* metrics = app.add_subcommand("metrics", "Run the corpus study");
  std::string corpus;
  std::string out;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  metrics->add_option("corpus", corpus, "Corpus CSV file")->required()->check(CLI::ExistingFile);
  metrics->add_option("--out", out, "JSON report path")->required();
  metrics->add_option("--k", k, "Cross-validation folds")->check(CLI::Range(2, 1000000));
  metrics->add_option("--seed", seed, "Shuffle seed");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::optional<int> port;
  serve->add_option("--port", port, "Listen port (overrides config)")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed()) return run_analyze(target, pretty, config_path);
    if (metrics->parsed()) return run_metrics(corpus, out, k, seed, config_path);
    if (serve->parsed()) return run_serve(config_path, port);
  } catch (const skeptik::Error& e) {
    std::cerr << "error: " << skeptik::to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == skeptik::ErrorCode::InvalidConfig ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
