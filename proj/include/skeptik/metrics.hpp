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

// Corpus statistics relating fallacy density to article bias and
// reliability: features, correlations, OLS, k-fold cross-validation.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skeptik/analysis.hpp"

namespace skeptik {

// Codes with a binary presence indicator feature.
inline constexpr std::array<std::string_view, 9> kIndicatorCodes = {
    "EBP", "ST", "RH", "CP", "FA", "HG", "PH", "FC", "VAG"};

struct FeatureVector {
  std::size_t fallacy_count = 0;
  double fallacies_per_1000_words = 0.0;
  std::size_t total_sentences_affected = 0;
  double total_sentences_affected_per_1000_words = 0.0;
  std::map<std::string, int, std::less<>> indicators;  // code -> 0/1

  bool operator==(const FeatureVector&) const = default;
};

// Throws PreconditionViolation when word_count is zero.
FeatureVector featurize(const AnalysisResult& analysis, std::size_t word_count);

// Names of the scalar features, in report order.
std::vector<std::string> feature_names();
// Values matching feature_names().
std::vector<double> feature_values(const FeatureVector& features);

// Sample Pearson correlation. Throws DegenerateInput for mismatched
// lengths, fewer than three points, or a constant vector.
double pearson(std::span<const double> x, std::span<const double> y);
// Pearson on average (fractional) ranks.
double spearman(std::span<const double> x, std::span<const double> y);
// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Two-sided p-value of H0: rho = 0 via t = r * sqrt((n - 2) / (1 - r^2))
// on n - 2 degrees of freedom.
double pearson_p_value(double r, std::size_t n);

using Matrix = std::vector<std::vector<double>>;  // row-major, n x p

struct OlsFit {
  // Intercept first, then one coefficient per design column.
  std::vector<double> coefficients;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double mse = 0.0;
  std::vector<double> residuals;
};

// Least squares with an intercept. Throws InsufficientData unless
// n > p + 1, and SingularDesign when the columns are collinear.
OlsFit ols_fit(const Matrix& x, std::span<const double> y);

enum class Target { Reliability, AbsBias };
std::string_view to_string(Target target);

struct CorpusRecord {
  std::string article_id;
  // Negative leans left, positive leans right.
  double bias = 0.0;
  double reliability = 0.0;
  std::optional<std::string> text;
  std::optional<AnalysisResult> analysis;
  std::optional<std::size_t> word_count;
  // Precomputed features take precedence over analysis + word_count.
  std::optional<FeatureVector> features;
};

// Throws PreconditionViolation if neither features nor analysis with a
// word count is available.
FeatureVector record_features(const CorpusRecord& record);
double target_value(const CorpusRecord& record, Target target);

// Deterministic Fisher-Yates permutation of 0..n-1 driven by mt19937_64.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);
// Near-equal split: the first n % k folds get one extra item.
std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k);

struct CvReport {
  std::size_t k = 0;
  double mean_mse = 0.0;
  // Population standard deviation over folds.
  double std_mse = 0.0;
  std::vector<double> fold_mse;
  std::vector<std::size_t> fold_sizes;
};

// Shuffles once with `seed`, fits OLS on k - 1 folds and scores MSE on the
// held-out fold. Throws InsufficientData when k < 2 or the corpus has fewer
// than k records.
CvReport kfold_cv(std::span<const CorpusRecord> records, Target target,
                  std::size_t k = 5, std::uint64_t seed = 0);

struct CorrelationEntry {
  std::string feature;
  Target target = Target::Reliability;
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> p_value;
};

struct RegressionReport {
  Target target = Target::Reliability;
  std::vector<std::string> features;
  std::vector<double> coefficients;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double mse = 0.0;
  CvReport cv;
};

struct HypothesisCheck {
  std::string name;
  std::string description;
  double pearson = 0.0;
  double p_value = 1.0;
  bool expected_sign = false;
  bool significant = false;
  bool supported = false;  // expected sign and significant
};

struct StatsReport {
  std::size_t n = 0;
  double alpha = 0.05;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  std::vector<CorrelationEntry> correlations;
  std::vector<RegressionReport> regressions;
  HypothesisCheck h1;  // fpkw vs reliability negative
  HypothesisCheck h2;  // fpkw vs |bias| positive
};

struct StudyOptions {
  double alpha = 0.05;
  std::size_t k = 5;
  std::uint64_t seed = 0;
};

// Records are processed in article_id order, so the report does not depend
// on input order. Throws PreconditionViolation for duplicate ids or a
// reliability outside [0, 64].
StatsReport run_study(std::vector<CorpusRecord> records, const StudyOptions& options = {});

nlohmann::ordered_json report_to_json(const StatsReport& report);
// Feature x target correlation grid, per-target fit quality and hypotheses.
std::string report_to_text(const StatsReport& report);

// Corpus file: comma-separated with a header row containing article_id,
// bias, reliability and text_path and/or analysis_path (paths relative to
// the corpus file), plus an optional word_count column.
std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path,
                                      const FallacyRegistry& registry);

// Runs the detection pipeline on records that carry text but no analysis.
void analyze_corpus(std::vector<CorpusRecord>& records, const FallacyRegistry& registry,
                    const LlmGateway& gateway, const ProviderConfig& config,
                    const AnalyzeOptions& options = {});

}  // namespace skeptik
