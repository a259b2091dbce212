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

#include "skeptik/metrics.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "skeptik/error.hpp"

namespace skeptik {

namespace {

double per_thousand(std::size_t count, std::size_t words) {
  return static_cast<double>(count) / static_cast<double>(words) * 1000.0;
}

bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

Eigen::MatrixXd design_with_intercept(const Matrix& x, std::span<const std::size_t> rows,
                                      std::span<const std::size_t> columns) {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(columns.size() + 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    design(static_cast<Eigen::Index>(r), 0) = 1.0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c + 1)) =
          x[rows[r]][columns[c]];
    }
  }
  return design;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

// Greedily keeps non-constant columns that add rank to the design.
std::vector<std::size_t> independent_columns(const Matrix& x) {
  std::vector<std::size_t> chosen;
  if (x.empty()) return chosen;
  auto rows = iota_indices(x.size());
  for (std::size_t c = 0; c < x.front().size(); ++c) {
    std::vector<double> column;
    for (const auto& row : x) column.push_back(row[c]);
    if (all_equal(column)) continue;
    auto trial = chosen;
    trial.push_back(c);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_with_intercept(x, rows, trial));
    if (static_cast<std::size_t>(qr.rank()) == trial.size() + 1) chosen = std::move(trial);
  }
  return chosen;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  for (auto& f : fields) {
    auto b = f.find_first_not_of(" \t");
    auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "corpus: bad number for " + what + ": '" + text + "'");
  }
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

FeatureVector featurize(const AnalysisResult& analysis, std::size_t word_count) {
  if (word_count == 0) {
    throw Error(ErrorCode::PreconditionViolation, "word_count must be >= 1");
  }
  FeatureVector f;
  f.fallacy_count = analysis.detected.size();
  std::set<std::size_t> affected;
  for (const auto& d : analysis.detected) {
    affected.insert(d.sentence_indices.begin(), d.sentence_indices.end());
  }
  f.total_sentences_affected = affected.size();
  f.fallacies_per_1000_words = per_thousand(f.fallacy_count, word_count);
  f.total_sentences_affected_per_1000_words = per_thousand(f.total_sentences_affected, word_count);
  for (auto code : kIndicatorCodes) {
    f.indicators[std::string(code)] = analysis.find(code) != nullptr ? 1 : 0;
  }
  return f;
}

std::vector<std::string> feature_names() {
  std::vector<std::string> names = {"fallacy_count", "fallacies_per_1000_words",
                                    "total_sentences_affected",
                                    "total_sentences_affected_per_1000_words"};
  for (auto code : kIndicatorCodes) names.push_back("has_" + std::string(code));
  return names;
}

std::vector<double> feature_values(const FeatureVector& f) {
  std::vector<double> values = {static_cast<double>(f.fallacy_count),
                                f.fallacies_per_1000_words,
                                static_cast<double>(f.total_sentences_affected),
                                f.total_sentences_affected_per_1000_words};
  for (auto code : kIndicatorCodes) {
    auto it = f.indicators.find(code);
    values.push_back(it == f.indicators.end() ? 0.0 : static_cast<double>(it->second));
  }
  return values;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DegenerateInput, "length mismatch");
  if (x.size() < 3) throw Error(ErrorCode::DegenerateInput, "need at least 3 points");
  if (all_equal(x) || all_equal(y)) {
    throw Error(ErrorCode::DegenerateInput, "zero variance");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  auto order = iota_indices(values.size());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean((i+1)..(j+1)).
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DegenerateInput, "length mismatch");
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) throw Error(ErrorCode::DegenerateInput, "need at least 3 points");
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r2));
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

OlsFit ols_fit(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw Error(ErrorCode::PreconditionViolation, "X and y lengths differ");
  const std::size_t p = n == 0 ? 0 : x.front().size();
  for (const auto& row : x) {
    if (row.size() != p) throw Error(ErrorCode::PreconditionViolation, "ragged design matrix");
  }
  if (n <= p + 1) {
    throw Error(ErrorCode::InsufficientData,
                "need n > p + 1 (n = " + std::to_string(n) + ", p = " + std::to_string(p) + ")");
  }
  auto rows = iota_indices(n);
  auto cols = iota_indices(p);
  Eigen::MatrixXd design = design_with_intercept(x, rows, cols);
  Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (static_cast<std::size_t>(qr.rank()) < p + 1) {
    throw Error(ErrorCode::SingularDesign, "design columns are collinear");
  }
  Eigen::VectorXd beta = qr.solve(target);
  Eigen::VectorXd residuals = target - design * beta;

  OlsFit fit;
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.residuals.assign(residuals.data(), residuals.data() + residuals.size());
  const double ssr = residuals.squaredNorm();
  const double mean = target.mean();
  const double sst = (target.array() - mean).square().sum();
  fit.mse = ssr / static_cast<double>(n);
  fit.r2 = sst > 0.0 ? 1.0 - ssr / sst : (ssr == 0.0 ? 1.0 : 0.0);
  fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * static_cast<double>(n - 1) /
                              static_cast<double>(n - p - 1);
  return fit;
}

std::string_view to_string(Target target) {
  return target == Target::Reliability ? "reliability" : "abs_bias";
}

FeatureVector record_features(const CorpusRecord& record) {
  if (record.features) return *record.features;
  if (record.analysis && record.word_count) return featurize(*record.analysis, *record.word_count);
  throw Error(ErrorCode::PreconditionViolation,
              "record " + record.article_id + " has no analysis with a word count");
}

double target_value(const CorpusRecord& record, Target target) {
  return target == Target::Reliability ? record.reliability : std::abs(record.bias);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  auto out = iota_indices(n);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InsufficientData, "k must be >= 1");
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t i = 0; i < n % k; ++i) ++sizes[i];
  return sizes;
}

namespace {

struct Dataset {
  Matrix x;
  std::vector<double> y;
};

Dataset regression_data(std::span<const CorpusRecord> records, Target target) {
  // Raw counts are left out: fallacy_count equals the indicator sum.
  Dataset data;
  for (const auto& r : records) {
    auto values = feature_values(record_features(r));
    std::vector<double> row = {values[1], values[3]};
    row.insert(row.end(), values.begin() + 4, values.end());
    data.x.push_back(std::move(row));
    data.y.push_back(target_value(r, target));
  }
  return data;
}

std::vector<std::string> regression_feature_names() {
  auto all = feature_names();
  std::vector<std::string> names = {all[1], all[3]};
  names.insert(names.end(), all.begin() + 4, all.end());
  return names;
}

CvReport cross_validate(const Dataset& data, std::span<const std::size_t> columns,
                        std::size_t k, std::uint64_t seed) {
  const std::size_t n = data.y.size();
  if (k < 2) throw Error(ErrorCode::InsufficientData, "k must be >= 2");
  if (n < k) throw Error(ErrorCode::InsufficientData, "corpus smaller than k");
  CvReport report;
  report.k = k;
  report.fold_sizes = fold_sizes(n, k);
  auto order = shuffled_indices(n, seed);

  std::size_t offset = 0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(offset),
                                  order.begin() + static_cast<std::ptrdiff_t>(offset + report.fold_sizes[fold]));
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(offset));
    train.insert(train.end(), order.begin() + static_cast<std::ptrdiff_t>(offset + report.fold_sizes[fold]),
                 order.end());
    offset += report.fold_sizes[fold];

    Eigen::MatrixXd design = design_with_intercept(data.x, train, columns);
    Eigen::VectorXd target(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      target(static_cast<Eigen::Index>(i)) = data.y[train[i]];
    }
    // Minimum-norm solution keeps rank-deficient training folds usable.
    Eigen::VectorXd beta = design.completeOrthogonalDecomposition().solve(target);
    Eigen::MatrixXd held_out = design_with_intercept(data.x, test, columns);
    Eigen::VectorXd predicted = held_out * beta;
    double sse = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double e = data.y[test[i]] - predicted(static_cast<Eigen::Index>(i));
      sse += e * e;
    }
    report.fold_mse.push_back(sse / static_cast<double>(test.size()));
  }
  const double kd = static_cast<double>(k);
  report.mean_mse = std::accumulate(report.fold_mse.begin(), report.fold_mse.end(), 0.0) / kd;
  double var = 0.0;
  for (double m : report.fold_mse) var += (m - report.mean_mse) * (m - report.mean_mse);
  report.std_mse = std::sqrt(var / kd);
  return report;
}

HypothesisCheck check_hypothesis(std::string name, std::string description,
                                 std::span<const double> x, std::span<const double> y,
                                 bool expect_negative, double alpha) {
  HypothesisCheck h;
  h.name = std::move(name);
  h.description = std::move(description);
  try {
    h.pearson = pearson(x, y);
    h.p_value = pearson_p_value(h.pearson, x.size());
  } catch (const Error& err) {
    if (err.code() != ErrorCode::DegenerateInput) throw;
    h.pearson = 0.0;
    h.p_value = 1.0;
  }
  h.expected_sign = expect_negative ? h.pearson < 0.0 : h.pearson > 0.0;
  h.significant = h.p_value < alpha;
  h.supported = h.expected_sign && h.significant;
  return h;
}

}  // namespace

CvReport kfold_cv(std::span<const CorpusRecord> records, Target target, std::size_t k,
                  std::uint64_t seed) {
  Dataset data = regression_data(records, target);
  return cross_validate(data, independent_columns(data.x), k, seed);
}

StatsReport run_study(std::vector<CorpusRecord> records, const StudyOptions& options) {
  std::sort(records.begin(), records.end(),
            [](const CorpusRecord& a, const CorpusRecord& b) { return a.article_id < b.article_id; });
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0 && records[i].article_id == records[i - 1].article_id) {
      throw Error(ErrorCode::PreconditionViolation, "duplicate article_id " + records[i].article_id);
    }
    if (!(records[i].reliability >= 0.0 && records[i].reliability <= 64.0)) {
      throw Error(ErrorCode::PreconditionViolation,
                  "reliability outside [0, 64] for " + records[i].article_id);
    }
  }
  if (records.size() < 3) throw Error(ErrorCode::InsufficientData, "need at least 3 records");

  StatsReport report;
  report.n = records.size();
  report.alpha = options.alpha;
  report.k = options.k;
  report.seed = options.seed;

  const auto names = feature_names();
  std::vector<std::vector<double>> columns(names.size());
  std::vector<double> reliability, abs_bias;
  for (const auto& r : records) {
    auto values = feature_values(record_features(r));
    for (std::size_t c = 0; c < values.size(); ++c) columns[c].push_back(values[c]);
    reliability.push_back(target_value(r, Target::Reliability));
    abs_bias.push_back(target_value(r, Target::AbsBias));
  }

  for (Target target : {Target::Reliability, Target::AbsBias}) {
    const auto& y = target == Target::Reliability ? reliability : abs_bias;
    for (std::size_t c = 0; c < names.size(); ++c) {
      CorrelationEntry entry{names[c], target, std::nullopt, std::nullopt, std::nullopt};
      try {
        entry.pearson = pearson(columns[c], y);
        entry.p_value = pearson_p_value(*entry.pearson, y.size());
        entry.spearman = spearman(columns[c], y);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateInput) throw;
      }
      report.correlations.push_back(std::move(entry));
    }

    Dataset data = regression_data(records, target);
    auto chosen = independent_columns(data.x);
    Matrix design;
    for (const auto& row : data.x) {
      std::vector<double> picked;
      for (auto c : chosen) picked.push_back(row[c]);
      design.push_back(std::move(picked));
    }
    RegressionReport reg;
    reg.target = target;
    auto all_names = regression_feature_names();
    for (auto c : chosen) reg.features.push_back(all_names[c]);
    OlsFit fit = ols_fit(design, data.y);
    reg.coefficients = fit.coefficients;
    reg.r2 = fit.r2;
    reg.adjusted_r2 = fit.adjusted_r2;
    reg.mse = fit.mse;
    reg.cv = cross_validate(data, chosen, options.k, options.seed);
    report.regressions.push_back(std::move(reg));
  }

  const auto& fpkw = columns[1];
  report.h1 = check_hypothesis("H1",
                               "fallacies per 1000 words correlate negatively with reliability",
                               fpkw, reliability, true, options.alpha);
  report.h2 = check_hypothesis("H2",
                               "fallacies per 1000 words correlate positively with |bias|",
                               fpkw, abs_bias, false, options.alpha);
  return report;
}

nlohmann::ordered_json report_to_json(const StatsReport& report) {
  using nlohmann::ordered_json;
  ordered_json correlations = ordered_json::array();
  for (const auto& c : report.correlations) {
    correlations.push_back({{"feature", c.feature},
                            {"target", to_string(c.target)},
                            {"pearson", optional_number(c.pearson)},
                            {"spearman", optional_number(c.spearman)},
                            {"p_value", optional_number(c.p_value)}});
  }
  ordered_json ols = ordered_json::object();
  ordered_json cv = ordered_json::object();
  for (const auto& r : report.regressions) {
    ordered_json coefficients = ordered_json::object();
    coefficients["intercept"] = r.coefficients.front();
    for (std::size_t i = 0; i < r.features.size(); ++i) {
      coefficients[r.features[i]] = r.coefficients[i + 1];
    }
    ols[std::string(to_string(r.target))] = {{"coefficients", std::move(coefficients)},
                                             {"r2", r.r2},
                                             {"adjusted_r2", r.adjusted_r2},
                                             {"mse", r.mse}};
    cv[std::string(to_string(r.target))] = {{"k", r.cv.k},
                                            {"mean_mse", r.cv.mean_mse},
                                            {"std_mse", r.cv.std_mse},
                                            {"fold_mse", r.cv.fold_mse},
                                            {"fold_sizes", r.cv.fold_sizes}};
  }
  auto hypothesis = [](const HypothesisCheck& h) {
    return ordered_json{{"description", h.description},
                        {"pearson", h.pearson},
                        {"p_value", h.p_value},
                        {"expected_sign", h.expected_sign},
                        {"significant", h.significant},
                        {"supported", h.supported}};
  };
  return {{"n", report.n},
          {"alpha", report.alpha},
          {"correlations", std::move(correlations)},
          {"ols", std::move(ols)},
          {"cv", std::move(cv)},
          {"hypothesis_checks", {{"H1", hypothesis(report.h1)}, {"H2", hypothesis(report.h2)}}},
          {"metadata",
           {{"k", report.k},
            {"seed", report.seed},
            {"features_standardized", false},
            {"regressors", {"ols"}}}}};
}

std::string report_to_text(const StatsReport& report) {
  std::ostringstream out;
  char line[256];
  auto cell = [](const std::optional<double>& v) {
    char buf[16];
    if (v) std::snprintf(buf, sizeof buf, "%8.4f", *v);
    else std::snprintf(buf, sizeof buf, "%8s", "n/a");
    return std::string(buf);
  };
  std::snprintf(line, sizeof line, "Correlations (n = %zu)\n", report.n);
  out << line;
  std::snprintf(line, sizeof line, "%-42s %19s   %19s\n", "", "reliability", "abs_bias");
  out << line;
  std::snprintf(line, sizeof line, "%-42s %8s %10s   %8s %10s\n", "feature", "pearson",
                "spearman", "pearson", "spearman");
  out << line;
  const std::size_t features = report.correlations.size() / 2;
  for (std::size_t i = 0; i < features; ++i) {
    const auto& rel = report.correlations[i];
    const auto& bias = report.correlations[i + features];
    out << rel.feature << std::string(rel.feature.size() < 43 ? 43 - rel.feature.size() : 1, ' ')
        << cell(rel.pearson) << "   " << cell(rel.spearman) << "   " << cell(bias.pearson)
        << "   " << cell(bias.spearman) << "\n";
  }
  out << "\n";
  std::snprintf(line, sizeof line, "Linear regression (%zu-fold cross-validation)\n", report.k);
  out << line;
  std::snprintf(line, sizeof line, "%-12s %10s %10s %24s\n", "target", "adj_R2", "MSE",
                "CV MSE (mean +/- std)");
  out << line;
  for (const auto& r : report.regressions) {
    std::snprintf(line, sizeof line, "%-12s %10.4f %10.4f %13.4f +/- %7.4f\n",
                  std::string(to_string(r.target)).c_str(), r.adjusted_r2, r.mse,
                  r.cv.mean_mse, r.cv.std_mse);
    out << line;
  }
  out << "\n";
  std::snprintf(line, sizeof line, "Hypotheses (alpha = %.3f)\n", report.alpha);
  out << line;
  for (const auto* h : {&report.h1, &report.h2}) {
    std::snprintf(line, sizeof line, "%s: r = %.4f, p = %.3g -> %s (%s)\n", h->name.c_str(),
                  h->pearson, h->p_value, h->supported ? "supported" : "not supported",
                  h->description.c_str());
    out << line;
  }
  return out.str();
}

std::vector<CorpusRecord> load_corpus(const std::filesystem::path& path,
                                      const FallacyRegistry& registry) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidConfig, "corpus file is empty");
  auto header = split_csv_line(line);
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto id_col = column("article_id");
  auto bias_col = column("bias");
  auto rel_col = column("reliability");
  auto text_col = column("text_path");
  auto analysis_col = column("analysis_path");
  auto words_col = column("word_count");
  if (!id_col || !bias_col || !rel_col || (!text_col && !analysis_col)) {
    throw Error(ErrorCode::InvalidConfig,
                "corpus header needs article_id, bias, reliability and text_path or "
                "analysis_path");
  }
  const auto base = path.parent_path();
  std::vector<CorpusRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    fields.resize(std::max(fields.size(), header.size()));
    CorpusRecord r;
    r.article_id = fields[*id_col];
    if (r.article_id.empty()) {
      throw Error(ErrorCode::InvalidConfig, "corpus line " + std::to_string(line_no) + ": empty article_id");
    }
    r.bias = parse_double(fields[*bias_col], "bias");
    r.reliability = parse_double(fields[*rel_col], "reliability");
    if (words_col && !fields[*words_col].empty()) {
      r.word_count = static_cast<std::size_t>(parse_double(fields[*words_col], "word_count"));
    }
    if (analysis_col && !fields[*analysis_col].empty()) {
      std::string raw = read_file(base / fields[*analysis_col]);
      auto doc = nlohmann::json::parse(raw, nullptr, false);
      std::size_t count = std::numeric_limits<std::size_t>::max() / 2;
      if (!doc.is_discarded()) {
        auto ref = doc.value(nlohmann::json::json_pointer("/metadata/article_ref"),
                              nlohmann::json::object());
        if (ref.contains("sentence_count")) count = ref["sentence_count"].get<std::size_t>();
        if (!r.word_count && ref.contains("word_count")) {
          r.word_count = ref["word_count"].get<std::size_t>();
        }
      }
      r.analysis = parse_llm_response(raw, registry, count, ParseMode::Strict).result;
    } else if (text_col && !fields[*text_col].empty()) {
      r.text = read_file(base / fields[*text_col]);
    } else {
      throw Error(ErrorCode::InvalidConfig,
                  "corpus line " + std::to_string(line_no) + ": no text_path or analysis_path");
    }
    records.push_back(std::move(r));
  }
  return records;
}

void analyze_corpus(std::vector<CorpusRecord>& records, const FallacyRegistry& registry,
                    const LlmGateway& gateway, const ProviderConfig& config,
                    const AnalyzeOptions& options) {
  for (auto& r : records) {
    if (r.analysis || r.features || !r.text) continue;
    AnalysisInput input{looks_like_html(*r.text) ? AnalysisInput::Kind::Html
                                                 : AnalysisInput::Kind::Text,
                        *r.text};
    auto outcome = analyze(input, registry, gateway, config, options);
    if (!r.word_count) r.word_count = outcome.article.word_count;
    r.analysis = std::move(outcome.result);
  }
}

}  // namespace skeptik
