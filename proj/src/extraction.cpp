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

#include "skeptik/extraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "skeptik/error.hpp"

namespace skeptik {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

const std::unordered_map<std::string_view, std::uint32_t>& named_entities() {
  static const std::unordered_map<std::string_view, std::uint32_t> table = {
      {"amp", '&'},      {"lt", '<'},        {"gt", '>'},
      {"quot", '"'},     {"apos", '\''},     {"nbsp", 0xA0},
      {"ndash", 0x2013}, {"mdash", 0x2014},  {"hellip", 0x2026},
      {"lsquo", 0x2018}, {"rsquo", 0x2019},  {"ldquo", 0x201C},
      {"rdquo", 0x201D}, {"copy", 0xA9},     {"reg", 0xAE},
      {"trade", 0x2122}, {"eacute", 0xE9},   {"egrave", 0xE8},
      {"aacute", 0xE1},  {"uuml", 0xFC},     {"ouml", 0xF6},
      {"auml", 0xE4},    {"ccedil", 0xE7},   {"laquo", 0xAB},
      {"raquo", 0xBB},   {"middot", 0xB7},   {"bull", 0x2022},
      {"euro", 0x20AC},  {"pound", 0xA3},    {"deg", 0xB0},
  };
  return table;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += text[i++];
      continue;
    }
    std::string_view name = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      std::string_view digits = name.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        int v = -1;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        if (v < 0 || cp > 0x10FFFF) {
          ok = false;
          break;
        }
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
      }
      if (ok) {
        append_utf8(out, cp);
        decoded = true;
      }
    } else if (auto it = named_entities().find(name);
               it != named_entities().end()) {
      append_utf8(out, it->second);
      decoded = true;
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out += text[i++];
    }
  }
  // Non-breaking spaces behave as ordinary whitespace for tokenization.
  std::string result;
  result.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (static_cast<unsigned char>(out[i]) == 0xC2 && i + 1 < out.size() &&
        static_cast<unsigned char>(out[i + 1]) == 0xA0) {
      result += ' ';
      ++i;
    } else {
      result += out[i];
    }
  }
  return result;
}

bool is_void_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 14> kVoid = {
      "area", "base", "br",   "col",   "embed",  "hr",    "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

bool is_raw_text_element(std::string_view tag) {
  return tag == "script" || tag == "style" || tag == "noscript" ||
         tag == "template" || tag == "textarea" || tag == "svg";
}

// Start tags that implicitly end an open paragraph.
bool closes_paragraph(std::string_view tag) {
  static constexpr std::array<std::string_view, 28> kBlock = {
      "address", "article", "aside",  "blockquote", "div",    "dl",
      "fieldset", "figure", "footer", "form",       "h1",     "h2",
      "h3",      "h4",      "h5",     "h6",         "header", "hr",
      "li",      "main",    "nav",    "ol",         "p",      "pre",
      "section", "table",   "ul",     "figcaption"};
  return std::find(kBlock.begin(), kBlock.end(), tag) != kBlock.end();
}

int heading_level(std::string_view tag) {
  if (tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6') {
    return tag[1] - '0';
  }
  return 0;
}

struct Block {
  std::size_t parent = 0;
  std::string text;
  std::string anchor_text;
  std::size_t words = 0;
  std::size_t anchor_words = 0;
};

struct Heading {
  int level = 0;
  std::string text;
  // Number of paragraph blocks that precede this heading.
  std::size_t blocks_before = 0;
};

struct ParsedPage {
  std::string title;
  std::vector<Block> blocks;
  std::vector<Heading> headings;
};

struct OpenElement {
  std::string tag;
  std::size_t id = 0;
};

class PageParser {
 public:
  explicit PageParser(std::string_view html) : html_(html) {}

  ParsedPage parse() {
    stack_.push_back({"#document", next_id_++});
    std::size_t i = 0;
    while (i < html_.size()) {
      if (html_[i] == '<') {
        i = consume_markup(i);
      } else {
        auto next = html_.find('<', i);
        if (next == std::string_view::npos) next = html_.size();
        on_text(html_.substr(i, next - i));
        i = next;
      }
    }
    close_paragraph();
    flush_heading();
    return std::move(page_);
  }

 private:
  std::size_t consume_markup(std::size_t i) {
    if (html_.compare(i, 4, "<!--") == 0) {
      auto end = html_.find("-->", i + 4);
      return end == std::string_view::npos ? html_.size() : end + 3;
    }
    if (i + 1 < html_.size() && (html_[i + 1] == '!' || html_[i + 1] == '?')) {
      auto end = html_.find('>', i);
      return end == std::string_view::npos ? html_.size() : end + 1;
    }
    bool closing = i + 1 < html_.size() && html_[i + 1] == '/';
    std::size_t name_start = i + (closing ? 2 : 1);
    std::size_t j = name_start;
    while (j < html_.size() &&
           (std::isalnum(static_cast<unsigned char>(html_[j])) ||
            html_[j] == '-' || html_[j] == ':')) {
      ++j;
    }
    if (j == name_start) {
      // A bare '<' in text.
      on_text(html_.substr(i, 1));
      return i + 1;
    }
    std::string tag = to_lower(html_.substr(name_start, j - name_start));
    // Find the end of the tag, respecting quoted attribute values.
    char quote = 0;
    std::size_t k = j;
    for (; k < html_.size(); ++k) {
      char c = html_[k];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      }
    }
    bool self_closing = k > 0 && k < html_.size() && html_[k - 1] == '/';
    std::size_t after = k < html_.size() ? k + 1 : html_.size();

    if (closing) {
      on_end_tag(tag);
      return after;
    }
    if (is_raw_text_element(tag) && !self_closing) {
      std::string close = "</" + tag;
      std::size_t pos = after;
      while (pos < html_.size()) {
        auto found = html_.find('<', pos);
        if (found == std::string_view::npos) return html_.size();
        if (to_lower(html_.substr(found, close.size())) == close) {
          auto end = html_.find('>', found);
          return end == std::string_view::npos ? html_.size() : end + 1;
        }
        pos = found + 1;
      }
      return html_.size();
    }
    on_start_tag(tag, self_closing);
    return after;
  }

  void on_start_tag(const std::string& tag, bool self_closing) {
    if (tag == "br") {
      on_text(" ");
      return;
    }
    if (closes_paragraph(tag)) close_paragraph();
    if (heading_level(tag) > 0) flush_heading();
    if (is_void_element(tag) || self_closing) return;

    std::size_t id = next_id_++;
    if (tag == "p") {
      Block block;
      block.parent = stack_.back().id;
      current_block_ = std::move(block);
    } else if (tag == "a") {
      ++anchor_depth_;
    } else if (tag == "title") {
      in_title_ = true;
    } else if (int level = heading_level(tag); level > 0) {
      heading_ = Heading{level, {}, page_.blocks.size()};
    }
    stack_.push_back({tag, id});
  }

  void on_end_tag(const std::string& tag) {
    auto it = std::find_if(stack_.rbegin(), stack_.rend(),
                           [&](const OpenElement& e) { return e.tag == tag; });
    if (it == stack_.rend()) return;
    std::size_t depth = static_cast<std::size_t>(stack_.rend() - it) - 1;
    while (stack_.size() > depth) {
      const std::string popped = stack_.back().tag;
      stack_.pop_back();
      if (popped == "p") finish_block();
      else if (popped == "a" && anchor_depth_ > 0) --anchor_depth_;
      else if (popped == "title") in_title_ = false;
      else if (heading_level(popped) > 0) flush_heading();
    }
  }

  void close_paragraph() {
    auto it = std::find_if(stack_.rbegin(), stack_.rend(),
                           [](const OpenElement& e) { return e.tag == "p"; });
    if (it != stack_.rend()) on_end_tag("p");
  }

  void finish_block() {
    if (!current_block_) return;
    Block block = std::move(*current_block_);
    current_block_.reset();
    block.text = normalize_whitespace(decode_entities(block.text));
    block.anchor_text = decode_entities(block.anchor_text);
    block.words = count_words(block.text);
    block.anchor_words = count_words(block.anchor_text);
    if (block.words > 0) page_.blocks.push_back(std::move(block));
  }

  void flush_heading() {
    if (!heading_) return;
    heading_->text = normalize_whitespace(decode_entities(heading_->text));
    if (!heading_->text.empty()) page_.headings.push_back(std::move(*heading_));
    heading_.reset();
  }

  void on_text(std::string_view text) {
    if (in_title_) page_.title.append(text);
    if (heading_) heading_->text.append(text);
    if (current_block_) {
      current_block_->text.append(text);
      if (anchor_depth_ > 0) {
        current_block_->anchor_text.append(text);
        current_block_->anchor_text += ' ';
      }
    }
  }

  std::string_view html_;
  std::vector<OpenElement> stack_;
  std::size_t next_id_ = 0;
  std::optional<Block> current_block_;
  std::optional<Heading> heading_;
  int anchor_depth_ = 0;
  bool in_title_ = false;
  ParsedPage page_;
};

// Binary payloads and documents without a single tag are not HTML.
void check_html(std::string_view html) {
  std::size_t control = 0;
  for (char ch : html) {
    auto c = static_cast<unsigned char>(ch);
    if (c == 0) {
      throw Error(ErrorCode::MalformedInput, "input contains NUL bytes");
    }
    if (c < 0x20 && c != '\n' && c != '\r' && c != '\t' && c != '\f') {
      ++control;
    }
  }
  if (!html.empty() && control * 20 > html.size()) {
    throw Error(ErrorCode::MalformedInput, "input looks like binary data");
  }
  if (!looks_like_html(html)) {
    throw Error(ErrorCode::MalformedInput, "input contains no HTML markup");
  }
}

bool passes_link_density(const Block& block, double max_density) {
  return static_cast<double>(block.anchor_words) <=
         max_density * static_cast<double>(block.words);
}

constexpr std::array<std::string_view, 52> kAbbreviations = {
    "Mr.",   "Mrs.",  "Ms.",   "Dr.",   "Prof.", "Sr.",   "Jr.",  "St.",
    "Mt.",   "Gen.",  "Gov.",  "Sen.",  "Rep.",  "Rev.",  "Col.", "Lt.",
    "Sgt.",  "Capt.", "Adm.",  "Hon.",  "Pres.", "U.S.",  "U.K.", "U.N.",
    "E.U.",  "e.g.",  "i.e.",  "vs.",   "Inc.",  "Ltd.",  "Corp.", "Co.",
    "No.",   "Jan.",  "Feb.",  "Mar.",  "Apr.",  "Jun.",  "Jul.", "Aug.",
    "Sep.",  "Sept.", "Oct.",  "Nov.",  "Dec.",  "a.m.",  "p.m.", "Ph.D.",
    "approx.", "Ave.", "Blvd.", "Fig."};

bool is_closing_char(std::string_view text, std::size_t i, std::size_t* width) {
  char c = text[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') {
    *width = 1;
    return true;
  }
  // U+2019 and U+201D.
  if (text.compare(i, 3, "\xE2\x80\x99") == 0 ||
      text.compare(i, 3, "\xE2\x80\x9D") == 0) {
    *width = 3;
    return true;
  }
  return false;
}

bool starts_sentence(std::string_view text, std::size_t i) {
  auto c = static_cast<unsigned char>(text[i]);
  if (std::isupper(c) || std::isdigit(c)) return true;
  if (c == '"' || c == '\'' || c == '(' || c == '[') return true;
  // Any non-ASCII lead byte: accented capitals and opening curly quotes.
  return c >= 0xC0;
}

bool is_abbreviation(std::string_view text, std::size_t sentence_start,
                     std::size_t period) {
  std::size_t token_start = period;
  while (token_start > sentence_start && !is_space(text[token_start - 1])) {
    --token_start;
  }
  std::string_view token = text.substr(token_start, period - token_start + 1);
  while (!token.empty() && (token.front() == '(' || token.front() == '"' ||
                            token.front() == '\'')) {
    token.remove_prefix(1);
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) !=
         kAbbreviations.end();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

const std::string& Article::sentence(std::size_t index) const {
  if (index == 0 || index > sentences.size()) {
    throw std::out_of_range("sentence index out of range");
  }
  return sentences[index - 1];
}

std::string Article::body() const {
  std::string out;
  for (const auto& p : paragraphs) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

void ExtractionConfig::validate() const {
  if (min_paragraph_words == 0 || min_cluster_paragraphs == 0) {
    throw Error(ErrorCode::InvalidConfig,
                "extraction thresholds must be strictly positive");
  }
  if (!(link_density_max > 0.0 && link_density_max <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig,
                "link_density_max must lie in (0, 1]");
  }
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

std::size_t count_words(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::size_t word_count(const Article& article) {
  std::size_t total = 0;
  for (const auto& p : article.paragraphs) total += count_words(p);
  return total;
}

std::span<const std::string_view> sentence_abbreviations() {
  return kAbbreviations;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t terminator = i;
    std::size_t j = i + 1;
    while (j < text.size() &&
           (text[j] == '.' || text[j] == '!' || text[j] == '?')) {
      ++j;
    }
    std::size_t width = 0;
    while (j < text.size() && is_closing_char(text, j, &width)) j += width;

    bool single_period = c == '.' && j == terminator + 1;
    if (j < text.size() && is_space(text[j])) {
      std::size_t k = j;
      while (k < text.size() && is_space(text[k])) ++k;
      if (k < text.size() && starts_sentence(text, k) &&
          !(single_period && is_abbreviation(text, start, terminator))) {
        auto piece = trim(text.substr(start, j - start));
        if (!piece.empty()) out.emplace_back(piece);
        start = k;
        i = k;
        continue;
      }
    }
    i = j;
  }
  auto tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

Article make_article(std::vector<std::string> paragraphs,
                     std::optional<std::string> source_url,
                     std::optional<std::string> title) {
  Article article;
  article.source_url = std::move(source_url);
  article.title = std::move(title);
  for (auto& p : paragraphs) {
    std::string normalized = normalize_whitespace(p);
    if (normalized.empty()) continue;
    auto ordinal = article.paragraphs.size();
    for (auto& s : segment_sentences(normalized)) {
      article.sentences.push_back(std::move(s));
      article.sentence_paragraph.push_back(ordinal);
    }
    article.paragraphs.push_back(std::move(normalized));
  }
  article.word_count = word_count(article);
  return article;
}

bool looks_like_html(std::string_view input) {
  for (std::size_t i = 0; i + 1 < input.size(); ++i) {
    if (input[i] != '<') continue;
    char next = input[i + 1];
    if (std::isalpha(static_cast<unsigned char>(next)) || next == '!' ||
        next == '/') {
      auto close = input.find('>', i);
      if (close != std::string_view::npos) return true;
    }
  }
  return false;
}

Article extract_article(std::string_view html, const ExtractionConfig& config) {
  config.validate();
  check_html(html);
  ParsedPage page = PageParser(html).parse();

  // Runs of consecutive blocks sharing a parent element.
  struct Run {
    std::size_t first = 0;
    std::size_t last = 0;  // exclusive
    std::size_t words = 0;
    std::size_t candidates = 0;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < page.blocks.size(); ++i) {
    if (runs.empty() || page.blocks[runs.back().first].parent !=
                            page.blocks[i].parent) {
      runs.push_back({i, i, 0, 0});
    }
    Run& run = runs.back();
    run.last = i + 1;
    if (passes_link_density(page.blocks[i], config.link_density_max)) {
      run.words += page.blocks[i].words;
      ++run.candidates;
    }
  }

  const Run* best = nullptr;
  auto better = [](const Run* current, const Run& candidate) {
    return current == nullptr || candidate.words > current->words;
  };
  for (const auto& run : runs) {
    if (run.candidates >= config.min_cluster_paragraphs && run.words > 0 &&
        better(best, run)) {
      best = &run;
    }
  }
  if (best == nullptr) {
    for (const auto& run : runs) {
      if (run.words > 0 && better(best, run)) best = &run;
    }
  }
  if (best == nullptr) {
    throw Error(ErrorCode::NoContent, "no paragraph-level text found");
  }

  std::vector<std::string> paragraphs;
  for (std::size_t i = best->first; i < best->last; ++i) {
    const Block& block = page.blocks[i];
    if (block.words >= config.min_paragraph_words &&
        passes_link_density(block, config.link_density_max)) {
      paragraphs.push_back(block.text);
    }
  }
  if (paragraphs.empty()) {
    throw Error(ErrorCode::NoContent,
                "no paragraph meets the word-count threshold");
  }

  std::optional<std::string> title;
  int best_level = 7;
  for (const auto& h : page.headings) {
    if (h.blocks_before > best->first) break;
    if (h.level <= best_level) {
      best_level = h.level;
      title = h.text;
    }
  }
  if (!title) {
    std::string doc_title = normalize_whitespace(decode_entities(page.title));
    if (!doc_title.empty()) title = std::move(doc_title);
  }
  return make_article(std::move(paragraphs), std::nullopt, std::move(title));
}

Article article_from_text(std::string_view text,
                          std::optional<std::string> source_url,
                          std::optional<std::string> title) {
  std::vector<std::string> paragraphs;
  std::string current;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (trim(line).empty()) {
      if (!current.empty()) paragraphs.push_back(std::move(current));
      current.clear();
    } else {
      if (!current.empty()) current += ' ';
      current.append(line);
    }
    pos = eol + 1;
  }
  if (!current.empty()) paragraphs.push_back(std::move(current));
  Article article =
      make_article(std::move(paragraphs), std::move(source_url), std::move(title));
  if (article.paragraphs.empty()) {
    throw Error(ErrorCode::NoContent, "text input is empty");
  }
  return article;
}

std::string render_article_html(const Article& article) {
  auto escape = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
      }
    }
    return out;
  };
  std::string html = "<html><head><title>";
  if (article.title) html += escape(*article.title);
  html += "</title></head><body>\n";
  for (const auto& p : article.paragraphs) {
    html += "<p>" + escape(p) + "</p>\n";
  }
  html += "</body></html>\n";
  return html;
}

}  // namespace skeptik
