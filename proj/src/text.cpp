#include "promptrl/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace promptrl {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c >= 0x80;
}

constexpr std::string_view kTemplateHead =
    "Instruction: Give a description of the image and a modification to generate a drawing "
    "prompt.\nInput: ";
constexpr std::string_view kTemplateMid = "\nModification: ";
constexpr std::string_view kTemplateTail = "\nOutput:";

}  // namespace

bool is_valid_utf8(std::string_view s) {
  std::size_t k = 0;
  while (k < s.size()) {
    const auto c = static_cast<unsigned char>(s[k]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++k;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (k + extra >= s.size()) return false;
    for (std::size_t j = 1; j <= extra; ++j) {
      const auto cc = static_cast<unsigned char>(s[k + j]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // overlong encodings, surrogates, out of range
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
      return false;
    }
    k += extra + 1;
  }
  return true;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

void validate(const PromptTriplet& t) {
  auto check = [](std::string_view name, std::string_view v, bool required) {
    if (!is_valid_utf8(v)) throw std::invalid_argument("field '" + std::string(name) + "' is not valid UTF-8");
    if (required && trim(v).empty()) throw std::invalid_argument("field '" + std::string(name) + "' is empty");
  };
  check("x", t.x, true);
  check("i", t.i, true);
  check("y", t.y, true);
  if (t.x_o) check("x_o", *t.x_o, false);
  if (t.y_o) check("y_o", *t.y_o, false);
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
      continue;
    }
    if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
    if (!std::isspace(c)) out.emplace_back(1, ch);
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string normalize(std::string_view text) {
  std::string out;
  for (const auto& w : split_tokens(text)) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

const std::vector<std::string>& special_token_names() {
  static const std::vector<std::string> names{"<pad>", "<bos>", "<eos>", "<unk>"};
  return names;
}

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(std::vector<std::string> words) {
  tokens_ = special_token_names();
  tokens_.reserve(tokens_.size() + words.size());
  for (auto& w : words) tokens_.push_back(std::move(w));
  for (std::size_t k = 0; k < tokens_.size(); ++k) {
    auto [it, inserted] = ids_.emplace(tokens_[k], static_cast<TokenId>(k));
    if (!inserted) throw std::invalid_argument("duplicate vocabulary token '" + tokens_[k] + "'");
  }
}

Vocab Vocab::build(std::span<const std::string> corpus, const VocabConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("build_vocab: empty corpus");
  if (config.max_size < kNumSpecial) throw std::invalid_argument("build_vocab: max_size below special count");
  std::map<std::string, std::size_t> counts;
  for (const auto& text : corpus) {
    for (auto& w : split_tokens(text)) ++counts[w];
  }
  for (const auto& s : special_token_names()) counts.erase(s);
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t keep = std::min(ranked.size(), config.max_size - kNumSpecial);
  std::vector<std::string> words;
  words.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) words.push_back(ranked[k].first);
  return Vocab(std::move(words));
}

TokenId Vocab::id_of(std::string_view token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token_of(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocab::contains(std::string_view token) const { return ids_.find(token) != ids_.end(); }

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write vocabulary file " + path.string());
  const auto& sp = special_token_names();
  out << sp[0] << '\t' << sp[1] << '\t' << sp[2] << '\t' << sp[3] << '\n';
  for (std::size_t k = kNumSpecial; k < tokens_.size(); ++k) out << tokens_[k] << '\n';
  if (!out) throw std::runtime_error("failed writing vocabulary file " + path.string());
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read vocabulary file " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("vocabulary file is empty: " + path.string());
  const auto& sp = special_token_names();
  if (header != sp[0] + "\t" + sp[1] + "\t" + sp[2] + "\t" + sp[3]) {
    throw std::runtime_error("vocabulary header mismatch in " + path.string());
  }
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    words.push_back(line);
  }
  return Vocab(std::move(words));
}

TokenSeq tokenize(std::string_view text, const Vocab& vocab) {
  TokenSeq ids;
  for (const auto& w : split_tokens(text)) ids.push_back(vocab.id_of(w));
  return ids;
}

std::string detokenize(std::span<const TokenId> ids, const Vocab& vocab) {
  std::string out;
  for (TokenId id : ids) {
    const auto& tok = vocab.token_of(id);
    if (vocab.is_special(id)) continue;
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::string render_template(std::string_view x, std::string_view i) {
  std::string out;
  out.reserve(kTemplateHead.size() + kTemplateMid.size() + kTemplateTail.size() + x.size() + i.size());
  out += kTemplateHead;
  out += x;
  out += kTemplateMid;
  out += i;
  out += kTemplateTail;
  return out;
}

TokenSeq encode_prefix(std::string_view x, std::string_view i, const Vocab& vocab) {
  TokenSeq ids{Vocab::kBos};
  const auto body = tokenize(render_template(x, i), vocab);
  ids.insert(ids.end(), body.begin(), body.end());
  return ids;
}

}  // namespace promptrl
