#include "promptrl/nlp.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "promptrl/text.hpp"

#ifndef PROMPTRL_RESOURCE_DIR
#define PROMPTRL_RESOURCE_DIR "resources"
#endif

namespace promptrl {

std::string_view to_string(PosTag tag) {
  switch (tag) {
    case PosTag::Noun: return "NOUN";
    case PosTag::Propn: return "PROPN";
    case PosTag::Adj: return "ADJ";
    case PosTag::Verb: return "VERB";
    case PosTag::Adv: return "ADV";
    case PosTag::Other: return "OTHER";
  }
  return "OTHER";
}

PosTag parse_pos_tag(std::string_view name) {
  if (name == "NOUN") return PosTag::Noun;
  if (name == "PROPN") return PosTag::Propn;
  if (name == "ADJ") return PosTag::Adj;
  if (name == "VERB") return PosTag::Verb;
  if (name == "ADV") return PosTag::Adv;
  if (name == "OTHER") return PosTag::Other;
  throw std::invalid_argument("unknown POS tag '" + std::string(name) + "'");
}

KeywordSet::KeywordSet(std::span<const std::string> lemmas) {
  for (const auto& l : lemmas) insert(l);
}

bool KeywordSet::insert(std::string lemma) {
  if (index_.contains(lemma)) return false;
  index_.insert(lemma);
  lemmas_.push_back(std::move(lemma));
  return true;
}

bool KeywordSet::contains(std::string_view lemma) const { return index_.find(lemma) != index_.end(); }

SynonymDict SynonymDict::from_groups(const std::vector<std::vector<std::string>>& groups) {
  // union-find over first-appearance order of lemmas
  std::vector<std::string> order;
  std::map<std::string, std::size_t, std::less<>> id;
  for (const auto& g : groups) {
    for (const auto& w : g) {
      if (id.emplace(w, order.size()).second) order.push_back(w);
    }
  }
  std::vector<std::size_t> parent(order.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& g : groups) {
    for (std::size_t k = 1; k < g.size(); ++k) {
      auto a = find(id.at(g[0]));
      auto b = find(id.at(g[k]));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  SynonymDict dict;
  std::map<std::size_t, std::size_t> slot;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto root = find(k);
    auto [it, inserted] = slot.emplace(root, dict.groups_.size());
    if (inserted) dict.groups_.emplace_back();
    dict.groups_[it->second].push_back(order[k]);
    dict.group_of_.emplace(order[k], it->second);
  }
  return dict;
}

SynonymDict SynonymDict::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read synonym file " + path.string());
  std::vector<std::vector<std::string>> groups;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> g;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      std::transform(item.begin(), item.end(), item.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (!item.empty()) g.push_back(item);
    }
    if (!g.empty()) groups.push_back(std::move(g));
  }
  auto dict = from_groups(groups);
  dict.verify();
  return dict;
}

std::vector<std::string> SynonymDict::group(std::string_view word) const {
  auto it = group_of_.find(word);
  if (it == group_of_.end()) return {std::string(word)};
  std::vector<std::string> out{std::string(word)};
  for (const auto& w : groups_[it->second]) {
    if (w != word) out.push_back(w);
  }
  return out;
}

std::set<std::string> SynonymDict::synonyms(std::string_view word) const {
  auto g = group(word);
  return {g.begin(), g.end()};
}

bool SynonymDict::are_synonyms(std::string_view a, std::string_view b) const {
  if (a == b) return true;
  auto ia = group_of_.find(a);
  auto ib = group_of_.find(b);
  return ia != group_of_.end() && ib != group_of_.end() && ia->second == ib->second;
}

void SynonymDict::verify() const {
  for (const auto& [w, gi] : group_of_) {
    const auto syn = synonyms(w);
    if (!syn.contains(w)) throw std::logic_error("synonym relation not reflexive for '" + w + "'");
    for (const auto& v : syn) {
      if (!synonyms(v).contains(w)) {
        throw std::logic_error("synonym relation not symmetric for '" + w + "' / '" + v + "'");
      }
    }
  }
}

std::vector<std::string> synonyms(std::string_view word, const SynonymDict& dict) { return dict.group(word); }

std::set<PosTag> default_keyword_candidates() { return {PosTag::Noun, PosTag::Propn, PosTag::Adj}; }

namespace {

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool doubled(std::string_view s) {
  return s.size() >= 3 && s.back() == s[s.size() - 2] &&
         std::string_view("aeiouylsfz").find(s.back()) == std::string_view::npos;
}

bool cvc(std::string_view s) {
  if (s.size() < 3) return false;
  const char c3 = s[s.size() - 1], c2 = s[s.size() - 2], c1 = s[s.size() - 3];
  return !is_vowel(c3) && c3 != 'w' && c3 != 'x' && c3 != 'y' && is_vowel(c2) && !is_vowel(c1);
}

std::string fix_stem(std::string_view s) {
  if (doubled(s)) return std::string(s.substr(0, s.size() - 1));
  if (cvc(s)) return std::string(s) + "e";
  return std::string(s);
}

bool strip_plural(std::string_view w, std::string& out) {
  if (w.size() > 4 && ends_with(w, "ies")) {
    out = std::string(w.substr(0, w.size() - 3)) + "y";
    return true;
  }
  for (auto suf : {"ches", "shes", "sses", "xes", "zes"}) {
    if (w.size() > 4 && ends_with(w, suf)) {
      out = std::string(w.substr(0, w.size() - 2));
      return true;
    }
  }
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
    out = std::string(w.substr(0, w.size() - 1));
    return true;
  }
  return false;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80) c = static_cast<char>(std::tolower(u));
  }
  return out;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, sep)) out.push_back(f);
  return out;
}

}  // namespace

// Keep in sync with tools/make_lexicon.py.
std::string rule_lemma(std::string_view word, PosTag tag) {
  const std::string w = lower(word);
  std::string out;
  switch (tag) {
    case PosTag::Noun:
      return strip_plural(w, out) ? out : w;
    case PosTag::Verb:
      if (strip_plural(w, out)) return out;
      if (w.size() > 4 && ends_with(w, "ied")) return w.substr(0, w.size() - 3) + "y";
      if (w.size() > 4 && ends_with(w, "ed")) return fix_stem(std::string_view(w).substr(0, w.size() - 2));
      if (w.size() > 5 && ends_with(w, "ing")) return fix_stem(std::string_view(w).substr(0, w.size() - 3));
      return w;
    case PosTag::Adj:
      if (w.size() > 5 && ends_with(w, "iest")) return w.substr(0, w.size() - 4) + "y";
      if (w.size() > 5 && ends_with(w, "est")) return fix_stem(std::string_view(w).substr(0, w.size() - 3));
      if (w.size() > 4 && ends_with(w, "ier")) return w.substr(0, w.size() - 3) + "y";
      if (w.size() > 4 && ends_with(w, "er")) return fix_stem(std::string_view(w).substr(0, w.size() - 2));
      return w;
    default:
      return w;
  }
}

NlpEngine::NlpEngine(Resources resources, std::set<PosTag> candidates)
    : res_(std::move(resources)), candidates_(std::move(candidates)) {}

NlpEngine NlpEngine::load(const std::filesystem::path& dir, std::set<PosTag> candidates) {
  Resources res;
  {
    std::ifstream in(dir / "lexicon.tsv");
    if (!in) throw std::runtime_error("cannot read lexicon " + (dir / "lexicon.tsv").string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto f = split_fields(line, '\t');
      if (f.size() != 2) throw std::runtime_error("lexicon.tsv:" + std::to_string(lineno) + ": expected word<TAB>TAG");
      res.lexicon[lower(f[0])] = parse_pos_tag(f[1]);
    }
  }
  {
    std::ifstream in(dir / "irregular.tsv");
    if (!in) throw std::runtime_error("cannot read irregular forms " + (dir / "irregular.tsv").string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      auto f = split_fields(line, '\t');
      if (f.size() != 3) {
        throw std::runtime_error("irregular.tsv:" + std::to_string(lineno) + ": expected surface<TAB>lemma<TAB>TAG");
      }
      res.irregular[{lower(f[0]), parse_pos_tag(f[2])}] = lower(f[1]);
    }
  }
  res.synonyms = SynonymDict::load(dir / "synonyms.txt");
  return NlpEngine(std::move(res), std::move(candidates));
}

std::vector<std::string> NlpEngine::split_words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : split_tokens(text)) {
    const bool wordy = std::any_of(t.begin(), t.end(), [](char c) {
      const auto u = static_cast<unsigned char>(c);
      return std::isalnum(u) || u >= 0x80;
    });
    if (wordy) out.push_back(std::move(t));
  }
  return out;
}

PosTag NlpEngine::tag_word(std::string_view word) const {
  if (word.empty()) throw std::invalid_argument("pos_tag: empty word");
  const std::string w = lower(word);
  if (auto it = res_.lexicon.find(w); it != res_.lexicon.end()) return it->second;
  for (auto tag : {PosTag::Verb, PosTag::Noun, PosTag::Adj}) {
    if (res_.irregular.contains({w, tag})) return tag;
  }
  auto longer = [&](std::string_view suf) { return w.size() > suf.size() + 2 && ends_with(w, suf); };
  if (longer("ly")) return PosTag::Adv;
  if (longer("ing") || longer("ed")) return PosTag::Verb;
  for (auto suf : {"ous", "ful", "ive", "able", "ible", "ic", "ish", "less"}) {
    if (longer(suf)) return PosTag::Adj;
  }
  return PosTag::Noun;
}

std::vector<TaggedWord> NlpEngine::pos_tag(std::span<const std::string> words) const {
  std::vector<TaggedWord> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back({w, tag_word(w)});
  return out;
}

std::string NlpEngine::lemmatize_one(const TaggedWord& word) const {
  const std::string w = lower(word.surface);
  if (auto it = res_.irregular.find({w, word.tag}); it != res_.irregular.end()) return it->second;
  auto lemma = rule_lemma(w, word.tag);
  // a stripped form that is itself an irregular inflection ("founded") stays as written
  if (lemma != w && res_.irregular.contains({lemma, word.tag})) return w;
  return lemma;
}

std::vector<std::string> NlpEngine::lemmatize(std::span<const TaggedWord> tagged) const {
  std::vector<std::string> out;
  out.reserve(tagged.size());
  for (const auto& t : tagged) out.push_back(lemmatize_one(t));
  return out;
}

std::vector<std::pair<std::string, PosTag>> NlpEngine::tagged_keywords(std::string_view text) const {
  std::vector<std::pair<std::string, PosTag>> out;
  std::set<std::string, std::less<>> seen;
  for (const auto& tw : pos_tag(split_words(text))) {
    if (!candidates_.contains(tw.tag)) continue;
    auto lemma = lemmatize_one(tw);
    if (seen.insert(lemma).second) out.emplace_back(std::move(lemma), tw.tag);
  }
  return out;
}

KeywordSet NlpEngine::extract_keywords(std::string_view text) const {
  KeywordSet set;
  for (auto& [lemma, tag] : tagged_keywords(text)) set.insert(std::move(lemma));
  return set;
}

std::vector<std::string> NlpEngine::lemmatized_words(std::string_view text) const {
  const auto words = split_words(text);
  const auto tagged = pos_tag(words);
  return lemmatize(tagged);
}

std::filesystem::path default_resource_dir() {
  if (const char* env = std::getenv("PROMPTRL_RESOURCES"); env != nullptr && *env != '\0') return env;
  return PROMPTRL_RESOURCE_DIR;
}

const NlpEngine& default_engine() {
  static const NlpEngine engine = NlpEngine::load(default_resource_dir());
  return engine;
}

}  // namespace promptrl
