#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace promptrl {

enum class PosTag { Noun, Propn, Adj, Verb, Adv, Other };

std::string_view to_string(PosTag tag);
PosTag parse_pos_tag(std::string_view name);

struct TaggedWord {
  std::string surface;
  PosTag tag;

  bool operator==(const TaggedWord&) const = default;
};

// Lemmas in first-occurrence order, no duplicates.
class KeywordSet {
 public:
  KeywordSet() = default;
  explicit KeywordSet(std::span<const std::string> lemmas);

  // Returns false if already present.
  bool insert(std::string lemma);
  bool contains(std::string_view lemma) const;
  std::size_t size() const { return lemmas_.size(); }
  bool empty() const { return lemmas_.empty(); }
  const std::vector<std::string>& lemmas() const { return lemmas_; }
  auto begin() const { return lemmas_.begin(); }
  auto end() const { return lemmas_.end(); }

  bool operator==(const KeywordSet& other) const { return lemmas_ == other.lemmas_; }

 private:
  std::vector<std::string> lemmas_;
  std::set<std::string, std::less<>> index_;
};

// Reflexive, symmetric synonym groups. Lines sharing a lemma are merged.
class SynonymDict {
 public:
  SynonymDict() = default;
  static SynonymDict from_groups(const std::vector<std::vector<std::string>>& groups);
  static SynonymDict load(const std::filesystem::path& path);

  // The word itself first, then the rest of its group in file order.
  // Unknown words map to {word}.
  std::vector<std::string> group(std::string_view word) const;
  std::set<std::string> synonyms(std::string_view word) const;
  bool are_synonyms(std::string_view a, std::string_view b) const;
  std::size_t num_groups() const { return groups_.size(); }

  // Throws std::logic_error if reflexivity or symmetry fails for any entry.
  void verify() const;

 private:
  std::vector<std::vector<std::string>> groups_;
  std::map<std::string, std::size_t, std::less<>> group_of_;
};

std::vector<std::string> synonyms(std::string_view word, const SynonymDict& dict);

std::set<PosTag> default_keyword_candidates();

// Rule-based tagger, lemmatizer and keyword extractor over shipped resources.
// Immutable after construction.
class NlpEngine {
 public:
  struct Resources {
    std::unordered_map<std::string, PosTag> lexicon;
    // (surface, tag) -> lemma
    std::map<std::pair<std::string, PosTag>, std::string> irregular;
    SynonymDict synonyms;
  };

  explicit NlpEngine(Resources resources, std::set<PosTag> candidates = default_keyword_candidates());

  // Reads lexicon.tsv, irregular.tsv and synonyms.txt from `dir`.
  static NlpEngine load(const std::filesystem::path& dir,
                        std::set<PosTag> candidates = default_keyword_candidates());

  // Lowercased words of `text`, punctuation dropped.
  static std::vector<std::string> split_words(std::string_view text);

  PosTag tag_word(std::string_view word) const;
  std::vector<TaggedWord> pos_tag(std::span<const std::string> words) const;
  std::string lemmatize_one(const TaggedWord& word) const;
  std::vector<std::string> lemmatize(std::span<const TaggedWord> tagged) const;
  KeywordSet extract_keywords(std::string_view text) const;
  // Keywords paired with the tag of their first occurrence.
  std::vector<std::pair<std::string, PosTag>> tagged_keywords(std::string_view text) const;
  // tag -> lemmatize over every word of `text`.
  std::vector<std::string> lemmatized_words(std::string_view text) const;

  const SynonymDict& synonym_dict() const { return res_.synonyms; }
  const std::set<PosTag>& candidates() const { return candidates_; }
  std::size_t lexicon_size() const { return res_.lexicon.size(); }
  const std::unordered_map<std::string, PosTag>& lexicon() const { return res_.lexicon; }

 private:
  Resources res_;
  std::set<PosTag> candidates_;
};

// Suffix-stripping lemma rules used when the irregular table has no entry.
std::string rule_lemma(std::string_view word, PosTag tag);

std::filesystem::path default_resource_dir();

// Engine over default_resource_dir(), loaded once.
const NlpEngine& default_engine();

}  // namespace promptrl
