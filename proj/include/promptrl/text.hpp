#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptrl {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

inline constexpr std::size_t kDefaultMaxLen = 384;

// One instruction-following record: raw prompt x, instruction i, target y.
// x_o / y_o are the un-beautified originals when the record came out of the
// dataset pipeline.
struct PromptTriplet {
  std::string x;
  std::string i;
  std::string y;
  std::optional<std::string> x_o;
  std::optional<std::string> y_o;
  std::optional<std::string> meta;  // compact JSON object text

  const std::string& raw_prompt() const { return x_o ? *x_o : x; }
  const std::string& raw_target() const { return y_o ? *y_o : y; }

  bool operator==(const PromptTriplet&) const = default;
};

bool is_valid_utf8(std::string_view s);
std::string trim(std::string_view s);

// Throws std::invalid_argument when x, i or y is blank or any field is not UTF-8.
void validate(const PromptTriplet& t);

// Lowercased word-level split. Runs of letters, digits, apostrophes and
// non-ASCII bytes form words; every other non-space byte is its own token.
std::vector<std::string> split_tokens(std::string_view text);

// split_tokens joined by single spaces.
std::string normalize(std::string_view text);

struct VocabConfig {
  std::size_t max_size = 30000;  // including the four specials
};

class Vocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;
  static constexpr std::size_t kNumSpecial = 4;

  Vocab();
  // `words` are the non-special tokens; ids are assigned in order after the specials.
  explicit Vocab(std::vector<std::string> words);

  // Frequency-ranked (ties broken lexicographically) word vocabulary.
  static Vocab build(std::span<const std::string> corpus, const VocabConfig& config = {});

  TokenId id_of(std::string_view token) const;
  const std::string& token_of(TokenId id) const;
  bool contains(std::string_view token) const;
  bool is_special(TokenId id) const { return id >= 0 && id < static_cast<TokenId>(kNumSpecial); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> ids_;
};

const std::vector<std::string>& special_token_names();

// No bos/eos added; unknown words map to unk.
TokenSeq tokenize(std::string_view text, const Vocab& vocab);

// Space-joined tokens with specials dropped. Throws std::out_of_range on bad ids.
std::string detokenize(std::span<const TokenId> ids, const Vocab& vocab);

// The fixed SFT/RL prompt template.
std::string render_template(std::string_view x, std::string_view i);

// bos + tokenize(render_template(x, i))
TokenSeq encode_prefix(std::string_view x, std::string_view i, const Vocab& vocab);

}  // namespace promptrl
