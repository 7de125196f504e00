#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptrl/ci_score.hpp"
#include "promptrl/nlp.hpp"
#include "promptrl/process.hpp"
#include "promptrl/text.hpp"

namespace promptrl {

// T_A: the target side is trusted, regenerate the source.
// T_B: the source side is trusted, regenerate the target.
enum class TemplateId { TA, TB };

std::string_view to_string(TemplateId id);

class RewriterClient {
 public:
  virtual ~RewriterClient() = default;
  virtual std::string rewrite(std::string_view prompt) = 0;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(TemplateId id, std::string_view known, std::string_view instruction) = 0;
};

class IdentityRewriter final : public RewriterClient {
 public:
  std::string rewrite(std::string_view prompt) override { return std::string(prompt); }
};

// Appends two to four quality modifiers picked by a hash of the prompt.
class RuleBeautifier final : public RewriterClient {
 public:
  RuleBeautifier();
  explicit RuleBeautifier(std::vector<std::string> modifiers);
  std::string rewrite(std::string_view prompt) override;

 private:
  std::vector<std::string> modifiers_;
};

// Answers from a table of known (source, instruction, target) records; for
// unknown queries it returns `known` unchanged.
class EchoChatClient final : public ChatClient {
 public:
  void remember(std::string_view source, std::string_view instruction, std::string_view target);
  std::string complete(TemplateId id, std::string_view known, std::string_view instruction) override;

 private:
  std::map<std::pair<std::string, std::string>, std::string> forward_, backward_;
};

// Offline stand-in for a chat model. T_B appends the instruction keywords
// missing from `known`; T_A drops words whose lemma is an instruction keyword.
class KeywordMergeChatClient final : public ChatClient {
 public:
  explicit KeywordMergeChatClient(const NlpEngine& nlp) : nlp_(&nlp) {}
  std::string complete(TemplateId id, std::string_view known, std::string_view instruction) override;

 private:
  const NlpEngine* nlp_;
};

// Request {"id", "prompt"}, reply {"id", "text"}.
class ExternalRewriter final : public RewriterClient {
 public:
  explicit ExternalRewriter(std::vector<std::string> argv) : process_(std::move(argv)) {}
  std::string rewrite(std::string_view prompt) override;

 private:
  LineProcess process_;
  long next_id_ = 0;
};

struct ChatTemplates {
  std::string a;  // placeholders {known} and {instruction}
  std::string b;

  static ChatTemplates load(const std::filesystem::path& dir);
  std::string render(TemplateId id, std::string_view known, std::string_view instruction) const;
};

// Request {"id", "template", "prompt", "known", "instruction"} where prompt
// is the rendered template; reply {"id", "text"}.
class ExternalChatClient final : public ChatClient {
 public:
  ExternalChatClient(std::vector<std::string> argv, ChatTemplates templates)
      : process_(std::move(argv)), templates_(std::move(templates)) {}
  std::string complete(TemplateId id, std::string_view known, std::string_view instruction) override;

 private:
  LineProcess process_;
  ChatTemplates templates_;
  long next_id_ = 0;
};

// |K(before) & K(after)| / max(1, |K(before)|).
double retention(const NlpEngine& nlp, std::string_view before, std::string_view after);

// T_A when the target pair keeps strictly more keywords, else T_B.
TemplateId choose_template(const NlpEngine& nlp, std::string_view x_o, std::string_view x, std::string_view y_o,
                           std::string_view y);

struct RawRecord {
  std::string x_o;
  std::string i;
  std::string y_o;
};

PromptTriplet build_triplet(const NlpEngine& nlp, const RawRecord& record, RewriterClient& rewriter, ChatClient& chat);

// Records whose clients throw are skipped and reported on stderr.
std::vector<PromptTriplet> build_corpus(const NlpEngine& nlp, std::span<const RawRecord> records,
                                        RewriterClient& rewriter, ChatClient& chat, std::size_t* skipped = nullptr);

struct FilterThresholds {
  double min_ci = 0.7;
  double min_aesthetic = 0.2;
  double min_preference = 0.0;
  double max_non_ascii_share = 0.2;
};

struct FilterReport {
  std::size_t input_count = 0;
  std::size_t kept = 0;
  std::size_t dropped_non_english = 0;
  std::size_t dropped_nsfw = 0;
  std::size_t dropped_low_score = 0;
};

// Share of letters that are non-ASCII code points.
double non_ascii_letter_share(std::string_view text);
bool contains_listed_phrase(std::string_view text, std::span<const std::string> phrases);
const std::vector<std::string>& default_nsfw_list();

// Checks run in order: non-English, wordlist, scores (aesthetic of y,
// preference of y over x, raw CI of y).
std::pair<std::vector<PromptTriplet>, FilterReport> filter_triplets(const NlpEngine& nlp,
                                                                    std::span<const PromptTriplet> triplets,
                                                                    const FilterThresholds& thresholds,
                                                                    std::span<const std::string> wordlist);

// Grammar-generated raw records (x_o, i, y_o).
std::vector<RawRecord> generate_raw_records(std::size_t n, std::uint64_t seed);

// Raw records beautified with the same sampled quality modifiers on both sides.
std::vector<PromptTriplet> generate_synthetic_corpus(std::size_t n, std::uint64_t seed);

// Keys x, i, y and optional x_o, y_o, meta.
std::vector<PromptTriplet> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, std::span<const PromptTriplet> triplets);

// Keys x_o, i, y_o.
std::vector<RawRecord> read_raw_jsonl(const std::filesystem::path& path);

}  // namespace promptrl
