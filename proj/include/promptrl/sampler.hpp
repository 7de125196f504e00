#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptrl/model.hpp"
#include "promptrl/nlp.hpp"
#include "promptrl/text.hpp"

namespace promptrl {

enum class SamplingMode { Vanilla, AdmPositive, AdmNegative };

std::string_view to_string(SamplingMode mode);
SamplingMode parse_sampling_mode(std::string_view name);

struct SamplingConfig {
  SamplingMode mode = SamplingMode::AdmPositive;
  double p = 0.97;
  double neg_prompt_prob = 0.04;
  double neg_remove_prob = 0.5;
  int max_new_tokens = 64;
  double temperature = 1.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument.
  void validate() const;
};

// mt19937_64 stream; `stream` selects an independent sequence for the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

struct Perturbation {
  enum class Kind { None, Removed, Modified };
  Kind kind = Kind::None;
  std::string original;
  std::string replacement;
  PosTag tag = PosTag::Other;
  int position = -1;  // word index in the target text
  bool fallback = false;  // modification degraded to removal

  bool operator==(const Perturbation&) const = default;
};

std::string_view to_string(Perturbation::Kind kind);

struct TrajectoryMeta {
  SamplingMode mode = SamplingMode::AdmPositive;
  std::optional<Perturbation> perturbation;
};

// One rollout. All per-step vectors have |tokens| entries; step t is the
// state prefix + tokens[0..t) and the action tokens[t].
struct Trajectory {
  TokenSeq prefix;
  TokenSeq tokens;
  std::vector<double> logprobs;
  std::vector<double> ref_logprobs;
  std::vector<double> values;
  double terminal_reward = 0.0;
  std::vector<double> per_step_rewards;
  std::vector<double> advantages;
  std::vector<double> returns;
  // Regression targets for the raw value head.
  std::vector<double> value_targets;
  TrajectoryMeta meta;

  std::size_t size() const { return tokens.size(); }
};

// Locally typical set: tokens ordered by |-log q - H|, lower id first on ties,
// shortest prefix of that order with mass >= p. Returned in that order.
// Zero-probability tokens are never included; if rounding keeps every prefix
// below p the whole support is returned.
std::vector<TokenId> typical_set(std::span<const double> dist, double p);
std::vector<TokenId> typical_set(const Eigen::VectorXd& dist, double p);

// Softmax of logits / temperature in double precision.
template <typename Scalar>
Eigen::VectorXd next_token_distribution(const Vec<Scalar>& logits, double temperature = 1.0);

// Called once per sampled step with the distribution, the permitted ids
// (ascending) and the chosen id.
using StepObserver = std::function<void(const Eigen::VectorXd& dist, std::span<const TokenId> permitted, TokenId chosen)>;

// Draws one token from `dist` under `mode`. Candidates are scanned in
// ascending id order with a single uniform draw. AdmNegative samples as Vanilla.
TokenId sample_from(const Eigen::VectorXd& dist, SamplingMode mode, double p, Rng& rng,
                    const StepObserver& observer = {});

template <typename Scalar>
TokenId sample_step(const PolicyModel<Scalar>& model, std::span<const TokenId> prefix, const SamplingConfig& config,
                    Rng& rng);

// Per-step policy log-probs, values and reference log-probs for a fixed
// continuation of `prefix`.
template <typename Scalar>
Trajectory forced_trajectory(const PolicyModel<Scalar>& model, const ReferenceModel<Scalar>& ref, TokenSeq prefix,
                             TokenSeq tokens);

// Sampled continuation of `prefix` (eos included when drawn), at most
// max_new_tokens and never past the model's max_len.
template <typename Scalar>
TokenSeq sample_continuation(const PolicyModel<Scalar>& model, std::span<const TokenId> prefix,
                             const SamplingConfig& config, Rng& rng, const StepObserver& observer = {});

// Samples a continuation of the rendered template until eos or
// max_new_tokens (also capped by the model's max_len), then scores it with
// teacher forcing.
template <typename Scalar>
Trajectory generate(const PolicyModel<Scalar>& model, const ReferenceModel<Scalar>& ref, const Vocab& vocab,
                    std::string_view x, std::string_view i, const SamplingConfig& config, Rng& rng,
                    const StepObserver& observer = {});

// Training keywords by tag, sorted and deduplicated. A lemma is filed under a
// tag only when the tagger assigns it that tag on its own.
using KeywordPool = std::map<PosTag, std::vector<std::string>>;
KeywordPool build_keyword_pool(const NlpEngine& nlp, std::span<const std::string> texts);

struct PerturbResult {
  std::string text;
  Perturbation record;
};

// Keyword surgery on a target prompt: one keyword chosen uniformly is removed
// with probability remove_prob, else replaced by a same-tag pool keyword
// outside its synonym group (removal when none is eligible).
PerturbResult perturb_negative(const NlpEngine& nlp, std::string_view y, const KeywordPool& pool, double remove_prob,
                               Rng& rng);

struct NegativeSample {
  bool selected = false;
  std::string y;  // perturbed target when selected, else the original
  Perturbation record;
};

// Selects each triplet with probability neg_prompt_prob and perturbs its
// target. One entry per input triplet, in order.
std::vector<NegativeSample> build_negative_batch(const NlpEngine& nlp, std::span<const PromptTriplet> triplets,
                                                 const KeywordPool& pool, const SamplingConfig& config, Rng& rng);

}  // namespace promptrl
