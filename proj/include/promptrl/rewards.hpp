#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptrl/ci_score.hpp"
#include "promptrl/nlp.hpp"
#include "promptrl/process.hpp"
#include "promptrl/sampler.hpp"

namespace promptrl {

// What a scorer sees: the candidate prompt, the prompt it should improve on,
// and the content-integrity reference when one exists.
struct ScoreQuery {
  std::string_view prompt;
  std::string_view baseline;
  const CiContext* ctx = nullptr;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual double score(const ScoreQuery& query) const = 0;
  // Declared output range.
  virtual std::pair<double, double> bounds() const { return {0.0, 1.0}; }
};

std::vector<std::string> load_phrase_list(const std::filesystem::path& path);
const std::vector<std::string>& default_quality_modifiers();

// Share f of `modifiers` occurring as whole-token phrases in `prompt`,
// squashed as (1 - exp(-4 f)) / (1 - exp(-4)).
double score_aesthetic_proxy(std::string_view prompt, std::span<const std::string> modifiers);
double score_aesthetic_proxy(std::string_view prompt);

// Word count regularity in [-1, 0]: -min(|n - 30| / 30, 1).
double length_regularity(std::size_t n_words);

// 0.5 + 0.5 tanh(g) with g = (|Kp \ Kb| - |Kb \ Kp|) / max(1, |Kp u Kb|)
// + 0.1 (length_regularity(prompt) - length_regularity(baseline)).
double score_preference_proxy(const NlpEngine& nlp, std::string_view prompt, std::string_view baseline);

// Thresholded content-integrity score.
double ci_reward(const NlpEngine& nlp, const CiContext& ctx, std::string_view y, const CiOptions& options = {});

class AestheticProxy final : public Scorer {
 public:
  AestheticProxy() : AestheticProxy(default_quality_modifiers()) {}
  explicit AestheticProxy(std::vector<std::string> modifiers) : modifiers_(std::move(modifiers)) {}
  std::string name() const override { return "aesthetic"; }
  double score(const ScoreQuery& q) const override { return score_aesthetic_proxy(q.prompt, modifiers_); }

 private:
  std::vector<std::string> modifiers_;
};

class PreferenceProxy final : public Scorer {
 public:
  explicit PreferenceProxy(const NlpEngine& nlp) : nlp_(&nlp) {}
  std::string name() const override { return "preference"; }
  double score(const ScoreQuery& q) const override { return score_preference_proxy(*nlp_, q.prompt, q.baseline); }

 private:
  const NlpEngine* nlp_;
};

// Requires query.ctx.
class CiRewardScorer final : public Scorer {
 public:
  explicit CiRewardScorer(const NlpEngine& nlp, CiOptions options = {}) : nlp_(&nlp), options_(options) {}
  std::string name() const override { return "ci"; }
  double score(const ScoreQuery& q) const override;

 private:
  const NlpEngine* nlp_;
  CiOptions options_;
};

// Scores through a child process. Each request is one JSON line
// {"id", "prompt", "baseline"?}; each reply is {"id", "score"}.
class ExternalScorer final : public Scorer {
 public:
  ExternalScorer(std::string name, std::vector<std::string> argv, std::pair<double, double> bounds = {0.0, 1.0});
  std::string name() const override { return name_; }
  double score(const ScoreQuery& q) const override;
  std::pair<double, double> bounds() const override { return bounds_; }

 private:
  std::string name_;
  std::pair<double, double> bounds_;
  mutable LineProcess process_;
  mutable long next_id_ = 0;
};

struct ScorerSet {
  std::vector<std::shared_ptr<const Scorer>> scorers;
  std::vector<double> weights;
  double kl_coef = 0.05;

  // Weights 1/n each.
  static ScorerSet equal(std::vector<std::shared_ptr<const Scorer>> scorers, double kl_coef = 0.05);
  // Aesthetic, preference and CI proxies with equal weights.
  static ScorerSet standard(const NlpEngine& nlp, double kl_coef = 0.05);

  // Throws std::invalid_argument.
  void validate() const;
};

// kl_coef * (logprobs - ref_logprobs), elementwise.
std::vector<double> kl_penalty(std::span<const double> logprobs, std::span<const double> ref_logprobs, double kl_coef);

// Individual scorer outputs, in set order.
std::vector<double> score_components(const ScoreQuery& query, const ScorerSet& set);
double terminal_reward(const ScoreQuery& query, const ScorerSet& set);

// Fills terminal_reward and per_step_rewards; the task reward sits on the
// final step and every step pays its KL penalty.
void assign_rewards(Trajectory& traj, const ScoreQuery& query, const ScorerSet& set);

}  // namespace promptrl
