#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "promptrl/ci_score.hpp"
#include "promptrl/model.hpp"
#include "promptrl/nlp.hpp"
#include "promptrl/optimizer.hpp"
#include "promptrl/rewards.hpp"
#include "promptrl/sampler.hpp"
#include "promptrl/text.hpp"

namespace promptrl {

struct SftConfig {
  int epochs = 3;
  int batch_size = 64;
  int max_len = 384;
  double lr = 2e-5;
  double weight_decay = 0.0;
  Trainable unfreeze = Trainable::all();
  double adam_eps = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.95;
  std::uint64_t seed = 0;

  void validate() const;
};

// Reward-model column of the training table. Reward models are external
// scorers here, so these values are carried for completeness only.
struct RmConfig {
  int epochs = 1;
  int batch_size = 64;
  int max_len = 384;
  double lr = 5e-6;
  double weight_decay = 1e-3;
  Trainable unfreeze = Trainable::all();

  void validate() const;
};

struct PpoConfig {
  int epochs = 5;
  int batch_size = 128;
  int max_len = 384;
  double lr = 5e-6;
  double weight_decay = 1e-6;
  int unfreeze_last = 8;  // of a 24-block reference depth, see scaled_last_k
  double gamma = 0.99;
  double lam = 0.95;
  double clip_range = 0.2;
  double value_loss_scale = 0.5;
  double alpha_vci = 0.05;
  double kl_coef = 0.05;
  double p_typical = 0.97;
  double adam_eps = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.95;
  int inner_epochs = 4;
  bool normalize_advantages = true;
  double positive_share = 1.0;  // share of sampled rollouts drawn from the typical set
  double neg_prompt_prob = 0.04;
  double neg_remove_prob = 0.5;
  int max_new_tokens = 64;
  double divergence_limit = 10.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// base_lr * 0.5 * (1 + cos(pi * step / total_steps)).
double cosine_lr(long step, long total_steps, double base_lr);

struct SftExample {
  TokenSeq prefix;
  TokenSeq target;  // y tokens followed by eos
  bool truncated = false;
};

// Tail of the target is dropped when prefix + target exceeds max_len.
SftExample encode_sft_example(const PromptTriplet& t, const Vocab& vocab, int max_len);

struct SftLoss {
  double sequence_nll = 0.0;  // mean over examples of summed target NLL
  double token_nll = 0.0;     // summed NLL / number of target tokens
  long n_tokens = 0;
};

// Objective differentiated by sft_loss_and_grad.
enum class SftReduction { TokenMean, SequenceMean };

template <typename Scalar>
SftLoss sft_loss(const PolicyModel<Scalar>& model, std::span<const SftExample> batch);

// Adds the gradient of the chosen reduction to `grad`.
template <typename Scalar>
SftLoss sft_loss_and_grad(const PolicyModel<Scalar>& model, std::span<const SftExample> batch, Eigen::VectorXd& grad,
                          SftReduction reduction = SftReduction::TokenMean);

struct Gae {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Backward recursion with the value past the last step taken as 0.
Gae compute_gae(std::span<const double> rewards, std::span<const double> values_hat, double gamma, double lam);

// values[t] + alpha * raw CI of tokens[0..t).
std::vector<double> augment_values_vci(const NlpEngine& nlp, const Trajectory& traj, const CiContext& ctx,
                                       const Vocab& vocab, double alpha, const CiOptions& options = {});

struct PpoLosses {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double total = 0.0;
  double mean_abs_ratio_dev = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  long n_tokens = 0;
};

// Advantages normalized over every token of the batch.
std::vector<std::vector<double>> normalized_advantages(std::span<const Trajectory> batch, bool normalize);

// Clipped surrogate plus scaled squared value error against
// traj.value_targets (traj.returns when empty). traj.logprobs are the
// behaviour log-probs. Gradient of `total` is added to `grad` when given.
template <typename Scalar>
PpoLosses ppo_losses(const PolicyModel<Scalar>& model, std::span<const Trajectory> batch, const PpoConfig& config,
                     Eigen::VectorXd* grad = nullptr);

struct LogRecord {
  long step = 0;
  std::string phase;
  std::vector<std::pair<std::string, double>> values;
  std::vector<Perturbation> perturbations;

  double get(std::string_view key) const;
};

struct TrainLog {
  std::vector<LogRecord> records;

  // One JSON object per line, keys in insertion order, no timing fields.
  std::string to_jsonl() const;
  void write(const std::filesystem::path& path) const;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainHooks {
  // Called after each SFT epoch with the epoch index (from 1).
  std::function<void(int, const PolicyModel<float>&, const OptimizerState&)> on_epoch;
  // Called for every appended record.
  std::function<void(const LogRecord&)> on_record;
};

TrainLog train_sft(PolicyModel<float>& model, std::span<const PromptTriplet> dataset, const Vocab& vocab,
                   const SftConfig& config, const TrainHooks& hooks = {});

TrainLog train_rl(PolicyModel<float>& model, const ReferenceModel<float>& ref, std::span<const PromptTriplet> dataset,
                  const Vocab& vocab, const NlpEngine& nlp, const PpoConfig& config, const ScorerSet& scorers,
                  const TrainHooks& hooks = {});

// Content-integrity reference of a record (raw fields fall back to x and y).
CiContext context_for(const NlpEngine& nlp, const PromptTriplet& t);

}  // namespace promptrl
