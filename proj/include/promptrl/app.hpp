#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "promptrl/config.hpp"
#include "promptrl/eval.hpp"

namespace promptrl {

// Reward stack from the [rewards] weights and the PPO KL coefficient.
ScorerSet make_scorers(const AppConfig& config, const NlpEngine& nlp);

struct Corpus {
  std::vector<PromptTriplet> train;
  std::vector<PromptTriplet> test;  // the last data.holdout filtered records
  Vocab vocab;                      // built from the training split only
  FilterReport filter;
};

// Synthetic records for data.n and the top-level seed, filtered and split.
Corpus prepare_corpus(const AppConfig& config, const NlpEngine& nlp);

// Words of every rendered prompt and target.
Vocab build_training_vocab(std::span<const PromptTriplet> data, std::size_t max_size);

PolicyModel<float> new_model(const AppConfig& config, const Vocab& vocab);

// Samples one target per test record with config.sampling (fixed stream).
MethodEvaluation evaluate_model(const PolicyModel<float>& model, const Vocab& vocab,
                                std::span<const PromptTriplet> test, const NlpEngine& nlp, const ScorerSet& scorers,
                                const SamplingConfig& sampling);

// Method rows in the given order; columns are the shared metric names.
MetricTable evaluation_table(std::string title, const std::vector<std::pair<std::string, MethodEvaluation>>& rows);

struct QuickstartResult {
  double sft_initial_loss = 0.0;
  double sft_final_loss = 0.0;
  MethodEvaluation reference, sft, rl;
};

// gen-data, build-vocab, sft, rl and eval in one process. Every artifact is
// written under out_dir; progress goes to `progress`.
QuickstartResult run_quickstart(const AppConfig& config, const std::filesystem::path& out_dir, std::ostream& progress);

}  // namespace promptrl
