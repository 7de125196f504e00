#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptrl/model.hpp"
#include "promptrl/nlp.hpp"
#include "promptrl/rewards.hpp"
#include "promptrl/sampler.hpp"
#include "promptrl/text.hpp"

namespace promptrl {

enum class Direction { HigherBetter, LowerBetter };

struct MetricSpec {
  std::string name;
  Direction direction = Direction::HigherBetter;

  bool operator==(const MetricSpec&) const = default;
};

// values[method][metric]; std::nullopt marks a missing cell.
struct MetricTable {
  std::string title;
  std::vector<std::string> methods;
  std::vector<MetricSpec> metrics;
  std::vector<std::vector<std::optional<double>>> values;

  void validate() const;
  bool operator==(const MetricTable&) const = default;
};

// Per metric, rank 1 is best; tied methods share the mean of their ranks.
// Each method averages over the metrics where it has a value.
std::vector<double> average_ranking(const MetricTable& table);

using PromptGenerator = std::function<std::string(std::string_view x, std::string_view i)>;

struct MethodEvaluation {
  std::vector<std::pair<std::string, double>> means;  // scorer means, then "ci_raw" and "reward"
  std::size_t evaluated = 0;
  std::size_t skipped = 0;

  double get(std::string_view key) const;
};

// CI is reported before thresholding as "ci_raw". Records whose generator
// throws are skipped and counted.
MethodEvaluation evaluate_method(const PromptGenerator& generator, std::span<const PromptTriplet> testset,
                                 const NlpEngine& nlp, const ScorerSet& scorers);

// Samples with `config`; one Rng stream drives the whole test set.
PromptGenerator model_generator(const PolicyModel<float>& model, const Vocab& vocab, const SamplingConfig& config);

// Writes <stem>.txt (80-column text) and <stem>.json.
void emit_report(std::span<const MetricTable> tables, const std::filesystem::path& stem);
std::string format_report_text(std::span<const MetricTable> tables);
std::string format_report_json(std::span<const MetricTable> tables);
std::vector<MetricTable> parse_report_json(std::string_view json);

}  // namespace promptrl
