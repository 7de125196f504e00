#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "promptrl/ci_score.hpp"
#include "promptrl/model.hpp"
#include "promptrl/pipeline.hpp"
#include "promptrl/sampler.hpp"
#include "promptrl/trainer.hpp"

namespace promptrl {

struct RewardConfig {
  double w_aesthetic = 1.0 / 3.0;
  double w_preference = 1.0 / 3.0;
  double w_ci = 1.0 / 3.0;
};

struct DataConfig {
  std::size_t n = 2000;
  std::size_t holdout = 200;
  std::size_t vocab_max_size = 30000;
  FilterThresholds filter;
};

// Everything a command can be configured with. Seeds are not part of the
// file; the top-level seed is copied into every component.
struct AppConfig {
  std::uint64_t seed = 0;
  ModelConfig model;
  SftConfig sft;
  RmConfig rm;
  PpoConfig ppo;
  SamplingConfig sampling;
  RewardConfig rewards;
  CiOptions ci;
  DataConfig data;

  void propagate_seed();
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sections [model] [sft] [rm] [ppo] [sampling] [rewards] [ci] [data]; keys
// mirror the struct fields. `seed` may appear before the first section.
void apply_config_text(AppConfig& config, std::string_view text, std::string_view origin = "<config>");
AppConfig load_config(const std::filesystem::path& path);

// "section.key=value".
void apply_override(AppConfig& config, std::string_view assignment);

// Every key in a fixed order, parseable by apply_config_text.
std::string dump_config(const AppConfig& config);

std::string format_trainable(const Trainable& t);
Trainable parse_trainable(std::string_view text);

}  // namespace promptrl
