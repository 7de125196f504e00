#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "promptrl/model.hpp"
#include "promptrl/optimizer.hpp"
#include "promptrl/text.hpp"

namespace promptrl {

// Corrupt, truncated or incompatible checkpoint file.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint64_t step = 0;
  std::optional<Vocab> vocab;
  std::optional<OptimizerState> optimizer;
};

template <typename Scalar>
struct LoadedCheckpoint {
  PolicyModel<Scalar> model;
  Checkpoint meta;
};

// Layout: magic, version, scalar width, model config, step, parameter
// manifest, little-endian parameter payload, optional vocabulary, optional
// optimizer state, trailing CRC-32 of everything before it.
template <typename Scalar>
void save_checkpoint(const std::filesystem::path& path, const PolicyModel<Scalar>& model, const Checkpoint& meta);

template <typename Scalar = float>
LoadedCheckpoint<Scalar> load_checkpoint(const std::filesystem::path& path);

}  // namespace promptrl
