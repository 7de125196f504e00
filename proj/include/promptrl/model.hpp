#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "promptrl/text.hpp"

namespace promptrl {

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int max_len = static_cast<int>(kDefaultMaxLen);
  std::uint64_t seed = 0;

  int head_dim() const { return d_model / n_heads; }
  int mlp_dim() const { return 4 * d_model; }
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

enum class ParamGroup { Embedding, Layer, FinalNorm, LmHead, ValueHead };

struct ParamBlock {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;
  ParamGroup group = ParamGroup::Embedding;
  int layer = -1;
  bool trainable = true;

  Eigen::Index size() const { return rows * cols; }
};

// Which transformer blocks receive updates. The value head is always trainable.
struct Trainable {
  enum class Kind { All, LastK } kind = Kind::All;
  int k = 0;

  static Trainable all() { return {}; }
  static Trainable last_k(int k) { return {Kind::LastK, k}; }
};

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// logits: [t x vocab], values: [t]; row j depends on tokens 0..j only.
template <typename Scalar>
struct PolicyOutput {
  RowMatrix<Scalar> logits;
  Vec<Scalar> values;
};

// Activations retained for the backward pass.
template <typename Scalar>
struct ForwardTape {
  struct Layer {
    RowMatrix<Scalar> xhat1, ln1, qkv, attn, xhat2, ln2, fc, act;
    Vec<Scalar> ln1_rstd, ln2_rstd;
    std::vector<RowMatrix<Scalar>> probs;  // per head, [t x t]
  };
  TokenSeq tokens;
  std::vector<Layer> layers;
  RowMatrix<Scalar> xhatf, lnf;
  Vec<Scalar> lnf_rstd;
  PolicyOutput<Scalar> out;
};

// Per-layer key/value cache for incremental decoding.
template <typename Scalar>
struct DecodeState {
  std::vector<RowMatrix<Scalar>> keys, vals;
  int length = 0;
};

template <typename Scalar>
struct StepOutput {
  Vec<Scalar> logits;
  Scalar value{};
};

// Pre-norm transformer decoder with learned positions, an LM head and a
// scalar value head sharing the trunk. Parameters live in one flat vector;
// blocks are views into it.
template <typename Scalar>
class PolicyModel {
 public:
  using Matrix = RowMatrix<Scalar>;
  using Vector = Vec<Scalar>;

  explicit PolicyModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  const std::vector<ParamBlock>& manifest() const { return blocks_; }
  const ParamBlock& block(std::string_view name) const;
  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }
  Eigen::Index num_parameters() const { return params_.size(); }

  Eigen::Map<Matrix> view(std::string_view name);
  Eigen::Map<const Matrix> view(std::string_view name) const;

  PolicyOutput<Scalar> forward(std::span<const TokenId> tokens) const;
  ForwardTape<Scalar> forward_tape(std::span<const TokenId> tokens) const;

  // Accumulates d(loss)/d(params) into `grad` (64-bit) given upstream
  // gradients of the logits and values. Propagation stops below the lowest
  // trainable block, so frozen blocks may receive no gradient.
  void backward(const ForwardTape<Scalar>& tape, const Matrix& dlogits, const Vector& dvalues,
                Eigen::VectorXd& grad) const;

  DecodeState<Scalar> begin_decode() const;
  StepOutput<Scalar> decode_step(DecodeState<Scalar>& state, TokenId token) const;

  void set_trainable(Trainable policy);
  bool is_trainable(const ParamBlock& b) const { return b.trainable; }
  // Flat indices of all trainable parameters, ascending.
  std::vector<Eigen::Index> trainable_indices() const;

 private:
  struct LayerIds {
    int ln1_g, ln1_b, w_qkv, b_qkv, w_o, b_o, ln2_g, ln2_b, w_fc, b_fc, w_proj, b_proj;
  };

  int add_block(std::string name, Eigen::Index rows, Eigen::Index cols, ParamGroup group, int layer);
  Eigen::Map<const Matrix> cview(int id) const;
  Eigen::Map<const Vector> cvec(int id) const;
  void check_tokens(std::span<const TokenId> tokens) const;
  int lowest_needed_layer() const;

  ModelConfig config_;
  std::vector<ParamBlock> blocks_;
  Vector params_;
  int tok_emb_ = -1, pos_emb_ = -1, lnf_g_ = -1, lnf_b_ = -1, w_lm_ = -1, b_lm_ = -1, w_v_ = -1, b_v_ = -1;
  std::vector<LayerIds> layers_;
};

// A frozen copy of a policy: only read-only access is exposed.
template <typename Scalar>
class ReferenceModel {
 public:
  explicit ReferenceModel(const PolicyModel<Scalar>& source) : model_(source) {}
  const PolicyModel<Scalar>& model() const { return model_; }
  PolicyOutput<Scalar> forward(std::span<const TokenId> tokens) const { return model_.forward(tokens); }

 private:
  PolicyModel<Scalar> model_;
};

template <typename Scalar>
ReferenceModel<Scalar> clone_reference(const PolicyModel<Scalar>& model) {
  return ReferenceModel<Scalar>(model);
}

// Row-wise log-softmax in double precision.
template <typename Scalar>
Eigen::MatrixXd log_softmax_rows(const RowMatrix<Scalar>& logits);

// Per-token log P(target_t | prefix, target_<t).
template <typename Scalar>
std::vector<double> log_prob(const PolicyModel<Scalar>& model, std::span<const TokenId> prefix,
                             std::span<const TokenId> target);

// Maps "train the last k of reference_layers blocks" onto a model with
// n_layers blocks: ceil(n_layers * k / reference_layers), exactly k when
// n_layers >= k.
int scaled_last_k(int n_layers, int k = 8, int reference_layers = 24);

extern template class PolicyModel<float>;
extern template class PolicyModel<double>;

}  // namespace promptrl
