#include "promptrl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace promptrl {

void ModelConfig::validate() const {
  if (vocab_size <= 0) throw std::invalid_argument("ModelConfig: vocab_size must be positive");
  if (d_model <= 0 || n_heads <= 0) throw std::invalid_argument("ModelConfig: d_model and n_heads must be positive");
  if (d_model % n_heads != 0) throw std::invalid_argument("ModelConfig: d_model must be divisible by n_heads");
  if (n_layers < 0) throw std::invalid_argument("ModelConfig: n_layers must be non-negative");
  if (max_len <= 0) throw std::invalid_argument("ModelConfig: max_len must be positive");
}

int scaled_last_k(int n_layers, int k, int reference_layers) {
  if (n_layers >= k) return k;
  const int scaled = (n_layers * k + reference_layers - 1) / reference_layers;
  return std::clamp(scaled, std::min(1, n_layers), n_layers);
}

namespace {

constexpr double kLnEps = 1e-5;

template <typename Scalar>
using Mat = RowMatrix<Scalar>;

// y = xhat * g + b, xhat = (x - mean) * rstd, per row
template <typename Scalar>
void layer_norm(const Mat<Scalar>& x, const Eigen::Map<const Vec<Scalar>>& g, const Eigen::Map<const Vec<Scalar>>& b,
                Mat<Scalar>& xhat, Mat<Scalar>& y, Vec<Scalar>& rstd) {
  const auto t = x.rows();
  const auto d = x.cols();
  xhat.resize(t, d);
  y.resize(t, d);
  rstd.resize(t);
  for (Eigen::Index r = 0; r < t; ++r) {
    const Scalar mean = x.row(r).mean();
    const Scalar var = (x.row(r).array() - mean).square().mean();
    const Scalar rs = Scalar(1) / std::sqrt(var + Scalar(kLnEps));
    rstd(r) = rs;
    xhat.row(r) = (x.row(r).array() - mean) * rs;
    y.row(r) = xhat.row(r).array() * g.transpose().array() + b.transpose().array();
  }
}

template <typename Scalar>
Mat<Scalar> layer_norm_backward(const Mat<Scalar>& dy, const Mat<Scalar>& xhat, const Vec<Scalar>& rstd,
                                const Eigen::Map<const Vec<Scalar>>& g, Vec<Scalar>& dg, Vec<Scalar>& db) {
  dg = (dy.array() * xhat.array()).colwise().sum().transpose();
  db = dy.colwise().sum().transpose();
  Mat<Scalar> dxhat = dy.array().rowwise() * g.transpose().array();
  Mat<Scalar> dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const Scalar m1 = dxhat.row(r).mean();
    const Scalar m2 = (dxhat.row(r).array() * xhat.row(r).array()).mean();
    dx.row(r) = rstd(r) * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
  }
  return dx;
}

template <typename Scalar>
constexpr Scalar kGeluC = Scalar(0.7978845608028654);  // sqrt(2/pi)
template <typename Scalar>
constexpr Scalar kGeluA = Scalar(0.044715);

template <typename Scalar>
Scalar gelu(Scalar u) {
  return Scalar(0.5) * u * (Scalar(1) + std::tanh(kGeluC<Scalar> * (u + kGeluA<Scalar> * u * u * u)));
}

template <typename Scalar>
Scalar gelu_grad(Scalar u) {
  const Scalar inner = kGeluC<Scalar> * (u + kGeluA<Scalar> * u * u * u);
  const Scalar t = std::tanh(inner);
  return Scalar(0.5) * (Scalar(1) + t) +
         Scalar(0.5) * u * (Scalar(1) - t * t) * kGeluC<Scalar> * (Scalar(1) + Scalar(3) * kGeluA<Scalar> * u * u);
}

template <typename Scalar>
void softmax_row_inplace(Mat<Scalar>& m, Eigen::Index r) {
  const Scalar mx = m.row(r).maxCoeff();
  m.row(r) = (m.row(r).array() - mx).exp();
  m.row(r) /= m.row(r).sum();
}

template <typename Derived>
void add_grad(Eigen::VectorXd& grad, const ParamBlock& b, const Eigen::MatrixBase<Derived>& g) {
  Eigen::Map<RowMatrix<double>> dst(grad.data() + b.offset, b.rows, b.cols);
  dst += g.template cast<double>();
}

}  // namespace

template <typename Scalar>
PolicyModel<Scalar>::PolicyModel(const ModelConfig& config) : config_(config) {
  config_.validate();
  const int d = config_.d_model;
  const int v = config_.vocab_size;
  const int f = config_.mlp_dim();
  tok_emb_ = add_block("tok_emb", v, d, ParamGroup::Embedding, -1);
  pos_emb_ = add_block("pos_emb", config_.max_len, d, ParamGroup::Embedding, -1);
  for (int l = 0; l < config_.n_layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    LayerIds ids{};
    ids.ln1_g = add_block(p + "ln1.g", d, 1, ParamGroup::Layer, l);
    ids.ln1_b = add_block(p + "ln1.b", d, 1, ParamGroup::Layer, l);
    ids.w_qkv = add_block(p + "attn.w_qkv", d, 3 * d, ParamGroup::Layer, l);
    ids.b_qkv = add_block(p + "attn.b_qkv", 3 * d, 1, ParamGroup::Layer, l);
    ids.w_o = add_block(p + "attn.w_o", d, d, ParamGroup::Layer, l);
    ids.b_o = add_block(p + "attn.b_o", d, 1, ParamGroup::Layer, l);
    ids.ln2_g = add_block(p + "ln2.g", d, 1, ParamGroup::Layer, l);
    ids.ln2_b = add_block(p + "ln2.b", d, 1, ParamGroup::Layer, l);
    ids.w_fc = add_block(p + "mlp.w_fc", d, f, ParamGroup::Layer, l);
    ids.b_fc = add_block(p + "mlp.b_fc", f, 1, ParamGroup::Layer, l);
    ids.w_proj = add_block(p + "mlp.w_proj", f, d, ParamGroup::Layer, l);
    ids.b_proj = add_block(p + "mlp.b_proj", d, 1, ParamGroup::Layer, l);
    layers_.push_back(ids);
  }
  lnf_g_ = add_block("lnf.g", d, 1, ParamGroup::FinalNorm, -1);
  lnf_b_ = add_block("lnf.b", d, 1, ParamGroup::FinalNorm, -1);
  w_lm_ = add_block("lm_head.w", d, v, ParamGroup::LmHead, -1);
  b_lm_ = add_block("lm_head.b", v, 1, ParamGroup::LmHead, -1);
  w_v_ = add_block("value_head.w", d, 1, ParamGroup::ValueHead, -1);
  b_v_ = add_block("value_head.b", 1, 1, ParamGroup::ValueHead, -1);

  params_ = Vector::Zero(blocks_.back().offset + blocks_.back().size());

  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double base = 0.02;
  const double resid = base / std::sqrt(2.0 * std::max(1, config_.n_layers));
  for (const auto& b : blocks_) {
    auto seg = params_.segment(b.offset, b.size());
    const bool gain = b.name.ends_with(".g");
    const bool bias = b.cols == 1 && !gain && b.name != "value_head.w";
    if (gain) {
      seg.setOnes();
    } else if (bias) {
      seg.setZero();
    } else {
      const double sd = (b.name.ends_with("w_o") || b.name.ends_with("w_proj")) ? resid : base;
      for (Eigen::Index k = 0; k < seg.size(); ++k) seg(k) = static_cast<Scalar>(sd * normal(rng));
    }
  }
}

template <typename Scalar>
int PolicyModel<Scalar>::add_block(std::string name, Eigen::Index rows, Eigen::Index cols, ParamGroup group,
                                   int layer) {
  const Eigen::Index offset = blocks_.empty() ? 0 : blocks_.back().offset + blocks_.back().size();
  blocks_.push_back({std::move(name), rows, cols, offset, group, layer, true});
  return static_cast<int>(blocks_.size()) - 1;
}

template <typename Scalar>
const ParamBlock& PolicyModel<Scalar>::block(std::string_view name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw std::out_of_range("no parameter block named '" + std::string(name) + "'");
}

template <typename Scalar>
Eigen::Map<typename PolicyModel<Scalar>::Matrix> PolicyModel<Scalar>::view(std::string_view name) {
  const auto& b = block(name);
  return Eigen::Map<Matrix>(params_.data() + b.offset, b.rows, b.cols);
}

template <typename Scalar>
Eigen::Map<const typename PolicyModel<Scalar>::Matrix> PolicyModel<Scalar>::view(std::string_view name) const {
  const auto& b = block(name);
  return Eigen::Map<const Matrix>(params_.data() + b.offset, b.rows, b.cols);
}

template <typename Scalar>
Eigen::Map<const typename PolicyModel<Scalar>::Matrix> PolicyModel<Scalar>::cview(int id) const {
  const auto& b = blocks_[static_cast<std::size_t>(id)];
  return Eigen::Map<const Matrix>(params_.data() + b.offset, b.rows, b.cols);
}

template <typename Scalar>
Eigen::Map<const typename PolicyModel<Scalar>::Vector> PolicyModel<Scalar>::cvec(int id) const {
  const auto& b = blocks_[static_cast<std::size_t>(id)];
  return Eigen::Map<const Vector>(params_.data() + b.offset, b.size());
}

template <typename Scalar>
void PolicyModel<Scalar>::check_tokens(std::span<const TokenId> tokens) const {
  if (tokens.size() > static_cast<std::size_t>(config_.max_len)) {
    throw std::length_error("sequence length " + std::to_string(tokens.size()) + " exceeds max_len " +
                            std::to_string(config_.max_len));
  }
  for (TokenId t : tokens) {
    if (t < 0 || t >= config_.vocab_size) throw std::out_of_range("token id " + std::to_string(t) + " out of range");
  }
}

template <typename Scalar>
ForwardTape<Scalar> PolicyModel<Scalar>::forward_tape(std::span<const TokenId> tokens) const {
  check_tokens(tokens);
  const auto t = static_cast<Eigen::Index>(tokens.size());
  const int d = config_.d_model;
  const int nh = config_.n_heads;
  const int dh = config_.head_dim();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

  ForwardTape<Scalar> tape;
  tape.tokens.assign(tokens.begin(), tokens.end());
  const auto emb = cview(tok_emb_);
  const auto pos = cview(pos_emb_);
  Matrix x(t, d);
  for (Eigen::Index r = 0; r < t; ++r) x.row(r) = emb.row(tokens[static_cast<std::size_t>(r)]) + pos.row(r);

  tape.layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& ids = layers_[l];
    auto& L = tape.layers[l];
    layer_norm<Scalar>(x, cvec(ids.ln1_g), cvec(ids.ln1_b), L.xhat1, L.ln1, L.ln1_rstd);
    L.qkv.noalias() = L.ln1 * cview(ids.w_qkv);
    L.qkv.rowwise() += cvec(ids.b_qkv).transpose();
    L.attn.resize(t, d);
    L.probs.resize(static_cast<std::size_t>(nh));
    for (int h = 0; h < nh; ++h) {
      const auto q = L.qkv.middleCols(h * dh, dh);
      const auto k = L.qkv.middleCols(d + h * dh, dh);
      const auto v = L.qkv.middleCols(2 * d + h * dh, dh);
      Matrix s = (q * k.transpose()) * scale;
      for (Eigen::Index r = 0; r < t; ++r) {
        if (r + 1 < t) s.row(r).tail(t - r - 1).setConstant(-std::numeric_limits<Scalar>::infinity());
        softmax_row_inplace<Scalar>(s, r);
      }
      L.attn.middleCols(h * dh, dh).noalias() = s * v;
      L.probs[static_cast<std::size_t>(h)] = std::move(s);
    }
    x.noalias() += L.attn * cview(ids.w_o);
    x.rowwise() += cvec(ids.b_o).transpose();
    layer_norm<Scalar>(x, cvec(ids.ln2_g), cvec(ids.ln2_b), L.xhat2, L.ln2, L.ln2_rstd);
    L.fc.noalias() = L.ln2 * cview(ids.w_fc);
    L.fc.rowwise() += cvec(ids.b_fc).transpose();
    L.act = L.fc.unaryExpr([](Scalar u) { return gelu(u); });
    x.noalias() += L.act * cview(ids.w_proj);
    x.rowwise() += cvec(ids.b_proj).transpose();
  }
  layer_norm<Scalar>(x, cvec(lnf_g_), cvec(lnf_b_), tape.xhatf, tape.lnf, tape.lnf_rstd);
  tape.out.logits.noalias() = tape.lnf * cview(w_lm_);
  tape.out.logits.rowwise() += cvec(b_lm_).transpose();
  tape.out.values = tape.lnf * cvec(w_v_);
  tape.out.values.array() += cvec(b_v_)(0);
  return tape;
}

template <typename Scalar>
PolicyOutput<Scalar> PolicyModel<Scalar>::forward(std::span<const TokenId> tokens) const {
  return std::move(forward_tape(tokens).out);
}

template <typename Scalar>
int PolicyModel<Scalar>::lowest_needed_layer() const {
  int lowest = config_.n_layers;
  for (const auto& b : blocks_) {
    if (!b.trainable) continue;
    if (b.group == ParamGroup::Embedding) return 0;
    if (b.group == ParamGroup::Layer) lowest = std::min(lowest, b.layer);
  }
  return lowest;
}

template <typename Scalar>
void PolicyModel<Scalar>::backward(const ForwardTape<Scalar>& tape, const Matrix& dlogits, const Vector& dvalues,
                                   Eigen::VectorXd& grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("backward: gradient size mismatch");
  const auto t = tape.out.logits.rows();
  if (dlogits.rows() != t || dlogits.cols() != config_.vocab_size || dvalues.size() != t) {
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  }
  const int d = config_.d_model;
  const int nh = config_.n_heads;
  const int dh = config_.head_dim();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  auto blk = [&](int id) -> const ParamBlock& { return blocks_[static_cast<std::size_t>(id)]; };

  add_grad(grad, blk(w_lm_), (tape.lnf.transpose() * dlogits).eval());
  add_grad(grad, blk(b_lm_), dlogits.colwise().sum().transpose().eval());
  add_grad(grad, blk(w_v_), (tape.lnf.transpose() * dvalues).eval());
  grad(blk(b_v_).offset) += static_cast<double>(dvalues.sum());

  Matrix dlnf = dlogits * cview(w_lm_).transpose();
  dlnf.noalias() += dvalues * cvec(w_v_).transpose();
  Vector dg, db;
  Matrix dx = layer_norm_backward<Scalar>(dlnf, tape.xhatf, tape.lnf_rstd, cvec(lnf_g_), dg, db);
  add_grad(grad, blk(lnf_g_), dg);
  add_grad(grad, blk(lnf_b_), db);

  const int lowest = lowest_needed_layer();
  for (int l = config_.n_layers - 1; l >= lowest; --l) {
    const auto& ids = layers_[static_cast<std::size_t>(l)];
    const auto& L = tape.layers[static_cast<std::size_t>(l)];

    // mlp residual branch
    add_grad(grad, blk(ids.w_proj), (L.act.transpose() * dx).eval());
    add_grad(grad, blk(ids.b_proj), dx.colwise().sum().transpose().eval());
    Matrix dfc = dx * cview(ids.w_proj).transpose();
    dfc.array() *= L.fc.unaryExpr([](Scalar u) { return gelu_grad(u); }).array();
    add_grad(grad, blk(ids.w_fc), (L.ln2.transpose() * dfc).eval());
    add_grad(grad, blk(ids.b_fc), dfc.colwise().sum().transpose().eval());
    Matrix dln2 = dfc * cview(ids.w_fc).transpose();
    dx += layer_norm_backward<Scalar>(dln2, L.xhat2, L.ln2_rstd, cvec(ids.ln2_g), dg, db);
    add_grad(grad, blk(ids.ln2_g), dg);
    add_grad(grad, blk(ids.ln2_b), db);

    // attention residual branch
    add_grad(grad, blk(ids.w_o), (L.attn.transpose() * dx).eval());
    add_grad(grad, blk(ids.b_o), dx.colwise().sum().transpose().eval());
    Matrix dattn = dx * cview(ids.w_o).transpose();
    Matrix dqkv(t, 3 * d);
    for (int h = 0; h < nh; ++h) {
      const auto& p = L.probs[static_cast<std::size_t>(h)];
      const auto q = L.qkv.middleCols(h * dh, dh);
      const auto k = L.qkv.middleCols(d + h * dh, dh);
      const auto v = L.qkv.middleCols(2 * d + h * dh, dh);
      const auto dout = dattn.middleCols(h * dh, dh);
      Matrix dp = dout * v.transpose();
      dqkv.middleCols(2 * d + h * dh, dh).noalias() = p.transpose() * dout;
      const Vector rowdot = (dp.array() * p.array()).rowwise().sum();
      Matrix ds = p.array() * (dp.array().colwise() - rowdot.array());
      ds *= scale;
      dqkv.middleCols(h * dh, dh).noalias() = ds * k;
      dqkv.middleCols(d + h * dh, dh).noalias() = ds.transpose() * q;
    }
    add_grad(grad, blk(ids.w_qkv), (L.ln1.transpose() * dqkv).eval());
    add_grad(grad, blk(ids.b_qkv), dqkv.colwise().sum().transpose().eval());
    Matrix dln1 = dqkv * cview(ids.w_qkv).transpose();
    dx += layer_norm_backward<Scalar>(dln1, L.xhat1, L.ln1_rstd, cvec(ids.ln1_g), dg, db);
    add_grad(grad, blk(ids.ln1_g), dg);
    add_grad(grad, blk(ids.ln1_b), db);
  }

  if (lowest == 0 && blk(tok_emb_).trainable) {
    const auto& te = blk(tok_emb_);
    const auto& pe = blk(pos_emb_);
    for (Eigen::Index r = 0; r < t; ++r) {
      const auto tok = tape.tokens[static_cast<std::size_t>(r)];
      for (int c = 0; c < d; ++c) {
        const double g = static_cast<double>(dx(r, c));
        grad(te.offset + static_cast<Eigen::Index>(tok) * d + c) += g;
        grad(pe.offset + r * d + c) += g;
      }
    }
  }
}

template <typename Scalar>
DecodeState<Scalar> PolicyModel<Scalar>::begin_decode() const {
  DecodeState<Scalar> state;
  state.keys.assign(layers_.size(), Matrix::Zero(config_.max_len, config_.d_model));
  state.vals.assign(layers_.size(), Matrix::Zero(config_.max_len, config_.d_model));
  return state;
}

template <typename Scalar>
StepOutput<Scalar> PolicyModel<Scalar>::decode_step(DecodeState<Scalar>& state, TokenId token) const {
  if (state.length >= config_.max_len) throw std::length_error("decode_step: max_len reached");
  if (token < 0 || token >= config_.vocab_size) throw std::out_of_range("decode_step: token id out of range");
  const int d = config_.d_model;
  const int nh = config_.n_heads;
  const int dh = config_.head_dim();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  const int p = state.length;

  Matrix x = cview(tok_emb_).row(token) + cview(pos_emb_).row(p);
  Matrix xhat, y, fc;
  Vector rstd;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& ids = layers_[l];
    layer_norm<Scalar>(x, cvec(ids.ln1_g), cvec(ids.ln1_b), xhat, y, rstd);
    Matrix qkv = y * cview(ids.w_qkv);
    qkv += cvec(ids.b_qkv).transpose();
    state.keys[l].row(p) = qkv.middleCols(d, d);
    state.vals[l].row(p) = qkv.middleCols(2 * d, d);
    Matrix attn(1, d);
    for (int h = 0; h < nh; ++h) {
      const auto keys = state.keys[l].block(0, h * dh, p + 1, dh);
      const auto vals = state.vals[l].block(0, h * dh, p + 1, dh);
      Matrix s = (qkv.middleCols(h * dh, dh) * keys.transpose()) * scale;
      softmax_row_inplace<Scalar>(s, 0);
      attn.middleCols(h * dh, dh).noalias() = s * vals;
    }
    x.noalias() += attn * cview(ids.w_o);
    x += cvec(ids.b_o).transpose();
    layer_norm<Scalar>(x, cvec(ids.ln2_g), cvec(ids.ln2_b), xhat, y, rstd);
    fc = y * cview(ids.w_fc);
    fc += cvec(ids.b_fc).transpose();
    x.noalias() += fc.unaryExpr([](Scalar u) { return gelu(u); }) * cview(ids.w_proj);
    x += cvec(ids.b_proj).transpose();
  }
  layer_norm<Scalar>(x, cvec(lnf_g_), cvec(lnf_b_), xhat, y, rstd);
  StepOutput<Scalar> out;
  out.logits = (y * cview(w_lm_)).transpose();
  out.logits += cvec(b_lm_);
  out.value = (y * cvec(w_v_))(0, 0) + cvec(b_v_)(0);
  ++state.length;
  return out;
}

template <typename Scalar>
void PolicyModel<Scalar>::set_trainable(Trainable policy) {
  if (policy.kind == Trainable::Kind::All) {
    for (auto& b : blocks_) b.trainable = true;
    return;
  }
  if (policy.k < 0 || policy.k > config_.n_layers) {
    throw std::invalid_argument("set_trainable: last_k(" + std::to_string(policy.k) + ") exceeds n_layers " +
                                std::to_string(config_.n_layers));
  }
  const int first = config_.n_layers - policy.k;
  for (auto& b : blocks_) {
    b.trainable = b.group == ParamGroup::ValueHead || (b.group == ParamGroup::Layer && b.layer >= first);
  }
}

template <typename Scalar>
std::vector<Eigen::Index> PolicyModel<Scalar>::trainable_indices() const {
  std::vector<Eigen::Index> idx;
  for (const auto& b : blocks_) {
    if (!b.trainable) continue;
    for (Eigen::Index k = 0; k < b.size(); ++k) idx.push_back(b.offset + k);
  }
  return idx;
}

template <typename Scalar>
Eigen::MatrixXd log_softmax_rows(const RowMatrix<Scalar>& logits) {
  Eigen::MatrixXd out = logits.template cast<double>();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double mx = out.row(r).maxCoeff();
    const double lse = mx + std::log((out.row(r).array() - mx).exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

template <typename Scalar>
std::vector<double> log_prob(const PolicyModel<Scalar>& model, std::span<const TokenId> prefix,
                             std::span<const TokenId> target) {
  if (prefix.empty()) throw std::invalid_argument("log_prob: prefix must be non-empty");
  TokenSeq seq(prefix.begin(), prefix.end());
  seq.insert(seq.end(), target.begin(), target.end());
  // the last target token is never an input position
  if (!target.empty()) seq.pop_back();
  if (prefix.size() + target.size() > static_cast<std::size_t>(model.config().max_len)) {
    throw std::length_error("log_prob: prefix + target exceeds max_len");
  }
  const auto out = model.forward(seq);
  const auto lsm = log_softmax_rows<Scalar>(out.logits);
  std::vector<double> lp(target.size());
  for (std::size_t k = 0; k < target.size(); ++k) {
    lp[k] = lsm(static_cast<Eigen::Index>(prefix.size() - 1 + k), target[k]);
  }
  return lp;
}

template class PolicyModel<float>;
template class PolicyModel<double>;
template Eigen::MatrixXd log_softmax_rows<float>(const RowMatrix<float>&);
template Eigen::MatrixXd log_softmax_rows<double>(const RowMatrix<double>&);
template std::vector<double> log_prob<float>(const PolicyModel<float>&, std::span<const TokenId>,
                                             std::span<const TokenId>);
template std::vector<double> log_prob<double>(const PolicyModel<double>&, std::span<const TokenId>,
                                              std::span<const TokenId>);

}  // namespace promptrl
