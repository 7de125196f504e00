#include "promptrl/trainer.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace promptrl {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_trainable(const Trainable& t, const std::string& section) {
  require(t.kind == Trainable::Kind::All || t.k >= 1, section + ".unfreeze must keep at least one layer");
}

}  // namespace

void SftConfig::validate() const {
  require(epochs > 0, "sft.epochs must be positive");
  require(batch_size > 0, "sft.batch_size must be positive");
  require(max_len > 1, "sft.max_len must exceed 1");
  require(lr > 0.0, "sft.lr must be positive");
  require(weight_decay >= 0.0, "sft.weight_decay must be non-negative");
  require(adam_eps > 0.0, "sft.adam_eps must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "sft betas must be in [0, 1)");
  check_trainable(unfreeze, "sft");
}

void RmConfig::validate() const {
  require(epochs > 0, "rm.epochs must be positive");
  require(batch_size > 0, "rm.batch_size must be positive");
  require(max_len > 1, "rm.max_len must exceed 1");
  require(lr > 0.0, "rm.lr must be positive");
  require(weight_decay >= 0.0, "rm.weight_decay must be non-negative");
  check_trainable(unfreeze, "rm");
}

void PpoConfig::validate() const {
  require(epochs > 0, "ppo.epochs must be positive");
  require(batch_size > 0, "ppo.batch_size must be positive");
  require(max_len > 1, "ppo.max_len must exceed 1");
  require(lr > 0.0, "ppo.lr must be positive");
  require(weight_decay >= 0.0, "ppo.weight_decay must be non-negative");
  require(unfreeze_last > 0, "ppo.unfreeze_last must be positive");
  require(gamma > 0.0 && gamma <= 1.0, "ppo.gamma must be in (0, 1]");
  require(lam > 0.0 && lam <= 1.0, "ppo.lam must be in (0, 1]");
  require(clip_range > 0.0, "ppo.clip_range must be positive");
  require(value_loss_scale >= 0.0, "ppo.value_loss_scale must be non-negative");
  require(kl_coef >= 0.0, "ppo.kl_coef must be non-negative");
  require(p_typical > 0.0 && p_typical <= 1.0, "ppo.p_typical must be in (0, 1]");
  require(adam_eps > 0.0, "ppo.adam_eps must be positive");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "ppo betas must be in [0, 1)");
  require(inner_epochs > 0, "ppo.inner_epochs must be positive");
  require(positive_share >= 0.0 && positive_share <= 1.0, "ppo.positive_share must be in [0, 1]");
  require(neg_prompt_prob >= 0.0 && neg_prompt_prob <= 1.0, "ppo.neg_prompt_prob must be in [0, 1]");
  require(neg_remove_prob >= 0.0 && neg_remove_prob <= 1.0, "ppo.neg_remove_prob must be in [0, 1]");
  require(max_new_tokens > 0, "ppo.max_new_tokens must be positive");
  require(divergence_limit > 0.0, "ppo.divergence_limit must be positive");
}

double cosine_lr(long step, long total_steps, double base_lr) {
  if (total_steps <= 0 || step < 0 || step > total_steps) throw std::invalid_argument("cosine_lr: step out of range");
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(step) / static_cast<double>(total_steps)));
}

SftExample encode_sft_example(const PromptTriplet& t, const Vocab& vocab, int max_len) {
  SftExample ex;
  ex.prefix = encode_prefix(t.x, t.i, vocab);
  if (static_cast<int>(ex.prefix.size()) >= max_len) throw std::length_error("prompt template exceeds max_len");
  ex.target = tokenize(t.y, vocab);
  ex.target.push_back(Vocab::kEos);
  const auto room = static_cast<std::size_t>(max_len) - ex.prefix.size();
  if (ex.target.size() > room) {
    ex.target.resize(room);
    ex.truncated = true;
  }
  return ex;
}

namespace {

TokenSeq input_sequence(const TokenSeq& prefix, const TokenSeq& target) {
  TokenSeq seq = prefix;
  seq.insert(seq.end(), target.begin(), target.end() - 1);
  return seq;
}

void check_example(const SftExample& ex) {
  if (ex.prefix.empty() || ex.target.empty()) throw std::invalid_argument("sft example needs a prefix and a target");
}

}  // namespace

template <typename Scalar>
SftLoss sft_loss(const PolicyModel<Scalar>& model, std::span<const SftExample> batch) {
  if (batch.empty()) throw std::invalid_argument("sft_loss: empty batch");
  SftLoss loss;
  double total = 0.0;
  for (const auto& ex : batch) {
    check_example(ex);
    const auto lsm = log_softmax_rows<Scalar>(model.forward(input_sequence(ex.prefix, ex.target)).logits);
    for (std::size_t t = 0; t < ex.target.size(); ++t) {
      total -= lsm(static_cast<Eigen::Index>(ex.prefix.size() - 1 + t), ex.target[t]);
    }
    loss.n_tokens += static_cast<long>(ex.target.size());
  }
  loss.sequence_nll = total / static_cast<double>(batch.size());
  loss.token_nll = total / static_cast<double>(loss.n_tokens);
  return loss;
}

template <typename Scalar>
SftLoss sft_loss_and_grad(const PolicyModel<Scalar>& model, std::span<const SftExample> batch, Eigen::VectorXd& grad,
                          SftReduction reduction) {
  if (batch.empty()) throw std::invalid_argument("sft_loss: empty batch");
  if (grad.size() != model.num_parameters()) throw std::invalid_argument("sft_loss: gradient size mismatch");
  SftLoss loss;
  for (const auto& ex : batch) {
    check_example(ex);
    loss.n_tokens += static_cast<long>(ex.target.size());
  }
  const double scale = reduction == SftReduction::TokenMean ? 1.0 / static_cast<double>(loss.n_tokens)
                                                            : 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  const auto vocab = model.config().vocab_size;
  for (const auto& ex : batch) {
    const auto tape = model.forward_tape(input_sequence(ex.prefix, ex.target));
    const auto lsm = log_softmax_rows<Scalar>(tape.out.logits);
    RowMatrix<Scalar> dlogits = RowMatrix<Scalar>::Zero(tape.out.logits.rows(), vocab);
    for (std::size_t t = 0; t < ex.target.size(); ++t) {
      const auto row = static_cast<Eigen::Index>(ex.prefix.size() - 1 + t);
      total -= lsm(row, ex.target[t]);
      dlogits.row(row) = (lsm.row(row).array().exp() * scale).template cast<Scalar>();
      dlogits(row, ex.target[t]) -= static_cast<Scalar>(scale);
    }
    model.backward(tape, dlogits, Vec<Scalar>::Zero(tape.out.values.size()), grad);
  }
  loss.sequence_nll = total / static_cast<double>(batch.size());
  loss.token_nll = total / static_cast<double>(loss.n_tokens);
  return loss;
}

Gae compute_gae(std::span<const double> rewards, std::span<const double> values_hat, double gamma, double lam) {
  if (rewards.size() != values_hat.size()) throw std::invalid_argument("compute_gae: length mismatch");
  const std::size_t n = rewards.size();
  Gae out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double next = k + 1 < n ? values_hat[k + 1] : 0.0;
    const double delta = rewards[k] + gamma * next - values_hat[k];
    running = delta + gamma * lam * running;
    out.advantages[k] = running;
    out.returns[k] = running + values_hat[k];
  }
  return out;
}

std::vector<double> augment_values_vci(const NlpEngine& nlp, const Trajectory& traj, const CiContext& ctx,
                                       const Vocab& vocab, double alpha, const CiOptions& options) {
  std::vector<double> out = traj.values;
  if (alpha == 0.0) return out;
  for (std::size_t t = 0; t < out.size(); ++t) {
    const std::span<const TokenId> prefix(traj.tokens.data(), t);
    out[t] = traj.values[t] + alpha * ci_score_prefix(nlp, ctx, prefix, vocab, options);
  }
  return out;
}

std::vector<std::vector<double>> normalized_advantages(std::span<const Trajectory> batch, bool normalize) {
  std::vector<std::vector<double>> out;
  out.reserve(batch.size());
  double sum = 0.0;
  long n = 0;
  for (const auto& traj : batch) {
    if (traj.advantages.size() != traj.tokens.size()) throw std::invalid_argument("trajectory advantages not computed");
    for (double a : traj.advantages) {
      if (!std::isfinite(a)) throw std::invalid_argument("non-finite advantage in batch");
      sum += a;
    }
    n += static_cast<long>(traj.advantages.size());
    out.push_back(traj.advantages);
  }
  if (!normalize || n == 0) return out;
  const double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const auto& a : out) {
    for (double v : a) var += (v - mean) * (v - mean);
  }
  const double sd = std::max(std::sqrt(var / static_cast<double>(n)), 1e-8);
  for (auto& a : out) {
    for (double& v : a) v = (v - mean) / sd;
  }
  return out;
}

template <typename Scalar>
PpoLosses ppo_losses(const PolicyModel<Scalar>& model, std::span<const Trajectory> batch, const PpoConfig& config,
                     Eigen::VectorXd* grad) {
  if (batch.empty()) throw std::invalid_argument("ppo_losses: empty batch");
  if (grad != nullptr && grad->size() != model.num_parameters()) {
    throw std::invalid_argument("ppo_losses: gradient size mismatch");
  }
  PpoLosses loss;
  for (const auto& traj : batch) {
    const auto n = traj.tokens.size();
    if (n == 0 || traj.logprobs.size() != n || traj.returns.size() != n ||
        (!traj.value_targets.empty() && traj.value_targets.size() != n)) {
      throw std::invalid_argument("ppo_losses: trajectory vectors have inconsistent lengths");
    }
    for (std::size_t t = 0; t < n; ++t) {
      const double target = traj.value_targets.empty() ? traj.returns[t] : traj.value_targets[t];
      if (!std::isfinite(traj.logprobs[t]) || !std::isfinite(target)) {
        throw std::invalid_argument("ppo_losses: non-finite log-prob or value target at step " + std::to_string(t));
      }
    }
    loss.n_tokens += static_cast<long>(n);
  }
  const auto adv = normalized_advantages(batch, config.normalize_advantages);
  const double inv_n = 1.0 / static_cast<double>(loss.n_tokens);
  const double lo = 1.0 - config.clip_range;
  const double hi = 1.0 + config.clip_range;
  const auto vocab = model.config().vocab_size;

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& traj = batch[b];
    TokenSeq seq = traj.prefix;
    seq.insert(seq.end(), traj.tokens.begin(), traj.tokens.end() - 1);
    std::optional<ForwardTape<Scalar>> tape;
    PolicyOutput<Scalar> fwd;
    if (grad != nullptr) {
      tape = model.forward_tape(seq);
    } else {
      fwd = model.forward(seq);
    }
    const PolicyOutput<Scalar>& out = tape ? tape->out : fwd;
    const auto lsm = log_softmax_rows<Scalar>(out.logits);
    RowMatrix<Scalar> dlogits;
    Vec<Scalar> dvalues;
    if (grad != nullptr) {
      dlogits = RowMatrix<Scalar>::Zero(out.logits.rows(), vocab);
      dvalues = Vec<Scalar>::Zero(out.values.size());
    }
    for (std::size_t t = 0; t < traj.tokens.size(); ++t) {
      const auto row = static_cast<Eigen::Index>(traj.prefix.size() - 1 + t);
      const double lp = lsm(row, traj.tokens[t]);
      const double ratio = std::exp(lp - traj.logprobs[t]);
      const double a = adv[b][t];
      const double surr1 = ratio * a;
      const double surr2 = std::clamp(ratio, lo, hi) * a;
      loss.policy_loss -= std::min(surr1, surr2) * inv_n;
      loss.mean_abs_ratio_dev += std::abs(ratio - 1.0) * inv_n;
      loss.clip_fraction += (ratio < lo || ratio > hi ? 1.0 : 0.0) * inv_n;
      loss.approx_kl += (traj.logprobs[t] - lp) * inv_n;

      const double v = static_cast<double>(out.values(row));
      const double target = traj.value_targets.empty() ? traj.returns[t] : traj.value_targets[t];
      loss.value_loss += (v - target) * (v - target) * inv_n;

      if (grad != nullptr) {
        // the clipped branch carries no gradient when it is the minimum
        const double dlp = surr1 <= surr2 ? -ratio * a * inv_n : 0.0;
        if (dlp != 0.0) {
          dlogits.row(row) = (-dlp * lsm.row(row).array().exp()).template cast<Scalar>();
          dlogits(row, traj.tokens[t]) += static_cast<Scalar>(dlp);
        }
        dvalues(row) = static_cast<Scalar>(config.value_loss_scale * 2.0 * (v - target) * inv_n);
      }
    }
    if (grad != nullptr) model.backward(*tape, dlogits, dvalues, *grad);
  }
  loss.total = loss.policy_loss + config.value_loss_scale * loss.value_loss;
  return loss;
}

double LogRecord::get(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw std::out_of_range("log record has no field " + std::string(key));
}

std::string TrainLog::to_jsonl() const {
  std::ostringstream os;
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["step"] = r.step;
    o["phase"] = r.phase;
    for (const auto& [k, v] : r.values) o[k] = v;
    if (!r.perturbations.empty()) {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& p : r.perturbations) {
        nlohmann::ordered_json e;
        e["kind"] = std::string(to_string(p.kind));
        e["original"] = p.original;
        if (p.kind == Perturbation::Kind::Modified) e["replacement"] = p.replacement;
        e["tag"] = std::string(to_string(p.tag));
        e["position"] = p.position;
        e["fallback"] = p.fallback;
        arr.push_back(std::move(e));
      }
      o["perturbations"] = std::move(arr);
    }
    os << o.dump() << '\n';
  }
  return os.str();
}

void TrainLog::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write log " + path.string());
  out << to_jsonl();
}

CiContext context_for(const NlpEngine& nlp, const PromptTriplet& t) {
  return build_context(nlp, t.raw_prompt(), t.i, t.raw_target());
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t k = v.size(); k > 1; --k) std::swap(v[k - 1], v[rng.below(k)]);
}

void append(TrainLog& log, LogRecord rec, const TrainHooks& hooks) {
  log.records.push_back(std::move(rec));
  if (hooks.on_record) hooks.on_record(log.records.back());
}

}  // namespace

TrainLog train_sft(PolicyModel<float>& model, std::span<const PromptTriplet> dataset, const Vocab& vocab,
                   const SftConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (dataset.empty()) throw std::invalid_argument("train_sft: empty dataset");
  const int max_len = std::min(config.max_len, model.config().max_len);
  std::vector<SftExample> examples;
  examples.reserve(dataset.size());
  long truncated = 0;
  for (const auto& t : dataset) {
    examples.push_back(encode_sft_example(t, vocab, max_len));
    truncated += examples.back().truncated ? 1 : 0;
  }
  if (truncated > 0) std::cerr << "warning: " << truncated << " sft targets truncated to max_len " << max_len << "\n";

  model.set_trainable(config.unfreeze);
  AdamW opt(model.trainable_indices(), {config.beta1, config.beta2, config.adam_eps, config.weight_decay});
  Rng rng(config.seed, 0);
  const auto n = examples.size();
  const auto bs = static_cast<std::size_t>(config.batch_size);
  const long per_epoch = static_cast<long>((n + bs - 1) / bs);
  const long total = per_epoch * config.epochs;

  // fixed probe set for the epoch-level loss
  const std::span<const SftExample> probe(examples.data(), std::min<std::size_t>(n, 256));
  TrainLog log;
  long step = 0;
  append(log, {step, "sft_eval", {{"epoch", 0.0}, {"loss", sft_loss(model, probe).token_nll}}, {}}, hooks);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd grad(model.num_parameters());
  std::vector<SftExample> batch;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t s = 0; s < n; s += bs) {
      batch.clear();
      for (std::size_t k = s; k < std::min(n, s + bs); ++k) batch.push_back(examples[order[k]]);
      grad.setZero();
      const auto loss = sft_loss_and_grad(model, std::span<const SftExample>(batch), grad);
      if (!std::isfinite(loss.token_nll)) throw DivergenceError("sft loss is not finite at step " + std::to_string(step));
      const double lr = cosine_lr(step, total, config.lr);
      opt.step(model.parameters(), grad, lr);
      ++step;
      append(log,
             {step, "sft",
              {{"epoch", static_cast<double>(epoch)},
               {"loss", loss.token_nll},
               {"sequence_nll", loss.sequence_nll},
               {"lr", lr}},
              {}},
             hooks);
    }
    append(log, {step, "sft_eval", {{"epoch", static_cast<double>(epoch)}, {"loss", sft_loss(model, probe).token_nll}}, {}},
           hooks);
    if (hooks.on_epoch) hooks.on_epoch(epoch, model, opt.state());
  }
  return log;
}

TrainLog train_rl(PolicyModel<float>& model, const ReferenceModel<float>& ref, std::span<const PromptTriplet> dataset,
                  const Vocab& vocab, const NlpEngine& nlp, const PpoConfig& config, const ScorerSet& scorers,
                  const TrainHooks& hooks) {
  config.validate();
  scorers.validate();
  if (dataset.empty()) throw std::invalid_argument("train_rl: empty dataset");
  if (ref.model().config() != model.config()) throw std::invalid_argument("train_rl: reference differs in shape");

  model.set_trainable(Trainable::last_k(scaled_last_k(model.config().n_layers, config.unfreeze_last)));
  AdamW opt(model.trainable_indices(), {config.beta1, config.beta2, config.adam_eps, config.weight_decay});

  std::vector<std::string> targets;
  targets.reserve(dataset.size());
  for (const auto& t : dataset) targets.push_back(t.y);
  const auto pool = build_keyword_pool(nlp, targets);

  Rng order_rng(config.seed, 0);
  Rng sample_rng(config.seed, 1);
  Rng neg_rng(config.seed, 2);
  const int max_len = std::min(config.max_len, model.config().max_len);
  SamplingConfig sampling;
  sampling.p = config.p_typical;
  sampling.max_new_tokens = config.max_new_tokens;
  sampling.neg_prompt_prob = config.neg_prompt_prob;
  sampling.neg_remove_prob = config.neg_remove_prob;
  sampling.seed = config.seed;

  const auto n = dataset.size();
  const auto bs = static_cast<std::size_t>(config.batch_size);
  const long per_epoch = static_cast<long>((n + bs - 1) / bs);
  const long total = per_epoch * config.epochs * config.inner_epochs;

  TrainLog log;
  long step = 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd grad(model.num_parameters());

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle(order, order_rng);
    for (std::size_t s = 0; s < n; s += bs) {
      std::vector<PromptTriplet> records;
      for (std::size_t k = s; k < std::min(n, s + bs); ++k) records.push_back(dataset[order[k]]);
      const auto negatives = build_negative_batch(nlp, records, pool, sampling, neg_rng);

      std::vector<Trajectory> batch;
      batch.reserve(records.size());
      std::vector<Perturbation> perturbations;
      double reward_sum = 0.0, kl_sum = 0.0;
      long kl_count = 0;
      for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& rec = records[k];
        const auto ctx = context_for(nlp, rec);
        Trajectory traj;
        if (negatives[k].selected) {
          SftExample ex = encode_sft_example({rec.x, rec.i, negatives[k].y, {}, {}, {}}, vocab, max_len);
          traj = forced_trajectory(model, ref, std::move(ex.prefix), std::move(ex.target));
          traj.meta.mode = SamplingMode::AdmNegative;
          traj.meta.perturbation = negatives[k].record;
          perturbations.push_back(negatives[k].record);
        } else {
          SamplingConfig sc = sampling;
          if (config.positive_share >= 1.0) {
            sc.mode = SamplingMode::AdmPositive;
          } else if (config.positive_share <= 0.0) {
            sc.mode = SamplingMode::Vanilla;
          } else {
            sc.mode = sample_rng.uniform() < config.positive_share ? SamplingMode::AdmPositive : SamplingMode::Vanilla;
          }
          traj = generate(model, ref, vocab, rec.x, rec.i, sc, sample_rng);
        }
        const auto text = detokenize(traj.tokens, vocab);
        assign_rewards(traj, {text, rec.x, &ctx}, scorers);
        const auto vhat = augment_values_vci(nlp, traj, ctx, vocab, config.alpha_vci);
        auto gae = compute_gae(traj.per_step_rewards, vhat, config.gamma, config.lam);
        traj.advantages = std::move(gae.advantages);
        traj.returns = std::move(gae.returns);
        traj.value_targets.resize(traj.size());
        for (std::size_t t = 0; t < traj.size(); ++t) traj.value_targets[t] = traj.returns[t] - (vhat[t] - traj.values[t]);

        reward_sum += traj.terminal_reward;
        for (std::size_t t = 0; t < traj.size(); ++t) kl_sum += traj.logprobs[t] - traj.ref_logprobs[t];
        kl_count += static_cast<long>(traj.size());
        batch.push_back(std::move(traj));
      }

      for (int inner = 0; inner < config.inner_epochs; ++inner) {
        grad.setZero();
        const auto loss = ppo_losses(model, std::span<const Trajectory>(batch), config, &grad);
        if (!std::isfinite(loss.total) || !(loss.mean_abs_ratio_dev <= config.divergence_limit)) {
          throw DivergenceError("ppo diverged at step " + std::to_string(step) + ": mean |ratio - 1| = " +
                                std::to_string(loss.mean_abs_ratio_dev) + ", loss = " + std::to_string(loss.total));
        }
        const double lr = cosine_lr(step, total, config.lr);
        opt.step(model.parameters(), grad, lr);
        ++step;
        LogRecord rec{step,
                      "rl",
                      {{"epoch", static_cast<double>(epoch)},
                       {"inner", static_cast<double>(inner)},
                       {"policy_loss", loss.policy_loss},
                       {"value_loss", loss.value_loss},
                       {"total_loss", loss.total},
                       {"mean_reward", reward_sum / static_cast<double>(batch.size())},
                       {"mean_kl", kl_sum / static_cast<double>(kl_count)},
                       {"value_error", loss.value_loss},
                       {"ratio_dev", loss.mean_abs_ratio_dev},
                       {"clip_fraction", loss.clip_fraction},
                       {"lr", lr}},
                      {}};
        if (inner == 0) rec.perturbations = perturbations;
        append(log, std::move(rec), hooks);
      }
    }
  }
  return log;
}

template SftLoss sft_loss<float>(const PolicyModel<float>&, std::span<const SftExample>);
template SftLoss sft_loss<double>(const PolicyModel<double>&, std::span<const SftExample>);
template SftLoss sft_loss_and_grad<float>(const PolicyModel<float>&, std::span<const SftExample>, Eigen::VectorXd&,
                                          SftReduction);
template SftLoss sft_loss_and_grad<double>(const PolicyModel<double>&, std::span<const SftExample>, Eigen::VectorXd&,
                                           SftReduction);
template PpoLosses ppo_losses<float>(const PolicyModel<float>&, std::span<const Trajectory>, const PpoConfig&,
                                     Eigen::VectorXd*);
template PpoLosses ppo_losses<double>(const PolicyModel<double>&, std::span<const Trajectory>, const PpoConfig&,
                                      Eigen::VectorXd*);

}  // namespace promptrl
