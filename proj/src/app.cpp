#include "promptrl/app.hpp"

#include <cstdio>
#include <ostream>

#include "promptrl/checkpoint.hpp"

namespace promptrl {

ScorerSet make_scorers(const AppConfig& config, const NlpEngine& nlp) {
  auto set = ScorerSet::standard(nlp, config.ppo.kl_coef);
  set.scorers[2] = std::make_shared<CiRewardScorer>(nlp, config.ci);
  set.weights = {config.rewards.w_aesthetic, config.rewards.w_preference, config.rewards.w_ci};
  return set;
}

Vocab build_training_vocab(std::span<const PromptTriplet> data, std::size_t max_size) {
  std::vector<std::string> texts;
  texts.reserve(2 * data.size());
  for (const auto& t : data) {
    texts.push_back(render_template(t.x, t.i));
    texts.push_back(t.y);
  }
  return Vocab::build(texts, {max_size});
}

Corpus prepare_corpus(const AppConfig& config, const NlpEngine& nlp) {
  const auto all = generate_synthetic_corpus(config.data.n, config.seed);
  auto [kept, report] = filter_triplets(nlp, all, config.data.filter, default_nsfw_list());
  if (kept.size() <= config.data.holdout) throw std::runtime_error("too few records survive filtering for the holdout");
  Corpus c;
  c.filter = report;
  const auto split = kept.end() - static_cast<std::ptrdiff_t>(config.data.holdout);
  c.train.assign(kept.begin(), split);
  c.test.assign(split, kept.end());
  c.vocab = build_training_vocab(c.train, config.data.vocab_max_size);
  return c;
}

PolicyModel<float> new_model(const AppConfig& config, const Vocab& vocab) {
  ModelConfig mc = config.model;
  mc.vocab_size = static_cast<int>(vocab.size());
  return PolicyModel<float>(mc);
}

MethodEvaluation evaluate_model(const PolicyModel<float>& model, const Vocab& vocab,
                                std::span<const PromptTriplet> test, const NlpEngine& nlp, const ScorerSet& scorers,
                                const SamplingConfig& sampling) {
  return evaluate_method(model_generator(model, vocab, sampling), test, nlp, scorers);
}

MetricTable evaluation_table(std::string title, const std::vector<std::pair<std::string, MethodEvaluation>>& rows) {
  MetricTable t;
  t.title = std::move(title);
  if (rows.empty()) return t;
  for (const auto& [name, value] : rows.front().second.means) t.metrics.push_back({name, Direction::HigherBetter});
  for (const auto& [method, ev] : rows) {
    t.methods.push_back(method);
    std::vector<std::optional<double>> row;
    for (const auto& m : t.metrics) row.emplace_back(ev.get(m.name));
    t.values.push_back(std::move(row));
  }
  return t;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

QuickstartResult run_quickstart(const AppConfig& config, const std::filesystem::path& out_dir, std::ostream& progress) {
  const auto& nlp = default_engine();
  std::filesystem::create_directories(out_dir);
  QuickstartResult result;

  progress << "[gen-data] n=" << config.data.n << "\n";
  const auto corpus = prepare_corpus(config, nlp);
  write_jsonl(out_dir / "train.jsonl", corpus.train);
  write_jsonl(out_dir / "test.jsonl", corpus.test);
  progress << "[gen-data] kept " << corpus.filter.kept << " of " << corpus.filter.input_count << ", train "
           << corpus.train.size() << ", test " << corpus.test.size() << "\n";
  corpus.vocab.save(out_dir / "vocab.txt");
  progress << "[build-vocab] " << corpus.vocab.size() << " tokens\n";

  auto model = new_model(config, corpus.vocab);
  TrainHooks sft_hooks;
  sft_hooks.on_record = [&](const LogRecord& r) {
    if (r.phase == "sft_eval") progress << "[sft] epoch " << r.get("epoch") << " loss " << fmt(r.get("loss")) << "\n";
  };
  const auto sft_log = train_sft(model, corpus.train, corpus.vocab, config.sft, sft_hooks);
  sft_log.write(out_dir / "sft_log.jsonl");
  save_checkpoint(out_dir / "sft.ckpt", model, {0, corpus.vocab, std::nullopt});
  for (const auto& r : sft_log.records) {
    if (r.phase != "sft_eval") continue;
    if (r.get("epoch") == 0.0) result.sft_initial_loss = r.get("loss");
    result.sft_final_loss = r.get("loss");
  }

  const auto scorers = make_scorers(config, nlp);
  std::size_t next = 0;
  result.reference = evaluate_method([&](std::string_view, std::string_view) { return corpus.test[next++].y; },
                                     corpus.test, nlp, scorers);
  result.sft = evaluate_model(model, corpus.vocab, corpus.test, nlp, scorers, config.sampling);
  progress << "[eval] sft reward " << fmt(result.sft.get("reward")) << "\n";

  const auto ref = clone_reference(model);
  TrainHooks rl_hooks;
  rl_hooks.on_record = [&](const LogRecord& r) {
    if (r.get("inner") == 0.0) {
      progress << "[rl] step " << r.step << " reward " << fmt(r.get("mean_reward")) << " kl " << fmt(r.get("mean_kl"))
               << "\n";
    }
  };
  const auto rl_log = train_rl(model, ref, corpus.train, corpus.vocab, nlp, config.ppo, scorers, rl_hooks);
  rl_log.write(out_dir / "rl_log.jsonl");
  save_checkpoint(out_dir / "rl.ckpt", model, {static_cast<std::uint64_t>(rl_log.records.size()), corpus.vocab,
                                               std::nullopt});
  result.rl = evaluate_model(model, corpus.vocab, corpus.test, nlp, scorers, config.sampling);
  progress << "[eval] rl reward " << fmt(result.rl.get("reward")) << "\n";

  const std::vector<MetricTable> tables{evaluation_table(
      "held-out synthetic records", {{"reference", result.reference}, {"sft", result.sft}, {"sft+rl", result.rl}})};
  emit_report(tables, out_dir / "report");
  return result;
}

}  // namespace promptrl
