// promptrl command-line entry point.

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "promptrl/app.hpp"
#include "promptrl/checkpoint.hpp"

using namespace promptrl;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> argv;
  for (std::string w; in >> w;) argv.push_back(w);
  if (argv.empty()) throw std::invalid_argument("empty external command");
  return argv;
}

// Config file, then --set overrides, then --seed; printed to stderr.
AppConfig resolve(const Globals& g, const std::string& fallback_config = {}) {
  AppConfig c;
  const auto path = g.config_path.empty() ? fallback_config : g.config_path;
  if (!path.empty()) c = load_config(path);
  for (const auto& o : g.overrides) apply_override(c, o);
  if (g.seed) c.seed = *g.seed;
  c.propagate_seed();
  c.validate();
  std::istringstream dump(dump_config(c));
  std::cerr << "# resolved config\n";
  for (std::string line; std::getline(dump, line);) std::cerr << (line.empty() ? "#" : "#   " + line) << "\n";
  return c;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

LoadedCheckpoint<float> load_with_vocab(const fs::path& p) {
  auto ck = load_checkpoint<float>(p);
  if (!ck.meta.vocab) throw std::runtime_error("checkpoint " + p.string() + " carries no vocabulary");
  return ck;
}

void print_filter(const FilterReport& r) {
  std::cerr << "filter: input " << r.input_count << ", kept " << r.kept << ", non-english " << r.dropped_non_english
            << ", wordlist " << r.dropped_nsfw << ", low score " << r.dropped_low_score << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instruction-following prompt rewriting with supervised and reinforcement fine-tuning"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Config file")->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "Override as section.key=value (repeatable)");
  app.add_option("--seed", g.seed, "Seed for every random choice");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a triplet corpus as JSON Lines");
  std::optional<std::size_t> gen_n;
  std::string gen_out, gen_source = "synthetic", gen_raw, gen_rewriter, gen_chat, gen_templates;
  bool gen_no_filter = false;
  gen->add_option("--n", gen_n, "Number of records (data.n)");
  gen->add_option("--out", gen_out, "Output file")->required();
  gen->add_option("--source", gen_source, "synthetic or pipeline")->check(CLI::IsMember({"synthetic", "pipeline"}));
  gen->add_option("--raw", gen_raw, "Raw records (x_o, i, y_o) for the pipeline source")->check(CLI::ExistingFile);
  gen->add_option("--rewriter-cmd", gen_rewriter, "External rewriter command");
  gen->add_option("--chat-cmd", gen_chat, "External chat command");
  gen->add_option("--templates", gen_templates, "Directory with chat_template_a.txt and chat_template_b.txt");
  gen->add_flag("--no-filter", gen_no_filter, "Skip filtering");

  // build-vocab
  auto* bv = app.add_subcommand("build-vocab", "Build the token vocabulary of a corpus");
  std::vector<std::string> bv_data;
  std::string bv_out;
  bv->add_option("--data", bv_data, "Corpus files")->required()->check(CLI::ExistingFile);
  bv->add_option("--out", bv_out, "Output vocabulary file")->required();

  // sft
  auto* sft = app.add_subcommand("sft", "Supervised fine-tuning");
  std::string sft_data, sft_vocab, sft_init, sft_out;
  sft->add_option("--data", sft_data, "Training corpus")->required()->check(CLI::ExistingFile);
  sft->add_option("--vocab", sft_vocab, "Vocabulary file (default: built from the corpus)")->check(CLI::ExistingFile);
  sft->add_option("--init", sft_init, "Start from this checkpoint")->check(CLI::ExistingFile);
  sft->add_option("--out-dir", sft_out, "Output directory")->required();

  // rl
  auto* rl = app.add_subcommand("rl", "Reinforcement fine-tuning from an SFT checkpoint");
  std::string rl_data, rl_ckpt, rl_out, rl_scorer;
  double rl_scorer_weight = 1.0;
  rl->add_option("--data", rl_data, "Training corpus")->required()->check(CLI::ExistingFile);
  rl->add_option("--ckpt", rl_ckpt, "SFT checkpoint")->required()->check(CLI::ExistingFile);
  rl->add_option("--out-dir", rl_out, "Output directory")->required();
  rl->add_option("--scorer-cmd", rl_scorer, "Extra external scorer command");
  rl->add_option("--scorer-weight", rl_scorer_weight, "Weight of the external scorer");

  // infer
  auto* inf = app.add_subcommand("infer", "Generate a target prompt");
  std::string inf_ckpt, inf_x, inf_i;
  int inf_count = 1;
  inf->add_option("--ckpt", inf_ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  inf->add_option("--x", inf_x, "Raw prompt")->required();
  inf->add_option("--i", inf_i, "Instruction")->required();
  inf->add_option("--count", inf_count, "Samples to draw")->check(CLI::PositiveNumber);

  // score
  auto* sc = app.add_subcommand("score", "Score a target prompt");
  std::string sc_xo, sc_i, sc_yo, sc_y, sc_x;
  sc->add_option("--x-o", sc_xo, "Original raw prompt")->required();
  sc->add_option("--i", sc_i, "Instruction")->required();
  sc->add_option("--y-o", sc_yo, "Original target prompt")->required();
  sc->add_option("--y", sc_y, "Candidate target prompt")->required();
  sc->add_option("--x", sc_x, "Baseline prompt for the preference proxy (default: --x-o)");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate checkpoints on a test corpus");
  std::string ev_data, ev_out;
  std::vector<std::string> ev_ckpts, ev_names;
  bool ev_no_reference = false;
  ev->add_option("--data", ev_data, "Test corpus")->required()->check(CLI::ExistingFile);
  ev->add_option("--ckpt", ev_ckpts, "Checkpoints (repeatable)")->required()->check(CLI::ExistingFile);
  ev->add_option("--name", ev_names, "Method names, one per checkpoint");
  ev->add_option("--out", ev_out, "Report path stem (writes .txt and .json)")->required();
  ev->add_flag("--no-reference", ev_no_reference, "Omit the reference row");

  // quickstart
  auto* qs = app.add_subcommand("quickstart", "Run gen-data, build-vocab, sft, rl and eval on the quickstart preset");
  std::string qs_out;
  qs->add_option("--out-dir", qs_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }

  try {
    const auto& nlp = default_engine();
    if (*gen) {
      auto c = resolve(g);
      if (gen_n) c.data.n = *gen_n;
      std::vector<PromptTriplet> out;
      if (gen_source == "synthetic") {
        out = generate_synthetic_corpus(c.data.n, c.seed);
      } else {
        const auto raw = gen_raw.empty() ? generate_raw_records(c.data.n, c.seed) : read_raw_jsonl(gen_raw);
        std::unique_ptr<RewriterClient> rewriter;
        if (gen_rewriter.empty()) {
          rewriter = std::make_unique<RuleBeautifier>();
        } else {
          rewriter = std::make_unique<ExternalRewriter>(split_command(gen_rewriter));
        }
        std::unique_ptr<ChatClient> chat;
        if (gen_chat.empty()) {
          chat = std::make_unique<KeywordMergeChatClient>(nlp);
        } else {
          const fs::path dir = gen_templates.empty() ? default_resource_dir() : fs::path(gen_templates);
          chat = std::make_unique<ExternalChatClient>(split_command(gen_chat), ChatTemplates::load(dir));
        }
        std::size_t skipped = 0;
        out = build_corpus(nlp, raw, *rewriter, *chat, &skipped);
        std::cerr << "pipeline: built " << out.size() << ", skipped " << skipped << "\n";
      }
      if (!gen_no_filter) {
        auto [kept, report] = filter_triplets(nlp, out, c.data.filter, default_nsfw_list());
        print_filter(report);
        out = std::move(kept);
      }
      ensure_parent(gen_out);
      write_jsonl(gen_out, out);
      std::cout << out.size() << " records written to " << gen_out << "\n";
    } else if (*bv) {
      const auto c = resolve(g);
      std::vector<PromptTriplet> data;
      for (const auto& p : bv_data) {
        auto part = read_jsonl(p);
        data.insert(data.end(), part.begin(), part.end());
      }
      const auto vocab = build_training_vocab(data, c.data.vocab_max_size);
      ensure_parent(bv_out);
      vocab.save(bv_out);
      std::cout << vocab.size() << " tokens written to " << bv_out << "\n";
    } else if (*sft) {
      const auto c = resolve(g);
      const auto data = read_jsonl(sft_data);
      if (data.empty()) throw std::runtime_error("training corpus is empty");
      Vocab vocab;
      std::optional<PolicyModel<float>> model;
      if (!sft_init.empty()) {
        auto ck = load_with_vocab(sft_init);
        vocab = *ck.meta.vocab;
        model.emplace(std::move(ck.model));
      } else {
        vocab = sft_vocab.empty() ? build_training_vocab(data, c.data.vocab_max_size) : Vocab::load(sft_vocab);
        model.emplace(new_model(c, vocab));
      }
      fs::create_directories(sft_out);
      TrainHooks hooks;
      hooks.on_epoch = [&](int epoch, const PolicyModel<float>& m, const OptimizerState& st) {
        save_checkpoint(fs::path(sft_out) / ("sft_epoch" + std::to_string(epoch) + ".ckpt"), m,
                        {static_cast<std::uint64_t>(epoch), vocab, st});
      };
      hooks.on_record = [](const LogRecord& r) {
        if (r.phase == "sft_eval") std::cerr << "epoch " << r.get("epoch") << " loss " << r.get("loss") << "\n";
      };
      const auto log = train_sft(*model, data, vocab, c.sft, hooks);
      log.write(fs::path(sft_out) / "sft_log.jsonl");
      save_checkpoint(fs::path(sft_out) / "sft.ckpt", *model, {0, vocab, std::nullopt});
      std::cout << "final loss " << log.records.back().get("loss") << "\n";
    } else if (*rl) {
      const auto c = resolve(g);
      const auto data = read_jsonl(rl_data);
      if (data.empty()) throw std::runtime_error("training corpus is empty");
      auto ck = load_with_vocab(rl_ckpt);
      const auto& vocab = *ck.meta.vocab;
      auto scorers = make_scorers(c, nlp);
      if (!rl_scorer.empty()) {
        scorers.scorers.push_back(std::make_shared<ExternalScorer>("external", split_command(rl_scorer)));
        scorers.weights.push_back(rl_scorer_weight);
      }
      const auto ref = clone_reference(ck.model);
      TrainHooks hooks;
      hooks.on_record = [](const LogRecord& r) {
        if (r.get("inner") == 0.0) std::cerr << "step " << r.step << " reward " << r.get("mean_reward") << "\n";
      };
      const auto log = train_rl(ck.model, ref, data, vocab, nlp, c.ppo, scorers, hooks);
      fs::create_directories(rl_out);
      log.write(fs::path(rl_out) / "rl_log.jsonl");
      save_checkpoint(fs::path(rl_out) / "rl.ckpt", ck.model,
                      {static_cast<std::uint64_t>(log.records.size()), vocab, std::nullopt});
      std::cout << "final mean reward " << log.records.back().get("mean_reward") << "\n";
    } else if (*inf) {
      const auto c = resolve(g);
      const auto ck = load_with_vocab(inf_ckpt);
      const auto gen_fn = model_generator(ck.model, *ck.meta.vocab, c.sampling);
      for (int k = 0; k < inf_count; ++k) std::cout << gen_fn(inf_x, inf_i) << "\n";
    } else if (*sc) {
      const auto c = resolve(g);
      const auto ctx = build_context(nlp, sc_xo, sc_i, sc_yo);
      const auto ci = ci_score(nlp, ctx, sc_y, c.ci);
      const auto baseline = sc_x.empty() ? sc_xo : sc_x;
      const auto scorers = make_scorers(c, nlp);
      const ScoreQuery q{sc_y, baseline, &ctx};
      std::cout << "ci_raw " << ci.raw << "\n"
                << "ci_thresholded " << ci.thresholded << "\n";
      const auto parts = score_components(q, scorers);
      for (std::size_t k = 0; k < parts.size(); ++k) std::cout << scorers.scorers[k]->name() << " " << parts[k] << "\n";
      std::cout << "reward " << terminal_reward(q, scorers) << "\n";
    } else if (*ev) {
      const auto c = resolve(g);
      const auto test = read_jsonl(ev_data);
      if (!ev_names.empty() && ev_names.size() != ev_ckpts.size()) {
        throw CLI::ValidationError("--name", "one name per checkpoint required");
      }
      const auto scorers = make_scorers(c, nlp);
      std::vector<std::pair<std::string, MethodEvaluation>> rows;
      if (!ev_no_reference) {
        std::size_t next = 0;
        rows.emplace_back("reference", evaluate_method([&](std::string_view, std::string_view) { return test[next++].y; },
                                                       test, nlp, scorers));
      }
      for (std::size_t k = 0; k < ev_ckpts.size(); ++k) {
        const auto ck = load_with_vocab(ev_ckpts[k]);
        const auto name = ev_names.empty() ? fs::path(ev_ckpts[k]).stem().string() : ev_names[k];
        rows.emplace_back(name, evaluate_model(ck.model, *ck.meta.vocab, test, nlp, scorers, c.sampling));
      }
      const std::vector<MetricTable> tables{evaluation_table(fs::path(ev_data).filename().string(), rows)};
      ensure_parent(ev_out);
      emit_report(tables, ev_out);
      std::cout << format_report_text(tables);
    } else if (*qs) {
      const auto c = resolve(g, (fs::path(PROMPTRL_CONFIG_DIR) / "quickstart.toml").string());
      const auto r = run_quickstart(c, qs_out, std::cerr);
      std::cout << "sft loss " << r.sft_initial_loss << " -> " << r.sft_final_loss << "\n"
                << "mean reward sft " << r.sft.get("reward") << ", sft+rl " << r.rl.get("reward") << "\n"
                << "report " << (fs::path(qs_out) / "report.txt").string() << "\n";
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
