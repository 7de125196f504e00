// Acceptance checks. Each check prints exactly one PASS/FAIL line.
//   promptrl_acceptance            run every check
//   promptrl_acceptance <name>     run one check

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "promptrl/app.hpp"
#include "promptrl/checkpoint.hpp"

using namespace promptrl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int prec = 4) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
  return buf;
}

// Replaces whole tokens of `text` equal to `from`.
std::string replace_token(const std::string& text, const std::string& from, const std::string& to) {
  auto toks = split_tokens(text);
  std::string out;
  bool done = false;
  for (auto& t : toks) {
    if (!done && t == from) {
      t = to;
      done = true;
    }
    out += (out.empty() ? "" : " ") + t;
  }
  return out;
}

Outcome ci_oracle() {
  const auto t0 = Clock::now();
  const auto& nlp = default_engine();
  const auto corpus = generate_synthetic_corpus(200, 101);
  std::mt19937_64 rng(7);
  long compared = 0, mismatched = 0;
  for (const auto& t : corpus) {
    const auto& x_o = *t.x_o;
    const auto& y_o = *t.y_o;
    std::vector<std::string> candidates{t.y, y_o, t.x, x_o, t.i, ""};
    // drop random words
    const auto words = NlpEngine::split_words(t.y);
    std::string dropped;
    for (const auto& w : words) {
      if (rng() % 3 != 0) dropped += w + " ";
    }
    candidates.push_back(dropped);
    // swap keywords for synonyms
    std::string swapped = t.y;
    for (const auto& k : oracle::keywords(nlp, y_o)) {
      const auto& group = nlp.synonym_dict().group(k);
      if (group.size() > 1) {
        std::vector<std::string> g(group.begin(), group.end());
        swapped = replace_token(swapped, k, g[rng() % g.size()]);
      }
    }
    candidates.push_back(swapped);
    const auto ctx = build_context(nlp, x_o, t.i, y_o);
    for (const auto& y : candidates) {
      const double expect = oracle::ci_raw(nlp, x_o, t.i, y_o, y);
      const auto got = ci_score(nlp, ctx, y);
      const double expect_thr = expect >= 0.7 ? expect : 0.0;
      ++compared;
      if (got.raw != expect || got.thresholded != expect_thr) ++mismatched;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatched == 0 && secs < 5.0, std::to_string(compared) + " scores over 200 triplets, " +
                                             std::to_string(mismatched) + " mismatches, " + num(secs, 3) + " s"};
}

Outcome ci_threshold_inclusive() {
  const auto& nlp = default_engine();
  const auto ten = build_context(nlp, "x", "y", "cat dog horse ship house tree river castle car flower");
  const auto at = ci_score(nlp, ten, "cat dog horse ship house tree river");
  const auto below = ci_score(nlp, ten, "cat dog horse ship house tree");
  CiOptions opt;
  const bool pass = opt.threshold == 0.7 && at.raw == 0.7 && at.thresholded == 0.7 && below.raw == 0.6 &&
                    below.thresholded == 0.0;
  return {pass, "raw 0.7 -> " + num(at.thresholded) + ", raw 0.6 -> " + num(below.thresholded)};
}

Outcome gae_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> len(1, 50);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int T = len(rng);
    std::vector<double> r(T), v(T);
    for (int t = 0; t < T; ++t) {
      r[t] = n(rng);
      v[t] = n(rng);
    }
    const auto got = compute_gae(r, v, 0.99, 0.95);
    const auto want = oracle::gae_quadratic(r, v, 0.99, 0.95);
    for (int t = 0; t < T; ++t) {
      worst = std::max(worst, std::abs(got.advantages[t] - want[t]));
      worst = std::max(worst, std::abs(got.returns[t] - (want[t] + v[t])));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 5.0, "1000 trajectories, max abs error " + num(worst, 3) + ", " + num(secs, 3) + " s"};
}

Outcome vci_shift() {
  const auto& nlp = default_engine();
  const auto corpus = generate_synthetic_corpus(100, 23);
  std::vector<std::string> texts;
  for (const auto& t : corpus) texts.push_back(t.y);
  const auto vocab = Vocab::build(texts);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.5);
  bool identical = true;
  double worst_shift = 0.0;
  for (const auto& rec : corpus) {
    Trajectory traj;
    traj.tokens = tokenize(rec.y, vocab);
    traj.tokens.push_back(Vocab::kEos);
    traj.values.resize(traj.size());
    traj.per_step_rewards.resize(traj.size());
    for (std::size_t t = 0; t < traj.size(); ++t) {
      traj.values[t] = n(rng);
      traj.per_step_rewards[t] = 0.01 * n(rng);
    }
    traj.per_step_rewards.back() += 0.7;
    const auto ctx = build_context(nlp, *rec.x_o, rec.i, *rec.y_o);

    const auto plain = compute_gae(traj.per_step_rewards, traj.values, 0.99, 0.95);
    const auto zero = compute_gae(traj.per_step_rewards, augment_values_vci(nlp, traj, ctx, vocab, 0.0), 0.99, 0.95);
    identical = identical && plain.advantages == zero.advantages && plain.returns == zero.returns;

    const auto vhat = augment_values_vci(nlp, traj, ctx, vocab, 0.05);
    for (std::size_t t = 0; t < traj.size(); ++t) {
      std::vector<TokenId> prefix(traj.tokens.begin(), traj.tokens.begin() + static_cast<std::ptrdiff_t>(t));
      const double ci = oracle::ci_raw(nlp, *rec.x_o, rec.i, *rec.y_o, detokenize(prefix, vocab));
      worst_shift = std::max(worst_shift, std::abs((vhat[t] - traj.values[t]) - 0.05 * ci));
    }
  }
  const bool pass = identical && worst_shift <= 1e-15;
  return {pass, std::string("alpha 0 ") + (identical ? "bit-identical" : "differs") +
                    " over 100 trajectories, alpha 0.05 max shift error " + num(worst_shift, 3)};
}

Outcome typical_set_mass() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(19);
  std::uniform_int_distribution<int> size(2, 400);
  std::uniform_real_distribution<double> conc(-3.0, 1.0);
  Rng rng(3, 0);
  const double p = 0.97;
  long bad_mass = 0, bad_minimal = 0, outside = 0;
  for (int k = 0; k < 10000; ++k) {
    const int V = size(gen);
    std::gamma_distribution<double> g(std::pow(10.0, conc(gen)), 1.0);
    Eigen::VectorXd dist(V);
    for (int j = 0; j < V; ++j) dist(j) = g(gen) + 1e-300;
    dist /= dist.sum();
    const auto set = typical_set(dist, p);
    double mass = 0.0;
    for (auto id : set) mass += dist(id);
    if (!(mass >= p)) ++bad_mass;
    if (set.size() > 1 && !(mass - dist(set.back()) < p)) ++bad_minimal;
    std::vector<TokenId> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    sample_from(dist, SamplingMode::AdmPositive, p, rng,
                [&](const Eigen::VectorXd&, std::span<const TokenId> permitted, TokenId chosen) {
                  if (!std::binary_search(sorted.begin(), sorted.end(), chosen)) ++outside;
                  if (!std::equal(permitted.begin(), permitted.end(), sorted.begin(), sorted.end())) ++outside;
                });
  }
  const double secs = seconds_since(t0);
  const bool pass = bad_mass == 0 && bad_minimal == 0 && outside == 0 && secs < 10.0;
  return {pass, "10000 distributions: " + std::to_string(bad_mass) + " under mass, " + std::to_string(bad_minimal) +
                    " not minimal, " + std::to_string(outside) + " samples outside, " + num(secs, 3) + " s"};
}

Outcome adm_negative_stats() {
  const auto t0 = Clock::now();
  const auto& nlp = default_engine();
  const auto corpus = generate_synthetic_corpus(10000, 77);
  std::vector<std::string> targets;
  for (const auto& t : corpus) targets.push_back(t.y);
  const auto pool = build_keyword_pool(nlp, targets);
  SamplingConfig cfg;
  Rng rng(12, 2);
  const auto batch = build_negative_batch(nlp, corpus, pool, cfg, rng);
  long selected = 0, removed = 0, modified = 0, bad = 0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& s = batch[k];
    if (!s.selected) {
      if (s.y != corpus[k].y) ++bad;
      continue;
    }
    ++selected;
    const auto& r = s.record;
    if (r.kind == Perturbation::Kind::Removed && !r.fallback) ++removed;
    if (r.kind == Perturbation::Kind::Modified) {
      ++modified;
      const bool same_tag = nlp.tag_word(r.replacement) == r.tag;
      const bool outside_group = !nlp.synonym_dict().are_synonyms(r.original, r.replacement);
      const auto words = NlpEngine::split_words(s.y);
      const bool placed = r.position >= 0 && static_cast<std::size_t>(r.position) < words.size() &&
                          words[static_cast<std::size_t>(r.position)] == r.replacement;
      if (!same_tag || !outside_group || !placed) ++bad;
    }
  }
  const double expect = 10000 * 0.04;
  const double sigma = std::sqrt(10000 * 0.04 * 0.96);
  const double share = static_cast<double>(removed) / static_cast<double>(std::max(1L, selected));
  const double share_sigma = std::sqrt(0.25 / static_cast<double>(std::max(1L, selected)));
  const double secs = seconds_since(t0);
  const bool pass = std::abs(static_cast<double>(selected) - expect) <= 3 * sigma &&
                    std::abs(share - 0.5) <= 3 * share_sigma && bad == 0 && modified > 0 && secs < 30.0;
  return {pass, std::to_string(selected) + " perturbed (400 +- " + num(3 * sigma, 3) + "), removal share " +
                    num(share, 3) + " (0.5 +- " + num(3 * share_sigma, 3) + "), " + std::to_string(modified) +
                    " modified, " + std::to_string(bad) + " violations, " + num(secs, 3) + " s"};
}

ModelConfig micro_config() {
  ModelConfig c;
  c.vocab_size = 8;
  c.d_model = 4;
  c.n_layers = 1;
  c.n_heads = 2;
  c.max_len = 8;
  c.seed = 11;
  return c;
}

// Worst coordinate of |fd - g| / max(|fd|, |g|, 1e-6) with central differences.
double fd_worst(PolicyModel<double>& m, const std::function<double()>& f, const Eigen::VectorXd& g) {
  const double h = 1e-5;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < m.num_parameters(); ++k) {
    const double keep = m.parameters()(k);
    m.parameters()(k) = keep + h;
    const double up = f();
    m.parameters()(k) = keep - h;
    const double down = f();
    m.parameters()(k) = keep;
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(fd - g(k)) / std::max({std::abs(fd), std::abs(g(k)), 1e-6}));
  }
  return worst;
}

Outcome fd_gradients() {
  const auto t0 = Clock::now();
  PolicyModel<double> m(micro_config());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Eigen::Index k = 0; k < m.num_parameters(); ++k) m.parameters()(k) += 0.3 * n(rng);

  const std::vector<SftExample> sft{{{1, 4, 5}, {6, 7, 2}, false}, {{1, 3}, {4, 4, 5, 2}, false}, {{1, 6, 6, 7}, {2}, false}};
  Eigen::VectorXd g_sft = Eigen::VectorXd::Zero(m.num_parameters());
  sft_loss_and_grad(m, std::span<const SftExample>(sft), g_sft);
  const double sft_err = fd_worst(m, [&] { return sft_loss(m, std::span<const SftExample>(sft)).token_nll; }, g_sft);

  const auto ref = clone_reference(m);
  PpoConfig cfg;
  std::vector<Trajectory> batch;
  long clipped = 0;
  for (int b = 0; b < 3; ++b) {
    auto t = forced_trajectory(m, ref, {1, static_cast<TokenId>(3 + b)}, {5, 6, 7, static_cast<TokenId>(2 + b)});
    for (std::size_t s = 0; s < t.size(); ++s) {
      // behaviour log-probs put ratios on both sides of the clip range, away from its edges
      const double offsets[] = {0.0, 0.1, -0.1, 0.4, -0.5};
      t.logprobs[s] -= offsets[(b + s) % 5];
      clipped += std::abs(offsets[(b + s) % 5]) > 0.3 ? 1 : 0;
    }
    t.advantages.resize(t.size());
    for (auto& a : t.advantages) a = n(rng);
    t.returns = t.values;
    t.value_targets.resize(t.size());
    for (std::size_t s = 0; s < t.size(); ++s) t.value_targets[s] = t.values[s] + n(rng);
    batch.push_back(std::move(t));
  }
  Eigen::VectorXd g_ppo = Eigen::VectorXd::Zero(m.num_parameters());
  ppo_losses(m, std::span<const Trajectory>(batch), cfg, &g_ppo);
  const double ppo_err = fd_worst(m, [&] { return ppo_losses(m, std::span<const Trajectory>(batch), cfg).total; }, g_ppo);
  const double secs = seconds_since(t0);
  const bool pass = m.num_parameters() <= 500 && clipped > 0 && sft_err < 1e-4 && ppo_err < 1e-4 && secs < 60.0;
  return {pass, std::to_string(m.num_parameters()) + " parameters, sft rel error " + num(sft_err, 3) +
                    ", ppo rel error " + num(ppo_err, 3) + ", " + num(secs, 3) + " s"};
}

Outcome config_defaults() {
  AppConfig c;
  apply_config_text(c, "");
  std::vector<std::string> wrong;
  auto want = [&](const char* name, double got, double expect) {
    if (got != expect) wrong.push_back(std::string(name) + "=" + num(got, 10));
  };
  want("sft.epochs", c.sft.epochs, 3);
  want("rm.epochs", c.rm.epochs, 1);
  want("ppo.epochs", c.ppo.epochs, 5);
  want("sft.batch_size", c.sft.batch_size, 64);
  want("rm.batch_size", c.rm.batch_size, 64);
  want("ppo.batch_size", c.ppo.batch_size, 128);
  want("sft.max_len", c.sft.max_len, 384);
  want("rm.max_len", c.rm.max_len, 384);
  want("ppo.max_len", c.ppo.max_len, 384);
  want("sft.lr", c.sft.lr, 2e-5);
  want("rm.lr", c.rm.lr, 5e-6);
  want("ppo.lr", c.ppo.lr, 5e-6);
  want("sft.weight_decay", c.sft.weight_decay, 0.0);
  want("rm.weight_decay", c.rm.weight_decay, 1e-3);
  want("ppo.weight_decay", c.ppo.weight_decay, 1e-6);
  want("ppo.kl_coef", c.ppo.kl_coef, 0.05);
  want("ppo.clip_range", c.ppo.clip_range, 0.2);
  want("ppo.value_loss_scale", c.ppo.value_loss_scale, 0.5);
  want("sft.adam_eps", c.sft.adam_eps, 1e-8);
  want("ppo.adam_eps", c.ppo.adam_eps, 1e-8);
  want("sft.beta1", c.sft.beta1, 0.9);
  want("sft.beta2", c.sft.beta2, 0.95);
  want("ppo.beta1", c.ppo.beta1, 0.9);
  want("ppo.beta2", c.ppo.beta2, 0.95);
  std::string detail = "24 values checked";
  for (const auto& w : wrong) detail += ", " + w;
  return {wrong.empty(), detail};
}

// Held-out reward averaged over a fixed set of sampling streams.
double heldout_reward(const PolicyModel<float>& model, const Vocab& vocab, std::span<const PromptTriplet> test,
                      const ScorerSet& scorers, const SamplingConfig& base, int draws) {
  double sum = 0.0;
  for (int d = 0; d < draws; ++d) {
    SamplingConfig sc = base;
    sc.seed = 1000 + static_cast<std::uint64_t>(d);
    sum += evaluate_model(model, vocab, test, default_engine(), scorers, sc).get("reward");
  }
  return sum / draws;
}

Outcome quickstart() {
  const auto t0 = Clock::now();
  AppConfig cfg = load_config(fs::path(PROMPTRL_CONFIG_DIR) / "quickstart.toml");
  cfg.propagate_seed();
  const auto& nlp = default_engine();
  const auto corpus = prepare_corpus(cfg, nlp);
  auto model = new_model(cfg, corpus.vocab);
  const auto log = train_sft(model, corpus.train, corpus.vocab, cfg.sft);
  double first = 0.0, last = 0.0;
  for (const auto& r : log.records) {
    if (r.phase != "sft_eval") continue;
    if (r.get("epoch") == 0.0) first = r.get("loss");
    last = r.get("loss");
  }
  const auto scorers = make_scorers(cfg, nlp);
  const int draws = 4;
  const double base = heldout_reward(model, corpus.vocab, corpus.test, scorers, cfg.sampling, draws);

  const int seeds = 5;
  std::vector<double> after(seeds, 0.0);
  const unsigned workers = std::max(1u, std::min<unsigned>(seeds, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int s = static_cast<int>(w); s < seeds; s += static_cast<int>(workers)) {
        auto m = model;
        const auto ref = clone_reference(m);
        auto pc = cfg.ppo;
        pc.seed = cfg.seed + static_cast<std::uint64_t>(s);
        train_rl(m, ref, corpus.train, corpus.vocab, nlp, pc, scorers);
        after[static_cast<std::size_t>(s)] = heldout_reward(m, corpus.vocab, corpus.test, scorers, cfg.sampling, draws);
      }
    });
  }
  for (auto& t : pool) t.join();
  int raised = 0;
  std::string per_seed;
  for (int s = 0; s < seeds; ++s) {
    raised += after[static_cast<std::size_t>(s)] > base ? 1 : 0;
    per_seed += (s ? " " : "") + num(after[static_cast<std::size_t>(s)] - base, 3);
  }
  const double secs = seconds_since(t0);
  const bool pass = last < 0.1 * first && raised >= 4 && secs < 900.0;
  return {pass, "sft loss " + num(first) + " -> " + num(last) + ", held-out reward " + num(base) + ", rl deltas [" +
                    per_seed + "], " + std::to_string(raised) + "/5 raised, " + num(secs, 4) + " s on " +
                    std::to_string(std::thread::hardware_concurrency()) + " threads"};
}

Outcome ranking_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(29);
  double worst = 0.0;
  long ties = 0;
  for (int k = 0; k < 1000; ++k) {
    MetricTable t;
    t.methods = {"a", "b", "c", "d"};
    for (int j = 0; j < 6; ++j) {
      t.metrics.push_back({"m" + std::to_string(j), rng() % 2 ? Direction::HigherBetter : Direction::LowerBetter});
    }
    for (int m = 0; m < 4; ++m) {
      std::vector<std::optional<double>> row;
      for (int j = 0; j < 6; ++j) {
        if (rng() % 10 == 0) {
          row.emplace_back(std::nullopt);
        } else {
          row.emplace_back(static_cast<double>(rng() % 4) * 0.25);
        }
      }
      t.values.push_back(row);
    }
    // every method keeps at least one value
    for (auto& row : t.values) {
      if (!row[0]) row[0] = 0.5;
    }
    const auto got = average_ranking(t);
    std::vector<double> sum(4, 0.0), cnt(4, 0.0);
    for (int j = 0; j < 6; ++j) {
      std::vector<std::optional<double>> col;
      for (int m = 0; m < 4; ++m) col.push_back(t.values[m][j]);
      for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) ties += col[a] && col[b] && *col[a] == *col[b];
      }
      const auto r = oracle::column_ranks_exhaustive(col, t.metrics[j].direction == Direction::HigherBetter);
      for (int m = 0; m < 4; ++m) {
        if (col[m]) {
          sum[m] += r[m];
          cnt[m] += 1;
        }
      }
    }
    for (int m = 0; m < 4; ++m) worst = std::max(worst, std::abs(got[m] - sum[m] / cnt[m]));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && ties > 0 && secs < 5.0, "1000 tables, " + std::to_string(ties) +
                                                        " tied pairs, max abs error " + num(worst, 3) + ", " +
                                                        num(secs, 3) + " s"};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

Outcome cli_determinism() {
  const fs::path root = fs::path(PROMPTRL_WORK_DIR) / "cli_determinism";
  const std::string cli = PROMPTRL_CLI;
  const std::string tiny =
      "seed = 5\n"
      "[model]\nd_model = 16\nn_layers = 2\nn_heads = 2\nmax_len = 96\n"
      "[sft]\nepochs = 2\nbatch_size = 16\nlr = 3e-3\nmax_len = 96\n"
      "[ppo]\nepochs = 1\nbatch_size = 16\nlr = 1e-4\nmax_len = 96\nmax_new_tokens = 24\n"
      "[sampling]\nmax_new_tokens = 24\n"
      "[data]\nn = 120\nholdout = 20\n";
  const std::vector<std::pair<std::string, std::string>> commands{
      {"gen-data", "gen-data --n 120 --out corpus.jsonl"},
      {"gen-data-pipeline", "gen-data --source pipeline --n 40 --out pipeline.jsonl"},
      {"build-vocab", "build-vocab --data corpus.jsonl --out vocab.txt"},
      {"sft", "sft --data corpus.jsonl --vocab vocab.txt --out-dir sft"},
      {"rl", "rl --data corpus.jsonl --ckpt sft/sft.ckpt --out-dir rl"},
      {"infer", "infer --ckpt rl/rl.ckpt --x 'a red cat on a hill, 4k' --i 'add a hat' --count 3"},
      {"score", "score --x-o 'a red cat on a hill' --i 'add a hat' --y-o 'a red cat with a hat on a hill' "
                "--y 'a red cat with a hat, 4k'"},
      {"eval", "eval --data corpus.jsonl --ckpt sft/sft.ckpt --ckpt rl/rl.ckpt --out report"},
      {"quickstart", "quickstart --out-dir qs"},
  };
  std::vector<std::map<std::string, std::string>> runs;
  std::string failed;
  for (int run = 0; run < 2; ++run) {
    const auto dir = root / ("run" + std::to_string(run));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "tiny.toml") << tiny;
    for (const auto& [name, args] : commands) {
      const std::string cmd = "cd '" + dir.string() + "' && '" + cli + "' --config tiny.toml " + args + " > " + name +
                              ".stdout 2> " + name + ".stderr";
      if (std::system(cmd.c_str()) != 0 && failed.empty()) failed = name;
    }
    runs.push_back(snapshot(dir));
  }
  std::vector<std::string> differing;
  for (const auto& [file, content] : runs[0]) {
    const auto it = runs[1].find(file);
    if (it == runs[1].end() || it->second != content) differing.push_back(file);
  }
  if (runs[0].size() != runs[1].size()) differing.push_back("(file sets)");
  std::string detail = std::to_string(commands.size()) + " commands, " + std::to_string(runs[0].size()) +
                       " files compared, " + std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) detail += " " + d;
  if (!failed.empty()) detail += ", command failed: " + failed;
  return {differing.empty() && failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"ci_oracle", ci_oracle},
      {"ci_threshold_inclusive", ci_threshold_inclusive},
      {"gae_oracle", gae_oracle},
      {"vci_shift", vci_shift},
      {"typical_set", typical_set_mass},
      {"adm_negative", adm_negative_stats},
      {"fd_gradients", fd_gradients},
      {"config_defaults", config_defaults},
      {"quickstart", quickstart},
      {"ranking_oracle", ranking_oracle},
      {"cli_determinism", cli_determinism},
  };
  bool all = true, found = false;
  for (const auto& [name, fn] : checks) {
    if (argc > 1 && name != argv[1]) continue;
    found = true;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    all = all && o.pass;
  }
  if (!found) {
    std::cerr << "unknown check " << argv[1] << "\n";
    return 2;
  }
  return all ? 0 : 1;
}
